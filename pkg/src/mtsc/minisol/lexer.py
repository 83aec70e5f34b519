"""Tokenizer for MiniSol source text.

Token set (frozen, documented in the README): identifiers, unsigned decimal
integer literals (underscores allowed), punctuation, and the keyword list
below. `msg.sender` and `msg.value` are lexed as three tokens and assembled
by the parser.
"""

from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message


KEYWORDS = {
    "contract", "fn", "fallback", "payable",
    "uint", "bool", "addr", "map",
    "require", "revert", "if", "else", "let", "return", "emit",
    "lowcall", "dcall", "send", "transfer", "value", "gas",
    "msg", "this", "gasleft", "balance",
    "true", "false",
}

PUNCT = [
    "&&", "||", "==", "!=", "<=", ">=", "+=", "-=",
    "{", "}", "(", ")", "[", "]", ";", ",", ".", ":",
    "=", "<", ">", "+", "-", "*", "!",
]


@dataclass
class Token:
    type: str  # keyword text, punct text, "IDENT", "INT", or "EOF"
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and (source[i].isdigit() or source[i] == "_"):
                i += 1
            text = source[start:i]
            tokens.append(Token("INT", text, line, col))
            col += i - start
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            text = source[start:i]
            ttype = text if text in KEYWORDS else "IDENT"
            tokens.append(Token(ttype, text, line, col))
            col += i - start
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                tokens.append(Token(p, p, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise ParseError(line, col, f"unexpected character {ch!r}")
    tokens.append(Token("EOF", "", line, col))
    return tokens

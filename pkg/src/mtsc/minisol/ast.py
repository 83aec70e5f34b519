"""AST node definitions for the MiniSol contract language.

Nodes carry source positions for diagnostics; positions are excluded from
equality so that parse -> pretty-print -> parse round-trips compare equal.
Agent synthesis builds these nodes directly, without going through the
parser, so every node is constructible with plain values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union


class Kind(str, Enum):
    """Declared kinds for state variables and parameters."""

    UINT = "uint"
    BOOL = "bool"
    ADDR = "addr"
    MAP = "map"  # addr -> uint; state variables only


def _pos():
    return field(default=0, compare=False)


@dataclass
class Node:
    line: int = _pos()
    col: int = _pos()


# --------------------------------------------------------------------------
# Expressions
# --------------------------------------------------------------------------


@dataclass
class IntLit(Node):
    value: int = 0


@dataclass
class BoolLit(Node):
    value: bool = False


@dataclass
class AddrLit(Node):
    """Literal account address. Not produced by the parser; used by
    generated code (agent contracts) that must reference concrete accounts."""

    value: str = ""


@dataclass
class Var(Node):
    """Reference to a parameter, local, or scalar state variable."""

    name: str = ""


@dataclass
class MapIndex(Node):
    name: str = ""
    key: "Expr" = None


@dataclass
class Binary(Node):
    op: str = ""  # + - * == != < <= > >= && ||
    left: "Expr" = None
    right: "Expr" = None


@dataclass
class Not(Node):
    operand: "Expr" = None


@dataclass
class MsgSender(Node):
    pass


@dataclass
class MsgValue(Node):
    pass


@dataclass
class This(Node):
    pass


@dataclass
class GasLeft(Node):
    pass


@dataclass
class BalanceOf(Node):
    target: "Expr" = None


@dataclass
class LowCall(Node):
    """Low-level call: failure is swallowed, yields bool."""

    target: "Expr" = None
    function: Optional[str] = None  # None = plain value transfer
    args: list = field(default_factory=list)
    value: Optional["Expr"] = None
    gas: Optional["Expr"] = None


@dataclass
class DirectCall(Node):
    """Direct call: failure propagates to the caller. No usable result."""

    target: "Expr" = None
    function: str = ""
    args: list = field(default_factory=list)
    value: Optional["Expr"] = None


@dataclass
class Send(Node):
    """Stipend-limited value transfer, yields bool on failure."""

    target: "Expr" = None
    value: "Expr" = None


@dataclass
class Transfer(Node):
    """Stipend-limited value transfer, failure propagates."""

    target: "Expr" = None
    value: "Expr" = None


Expr = Union[
    IntLit, BoolLit, AddrLit, Var, MapIndex, Binary, Not,
    MsgSender, MsgValue, This, GasLeft, BalanceOf,
    LowCall, DirectCall, Send, Transfer,
]


# --------------------------------------------------------------------------
# Statements
# --------------------------------------------------------------------------


@dataclass
class Require(Node):
    condition: Expr = None


@dataclass
class Revert(Node):
    pass


@dataclass
class If(Node):
    condition: Expr = None
    then: list = field(default_factory=list)
    otherwise: list = field(default_factory=list)


@dataclass
class Let(Node):
    name: str = ""
    value: Expr = None


@dataclass
class Assign(Node):
    target: Union[Var, MapIndex] = None
    op: str = "="  # = += -=
    value: Expr = None


@dataclass
class Return(Node):
    value: Optional[Expr] = None


@dataclass
class Emit(Node):
    """Event emission placeholder: fixed gas cost, no other effect."""

    name: str = ""
    args: list = field(default_factory=list)


@dataclass
class ExprStmt(Node):
    expr: Expr = None


Stmt = Union[Require, Revert, If, Let, Assign, Return, Emit, ExprStmt]


# --------------------------------------------------------------------------
# Declarations
# --------------------------------------------------------------------------


@dataclass
class Param(Node):
    name: str = ""
    kind: Kind = Kind.UINT


@dataclass
class StateVar(Node):
    name: str = ""
    kind: Kind = Kind.UINT


@dataclass
class FunctionDef(Node):
    name: str = ""
    params: list = field(default_factory=list)
    payable: bool = False
    body: list = field(default_factory=list)


@dataclass
class FallbackDef(Node):
    payable: bool = False
    body: list = field(default_factory=list)


@dataclass
class ContractDef(Node):
    name: str = ""
    state_vars: list = field(default_factory=list)
    functions: list = field(default_factory=list)
    fallback: Optional[FallbackDef] = None

    def function(self, name: str) -> Optional[FunctionDef]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    def state_var(self, name: str) -> Optional[StateVar]:
        for sv in self.state_vars:
            if sv.name == name:
                return sv
        return None


@dataclass
class SourceUnit(Node):
    contracts: list = field(default_factory=list)
    source_name: str = "<string>"

    def contract(self, name: str) -> Optional[ContractDef]:
        for c in self.contracts:
            if c.name == name:
                return c
        return None

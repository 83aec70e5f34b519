"""World state: accounts, balances, contract storage, and snapshots.

A WorldState is single-owner; one execution runs against it at a time.
Snapshots capture the full state including the address counter, so a
deploy after a restore reassigns the same address. The fee ledger
accumulates gas charges separately from account balances, so balance
deltas compare cleanly across externally-owned and contract actors.
"""

from __future__ import annotations

import copy
import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from ..minisol import ast

ZERO_ADDR = ""


class AccountKind(str, Enum):
    EOA = "EOA"
    CONTRACT = "Contract"


class UnknownSnapshot(Exception):
    pass


@dataclass
class Account:
    address: str
    balance: int
    kind: AccountKind
    code: Optional[ast.ContractDef] = None
    # scalar vars keyed by name, map entries keyed by (name, addr)
    storage: dict = field(default_factory=dict)

    def storage_read(self, key, default):
        return self.storage.get(key, default)

    def storage_write(self, key, value):
        self.storage[key] = value

    def __deepcopy__(self, memo):
        # storage holds immutables and code never mutates after deploy,
        # so account snapshots are cheap flat copies
        return Account(self.address, self.balance, self.kind, self.code,
                       dict(self.storage))


def default_for(kind: ast.Kind):
    if kind == ast.Kind.UINT:
        return 0
    if kind == ast.Kind.BOOL:
        return False
    if kind == ast.Kind.ADDR:
        return ZERO_ADDR
    raise ValueError(f"no scalar default for {kind}")


def is_zero(value) -> bool:
    return value in (0, False, ZERO_ADDR)


@dataclass
class WorldState:
    accounts: dict = field(default_factory=dict)
    fee_ledger: int = 0
    next_address: int = 1
    _journal: list = field(default_factory=list, repr=False)
    _snapshot_seq: int = 0

    # -- accounts ----------------------------------------------------------

    def _fresh_address(self) -> str:
        addr = f"0x{self.next_address:04x}"
        self.next_address += 1
        return addr

    def create_eoa(self, balance: int = 0) -> str:
        addr = self._fresh_address()
        self.accounts[addr] = Account(addr, balance, AccountKind.EOA)
        return addr

    def account(self, addr: str) -> Account:
        return self.accounts[addr]

    def has_account(self, addr: str) -> bool:
        return addr in self.accounts

    def fund(self, addr: str, amount: int):
        """Scenario-setup value creation; the one sanctioned balance source."""
        self.accounts[addr].balance += amount

    def balance_of(self, addr: str) -> int:
        acct = self.accounts.get(addr)
        return acct.balance if acct else 0

    # -- snapshots -----------------------------------------------------------

    def _blob(self):
        return (copy.deepcopy(self.accounts), self.fee_ledger, self.next_address)

    def snapshot(self) -> int:
        self._snapshot_seq += 1
        sid = self._snapshot_seq
        self._journal.append((sid, self._blob()))
        return sid

    def restore(self, snapshot_id: int):
        """Rewind to a snapshot. Consumes it and anything taken after it."""
        for i in range(len(self._journal) - 1, -1, -1):
            sid, blob = self._journal[i]
            if sid == snapshot_id:
                accounts, fees, next_addr = blob
                self.accounts = accounts
                self.fee_ledger = fees
                self.next_address = next_addr
                del self._journal[i:]
                return
        raise UnknownSnapshot(f"snapshot {snapshot_id} not on the journal")

    def clone(self) -> "WorldState":
        """Independent copy with an empty journal; used to isolate test runs."""
        accounts, fees, next_addr = self._blob()
        return WorldState(accounts=accounts, fee_ledger=fees, next_address=next_addr)

    def digest(self) -> str:
        """Canonical content hash covering accounts, fees, and the counter."""
        h = hashlib.sha256()
        h.update(f"fees={self.fee_ledger};next={self.next_address};".encode())
        for addr in sorted(self.accounts):
            acct = self.accounts[addr]
            code_name = acct.code.name if acct.code else ""
            h.update(f"{addr}|{acct.balance}|{acct.kind.value}|{code_name}|".encode())
            for key in sorted(acct.storage, key=repr):
                h.update(f"{key!r}={acct.storage[key]!r};".encode())
        return h.hexdigest()


def deploy(state: WorldState, code: ast.ContractDef, initial_balance: int = 0) -> str:
    """Create a contract account for validated code at the next address."""
    addr = state._fresh_address()
    state.accounts[addr] = Account(addr, initial_balance, AccountKind.CONTRACT, code=code)
    return addr

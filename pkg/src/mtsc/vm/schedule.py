"""Gas schedule: per-operation costs and the block gas limit.

Defaults follow mainnet-like magnitudes. A schedule can be loaded from a
flat `key=value` text file; unknown keys are rejected, missing keys keep
their defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class GasSchedule:
    base_tx: int = 21_000
    dispatch: int = 100
    arith: int = 3
    compare: int = 3
    logic: int = 3
    sload: int = 200
    sstore_set: int = 20_000    # storage slot changed from zero to non-zero
    sstore_reset: int = 5_000   # any other storage write
    call_base: int = 700
    value_transfer_surcharge: int = 9_000
    stipend: int = 2_300        # gas granted to the callee of a value transfer
    emit: int = 375
    require: int = 10
    revert: int = 0
    balance_of: int = 20
    gasleft: int = 2
    block_gas_limit: int = 30_000_000

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"gas schedule entry {f.name} must be a non-negative int")
        if self.sstore_set <= self.sstore_reset:
            raise ValueError("sstore_set must exceed sstore_reset")


class ScheduleError(Exception):
    pass


def load_schedule(path: str) -> GasSchedule:
    """Parse a key=value schedule file. Blank lines and #-comments skipped."""
    known = {f.name for f in fields(GasSchedule)}
    overrides: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ScheduleError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ScheduleError(f"{path}:{lineno}: unknown schedule key {key!r}")
            try:
                overrides[key] = int(value.strip().replace("_", ""))
            except ValueError:
                raise ScheduleError(f"{path}:{lineno}: {key} needs an integer value")
    try:
        return GasSchedule(**overrides)
    except ValueError as exc:
        raise ScheduleError(f"{path}: {exc}") from exc

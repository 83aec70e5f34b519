"""Intrinsic-gas estimation and the gas-allocation plans for MR1.x.

The estimator probes a transaction's exact gas requirement dynamically:
grow the limit geometrically until a run succeeds, then verify the
measured consumption by re-running at it. Gas-elastic transactions
(recursion guarded by gasleft, reserved-gas calls) need the verification
phase: their first successful run can consume less than its limit, or a
gas reserve can demand headroom above the measured consumption, in which
case the success boundary is bisected. Every probe runs on a snapshot and
restores it, so the caller's state never changes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

from .vm import CallEntered, CallExited, GasSchedule, Outcome, Transaction, WorldState
from .vm import execute as vm_execute

#: runner(state, gas_limit) -> Outcome, executing "the" transaction at that limit
Runner = Callable[[WorldState, int], Outcome]

LOW_LEVEL_FORMS = ("lowcall", "send", "transfer")


class NeverSucceeds(Exception):
    """The transaction fails even at the block gas limit."""

    def __init__(self, status):
        super().__init__(f"transaction never succeeds: {status}")
        self.status = status


@dataclass(frozen=True)
class IntrinsicGas:
    value: int        # smallest verified-sufficient gas limit
    trials: int       # executions spent probing
    converged: bool   # final probe consumed exactly its limit


@dataclass(frozen=True)
class AllocationPlan:
    direction: str              # "Increasing" | "Reducing"
    limits: tuple
    step: int
    n: int
    warning: Optional[str] = None


def tx_runner(tx: Transaction, schedule: GasSchedule) -> Runner:
    return lambda state, limit: vm_execute(state, replace(tx, gas_limit=limit), schedule)


def child_frame_gas(trace, forms=LOW_LEVEL_FORMS) -> int:
    """Gas consumed inside outermost call frames of the given forms."""
    total = 0
    stack = []  # per open frame: True if it is an outermost counted frame
    for ev in trace:
        if isinstance(ev, CallEntered):
            inside = any(stack)
            stack.append(ev.call_form in forms and not inside)
        elif isinstance(ev, CallExited):
            if stack.pop():
                total += ev.gas_used
    return total


def default_initial_estimator(state: WorldState, tx: Optional[Transaction],
                              schedule: GasSchedule,
                              runner: Optional[Runner] = None) -> int:
    """Rough estimate: an ample-gas run minus gas spent inside low-level
    call frames. Deliberately understates transactions with internal
    calls, mirroring how on-chain estimation behaves."""
    run = runner or tx_runner(tx, schedule)
    sid = state.snapshot()
    try:
        out = run(state, schedule.block_gas_limit)
    finally:
        state.restore(sid)
    if not out.ok:
        raise NeverSucceeds(out.status)
    return max(schedule.base_tx, out.gas_consumed - child_frame_gas(out.trace))


def estimate_intrinsic_gas(state: WorldState, tx: Optional[Transaction],
                           schedule: GasSchedule,
                           initial_estimator=None,
                           growth: float = 1.5,
                           runner: Optional[Runner] = None) -> IntrinsicGas:
    """Find the transaction's intrinsic gas requirement.

    Raises NeverSucceeds if the transaction fails at the block gas limit.
    The result satisfies: executing at `value` succeeds. When the final
    probe consumed exactly its limit the result is flagged converged;
    gas-rigid transactions then also fail at `value - 1`.
    """
    if growth <= 1.0:
        raise ValueError("growth factor must exceed 1")
    run = runner or tx_runner(tx, schedule)
    trials = 0

    def probe(limit: int) -> Outcome:
        nonlocal trials
        trials += 1
        sid = state.snapshot()
        try:
            return run(state, limit)
        finally:
            state.restore(sid)

    block = schedule.block_gas_limit
    if initial_estimator is None:
        estimate = default_initial_estimator(state, tx, schedule, runner=run)
    else:
        estimate = initial_estimator(state, tx)

    # growth phase: strictly increasing limits until the first success
    limit = max(1, min(int(estimate), block))
    while True:
        out = probe(limit)
        if out.ok:
            candidate = out.gas_consumed
            break
        if limit >= block:
            raise NeverSucceeds(out.status)
        limit = min(int(limit * growth) + 1, block)

    # verification phase: the reported value must itself suffice
    last_good = limit
    converged = candidate == limit
    while not converged:
        out = probe(candidate)
        if out.ok:
            if out.gas_consumed == candidate:
                converged = True
            else:
                last_good = candidate
                candidate = out.gas_consumed
        else:
            # consumption understates the requirement (a reserve demands
            # headroom): bisect the success boundary in (candidate, last_good]
            lo, hi = candidate + 1, last_good
            while lo < hi:
                mid = (lo + hi) // 2
                if probe(mid).ok:
                    hi = mid
                else:
                    lo = mid + 1
            candidate = lo
            converged = True
    return IntrinsicGas(value=candidate, trials=trials, converged=converged)


def allocate_increasing(gc: int, count: int = 5,
                        block_gas_limit: int = GasSchedule().block_gas_limit) -> AllocationPlan:
    """Follow-up limits {2*gc, 3*gc, ...} capped at the block limit."""
    if gc < 1:
        raise ValueError("intrinsic gas must be at least 1")
    limits = []
    k = 2
    while len(limits) < count and k * gc <= block_gas_limit:
        limits.append(k * gc)
        k += 1
    warning = None
    if not limits:
        warning = f"2*{gc} exceeds the block gas limit {block_gas_limit}"
    return AllocationPlan("Increasing", tuple(limits), step=gc, n=count,
                          warning=warning)


def allocate_reducing(gc: int, n: int = 1000) -> AllocationPlan:
    """Follow-up limits descending from gc in n even steps down to >= 0."""
    if gc < 1 or n < 1:
        raise ValueError("gc and n must be at least 1")
    step = max(1, gc // n)
    limits = []
    g = gc - step
    while g >= 0:
        limits.append(g)
        g -= step
    return AllocationPlan("Reducing", tuple(limits), step=step, n=n)

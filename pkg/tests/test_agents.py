"""Agent contract synthesis and the agent-wrapped interaction view."""

import pytest

from mtsc.agents import (
    AGENT_CALL,
    AgentKind,
    AgentSpec,
    CallPayload,
    agent_interact,
    build_agent_contract,
    make_agent,
)
from mtsc.minisol import ast, parse, validate
from mtsc.scenario import build_environment, load_scenario
from mtsc.traces import paired_calls
from mtsc.vm import FailReason, GasSchedule, Transaction, WorldState, deploy, execute

from conftest import scenario_path

S = GasSchedule()
PAYLOAD = CallPayload(function="withdraw", args=(1_000,), value=0)


def spec_for(kind, target="0x0002", **kw):
    return AgentSpec(kind=kind, target=target, payload=PAYLOAD, **kw)


@pytest.mark.parametrize("kind", [AgentKind.CAO, AgentKind.CAH,
                                  AgentKind.CAR, AgentKind.CAE])
def test_generated_contracts_validate_clean(kind):
    contract = build_agent_contract(spec_for(kind), "Agent")
    unit = ast.SourceUnit(contracts=[contract], source_name="<agent>")
    assert validate(unit) == []
    assert contract.function(AGENT_CALL) is not None
    assert contract.fallback is not None and contract.fallback.payable


def test_cae_fallback_is_a_single_revert():
    contract = build_agent_contract(spec_for(AgentKind.CAE), "Agent")
    assert contract.fallback.body == [ast.Revert()]


def test_cao_fallback_is_empty():
    contract = build_agent_contract(spec_for(AgentKind.CAO), "Agent")
    assert contract.fallback.body == []


def test_cah_fallback_writes_fresh_slots():
    contract = build_agent_contract(spec_for(AgentKind.CAH, cah_iterations=3), "Agent")
    body = contract.fallback.body
    assert len(body) == 3
    targets = {stmt.target.name for stmt in body}
    assert len(targets) == 3  # distinct slots keep every write zero-to-nonzero


def test_car_fallback_guards_on_remaining_gas():
    contract = build_agent_contract(spec_for(AgentKind.CAR, car_gas_guard=60_000),
                                    "Agent")
    guard = contract.fallback.body[0]
    assert isinstance(guard, ast.If)
    assert isinstance(guard.condition.left, ast.GasLeft)
    assert guard.condition.op == ">"
    assert guard.condition.right.value == 60_000
    reentry = guard.then[0].expr
    assert isinstance(reentry, ast.LowCall)
    assert reentry.function == "withdraw"
    assert reentry.value is None  # re-issued payload carries no value


def test_agent_call_stores_target_then_calls():
    contract = build_agent_contract(spec_for(AgentKind.CAO), "Agent")
    body = contract.function(AGENT_CALL).body
    assert isinstance(body[0], ast.Assign) and body[0].target.name == "target_contract"
    assert isinstance(body[-1], ast.ExprStmt)
    assert isinstance(body[-1].expr, ast.LowCall)


def test_spec_validation():
    with pytest.raises(ValueError):
        AgentSpec(kind=AgentKind.EOA, target="0x0001", payload=PAYLOAD)
    with pytest.raises(ValueError):
        AgentSpec(kind=AgentKind.CAR, target="0x0001", payload=PAYLOAD,
                  car_gas_guard=2_300)
    with pytest.raises(ValueError):
        AgentSpec(kind=AgentKind.CAH, target="0x0001", payload=PAYLOAD,
                  cah_iterations=0)


def test_make_agent_requires_deployed_target():
    state = WorldState()
    with pytest.raises(ValueError):
        make_agent(state, spec_for(AgentKind.CAO, target="0x0099"))


def test_cah_fallback_cost_exceeds_the_stipend():
    # full-forwarding call: the heavy fallback completes and its frame
    # consumption is visible on the trace
    src = "contract P { fn pay(t: addr) { require(lowcall t value 1); } }"
    state = WorldState()
    actor = state.create_eoa(0)
    payer = deploy(state, parse(src).contracts[0], 100)
    agent = make_agent(state, spec_for(AgentKind.CAH, target=payer))
    out = execute(state, Transaction(actor, S.block_gas_limit, payer, "pay",
                                     (agent,), 0), S)
    assert out.ok
    (enter, exited), = paired_calls(out.trace)
    assert enter.callee == agent
    assert exited.success
    assert exited.gas_used > 2_300


def test_cao_matches_eoa_for_every_corpus_scenario(environments):
    for name, env in environments.items():
        eoa = env.run_target(env.state.clone(), AgentKind.EOA, S.block_gas_limit)
        cao = env.run_target(env.state.clone(), AgentKind.CAO, S.block_gas_limit)
        assert eoa.ok == cao.ok, name
        assert eoa.balance_delta == cao.balance_delta, name


def test_car_extracts_more_than_the_requested_amount(environments):
    env = environments["simple_dao_withdraw"]
    out = env.run_target(env.state.clone(), AgentKind.CAR, S.block_gas_limit)
    assert out.ok
    assert out.balance_delta > 1_000_000
    assert out.balance_delta == 63 * 1_000_000  # depth-capped recursion
    # the total-gas audit holds even across deep nesting, swallowed
    # depth failures, and stipend grants
    from mtsc.vm import CallExited, OpExecuted

    ops = sum(ev.gas_cost for ev in out.trace if isinstance(ev, OpExecuted))
    stipends = sum(ev.stipend_used for ev in out.trace if isinstance(ev, CallExited))
    assert out.gas_consumed == ops - stipends


def test_car_recursion_always_terminates(environments):
    env = environments["simple_dao_withdraw"]
    out = env.run_target(env.state.clone(), AgentKind.CAR, S.block_gas_limit)
    max_depth = max(ev.depth for ev in out.trace)
    assert max_depth < 128


def test_heavy_agent_starves_the_stipend_limited_send(environments):
    # the transaction succeeds, yet the agent received nothing and the
    # vault's ledger was debited anyway
    env = environments["simple_dao_withdraw_b"]
    state = env.state.clone()
    dao = env.roles["SimpleDAO"]
    agent = env.actor_accounts[AgentKind.CAH]
    deposited = state.account(dao).storage[("balances", agent)]
    out = env.run_target(state, AgentKind.CAH, S.block_gas_limit)
    assert out.ok
    assert out.balance_delta == 0
    assert state.account(dao).storage[("balances", agent)] == deposited - 1_000_000


def test_cae_fails_transfer_based_payout(environments):
    env = environments["dividend_vault_payout"]
    out = env.run_target(env.state.clone(), AgentKind.CAE, S.block_gas_limit)
    assert not out.ok
    assert out.status.reason == FailReason.REVERT
    assert out.balance_delta == 0


def test_interaction_status_read_from_target_call():
    # AgentCall itself succeeds even when the target call dies; the
    # reported status must reflect the target call
    src = "contract C { fn f() { revert(); } }"
    state = WorldState()
    driver = state.create_eoa(0)
    c = deploy(state, parse(src).contracts[0])
    spec = AgentSpec(kind=AgentKind.CAO, target=c,
                     payload=CallPayload(function="f"))
    agent = make_agent(state, spec)
    out = agent_interact(state, agent, spec, driver, S.block_gas_limit, S)
    assert not out.ok
    assert out.status.reason == FailReason.REVERT


def test_agent_balance_delta_not_the_drivers():
    env = build_environment(load_scenario(scenario_path("simple_dao_withdraw")), S)
    state = env.state.clone()
    driver_before = state.balance_of(env.driver)
    out = env.run_target(state, AgentKind.CAO, S.block_gas_limit)
    assert out.ok
    assert out.balance_delta == 1_000_000          # the agent received the payout
    assert state.balance_of(env.driver) == driver_before

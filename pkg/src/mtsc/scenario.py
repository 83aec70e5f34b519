"""Scenario files (`scenario-v1`) and the execution environment they set up.

A scenario names the contract sources, the starting balances per role,
the setup transactions that give every interacting account its position,
and the target transaction under test. `$ACTOR` is the placeholder for
the interacting account: the plain EOA in source runs, the agent contract
in follow-up runs. Setup entries mentioning `$ACTOR` are instantiated
once per account kind; all instantiations land in one shared world state,
which is snapshotted after setup as the common context every test pair
restores.

Schema (JSON object, unknown keys rejected):

    schema      "scenario-v1"                                 required
    sources     [relative .msol paths]                        required
    balances    {role: wei}; "$ACTOR" funds every actor       required
    setup       [{actor, callee, function, args, value}]      default []
    target      {callee, function, args, value}               required
    mrs         subset of MR1.1 MR1.2 MR2.1 MR2.2 MR2.3       default all
    mr1_actors  subset of EOA CAO CAH CAR CAE                 default EOA,CAH,CAR

Role strings in `actor`, `callee`, and `args` resolve to addresses:
contract names to their deployment, other balance keys to EOAs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .agents import (
    AGENT_KINDS,
    DEFAULT_CAR_GAS_GUARD,
    AgentKind,
    AgentSpec,
    CallPayload,
    agent_interact,
    make_agent,
)
from .minisol import parse, validate
from .vm import GasSchedule, Outcome, Transaction, WorldState, deploy, execute

SCHEMA_V1 = "scenario-v1"
ACTOR = "$ACTOR"
ALL_MRS = ("MR1.1", "MR1.2", "MR2.1", "MR2.2", "MR2.3")
DEFAULT_MR1_ACTORS = (AgentKind.EOA, AgentKind.CAH, AgentKind.CAR)
ALL_ACTOR_KINDS = (AgentKind.EOA,) + AGENT_KINDS


class ScenarioError(Exception):
    pass


@dataclass(frozen=True)
class TxTemplate:
    actor: str               # role or $ACTOR; ignored for the target
    callee: str
    function: Optional[str]  # None = plain value transfer
    args: tuple = ()
    value: int = 0


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    base_dir: Path
    sources: tuple
    balances: dict
    setup: tuple
    target: TxTemplate
    mrs: tuple
    mr1_actors: tuple


def _require(cond: bool, message: str):
    if not cond:
        raise ScenarioError(message)


def _parse_template(obj: dict, where: str, need_actor: bool) -> TxTemplate:
    allowed = {"actor", "callee", "function", "args", "value"}
    _require(isinstance(obj, dict), f"{where} must be an object")
    unknown = set(obj) - allowed
    _require(not unknown, f"{where} has unknown keys {sorted(unknown)}")
    if need_actor:
        _require(isinstance(obj.get("actor"), str), f"{where} needs an actor role")
    _require(isinstance(obj.get("callee"), str), f"{where} needs a callee role")
    function = obj.get("function")
    _require(function is None or isinstance(function, str),
             f"{where}: function must be a name or null")
    args = obj.get("args", [])
    _require(isinstance(args, list), f"{where}: args must be a list")
    for a in args:
        _require(isinstance(a, (int, bool, str)), f"{where}: bad argument {a!r}")
    value = obj.get("value", 0)
    _require(isinstance(value, int) and not isinstance(value, bool) and value >= 0,
             f"{where}: value must be a non-negative integer")
    return TxTemplate(actor=obj.get("actor", ACTOR), callee=obj["callee"],
                      function=function, args=tuple(args), value=value)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON: {exc}") from exc

    _require(isinstance(raw, dict), f"{path}: scenario must be a JSON object")
    allowed = {"schema", "sources", "balances", "setup", "target", "mrs", "mr1_actors"}
    unknown = set(raw) - allowed
    _require(not unknown, f"{path}: unknown keys {sorted(unknown)}")
    _require(raw.get("schema") == SCHEMA_V1,
             f"{path}: schema must be {SCHEMA_V1!r}")
    sources = raw.get("sources")
    _require(isinstance(sources, list) and sources
             and all(isinstance(s, str) for s in sources),
             f"{path}: sources must be a non-empty list of paths")
    balances = raw.get("balances")
    _require(isinstance(balances, dict), f"{path}: balances must be an object")
    for role, amount in balances.items():
        _require(isinstance(role, str), f"{path}: balance roles must be strings")
        _require(isinstance(amount, int) and not isinstance(amount, bool)
                 and amount >= 0, f"{path}: balance of {role!r} must be a non-negative int")
    setup = [
        _parse_template(entry, f"{path}: setup[{i}]", need_actor=True)
        for i, entry in enumerate(raw.get("setup", []))
    ]
    target = _parse_template(raw.get("target"), f"{path}: target", need_actor=False)
    mrs = tuple(raw.get("mrs", ALL_MRS))
    for mr in mrs:
        _require(mr in ALL_MRS, f"{path}: unknown relation {mr!r}")
    kinds = []
    for name in raw.get("mr1_actors", [k.value for k in DEFAULT_MR1_ACTORS]):
        try:
            kinds.append(AgentKind(name))
        except ValueError:
            raise ScenarioError(f"{path}: unknown actor kind {name!r}")

    stem = path.name
    for suffix in (".scenario.json", ".json"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
            break
    return Scenario(scenario_id=stem, base_dir=path.parent, sources=tuple(sources),
                    balances=dict(balances), setup=tuple(setup), target=target,
                    mrs=mrs, mr1_actors=tuple(kinds))


# --------------------------------------------------------------------------
# Environment: one shared world state holding every interacting account
# --------------------------------------------------------------------------


@dataclass
class Environment:
    state: WorldState
    schedule: GasSchedule
    scenario: Scenario
    roles: dict
    actor_accounts: dict          # AgentKind -> address
    agent_specs: dict             # AgentKind -> AgentSpec (agents only)
    driver: str
    context_digest: str = ""

    def resolve(self, token, actor_addr: str):
        if isinstance(token, bool) or isinstance(token, int):
            return token
        if token == ACTOR:
            return actor_addr
        if token in self.roles:
            return self.roles[token]
        raise ScenarioError(f"unresolvable role {token!r}")

    def target_tx(self, kind: AgentKind, gas_limit: int) -> Transaction:
        actor = self.actor_accounts[kind]
        t = self.scenario.target
        args = tuple(self.resolve(a, actor) for a in t.args)
        return Transaction(actor, gas_limit, self.roles[t.callee], t.function,
                           args, t.value)

    def run_target(self, state: WorldState, kind: AgentKind, gas_limit: int) -> Outcome:
        if kind == AgentKind.EOA:
            return execute(state, self.target_tx(kind, gas_limit), self.schedule)
        return agent_interact(state, self.actor_accounts[kind],
                              self.agent_specs[kind], self.driver,
                              gas_limit, self.schedule)

    def runner_for(self, kind: AgentKind):
        return lambda state, limit: self.run_target(state, kind, limit)


def _load_contracts(scenario: Scenario):
    contracts = []
    seen = set()
    for rel in scenario.sources:
        src_path = scenario.base_dir / rel
        try:
            text = src_path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ScenarioError(f"cannot read source {src_path}: {exc}") from exc
        unit = parse(text, str(src_path))
        errors = validate(unit)
        if errors:
            listing = "; ".join(str(e) for e in errors)
            raise ScenarioError(f"{src_path}: semantic errors: {listing}")
        for contract in unit.contracts:
            if contract.name in seen:
                raise ScenarioError(f"contract {contract.name!r} defined twice")
            seen.add(contract.name)
            contracts.append(contract)
    return contracts


def build_environment(scenario: Scenario, schedule: GasSchedule,
                      car_gas_guard: int = DEFAULT_CAR_GAS_GUARD,
                      cah_iterations: int = 1) -> Environment:
    """Deploy contracts, agents, and EOAs; fund them; replay the setup.

    Every actor kind is positioned in the same world state so each test
    pair observes an identical context regardless of which accounts it
    exercises. The returned environment's state is that shared context.
    """
    contracts = _load_contracts(scenario)
    state = WorldState()
    driver = state.create_eoa(0)
    eoa_actor = state.create_eoa(0)

    roles: dict[str, str] = {}
    for contract in contracts:
        roles[contract.name] = deploy(state, contract,
                                      scenario.balances.get(contract.name, 0))
    for role, amount in scenario.balances.items():
        if role == ACTOR or role in roles:
            continue
        roles[role] = state.create_eoa(amount)

    target = scenario.target
    if target.callee not in roles:
        raise ScenarioError(f"target callee {target.callee!r} is not a known role")
    target_addr = roles[target.callee]
    if target.function is not None:
        code = state.account(target_addr).code
        if code is None or code.function(target.function) is None:
            raise ScenarioError(
                f"target function {target.function!r} not found on {target.callee}")

    env = Environment(state=state, schedule=schedule, scenario=scenario,
                      roles=roles, actor_accounts={AgentKind.EOA: eoa_actor},
                      agent_specs={}, driver=driver)

    for kind in AGENT_KINDS:
        predicted = f"0x{state.next_address:04x}"
        payload = CallPayload(
            function=target.function,
            args=tuple(env.resolve(a, predicted) for a in target.args),
            value=target.value,
        )
        spec = AgentSpec(kind=kind, target=target_addr, payload=payload,
                         car_gas_guard=car_gas_guard, cah_iterations=cah_iterations)
        addr = make_agent(state, spec, name=f"Agent{kind.value}")
        assert addr == predicted
        env.actor_accounts[kind] = addr
        env.agent_specs[kind] = spec

    stake = scenario.balances.get(ACTOR, 0)
    for kind in ALL_ACTOR_KINDS:
        state.fund(env.actor_accounts[kind], stake)

    for entry in scenario.setup:
        templated = entry.actor == ACTOR or ACTOR in entry.args
        kinds = ALL_ACTOR_KINDS if templated else (None,)
        for kind in kinds:
            actor_addr = env.actor_accounts[kind] if kind is not None else None
            sender = actor_addr if entry.actor == ACTOR else env.resolve(entry.actor, "")
            args = tuple(env.resolve(a, actor_addr) for a in entry.args)
            tx = Transaction(sender, schedule.block_gas_limit,
                             env.resolve(entry.callee, actor_addr),
                             entry.function, args, entry.value)
            out = execute(state, tx, schedule)
            if not out.ok:
                who = kind.value if kind is not None else entry.actor
                raise ScenarioError(
                    f"setup transaction {entry.function or 'transfer'} failed "
                    f"for {who}: {out.status}")

    env.context_digest = state.digest()
    return env

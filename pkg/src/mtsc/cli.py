"""Command-line frontend: `mtsc check | bench | estimate`.

Exit codes: 0 clean, 1 vulnerabilities found (check), 2 usage or
configuration errors. Runs are fully deterministic; repeated invocations
produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .agents import AgentKind
from .detector import UnknownScenario, Verdict, compute_metrics, emit_report
from .gas_oracle import NeverSucceeds, estimate_intrinsic_gas
from .minisol import ParseError
from .mr_engine import ALL_MRS, EngineConfig, run_all
from .scenario import ALL_ACTOR_KINDS, ScenarioError, build_environment, load_scenario
from .vm import GasSchedule, ScheduleError, load_schedule


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Config:
    schedule: GasSchedule
    engine: EngineConfig
    fmt: str = "text"
    out: Optional[str] = None
    jobs: int = 0  # 0 = number of cores


def _parse_args(argv):
    parser = argparse.ArgumentParser(
        prog="mtsc",
        description="metamorphic testing for smart-contract vulnerabilities")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--schedule", metavar="PATH",
                       help="gas schedule file (key=value lines)")
        p.add_argument("--n", type=int, default=1000,
                       help="subdivisions of the reducing gas sweep (default 1000)")
        p.add_argument("--inc-count", type=int, default=5,
                       help="follow-ups per increasing gas sweep (default 5)")
        p.add_argument("--growth", type=float, default=1.5,
                       help="estimator growth factor (default 1.5)")
        p.add_argument("--car-gas-guard", type=int, default=50_000,
                       help="recursion guard of the CAR agent (default 50000)")
        p.add_argument("--cah-iterations", type=int, default=1,
                       help="storage writes in the CAH fallback (default 1)")
        p.add_argument("--mr", metavar="LIST",
                       help="comma-separated relations to run (restricts scenarios)")
        p.add_argument("--mr1-actors", metavar="LIST",
                       help="comma-separated actor kinds for the gas relations")
        p.add_argument("--format", dest="fmt", choices=("text", "json"),
                       default="text")
        p.add_argument("--out", metavar="PATH", help="write the report to a file")
        p.add_argument("--jobs", type=int, default=0,
                       help="scenario worker processes (default: cpu count)")

    p_check = sub.add_parser("check", help="test one scenario")
    p_check.add_argument("scenario")
    common(p_check)

    p_bench = sub.add_parser("bench", help="run a labeled scenario directory")
    p_bench.add_argument("dir")
    p_bench.add_argument("labels")
    common(p_bench)

    p_est = sub.add_parser("estimate", help="intrinsic gas per actor kind")
    p_est.add_argument("scenario")
    common(p_est)

    return parser.parse_args(argv)


def _build_config(args) -> Config:
    if args.n < 1 or args.inc_count < 1:
        raise UsageError("--n and --inc-count must be at least 1")
    if args.growth <= 1.0:
        raise UsageError("--growth must exceed 1")
    if args.cah_iterations < 1:
        raise UsageError("--cah-iterations must be at least 1")
    if args.jobs < 0:
        raise UsageError("--jobs must be non-negative")
    try:
        schedule = load_schedule(args.schedule) if args.schedule else GasSchedule()
    except (ScheduleError, OSError) as exc:
        raise UsageError(str(exc))
    if args.car_gas_guard <= schedule.stipend:
        raise UsageError("--car-gas-guard must exceed the transfer stipend")
    mr_filter = None
    if args.mr:
        mr_filter = tuple(m.strip() for m in args.mr.split(","))
        for m in mr_filter:
            if m not in ALL_MRS:
                raise UsageError(f"unknown relation {m!r}")
    actors = None
    if args.mr1_actors:
        try:
            actors = tuple(AgentKind(a.strip()) for a in args.mr1_actors.split(","))
        except ValueError as exc:
            raise UsageError(str(exc))
    engine = EngineConfig(n=args.n, inc_count=args.inc_count, growth=args.growth,
                          car_gas_guard=args.car_gas_guard,
                          cah_iterations=args.cah_iterations,
                          mr_filter=mr_filter, mr1_actors_override=actors)
    return Config(schedule=schedule, engine=engine, fmt=args.fmt, out=args.out,
                  jobs=args.jobs)


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_one(path: str, config: Config) -> Verdict:
    from .detector import verdict_for  # local import keeps workers lean

    scenario = load_scenario(path)
    return verdict_for(run_all(scenario, config.schedule, config.engine))


def _worker(payload):
    path, config = payload
    return _run_one(path, config)


def cmd_check(args, config: Config) -> int:
    verdict = _run_one(args.scenario, config)
    _emit(emit_report([verdict], fmt=config.fmt), config.out)
    return 1 if verdict.has_violations else 0


def cmd_bench(args, config: Config) -> int:
    directory = Path(args.dir)
    if not directory.is_dir():
        raise UsageError(f"{directory} is not a directory")
    paths = sorted(str(p) for p in directory.glob("*.scenario.json"))
    try:
        labels = json.loads(Path(args.labels).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load labels: {exc}")
    if not isinstance(labels, dict) or not all(
            isinstance(v, list) for v in labels.values()):
        raise UsageError("labels must map scenario ids to category lists")

    for path in paths:
        sid = Path(path).name[: -len(".scenario.json")]
        if sid not in labels:
            raise UsageError(f"no label for scenario {sid!r}")

    jobs = args.jobs or os.cpu_count() or 1
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(_worker, [(p, config) for p in paths]))
    else:
        verdicts = [_run_one(p, config) for p in paths]
    verdicts.sort(key=lambda v: v.scenario_id)

    if not verdicts:
        metrics = compute_metrics([], {})
    else:
        metrics = compute_metrics(verdicts, labels)
    _emit(emit_report(verdicts, metrics, fmt=config.fmt), config.out)
    return 0


def cmd_estimate(args, config: Config) -> int:
    scenario = load_scenario(args.scenario)
    env = build_environment(scenario, config.schedule,
                            car_gas_guard=config.engine.car_gas_guard,
                            cah_iterations=config.engine.cah_iterations)
    rows = []
    for kind in ALL_ACTOR_KINDS:
        try:
            gc = estimate_intrinsic_gas(env.state, None, config.schedule,
                                        growth=config.engine.growth,
                                        runner=env.runner_for(kind))
            rows.append((kind.value, {"value": gc.value, "trials": gc.trials,
                                      "converged": gc.converged}))
        except NeverSucceeds as exc:
            rows.append((kind.value, {"error": f"never succeeds: {exc.status}"}))
    if config.fmt == "json":
        text = json.dumps({"schema": "estimate-v1", "scenario": scenario.scenario_id,
                           "estimates": dict(rows)}, indent=2) + "\n"
    else:
        lines = [f"{scenario.scenario_id}:"]
        for kind, info in rows:
            if "error" in info:
                lines.append(f"  {kind:<4} {info['error']}")
            else:
                lines.append(f"  {kind:<4} value={info['value']} "
                             f"trials={info['trials']} converged={info['converged']}")
        text = "\n".join(lines) + "\n"
    _emit(text, config.out)
    return 0


def main(argv=None) -> int:
    args = _parse_args(argv)
    try:
        config = _build_config(args)
        if args.command == "check":
            return cmd_check(args, config)
        if args.command == "bench":
            return cmd_bench(args, config)
        return cmd_estimate(args, config)
    except (UsageError, ScenarioError, ScheduleError, UnknownScenario,
            ParseError, OSError) as exc:
        print(f"mtsc: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

sys.path.insert(0, str(ROOT / "src"))

from mtsc.vm import GasSchedule  # noqa: E402

CORPUS_SCENARIOS = sorted(p.name[: -len(".scenario.json")]
                          for p in CORPUS.glob("*.scenario.json"))


@pytest.fixture(scope="session")
def schedule():
    return GasSchedule()


def scenario_path(name: str) -> Path:
    path = CORPUS / f"{name}.scenario.json"
    if not path.exists():
        path = FIXTURES / f"{name}.scenario.json"
    return path


@pytest.fixture(scope="session")
def environments(schedule):
    """Shared post-setup contexts for every corpus scenario; tests must
    only run against clones or restore their snapshots."""
    from mtsc.scenario import build_environment, load_scenario

    return {
        name: build_environment(load_scenario(scenario_path(name)), schedule)
        for name in CORPUS_SCENARIOS
    }

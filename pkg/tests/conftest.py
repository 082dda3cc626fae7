import time
from dataclasses import dataclass, field
from pathlib import Path

import pytest

from mlgnet.config import Mode, SolverConfig
from mlgnet.exceptions import InfeasibleError
from mlgnet.io import load_instance
from mlgnet.optimizer import solve
from mlgnet.synthesis import synthesize

from oracles import oracle_min_cost, random_instance

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
SUITE_SEEDS = range(60)
MODES = (Mode.GREEDY, Mode.LOCAL_SEARCH, Mode.EXACT)


@dataclass
class Case:
    name: str
    instance: object
    mlg: object
    oracle: object = None
    designs: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    seconds: float = 0.0


def run_modes(instance, mlg, case):
    for mode in MODES:
        t0 = time.perf_counter()
        try:
            case.designs[mode] = solve(mlg, instance, SolverConfig(mode))
        except InfeasibleError as exc:
            case.failures[mode] = exc.certificate
        if mode is Mode.EXACT:
            case.seconds += time.perf_counter() - t0


@pytest.fixture(scope="session")
def fixture_path():
    return lambda name: FIXTURES / f"{name}.json"


@pytest.fixture(scope="session")
def I1():
    return load_instance(FIXTURES / "I1.json")


@pytest.fixture(scope="session")
def I2():
    return load_instance(FIXTURES / "I2.json")


@pytest.fixture(scope="session")
def I3():
    return load_instance(FIXTURES / "I3.json")


@pytest.fixture(scope="session")
def suite():
    """Random desk-scale instances solved in every mode, plus the oracle value."""
    cases = []
    for seed in SUITE_SEEDS:
        inst = random_instance(seed)
        mlg = synthesize(inst)
        case = Case(inst.name, inst, mlg)
        t0 = time.perf_counter()
        case.oracle = oracle_min_cost(inst)
        case.seconds = time.perf_counter() - t0
        run_modes(inst, mlg, case)
        cases.append(case)
    return cases


@pytest.fixture(scope="session")
def fixture_cases(I1, I2, I3):
    cases = []
    for inst in (I1, I2, I3):
        mlg = synthesize(inst)
        case = Case(inst.name, inst, mlg)
        run_modes(inst, mlg, case)
        cases.append(case)
    return cases


_VERDICTS = {}


@pytest.fixture
def verdict():
    """Record one acceptance line; printed in the terminal summary."""

    def record(number, ok, detail):
        _VERDICTS[number] = (ok, detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_VERDICTS):
        ok, detail = _VERDICTS[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")

from pathlib import Path

import pytest

from relscore.explorer import explore_fully
from relscore.pddl import heuristic_task, load_task

ROOT = Path(__file__).resolve().parent.parent
DATA = Path(__file__).resolve().parent / "data"
SUITES = ROOT / "suites"

# filled by test_acceptance, printed at the end of the session
CRITERIA: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA):
        ok, msg = CRITERIA[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {msg}")


@pytest.fixture(scope="session")
def example_paths():
    return DATA / "example" / "domain.pddl", DATA / "example" / "problem.pddl"


@pytest.fixture(scope="session")
def example_tree(example_paths):
    return explore_fully(heuristic_task(load_task(*example_paths)))

import random
from collections import deque
from pathlib import Path

import pytest

from pdmu.pds import PushdownSystem, parse_pds, step

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def p1() -> PushdownSystem:
    return parse_pds((DATA / "p1.pds").read_text(), source="p1.pds")


def forward_closure(sys, start, bound):
    """Configurations reachable from ``start`` without exceeding ``bound`` letters above the bottom."""
    seen = set(start)
    todo = deque(start)
    while todo:
        c = todo.popleft()
        for d in step(sys, c):
            if len(d.stack) - 1 <= bound and d not in seen:
                seen.add(d)
                todo.append(d)
    return seen


def rngs(n, base=0):
    return [random.Random(base + i) for i in range(n)]


_VERDICTS = []


def record(line):
    print(line)
    _VERDICTS.append(line)


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from nucspec.operators import NuclearOperatorRep


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def rank_one_3():
    return NuclearOperatorRep.rank_one(3.0)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def add(criterion: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}")

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

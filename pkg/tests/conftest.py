"""Shared helpers.  The ``set_*`` functions are deliberately naive
set-of-pairs reimplementations used as oracles against the bitmask code."""
import itertools
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


def set_compose(r, s):
    return {(x, z) for (x, y) in r for (y2, z) in s if y == y2}


def set_converse(r):
    return {(y, x) for (x, y) in r}


def set_square(m):
    return set(itertools.product(range(m), repeat=2))


def set_identity(m):
    return {(x, x) for x in range(m)}


def set_injective_function(r):
    firsts = [x for x, _ in r]
    seconds = [y for _, y in r]
    return len(set(firsts)) == len(r) and len(set(seconds)) == len(r)


def all_pair_sets(m):
    sq = sorted(set_square(m))
    for k in range(len(sq) + 1):
        for combo in itertools.combinations(sq, k):
            yield set(combo)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# acceptance criteria append one line each; echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

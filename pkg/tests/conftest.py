from itertools import combinations

import pytest

from lensiso.chartables import GeneratorChoice
from lensiso.numtheory import unit_residues


def all_choices(q):
    """Every valid +/-S for q (not reduced by unit multiplication)."""
    halves = unit_residues(q).half()
    out = []
    for k in range(1, len(halves)):
        for T in combinations(halves, k):
            out.append(GeneratorChoice.from_s(q, [*T, *(q - t for t in T)]))
    return out


@pytest.fixture
def choices_of():
    return all_choices


def random_choice(q, rng):
    halves = unit_residues(q).half()
    T = rng.sample(halves, rng.randint(1, len(halves) - 1))
    return GeneratorChoice.from_s(q, [*T, *(q - t for t in T)])


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

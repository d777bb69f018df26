import random
from fractions import Fraction

import pytest

from nilslice.kernel import GaussianRational
from nilslice.slices import SliceCoords, valid_indices


def rand_q(rng: random.Random, lo: int = -9, hi: int = 9) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(lo, hi), rng.randint(1, 9)))


def rand_g(rng: random.Random) -> GaussianRational:
    return GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 9)), Fraction(rng.randint(-9, 9), rng.randint(1, 9)))


def rand_coords(idx, rng: random.Random) -> SliceCoords:
    return SliceCoords.from_flat(idx, [rand_q(rng) for _ in range(idx.dim)])


def all_cells(m_max: int = 6, families: str = "CDB", m_min: int = 2):
    return [idx for f in families for m in range(m_min, m_max + 1) for idx in valid_indices(f, m)]


@pytest.fixture
def rng():
    return random.Random(20240607)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)

import itertools
import random

import pytest

from matext.core import Matroid, SparsePavingMatroid, mask_of


def brute_closure(m: Matroid, x: int) -> int:
    v = m.f.values
    out = x
    for i in range(m.n):
        if v[x | 1 << i] == v[x]:
            out |= 1 << i
    return out


def random_sparse_paving(rng: random.Random, n: int, k: int, tries: int = 40) -> SparsePavingMatroid:
    chs: list[int] = []
    subs = [mask_of(c) for c in itertools.combinations(range(n), k)]
    for _ in range(tries):
        c = rng.choice(subs)
        if all(bin(c & d).count("1") <= k - 2 for d in chs if d != c):
            if c not in chs:
                chs.append(c)
    return SparsePavingMatroid(n, k, tuple(chs))


def random_matroid(rng: random.Random, n: int, k: int) -> Matroid:
    """Column matroid of a random 0/1/2 matrix over F3."""
    from matext.linrep import PrimeFieldMatrix, matrix_matroid
    rows = tuple(tuple(rng.randrange(3) for _ in range(n)) for _ in range(k))
    return matrix_matroid(PrimeFieldMatrix(3, rows))


@pytest.fixture
def rng():
    return random.Random(20240601)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

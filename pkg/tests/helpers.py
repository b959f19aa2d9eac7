"""Shared generators for the test suite."""
import random

from qperm.latin import LatinRectangle


def random_rectangle(rng: random.Random, N: int, r: int) -> LatinRectangle:
    """First r rows of a cyclic square with rows, columns and symbols shuffled."""
    rows = [[(i + j) % N for j in range(N)] for i in range(N)]
    rng.shuffle(rows)
    cols = list(range(N))
    rng.shuffle(cols)
    sym = list(range(N))
    rng.shuffle(sym)
    return LatinRectangle(N, tuple(tuple(sym[row[c]] for c in cols) for row in rows[:r]))

"""Exact Weingarten calculus for S_N^+ over NC(k)."""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import exact
from .errors import DomainError, SingularityError
from .partitions import Partition, catalan, delta, enumerate_partitions
from .tensor_calc import gram_matrix

MAX_K = 6


@dataclass(frozen=True)
class WeingartenTable:
    k: int
    N: int
    partitions: tuple[Partition, ...]
    gram: tuple[tuple[int, ...], ...]
    weingarten: tuple[tuple[Fraction, ...], ...]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "N": self.N,
            "partitions": [p.rgs() for p in self.partitions],
            "gram": [list(row) for row in self.gram],
            "weingarten": [[exact.format_rational(x) for x in row] for row in self.weingarten],
        }

    @classmethod
    def from_json(cls, data: dict) -> "WeingartenTable":
        return cls(
            data["k"],
            data["N"],
            tuple(Partition.from_rgs(r) for r in data["partitions"]),
            tuple(tuple(int(x) for x in row) for row in data["gram"]),
            tuple(tuple(Fraction(x) for x in row) for row in data["weingarten"]),
        )


_cache: dict[tuple[int, int], WeingartenTable] = {}
_lock = threading.Lock()


def weingarten_table(k: int, N: int) -> WeingartenTable:
    """Gram matrix of NC(k) vectors in (C^N)^{⊗k} and its exact inverse."""
    if not 0 <= k <= MAX_K:
        raise DomainError(f"Weingarten tables are limited to 0 <= k <= {MAX_K}, got k={k}")
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    key = (k, N)
    table = _cache.get(key)
    if table is not None:
        return table
    parts = tuple(enumerate_partitions(k, True))
    G = gram_matrix(parts, N)
    try:
        W = exact.inverse(G)
    except SingularityError:
        raise SingularityError(f"Gram matrix of NC({k}) is singular at N={N}") from None
    table = WeingartenTable(k, N, parts, tuple(map(tuple, G)), tuple(map(tuple, W)))
    with _lock:
        # first writer wins; tables for one key are identical anyway
        return _cache.setdefault(key, table)


def haar_moment(N: int, rows: Sequence[int], cols: Sequence[int]) -> Fraction:
    """h(u_{i1 j1} ... u_{ik jk}) = sum_{p,q} delta_p(i) delta_q(j) W_{pq}."""
    if len(rows) != len(cols):
        raise DomainError(f"row and column indices differ in length ({len(rows)} vs {len(cols)})")
    table = weingarten_table(len(rows), N)
    dp = [delta(p, rows) for p in table.partitions]
    dq = [delta(q, cols) for q in table.partitions]
    total = Fraction(0)
    for a, row in zip(dp, table.weingarten):
        if not a:
            continue
        for b, w in zip(dq, row):
            if b:
                total += w
    return total


def haar_fix_dimension(k: int, N: int) -> int:
    """dim hom_{S_N^+}((C^N)^{⊗k}, C)."""
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    if N >= 4:
        return catalan(k)
    if k > MAX_K + 2:
        raise DomainError(f"exact Gram rank for N <= 3 is limited to k <= {MAX_K + 2}")
    return exact.rank(gram_matrix(enumerate_partitions(k, True), N))

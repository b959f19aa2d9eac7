"""Latin rectangles, their completion to Latin squares, and corner constructions.

Symbols are 0-based: a Latin square of order N uses {0, ..., N-1}.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DomainError, ValidationError


def _rectangle_problems(rows: Sequence[Sequence[int]], N: int) -> list[str]:
    problems = []
    for r, row in enumerate(rows):
        if len(row) != N:
            problems.append(f"row {r} has length {len(row)}, expected {N}")
        elif sorted(row) != list(range(N)):
            problems.append(f"row {r} is not a permutation of 0..{N - 1}")
    if problems:
        return problems
    for c in range(N):
        col = [row[c] for row in rows]
        if len(set(col)) != len(col):
            problems.append(f"column {c} repeats a symbol")
    return problems


@dataclass(frozen=True)
class LatinRectangle:
    N: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) > self.N:
            raise ValidationError(f"{len(rows)} rows exceed the order {self.N}")
        problems = _rectangle_problems(rows, self.N)
        if problems:
            raise ValidationError("invalid Latin rectangle: " + "; ".join(problems))

    @property
    def r(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class LatinSquare(LatinRectangle):
    def __post_init__(self):
        super().__post_init__()
        if len(self.rows) != self.N:
            raise ValidationError(f"a Latin square of order {self.N} needs {self.N} rows, got {len(self.rows)}")

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[int]]) -> "LatinSquare":
        return cls(len(data), tuple(tuple(row) for row in data))

    def permutations(self) -> list[tuple[int, ...]]:
        """For each symbol a, the permutation i -> column of a in row i."""
        perms = []
        for a in range(self.N):
            perms.append(tuple(row.index(a) for row in self.rows))
        return perms


def _has_perfect_matching(allowed: list[set[int]], used_cols: set[int]) -> bool:
    """Kuhn's augmenting paths: can every remaining cell get a distinct allowed symbol?"""
    cells = [c for c in range(len(allowed)) if c not in used_cols]
    owner: dict[int, int] = {}

    def augment(c: int, seen: set[int]) -> bool:
        for sym in sorted(allowed[c]):
            if sym in seen:
                continue
            seen.add(sym)
            if sym not in owner or augment(owner[sym], seen):
                owner[sym] = c
                return True
        return False

    return all(augment(c, set()) for c in cells)


def least_row(allowed: list[set[int]], fixed: dict[int, int] | None = None) -> list[int]:
    """Lexicographically least system of distinct representatives for the cells.

    ``allowed[c]`` is the set of admissible symbols of cell c; ``fixed`` pins
    some cells in advance.  Each cell greedily takes the smallest symbol that
    still leaves a perfect matching for the cells to its right.
    """
    fixed = dict(fixed or {})
    n = len(allowed)
    row: list[int | None] = [None] * n
    taken: set[int] = set()
    for c, sym in fixed.items():
        row[c] = sym
        taken.add(sym)
    work = [set(a) - taken for a in allowed]
    done = set(fixed)
    if not _has_perfect_matching(work, done):
        raise ValidationError("no admissible row exists for the given constraints")
    for c in range(n):
        if c in done:
            continue
        for sym in sorted(work[c]):
            trial = [a - {sym} for a in work]
            if _has_perfect_matching(trial, done | {c}):
                row[c] = sym
                work = trial
                done.add(c)
                break
        else:  # pragma: no cover - excluded by the matching check above
            raise ValidationError(f"cell {c} cannot be filled")
    return [int(x) for x in row]


def complete_rectangle(R: LatinRectangle) -> LatinSquare:
    """Extend R to a Latin square, adding the lexicographically least valid row each time."""
    N = R.N
    rows = [list(row) for row in R.rows]
    while len(rows) < N:
        allowed = [set(range(N)) - {row[c] for row in rows} for c in range(N)]
        rows.append(least_row(allowed))
    return LatinSquare(N, tuple(map(tuple, rows)))


def corner_2x2_square(N: int) -> LatinSquare:
    """A Latin square whose upper-left 2x2 corner is [[0, 1], [1, 0]] (needs N >= 4)."""
    if N < 4:
        raise DomainError(f"a 2x2 swap corner inside a Latin rectangle needs N >= 4, got {N}")
    first = list(range(N))
    allowed = [set(range(N)) - {first[c]} for c in range(N)]
    second = least_row(allowed, fixed={0: 1, 1: 0})
    return complete_rectangle(LatinRectangle(N, (tuple(first), tuple(second))))


def circulant_corner_square(N: int, M: int) -> LatinSquare:
    """Latin square of order N with (i - j) mod M in its upper-left M x M corner.

    The rest of the first M rows uses symbols M..N-1 (lexicographically least
    fill), then the rectangle is completed.
    """
    if M < 1:
        raise DomainError(f"corner size must be positive, got {M}")
    if 2 * M > N:
        raise DomainError(f"the circulant corner construction needs 2M <= N, got M={M}, N={N}")
    rows: list[list[int]] = []
    for i in range(M):
        corner = [(i - j) % M for j in range(M)]
        allowed = [set() for _ in range(N)]
        for j in range(M):
            allowed[j] = {corner[j]}
        for j in range(M, N):
            allowed[j] = set(range(M, N)) - {row[j] for row in rows}
        rows.append(least_row(allowed, fixed=dict(enumerate(corner))))
    return complete_rectangle(LatinRectangle(N, tuple(map(tuple, rows))))


def validate_square(rows: Sequence[Sequence[int]]) -> list[str]:
    """Problems preventing ``rows`` from being a Latin square (empty when valid)."""
    N = len(rows)
    return _rectangle_problems(rows, N)

"""Exact linear algebra over the rationals, used for Gram ranks and Weingarten tables."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import DomainError, SingularityError

Matrix = list[list[Fraction]]


def to_fractions(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    if a and len(a[0]) != len(b):
        raise DomainError("inner dimensions do not match")
    bt = list(zip(*b)) if b else []
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination on integer-scaled rows."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m or not m[0]:
        return 0
    # clear denominators so elimination stays in the integers
    work: list[list[int]] = []
    for row in m:
        den = 1
        for x in row:
            den = den * x.denominator // _gcd(den, x.denominator)
        work.append([int(x * den) for x in row])
    n_rows, n_cols = len(work), len(work[0])
    r = 0
    prev = 1
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        p = work[r][c]
        for i in range(r + 1, n_rows):
            a = work[i][c]
            row_i, row_r = work[i], work[r]
            work[i] = [(p * row_i[j] - a * row_r[j]) // prev for j in range(n_cols)]
        prev = p
        r += 1
        if r == n_rows:
            break
    return r


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def inverse(rows: Sequence[Sequence]) -> Matrix:
    """Gauss-Jordan inverse over Q; raises SingularityError if no pivot exists."""
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise DomainError("inverse needs a square matrix")
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            raise SingularityError(f"matrix is singular (no pivot in column {c})")
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        if p != 1:
            a[c] = [x / p for x in a[c]]
        pivot_row = a[c]
        nz = [j for j in range(c, 2 * n) if pivot_row[j] != 0]
        for i in range(n):
            if i == c:
                continue
            f = a[i][c]
            if f != 0:
                row = a[i]
                for j in nz:
                    row[j] -= f * pivot_row[j]
    return [row[n:] for row in a]


def determinant(rows: Sequence[Sequence]) -> Fraction:
    n = len(rows)
    a = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det *= p
        for i in range(c + 1, n):
            f = a[i][c] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text)

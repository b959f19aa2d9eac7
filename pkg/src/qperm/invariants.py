"""Fixed-point subspaces of tensor powers and degree-wise generation certificates.

Classical fix spaces come from partition-vector spans; the quantum groups
S_M^+ and H_M^{s+} sit in the upper-left corner of S_N^+ / H_N^{s+} and fix
the remaining basis vectors e_{M+1}, ..., e_N.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import time
from dataclasses import asdict, dataclass, field
from enum import Enum
from math import factorial

import numpy as np

from .errors import DomainError, InconclusiveError
from .partitions import (
    ColoredWord,
    Partition,
    block_sums_vanish,
    enumerate_colored_nc,
    enumerate_partitions,
    is_noncrossing,
    kernel_of_index,
)
from .tensor_calc import (
    DEFAULT_RANK_TOL,
    Subspace,
    check_cap,
    index_digits,
    intersect_subspaces,
    orthogonal_complement_in,
    partition_mask,
)

BACKEND = "float64-svd"

# default size caps for the colored (reflection) computations
REFLECTION_MAX_S = 4
REFLECTION_MAX_N = 6
REFLECTION_MAX_LEN = 4


@dataclass(frozen=True)
class CornerEmbedding:
    N: int
    M: int

    def __post_init__(self):
        if not 1 <= self.M <= self.N:
            raise DomainError(f"corner size must satisfy 1 <= M <= N, got M={self.M}, N={self.N}")


class Verdict(str, Enum):
    EQUAL = "EQUAL"
    STRICTLY_LARGER = "STRICTLY_LARGER"
    INCONCLUSIVE = "INCONCLUSIVE"


CSV_COLUMNS = ["statement", "params", "dim_lhs", "dim_rhs", "verdict", "tol", "backend", "seconds"]


@dataclass(frozen=True)
class Certificate:
    statement: str
    params: dict
    dim_lhs: int | None
    dim_rhs: int | None
    verdict: Verdict
    tol: float
    backend: str = BACKEND
    witness: list = field(default_factory=list, repr=False)
    witness_partitions: list[str] = field(default_factory=list)
    note: str = ""
    seconds: float = 0.0

    def __post_init__(self):
        if self.verdict is Verdict.EQUAL and self.dim_lhs != self.dim_rhs:
            raise AssertionError("EQUAL certificate with unequal dimensions")
        if self.verdict is Verdict.STRICTLY_LARGER and not (self.dim_lhs > self.dim_rhs and self.witness):
            raise AssertionError("STRICTLY_LARGER certificate needs dim_lhs > dim_rhs and a witness")

    def params_str(self) -> str:
        return ";".join(f"{k}={v}" for k, v in self.params.items())

    def to_json(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d

    def csv_row(self, timing: bool = False) -> list:
        return [
            self.statement,
            self.params_str(),
            "" if self.dim_lhs is None else self.dim_lhs,
            "" if self.dim_rhs is None else self.dim_rhs,
            self.verdict.value,
            repr(self.tol),
            self.backend,
            f"{self.seconds:.3f}" if timing else "",
        ]


def certificates_to_csv(certs, timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in certs:
        w.writerow(c.csv_row(timing))
    return buf.getvalue()


def certificates_to_json(certs) -> str:
    return json.dumps([c.to_json() for c in certs], indent=2)


# ---------------------------------------------------------------- classical

def classical_fix(N: int, k: int, tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Fix_{S_N}((C^N)^{⊗k}) as the span of xi_p over all partitions of [k]."""
    if N < 1 or k < 0:
        raise DomainError(f"need N >= 1 and k >= 0, got N={N}, k={k}")
    check_cap(N**k)
    digits = index_digits(N, k)
    vecs = [partition_mask(p, digits).astype(float) for p in enumerate_partitions(k, False)]
    return Subspace.span(vecs, N**k, tol)


def permutation_tensor(sigma, k: int) -> np.ndarray:
    """Matrix of sigma^{⊗k} where sigma maps basis index a to sigma[a]."""
    N = len(sigma)
    digits = index_digits(N, k)
    img = np.zeros(N**k, dtype=np.int64)
    sig = np.asarray(sigma)
    for t in range(k):
        img = img * N + sig[digits[t]]
    mat = np.zeros((N**k, N**k))
    mat[img, np.arange(N**k)] = 1.0
    return mat


def averaging_projector(N: int, k: int) -> np.ndarray:
    """(1/N!) sum_sigma sigma^{⊗k}; the oracle for classical_fix on small N."""
    if N > 7:
        raise DomainError("averaging over S_N is only supported for N <= 7")
    check_cap(N ** (2 * k) * 2)
    acc = np.zeros((N**k, N**k))
    for sigma in itertools.permutations(range(N)):
        acc += permutation_tensor(sigma, k)
    return acc / factorial(N)


def projector_image(P: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Range of an orthogonal projector, read off from its eigenvalues near 1.

    A group average is a projector, so the absolute cut at 1/2 ignores the
    rounding noise a relative rank test would pick up from an all-zero average.
    """
    vals, vecs = np.linalg.eigh((P + P.conj().T) / 2)
    keep = vals > 0.5
    return Subspace(P.shape[0], vecs[:, keep], tol)


def classical_fix_by_averaging(N: int, k: int, tol: float = DEFAULT_RANK_TOL) -> Subspace:
    return projector_image(averaging_projector(N, k), tol)


# ---------------------------------------------------------------- corner quantum

def _corner_vectors(e: CornerEmbedding, k: int, word: ColoredWord | None = None):
    """Spanning vectors of the corner-embedded quantum group's fix space."""
    N, M = e.N, e.M
    check_cap(N**k)
    digits = index_digits(N, k)
    in_corner = digits < M
    fixed_values = range(M, N)
    for size in range(k + 1):
        for S in itertools.combinations(range(k), size):
            rest = [t for t in range(k) if t not in S]
            if word is None:
                parts = enumerate_partitions(len(rest), True)
            else:
                sub = ColoredWord(word.s, tuple(word.letters[t] for t in rest))
                parts = enumerate_colored_nc(sub)
            if not parts:
                continue
            base = np.ones(N**k, dtype=bool)
            for t in rest:
                base &= in_corner[t]
            for choice in itertools.product(fixed_values, repeat=size):
                sel = base.copy()
                for t, val in zip(S, choice):
                    sel &= digits[t] == val
                for p in parts:
                    yield (sel & partition_mask(p, digits, rest)).astype(float)


def corner_quantum_fix(e: CornerEmbedding, k: int, tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Fix space of S_M^+ acting on e_1..e_M and trivially on e_{M+1}..e_N.

    Non-crossing partition vectors span the S_M^+ fix spaces for every M
    (for M <= 3 they coincide with the classical S_M ones), so no special
    case is needed for small corners.
    """
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    return Subspace.span(list(_corner_vectors(e, k)), e.N**k, tol)


def nc_span(N: int, k: int, tol: float = DEFAULT_RANK_TOL, word: ColoredWord | None = None) -> Subspace:
    check_cap(N**k)
    digits = index_digits(N, k)
    parts = enumerate_partitions(k, True) if word is None else enumerate_colored_nc(word)
    return Subspace.span([partition_mask(p, digits).astype(float) for p in parts], N**k, tol)


def _witness_partitions(defect: Subspace, k: int, N: int, word: ColoredWord | None) -> list[str]:
    """Crossing partitions whose vectors, projected on the defect, span it."""
    digits = index_digits(N, k)
    chosen: list[str] = []
    proj_rows: list[np.ndarray] = []
    for p in enumerate_partitions(k, False):
        if is_noncrossing(p) or (word is not None and not block_sums_vanish(p, word)):
            continue
        v = partition_mask(p, digits).astype(float)
        coords = defect.basis.conj().T @ v
        trial = proj_rows + [coords]
        if np.linalg.matrix_rank(np.vstack(trial), tol=1e-8 * max(1.0, np.linalg.norm(v))) > len(proj_rows):
            proj_rows = trial
            chosen.append(p.rgs())
            if len(chosen) == defect.dim:
                break
    return chosen


def _compare(statement, params, lhs: Subspace, rhs: Subspace, tol, k, N, word, started) -> Certificate:
    # the NC span always lies inside the intersection
    try:
        defect = orthogonal_complement_in(lhs, rhs, tol, strict=True)
    except InconclusiveError as exc:
        return _inconclusive(statement, params, tol, exc, started)
    if lhs.dim < rhs.dim or lhs.dim - rhs.dim != defect.dim:
        raise AssertionError(
            f"intersection ({lhs.dim}) does not contain the NC span ({rhs.dim}); numerical failure"
        )
    if defect.dim == 0:
        verdict, witness, wparts = Verdict.EQUAL, [], []
    else:
        verdict = Verdict.STRICTLY_LARGER
        witness = [[float(x) for x in col] for col in defect.basis.T.real]
        wparts = _witness_partitions(defect, k, N, word)
    return Certificate(statement, params, lhs.dim, rhs.dim, verdict, tol, BACKEND, witness, wparts,
                       seconds=time.perf_counter() - started)


def _inconclusive(statement, params, tol, exc, started) -> Certificate:
    return Certificate(statement, params, None, None, Verdict.INCONCLUSIVE, tol, BACKEND, note=str(exc),
                       seconds=time.perf_counter() - started)


def topgen_certificate(N: int, M: int, k: int, tol: float = DEFAULT_RANK_TOL) -> Certificate:
    """Compare Fix_{S_N} ∩ Fix_{S_M^+ corner} with the NC span at degree k."""
    if not 3 <= M < N:
        raise DomainError(f"topgen certificate needs 3 <= M < N, got M={M}, N={N}")
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    started = time.perf_counter()
    params = {"N": N, "M": M, "k": k}
    try:
        a = Subspace.span(
            [partition_mask(p, index_digits(N, k)).astype(float) for p in enumerate_partitions(k, False)],
            N**k, tol, strict=True,
        )
        b = Subspace.span(list(_corner_vectors(CornerEmbedding(N, M), k)), N**k, tol, strict=True)
        inter = intersect_subspaces(a, b, tol, strict=True)
        target = Subspace.span(
            [partition_mask(p, index_digits(N, k)).astype(float) for p in enumerate_partitions(k, True)],
            N**k, tol, strict=True,
        )
    except InconclusiveError as exc:
        return _inconclusive("topgen", params, tol, exc, started)
    return _compare("topgen", params, inter, target, tol, k, N, None, started)


# ---------------------------------------------------------------- reflection groups

def _check_reflection_caps(N: int, s: int, w: ColoredWord) -> None:
    if s == 0 or s is None:
        raise DomainError("s = infinity is unsupported; probe finite s instead")
    if w.s != s:
        raise DomainError(f"word over Z_{w.s} used with s={s}")
    if s > REFLECTION_MAX_S or N > REFLECTION_MAX_N or len(w) > REFLECTION_MAX_LEN:
        raise DomainError(
            f"reflection computations are capped at s<={REFLECTION_MAX_S}, N<={REFLECTION_MAX_N}, "
            f"|w|<={REFLECTION_MAX_LEN}; got s={s}, N={N}, |w|={len(w)}"
        )


def reflection_classical_fix(N: int, s: int, w: ColoredWord, group: str = "H", tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Fix space of V^{(w_1)} ⊗ ... ⊗ V^{(w_k)} over S_N (group="S") or H_N^s (group="H").

    A monomial matrix D·sigma acts on e_i by the root-of-unity character
    prod_t d_{i_t}^{w_t}; basis orbits are S_N-orbits of multi-indices, i.e.
    kernels with at most N blocks, and an orbit sum survives exactly when the
    character is trivial on the diagonal stabilizer: every kernel block has
    letter sum 0 mod s.
    """
    if s is None or s < 1:
        raise DomainError("s = infinity is unsupported; probe finite s instead")
    _check_reflection_caps(N, s, w)
    if group not in ("S", "H"):
        raise DomainError(f"group must be 'S' or 'H', got {group!r}")
    k = len(w)
    check_cap(N**k)
    digits = index_digits(N, k)
    orbits: dict[Partition, np.ndarray] = {}
    for flat in range(N**k):
        ker = kernel_of_index(tuple(digits[:, flat]))
        if group == "H" and not block_sums_vanish(ker, w):
            continue
        orbits.setdefault(ker, np.zeros(N**k))[flat] = 1.0
    if not orbits:
        return Subspace.zero(N**k, tol)
    return Subspace.span(list(orbits.values()), N**k, tol)


def monomial_matrices(N: int, s: int):
    """All elements of H_N^s as dense complex matrices (oracle use only)."""
    roots = np.exp(2j * np.pi * np.arange(s) / s)
    for sigma in itertools.permutations(range(N)):
        for phases in itertools.product(range(s), repeat=N):
            g = np.zeros((N, N), dtype=complex)
            for a in range(N):
                g[sigma[a], a] = roots[phases[a]]
            yield g


def colored_power(g: np.ndarray, a: int) -> np.ndarray:
    """g^{(a)}: the monomial matrix with every nonzero entry raised to the a-th power."""
    out = np.zeros_like(g)
    nz = np.abs(g) > 0.5
    out[nz] = g[nz] ** a
    return out


def reflection_fix_by_averaging(N: int, s: int, w: ColoredWord, tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Brute-force average of the colored tensor action over H_N^s (oracle)."""
    k = len(w)
    acc = np.zeros((N**k, N**k), dtype=complex)
    count = 0
    for g in monomial_matrices(N, s):
        op = np.ones((1, 1), dtype=complex)
        for a in w.letters:
            op = np.kron(op, colored_power(g, a))
        acc += op
        count += 1
    return projector_image(acc / count, tol)


def reflection_quantum_fix(e: CornerEmbedding, s: int, w: ColoredWord, tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Fix space of H_M^{s+} in the corner: colored NC vectors tensored with fixed vectors."""
    if e.M < 4:
        raise DomainError(f"reflection corner needs M >= 4, got M={e.M}")
    _check_reflection_caps(e.N, s, w)
    return Subspace.span(list(_corner_vectors(e, len(w), w)), e.N ** len(w), tol)


def reflection_topgen_certificate(N: int, s: int, w: ColoredWord, tol: float = DEFAULT_RANK_TOL, M: int | None = None) -> Certificate:
    """Compare Fix_{S_N} ∩ Fix_{H_{N-1}^{s+} corner} with the colored NC span."""
    M = N - 1 if M is None else M
    if N < 5:
        raise DomainError(f"reflection certificate needs N >= 5, got {N}")
    _check_reflection_caps(N, s, w)
    started = time.perf_counter()
    k = len(w)
    params = {"N": N, "M": M, "s": s, "w": str(w)}
    try:
        digits = index_digits(N, k)
        # S_N ignores the colors, so its fix space is the uncolored one
        a = Subspace.span(
            [partition_mask(p, digits).astype(float) for p in enumerate_partitions(k, False)],
            N**k, tol, strict=True,
        )
        b = Subspace.span(list(_corner_vectors(CornerEmbedding(N, M), k, w)), N**k, tol, strict=True)
        inter = intersect_subspaces(a, b, tol, strict=True)
        target = Subspace.span(
            [partition_mask(p, digits).astype(float) for p in enumerate_colored_nc(w)],
            N**k, tol, strict=True,
        )
    except InconclusiveError as exc:
        return _inconclusive("refl-topgen", params, tol, exc, started)
    return _compare("refl-topgen", params, inter, target, tol, k, N, w, started)


def all_words(s: int, max_len: int, min_len: int = 1):
    for n in range(min_len, max_len + 1):
        for letters in itertools.product(range(s), repeat=n):
            yield ColoredWord(s, letters)

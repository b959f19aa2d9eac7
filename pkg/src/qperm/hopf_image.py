"""Level-by-level inner-faithfulness tests for magic-unitary models.

The state phi = tr ∘ pi on degree-r monomials is encoded as the N^r x N^r
transfer matrix T with T[(i), (j)] = tr(P_{i1 j1} ... P_{ir jr}) / d.  The
coproduct turns convolution powers of phi into matrix powers of T, and the
Cesàro limit of those powers is the Haar state of the Hopf image, whose rank
is the dimension of the Hopf image's fixed space at degree r.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError, InconclusiveError, ResourceError
from .models import MagicUnitary
from .weingarten import haar_fix_dimension

LEVEL_CAP = 20000
DEFAULT_RMAX = 4
EIGEN_TOL = 1e-8
EIGEN_BAND = 1e-6


def model_state(m: MagicUnitary, rows: Sequence[int], cols: Sequence[int]) -> complex:
    """Normalized trace of P_{i1 j1} ... P_{ik jk} (0-based indices)."""
    if len(rows) != len(cols):
        raise DomainError(f"row and column indices differ in length ({len(rows)} vs {len(cols)})")
    prod = np.eye(m.d, dtype=complex)
    for i, j in zip(rows, cols):
        prod = prod @ m.P[i, j]
    return complex(np.trace(prod) / m.d)


@dataclass(frozen=True)
class TransferMatrix:
    r: int
    N: int
    T: np.ndarray = field(repr=False)


def transfer_matrix(m: MagicUnitary, r: int, allow_large: bool = False) -> TransferMatrix:
    """Matrix of the model state on the coefficients of u^{⊗r}."""
    N, d = m.N, m.d
    if r < 0:
        raise DomainError(f"level must be nonnegative, got {r}")
    if N**r > LEVEL_CAP:
        raise ResourceError(f"level r={r} needs a {N**r}x{N**r} transfer matrix (cap {LEVEL_CAP}); use a smaller r")
    if r > DEFAULT_RMAX and not allow_large:
        raise ResourceError(f"level r={r} exceeds the default cap {DEFAULT_RMAX}; pass allow_large to permit it")
    if r == 0:
        return TransferMatrix(0, N, np.ones((1, 1), dtype=complex))
    # prod[I, J] = P_{i1 j1} ... P_{i_{r-1} j_{r-1}}, built level by level
    prod = np.broadcast_to(np.eye(d, dtype=complex), (1, 1, d, d))
    for _ in range(r - 1):
        n = prod.shape[0]
        prod = np.einsum("IJab,ijbc->IiJjac", prod, m.P).reshape(n * N, n * N, d, d)
    n = prod.shape[0]
    # tr(A B) = sum_ab A_ab B_ba, done as one matrix product
    left = prod.reshape(n * n, d * d)
    right = np.swapaxes(m.P, 2, 3).reshape(N * N, d * d)
    T = (left @ right.T).reshape(n, n, N, N).transpose(0, 2, 1, 3).reshape(n * N, n * N) / d
    return TransferMatrix(r, N, T)


def convolve(m1: MagicUnitary, m2: MagicUnitary) -> MagicUnitary:
    """Model of the convolution of the two states: Q_ij = sum_l P_il ⊗ R_lj."""
    if m1.N != m2.N:
        raise DomainError("convolution needs models of the same size")
    Q = np.einsum("ilab,ljcd->ijacbd", m1.P, m2.P).reshape(m1.N, m1.N, m1.d * m2.d, m1.d * m2.d)
    return MagicUnitary(Q, ({"op": "convolve"},))


def _eigen_dim(T: np.ndarray, tol: float, band: float) -> int:
    vals = scipy.linalg.eigvals(T)
    dist = np.abs(vals - 1.0)
    near = (dist > tol) & (dist < band)
    if near.any():
        raise InconclusiveError(f"eigenvalues {vals[near]} lie in the ambiguous band ({tol}, {band}) around 1")
    return int(np.count_nonzero(dist <= tol))


def _cesaro_dim(T: np.ndarray, max_doublings: int = 40, settle: int = 4) -> int:
    """Rank of (1/K) sum_{k=1..K} T^k for K = 2^n, until the rank settles.

    The limit is an idempotent, so its nonzero singular values are >= 1 and a
    threshold of 1/2 separates them from the decaying remainder.
    """
    A = T.copy()  # average of T^1..T^K
    P = T.copy()  # T^K
    history: list[int] = []
    for _ in range(max_doublings):
        A_next = 0.5 * (A + P @ A)
        P = P @ P
        change = float(np.abs(A_next - A).max())
        A = A_next
        sv = np.linalg.svd(A, compute_uv=False)
        rank = int(np.count_nonzero(sv > 0.5))
        history.append(rank)
        # no singular value left near the threshold and a settled rank
        clear = not np.any((sv > 0.25) & (sv < 0.75))
        if len(history) >= settle and len(set(history[-settle:])) == 1 and clear and change < 1e-3:
            return rank
    raise InconclusiveError(f"Cesàro averages did not settle within 2^{max_doublings} terms (ranks {history[-settle:]})")


def fixed_space_dim(T: TransferMatrix | np.ndarray, tol: float = EIGEN_TOL, method: str = "eigen") -> int:
    """Dimension of the eigenvalue-1 eigenspace of a transfer matrix."""
    mat = T.T if isinstance(T, TransferMatrix) else np.asarray(T)
    if method == "eigen":
        return _eigen_dim(mat, tol, max(EIGEN_BAND, 10 * tol))
    if method == "cesaro":
        return _cesaro_dim(mat)
    raise DomainError(f"method must be 'eigen' or 'cesaro', got {method!r}")


@dataclass(frozen=True)
class LevelRecord:
    r: int
    fixed_dim: int
    target_dim: int

    @property
    def defect(self) -> int:
        return self.fixed_dim - self.target_dim


@dataclass(frozen=True)
class FaithfulnessReport:
    model_id: str
    N: int
    r_max: int
    tol: float
    levels: tuple[LevelRecord, ...]
    verdict: str
    fails_at: int | None = None
    note: str = ""

    @property
    def dims(self) -> list[int]:
        return [lv.fixed_dim for lv in self.levels]

    def to_json(self) -> dict:
        return {
            "model_id": self.model_id,
            "N": self.N,
            "r_max": self.r_max,
            "tol": self.tol,
            "verdict": self.verdict,
            "fails_at": self.fails_at,
            "levels": [{"r": lv.r, "fixed_dim": lv.fixed_dim, "target_dim": lv.target_dim, "defect": lv.defect}
                       for lv in self.levels],
            "note": self.note,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model_id", "N", "r", "fixed_dim", "target_dim", "defect", "verdict"])
        for lv in self.levels:
            w.writerow([self.model_id, self.N, lv.r, lv.fixed_dim, lv.target_dim, lv.defect, self.verdict])
        return buf.getvalue()


EVIDENCE_NOTE = (
    "level dimensions agree with S_N^+ up to r_max; this is necessary-condition "
    "evidence for inner faithfulness, not a proof"
)


def inner_faithfulness_report(
    m: MagicUnitary,
    r_max: int = DEFAULT_RMAX,
    tol: float = EIGEN_TOL,
    model_id: str = "model",
    method: str = "eigen",
    allow_large: bool = False,
) -> FaithfulnessReport:
    """Compare the model's level-r fixed dimensions with those of S_N^+ for r = 1..r_max."""
    N = m.N
    if r_max < 1:
        raise DomainError(f"r_max must be at least 1, got {r_max}")
    levels: list[LevelRecord] = []
    for r in range(1, r_max + 1):
        T = transfer_matrix(m, r, allow_large=allow_large)
        try:
            fixed = fixed_space_dim(T, tol, method)
        except InconclusiveError as exc:
            return FaithfulnessReport(model_id, N, r_max, tol, tuple(levels), f"INCONCLUSIVE_AT({r})", None, str(exc))
        target = haar_fix_dimension(r, N)
        if fixed < target:
            raise AssertionError(
                f"level {r}: fixed dimension {fixed} below the S_N^+ value {target}; numerical failure"
            )
        levels.append(LevelRecord(r, fixed, target))
        if fixed > target:
            return FaithfulnessReport(model_id, N, r_max, tol, tuple(levels), f"FAILS_AT({r})", r)
    return FaithfulnessReport(model_id, N, r_max, tol, tuple(levels), f"MATCHES_UP_TO({r_max})", None, EVIDENCE_NOTE)

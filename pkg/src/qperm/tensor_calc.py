"""Dense linear algebra on tensor powers of C^N.

Multi-indices are flattened row-major with the first tensor slot most
significant, so ``e_{i1} ⊗ ... ⊗ e_{ik}`` sits at position
``((i1 * N + i2) * N + ...) + ik`` (0-based values).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact
from .errors import DomainError, InconclusiveError, ResourceError
from .partitions import Partition, join

DEFAULT_CAP = 10**8
DEFAULT_RANK_TOL = 1e-8


def entry_cap() -> int:
    """Maximum number of entries of a dense tensor operator (env QPERM_CAP)."""
    raw = os.environ.get("QPERM_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        cap = int(float(raw))
    except ValueError:
        raise DomainError(f"QPERM_CAP must be a positive integer, got {raw!r}") from None
    if cap <= 0:
        raise DomainError(f"QPERM_CAP must be a positive integer, got {raw!r}")
    return cap


def check_cap(n_entries: int, what: str = "tensor space") -> None:
    cap = entry_cap()
    if n_entries > cap:
        raise ResourceError(f"{what} needs {n_entries} entries, above the cap {cap} (set QPERM_CAP to raise it)")


def index_digits(N: int, k: int) -> np.ndarray:
    """Array of shape (k, N**k): row t holds the value of slot t for every flat index."""
    check_cap(N**k * max(k, 1), "index table")
    flat = np.arange(N**k, dtype=np.int64)
    out = np.empty((k, N**k), dtype=np.int64)
    for t in range(k):
        out[t] = (flat // N ** (k - 1 - t)) % N
    return out


def partition_mask(p: Partition, digits: np.ndarray, slots: Sequence[int] | None = None) -> np.ndarray:
    """Boolean mask of flat indices constant on each block of ``p``.

    ``slots`` maps the points 1..p.k of ``p`` to tensor slots (0-based); by
    default point x sits in slot x-1.
    """
    if slots is None:
        slots = range(p.k)
    slots = list(slots)
    mask = np.ones(digits.shape[1], dtype=bool)
    for b in p.blocks:
        ref = digits[slots[b[0] - 1]]
        for x in b[1:]:
            mask &= digits[slots[x - 1]] == ref
    return mask


@dataclass(frozen=True)
class TensorOperator:
    """Linear map (C^N)^{⊗k_in} -> (C^N)^{⊗k_out} stored as an N^k_out x N^k_in matrix."""

    N: int
    k_in: int
    k_out: int
    entries: np.ndarray = field(repr=False)
    scalar_kind: str = "int"

    def __post_init__(self):
        shape = (self.N**self.k_out, self.N**self.k_in)
        if self.entries.shape != shape:
            raise DomainError(f"entries have shape {self.entries.shape}, expected {shape}")
        if self.scalar_kind not in ("int", "rational", "float"):
            raise DomainError(f"unknown scalar kind {self.scalar_kind!r}")
        self.entries.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def flat(self) -> np.ndarray:
        return self.entries.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, TensorOperator):
            return NotImplemented
        return (self.N, self.k_in, self.k_out) == (other.N, other.k_in, other.k_out) and bool(
            np.array_equal(self.entries, other.entries)
        )

    __hash__ = None

    def to_json(self) -> dict:
        if self.scalar_kind == "float":
            entries = [float(x) for x in self.flat()]
        else:
            entries = [exact.format_rational(x) for x in self.flat()]
        return {
            "N": self.N,
            "k_in": self.k_in,
            "k_out": self.k_out,
            "shape": list(self.shape),
            "scalar_kind": self.scalar_kind,
            "entries": entries,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TensorOperator":
        kind = data["scalar_kind"]
        shape = tuple(data["shape"])
        if kind == "float":
            arr = np.array(data["entries"], dtype=float)
        elif kind == "int":
            arr = np.array([int(Fraction(x)) for x in data["entries"]], dtype=np.int64)
        else:
            arr = np.array([Fraction(x) for x in data["entries"]], dtype=object)
        return cls(data["N"], data["k_in"], data["k_out"], arr.reshape(shape), kind)


def partition_map(p: Partition, k: int, l: int, N: int) -> TensorOperator:
    """The map e_i -> sum_j delta_p(ij) e_j from (C^N)^{⊗k} to (C^N)^{⊗l}."""
    if p.k != k + l:
        raise DomainError(f"partition of [{p.k}] cannot define a map of degrees ({k}, {l})")
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    check_cap(N ** (k + l), "partition map")
    digits = index_digits(N, k + l)
    # flat index over (i, j) is i * N^l + j; entries are stored as [j, i]
    mask = partition_mask(p, digits).reshape(N**k, N**l)
    return TensorOperator(N, k, l, np.ascontiguousarray(mask.T.astype(np.int64)), "int")


def partition_vector(p: Partition, N: int) -> np.ndarray:
    """xi_p as a flat integer vector in (C^N)^{⊗p.k}."""
    check_cap(N**p.k, "partition vector")
    return partition_mask(p, index_digits(N, p.k)).astype(np.int64)


def gram_matrix(family: Sequence[Partition], N: int) -> list[list[int]]:
    """Exact Gram matrix <xi_p, xi_q> = N^{|p v q|}."""
    ks = {p.k for p in family}
    if len(ks) > 1:
        raise DomainError(f"partitions in a Gram family must share k, got {sorted(ks)}")
    return [[N ** join(p, q).n_blocks for q in family] for p in family]


def gram_matrix_direct(family: Sequence[Partition], N: int) -> list[list[int]]:
    """Gram matrix by explicit summation over all multi-indices (oracle)."""
    vecs = [partition_vector(p, N) for p in family]
    return [[int(np.dot(a, b)) for b in vecs] for a in vecs]


def _as_matrix(vectors: Sequence) -> np.ndarray:
    rows = []
    for v in vectors:
        rows.append(v.flat() if isinstance(v, TensorOperator) else np.asarray(v).reshape(-1))
    lengths = {r.shape[0] for r in rows}
    if len(lengths) > 1:
        raise DomainError(f"vectors have different lengths {sorted(lengths)}")
    return np.vstack(rows)


def singular_values(vectors: Sequence) -> np.ndarray:
    if len(vectors) == 0:
        return np.zeros(0)
    return np.linalg.svd(_as_matrix(vectors).astype(complex if _is_complex(vectors) else float), compute_uv=False)


def _is_complex(vectors) -> bool:
    return any(np.iscomplexobj(v.entries if isinstance(v, TensorOperator) else v) for v in vectors)


def numerical_rank(sv: np.ndarray, tol: float = DEFAULT_RANK_TOL, strict: bool = False) -> int:
    """Count singular values above tol * sigma_max.

    With ``strict`` an InconclusiveError is raised when any singular value lies
    within a factor 10 of the threshold.
    """
    if sv.size == 0 or sv[0] == 0:
        return 0
    rel = sv / sv[0]
    if strict:
        near = (rel > tol / 10) & (rel < tol * 10)
        if near.any():
            raise InconclusiveError(f"singular values {sv[near]} within a factor 10 of the rank tolerance {tol}")
    return int(np.count_nonzero(rel > tol))


def span_rank(vectors: Sequence, tol: float = DEFAULT_RANK_TOL, exact_backend: bool = False) -> int:
    """Rank of the span of ``vectors``; exact over Q for integer/rational inputs when asked."""
    if len(vectors) == 0:
        return 0
    if exact_backend:
        mat = _as_matrix(vectors)
        if mat.dtype.kind in "iub":
            # rank(V) == rank(V V^T) for real V; the Gram matrix is tiny
            gram = (mat.astype(object) @ mat.T.astype(object)).tolist()
            return exact.rank(gram)
        if mat.dtype == object:
            return exact.rank(mat.tolist())
        raise DomainError("exact rank needs integer or rational entries")
    return numerical_rank(singular_values(vectors), tol)


@dataclass(frozen=True)
class Subspace:
    """Subspace of C^ambient_dim with an orthonormal basis stored as columns."""

    ambient_dim: int
    basis: np.ndarray = field(repr=False)
    tol: float = DEFAULT_RANK_TOL

    def __post_init__(self):
        if self.basis.ndim != 2 or self.basis.shape[0] != self.ambient_dim:
            raise DomainError(f"basis shape {self.basis.shape} does not fit ambient dimension {self.ambient_dim}")
        self.basis.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int, tol: float = DEFAULT_RANK_TOL) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0)), tol)

    @classmethod
    def span(cls, vectors, ambient_dim: int | None = None, tol: float = DEFAULT_RANK_TOL, strict: bool = False) -> "Subspace":
        """Orthonormalize a spanning family (rows or list of vectors) via SVD."""
        vectors = list(vectors)
        if not vectors:
            if ambient_dim is None:
                raise DomainError("ambient dimension is required for an empty span")
            return cls.zero(ambient_dim, tol)
        mat = _as_matrix(vectors)
        if ambient_dim is not None and mat.shape[1] != ambient_dim:
            raise DomainError(f"vectors of length {mat.shape[1]} in ambient dimension {ambient_dim}")
        dtype = complex if np.iscomplexobj(mat) else float
        u, sv, _ = np.linalg.svd(mat.T.astype(dtype), full_matrices=False)
        r = numerical_rank(sv, tol, strict)
        return cls(mat.shape[1], np.ascontiguousarray(u[:, :r]), tol)

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def contains(self, v: np.ndarray, tol: float | None = None) -> bool:
        tol = self.tol if tol is None else tol
        v = np.asarray(v).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            return True
        resid = v - self.basis @ (self.basis.conj().T @ v)
        return bool(np.linalg.norm(resid) <= tol * norm)

    def orthogonality_defect(self) -> float:
        if self.dim == 0:
            return 0.0
        g = self.basis.conj().T @ self.basis
        return float(np.max(np.abs(g - np.eye(self.dim))))

    def to_json(self) -> dict:
        b = self.basis
        if np.iscomplexobj(b):
            entries = [[float(x.real), float(x.imag)] for x in b.T.reshape(-1)]
            kind = "complex"
        else:
            entries = [float(x) for x in b.T.reshape(-1)]
            kind = "float"
        return {"ambient_dim": self.ambient_dim, "dim": self.dim, "tol": self.tol, "shape": [self.dim, self.ambient_dim], "scalar_kind": kind, "entries": entries}


def subspace_sines(a: Subspace, b: Subspace) -> tuple[np.ndarray, np.ndarray]:
    """Sines of the principal angles from directions of ``a`` to ``b``.

    Returns (sines ascending, matching right singular vectors as columns in
    a's coordinates).
    """
    resid = a.basis - b.basis @ (b.basis.conj().T @ a.basis)
    _, sv, vh = np.linalg.svd(resid, full_matrices=True)
    sines = np.zeros(a.dim)
    sines[: sv.size] = sv
    order = np.argsort(sines, kind="stable")
    return sines[order], vh.conj().T[:, order]


def intersect_subspaces(a: Subspace, b: Subspace, tol: float = DEFAULT_RANK_TOL, strict: bool = False) -> Subspace:
    """A ∩ B: directions of A whose principal angle to B has sine <= tol."""
    if a.ambient_dim != b.ambient_dim:
        raise DomainError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, tol)
    sines, vecs = subspace_sines(a, b)
    if strict:
        near = (sines > tol / 10) & (sines < tol * 10)
        if near.any():
            raise InconclusiveError(f"principal angle sines {sines[near]} within a factor 10 of tolerance {tol}")
    keep = sines <= tol
    basis = a.basis @ vecs[:, keep]
    if basis.shape[1]:
        # re-orthonormalize to scrub rounding
        q, _ = np.linalg.qr(basis)
        basis = q
    return Subspace(a.ambient_dim, np.ascontiguousarray(basis), tol)


def orthogonal_complement_in(outer: Subspace, inner: Subspace, tol: float = DEFAULT_RANK_TOL, strict: bool = False) -> Subspace:
    """Orthonormal basis of outer ⊖ inner (inner assumed contained in outer)."""
    if outer.dim == 0:
        return Subspace.zero(outer.ambient_dim, tol)
    resid = outer.basis - inner.basis @ (inner.basis.conj().T @ outer.basis)
    u, sv, _ = np.linalg.svd(resid, full_matrices=False)
    # columns of outer.basis are unit vectors, so the threshold is absolute
    if strict:
        near = (sv > tol / 10) & (sv < tol * 10)
        if near.any():
            raise InconclusiveError(f"defect singular values {sv[near]} within a factor 10 of tolerance {tol}")
    r = int(np.count_nonzero(sv > tol))
    return Subspace(outer.ambient_dim, np.ascontiguousarray(u[:, :r]), tol)

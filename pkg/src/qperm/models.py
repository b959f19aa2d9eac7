"""Magic unitaries in matrix algebras and flat (rank-one, d = N) models.

A model stores an N x N array of d x d projections ``P[i, j]``.  Flat models
additionally keep the unit vectors ``xi[i, j]`` spanning each projection.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, ValidationError
from .latin import LatinSquare, circulant_corner_square, validate_square

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class MagicUnitary:
    P: np.ndarray = field(repr=False)
    provenance: tuple = ()

    def __post_init__(self):
        P = np.asarray(self.P, dtype=complex)
        if P.ndim != 4 or P.shape[0] != P.shape[1] or P.shape[2] != P.shape[3]:
            raise DomainError(f"projection array must have shape (N, N, d, d), got {P.shape}")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "provenance", tuple(self.provenance))

    @property
    def N(self) -> int:
        return self.P.shape[0]

    @property
    def d(self) -> int:
        return self.P.shape[2]

    @property
    def flat(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "flat": False,
            "matrices": _encode_complex(self.P),
            "provenance": list(self.provenance),
        }


@dataclass(frozen=True)
class FlatModel(MagicUnitary):
    xi: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=complex)
        if xi.ndim != 3 or xi.shape[0] != xi.shape[1] or xi.shape[2] != xi.shape[0]:
            raise DomainError(f"flat model vectors must have shape (N, N, N), got {xi.shape}")
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        super().__post_init__()

    @classmethod
    def from_vectors(cls, xi: np.ndarray, provenance: Sequence = ()) -> "FlatModel":
        xi = np.asarray(xi, dtype=complex)
        norms = np.linalg.norm(xi, axis=2, keepdims=True)
        if np.any(norms == 0):
            raise DomainError("flat model vectors must be nonzero")
        xi = xi / norms
        P = np.einsum("ija,ijb->ijab", xi, xi.conj())
        return cls(P, tuple(provenance), xi)

    @property
    def flat(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "flat": True,
            "vectors": _encode_complex(self.xi),
            "provenance": list(self.provenance),
        }


def _encode_complex(arr: np.ndarray):
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _decode_complex(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def model_from_json(data: dict) -> MagicUnitary:
    try:
        N, d = int(data["N"]), int(data["d"])
        if data.get("flat"):
            xi = _decode_complex(data["vectors"])
            if xi.shape != (N, N, N) or d != N:
                raise ValidationError(f"flat model vectors have shape {xi.shape}, expected ({N}, {N}, {N})")
            return FlatModel.from_vectors(xi, data.get("provenance", ()))
        P = _decode_complex(data["matrices"])
        if P.shape != (N, N, d, d):
            raise ValidationError(f"model matrices have shape {P.shape}, expected ({N}, {N}, {d}, {d})")
        return MagicUnitary(P, tuple(data.get("provenance", ())))
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed model file: {exc!r}") from None
    except ValueError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed model file: {exc}") from None


def load_model(path) -> MagicUnitary:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return model_from_json(data)


def save_model(m: MagicUnitary, path) -> None:
    with open(path, "w") as fh:
        json.dump(m.to_json(), fh)


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    N: int
    d: int
    flat: bool
    tol: float
    worst: dict[str, float]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"N": self.N, "d": self.d, "flat": self.flat, "tol": self.tol, "ok": self.ok,
                "worst": self.worst, "failures": self.failures}


def validate(m: MagicUnitary, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check projections, row/column resolutions of the identity and (flat) rank one."""
    P, N, d = m.P, m.N, m.d
    eye = np.eye(d)
    adj = np.abs(P - np.conj(np.swapaxes(P, 2, 3))).max(axis=(2, 3))
    idem = np.abs(np.einsum("ijab,ijbc->ijac", P, P) - P).max(axis=(2, 3))
    rows = np.abs(P.sum(axis=1) - eye).max(axis=(1, 2))
    cols = np.abs(P.sum(axis=0) - eye).max(axis=(1, 2))
    worst = {
        "self_adjoint": float(adj.max()),
        "idempotent": float(idem.max()),
        "row_sums": float(rows.max()),
        "column_sums": float(cols.max()),
    }
    failures = []
    for (i, j) in zip(*np.nonzero(adj > tol)):
        failures.append(f"P[{i},{j}] is not self-adjoint (deviation {adj[i, j]:.3g})")
    for (i, j) in zip(*np.nonzero(idem > tol)):
        failures.append(f"P[{i},{j}] is not idempotent (deviation {idem[i, j]:.3g})")
    for i in np.nonzero(rows > tol)[0]:
        failures.append(f"row {i} does not sum to the identity (deviation {rows[i]:.3g})")
    for j in np.nonzero(cols > tol)[0]:
        failures.append(f"column {j} does not sum to the identity (deviation {cols[j]:.3g})")
    if m.flat:
        tr = np.abs(np.einsum("ijaa->ij", P) - 1.0)
        worst["rank_one"] = float(tr.max())
        for (i, j) in zip(*np.nonzero(tr > tol)):
            failures.append(f"P[{i},{j}] is not rank one (trace deviation {tr[i, j]:.3g})")
        if d != N:
            failures.append(f"flat model has fiber dimension {d} != N = {N}")
    return ValidationReport(N, d, m.flat, tol, worst, failures)


def max_commutator(m: MagicUnitary) -> float:
    """Largest operator norm of [P_ij, P_kl] over all pairs of entries."""
    Q = m.P.reshape(m.N * m.N, m.d, m.d)
    worst = 0.0
    for a in range(Q.shape[0]):
        c = np.einsum("ab,nbc->nac", Q[a], Q) - np.einsum("nab,bc->nac", Q, Q[a])
        worst = max(worst, float(np.linalg.norm(c, ord=2, axis=(1, 2)).max()))
    return worst


def is_classical(m: MagicUnitary, tol: float = DEFAULT_TOL) -> bool:
    return max_commutator(m) <= tol


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a @ b - b @ a, ord=2))


def projection(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())


# ---------------------------------------------------------------- constructions

def permutation_model(sigma: Sequence[int]) -> MagicUnitary:
    """Scalar-fiber model with P_ij = 1 iff sigma(i) = j."""
    N = len(sigma)
    if sorted(sigma) != list(range(N)):
        raise DomainError(f"{sigma} is not a permutation of 0..{N - 1}")
    P = np.zeros((N, N, 1, 1))
    for i, j in enumerate(sigma):
        P[i, j, 0, 0] = 1.0
    return MagicUnitary(P, ({"op": "permutation_model", "sigma": list(map(int, sigma))},))


def from_latin(L: LatinSquare | Sequence[Sequence[int]], basis: np.ndarray | None = None, tol: float = DEFAULT_TOL) -> FlatModel:
    """Flat model with xi_ij = basis[L_ij] (default: the standard basis)."""
    if not isinstance(L, LatinSquare):
        problems = validate_square(L)
        if problems:
            raise ValidationError("not a Latin square: " + "; ".join(problems))
        L = LatinSquare.from_json(L)
    N = L.N
    basis = np.eye(N, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    if basis.shape != (N, N):
        raise DomainError(f"basis must hold {N} vectors of length {N}, got shape {basis.shape}")
    gram = basis @ basis.conj().T
    if np.abs(gram - np.eye(N)).max() > tol:
        raise ValidationError("basis is not orthonormal")
    idx = np.array(L.rows)
    xi = basis[idx]
    return FlatModel.from_vectors(xi, ({"op": "from_latin", "square": L.to_json()},))


def deform_corner_2x2(m: FlatModel) -> FlatModel:
    """Swap the [[e_0, e_1], [e_1, e_0]] corner for [[P_u, P_v], [P_v, P_u]], u = e_0 + e_1, v = e_0 - e_1."""
    if not isinstance(m, FlatModel):
        raise DomainError("deform_corner_2x2 needs a flat model")
    N = m.N
    e0, e1 = np.eye(N)[0], np.eye(N)[1]
    xi = m.xi
    pattern = [[e0, e1], [e1, e0]]
    for i in range(2):
        for j in range(2):
            if np.abs(m.P[i, j] - projection(pattern[i][j])).max() > DEFAULT_TOL:
                raise ValidationError(
                    f"corner entry ({i},{j}) is not the projection onto e_{1 if pattern[i][j] is e1 else 0}; "
                    "the 2x2 corner must follow the [[0,1],[1,0]] symbol pattern"
                )
    u = (e0 + e1) / np.sqrt(2)
    v = (e0 - e1) / np.sqrt(2)
    new_xi = np.array(xi)
    new_P = np.array(m.P)
    for (i, j), vec in {(0, 0): u, (0, 1): v, (1, 0): v, (1, 1): u}.items():
        new_xi[i, j] = vec
        new_P[i, j] = projection(vec)
    return FlatModel(new_P, m.provenance + ({"op": "deform_corner_2x2"},), new_xi)


def glue_corner(inner: FlatModel, N: int) -> FlatModel:
    """Embed an M x M flat model in the corner of the circulant-corner Latin model of order N."""
    if not isinstance(inner, FlatModel):
        raise DomainError("glue_corner needs a flat inner model")
    M = inner.N
    if 2 * M > N:
        raise DomainError(f"glue_corner needs 2M <= N, got M={M}, N={N}")
    report = validate(inner)
    if not report.ok:
        raise ValidationError("inner model is invalid: " + "; ".join(report.failures))
    L = circulant_corner_square(N, M)
    xi = np.eye(N, dtype=complex)[np.array(L.rows)]
    # identity identification of C^M with span(e_0..e_{M-1})
    xi[:M, :M, :M] = inner.xi
    xi[:M, :M, M:] = 0
    prov = ({"op": "glue_corner", "N": N, "M": M, "square": L.to_json(), "inner": list(inner.provenance)},)
    return FlatModel.from_vectors(xi, prov)


def direct_sum(models: Sequence[MagicUnitary]) -> MagicUnitary:
    """Block-diagonal model; the fiber dimension is the sum of the summands' fibers."""
    models = list(models)
    if not models:
        raise DomainError("direct_sum needs at least one model")
    if len(models) == 1:
        return models[0]
    N = models[0].N
    if any(m.N != N for m in models):
        raise DomainError(f"direct_sum needs a common size, got {[m.N for m in models]}")
    d = sum(m.d for m in models)
    P = np.zeros((N, N, d, d), dtype=complex)
    off = 0
    for m in models:
        P[:, :, off:off + m.d, off:off + m.d] = m.P
        off += m.d
    prov = ({"op": "direct_sum", "parts": [list(m.provenance) for m in models]},)
    return MagicUnitary(P, prov)


def describe(m: MagicUnitary) -> dict:
    """Summary used by the CLI: sizes, validation, classicality and row/column Gram data."""
    rep = validate(m)
    out = {"N": m.N, "d": m.d, "flat": m.flat, "valid": rep.ok, "worst": rep.worst,
           "max_commutator": max_commutator(m), "ranks": np.rint(np.einsum("ijaa->ij", m.P).real).astype(int).tolist()}
    if m.flat:
        xi = m.xi
        row_gram = np.abs(np.einsum("ija,ika->ijk", xi.conj(), xi))
        col_gram = np.abs(np.einsum("jia,kia->ijk", xi.conj(), xi))
        eye = np.eye(m.N)
        out["row_gram_deviation"] = float(np.abs(row_gram - eye).max())
        out["column_gram_deviation"] = float(np.abs(col_gram - eye).max())
        # |<xi_ij, xi_kl>|^2 across rows shows how far the model is from classical
        overlaps = np.abs(np.einsum("ija,kla->ijkl", xi.conj(), xi)) ** 2
        out["distinct_overlaps"] = sorted({round(float(x), 6) for x in overlaps.reshape(-1)})
    return out


def generated_group_order(perms: Sequence[Sequence[int]], limit: int = 10**6) -> int:
    """Order of the permutation group generated by ``perms`` (closure by BFS)."""
    perms = [tuple(p) for p in perms]
    if not perms:
        return 1
    N = len(perms[0])
    ident = tuple(range(N))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in perms:
                h = tuple(s[x] for x in g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
                    if len(seen) > limit:
                        raise DomainError(f"group closure exceeded {limit} elements")
        frontier = nxt
    return len(seen)


def full_symmetric_latin_square(N: int) -> LatinSquare:
    """First Latin square (second row in lexicographic order) whose symbol permutations generate S_N."""
    import itertools
    from math import factorial

    from .latin import LatinRectangle, complete_rectangle

    if not 1 <= N <= 8:
        raise DomainError(f"generating-set search is limited to N <= 8, got {N}")
    first = tuple(range(N))
    for second in itertools.permutations(range(N)):
        if N > 1 and any(second[c] == c for c in range(N)):
            continue
        rows = (first, tuple(second)) if N > 1 else (first,)
        L = complete_rectangle(LatinRectangle(N, rows))
        if generated_group_order(L.permutations()) == factorial(N):
            return L
    raise DomainError(f"no Latin square of order {N} has permutations generating S_{N}")

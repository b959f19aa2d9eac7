import csv
import io
import itertools
import json
from math import factorial

import numpy as np
import pytest

from qperm import invariants
from qperm.errors import DomainError, InconclusiveError
from qperm.invariants import (
    CSV_COLUMNS,
    Certificate,
    CornerEmbedding,
    Verdict,
    all_words,
    averaging_projector,
    certificates_to_csv,
    certificates_to_json,
    classical_fix,
    classical_fix_by_averaging,
    corner_quantum_fix,
    nc_span,
    permutation_tensor,
    reflection_classical_fix,
    reflection_fix_by_averaging,
    reflection_quantum_fix,
    reflection_topgen_certificate,
    topgen_certificate,
)
from qperm.partitions import ColoredWord, bell, catalan
from qperm.tensor_calc import Subspace, intersect_subspaces


def corner_classical_fix_by_averaging(N, M, k):
    # average over S_M permuting e_0..e_{M-1} and fixing the rest
    acc = np.zeros((N**k, N**k))
    for tau in itertools.permutations(range(M)):
        acc += permutation_tensor(list(tau) + list(range(M, N)), k)
    return Subspace.span(acc / factorial(M), N**k)


def test_classical_fix_examples():
    assert classical_fix(7, 1).dim == 1
    v = classical_fix(4, 1).basis[:, 0]
    assert np.allclose(np.abs(v), 0.5)
    assert classical_fix(5, 4).dim == 15 == bell(4)
    assert classical_fix(2, 2).dim == 2


def test_averaging_projector_is_projection():
    A = averaging_projector(3, 2)
    assert np.allclose(A @ A, A)
    assert np.allclose(A, A.T)


@pytest.mark.parametrize("N,k", [(N, k) for N in range(1, 6) for k in range(5) if N**k <= 625])
def test_classical_fix_matches_averaging(N, k):
    a = classical_fix(N, k)
    b = classical_fix_by_averaging(N, k)
    assert a.dim == b.dim
    assert intersect_subspaces(a, b).dim == a.dim


def test_corner_examples():
    for N in (4, 5, 6):
        for k in range(4):
            assert corner_quantum_fix(CornerEmbedding(N, N), k).dim == catalan(k)
    for N, M in [(5, 4), (6, 4), (7, 5)]:
        assert corner_quantum_fix(CornerEmbedding(N, M), 1).dim == 1 + N - M
    assert corner_quantum_fix(CornerEmbedding(5, 4), 2).dim == 5


@pytest.mark.parametrize("N,M,k", [(5, 4, 2), (5, 4, 3), (6, 4, 2), (6, 5, 3), (5, 3, 3)])
def test_corner_fix_matches_classical_corner_averaging(N, M, k):
    # for k <= 3 every partition is non-crossing, so S_M^+ and S_M share fix spaces
    a = corner_quantum_fix(CornerEmbedding(N, M), k)
    b = corner_classical_fix_by_averaging(N, M, k)
    assert a.dim == b.dim == intersect_subspaces(a, b).dim


def test_corner_embedding_bounds():
    with pytest.raises(DomainError):
        CornerEmbedding(4, 5)
    with pytest.raises(DomainError):
        CornerEmbedding(4, 0)


@pytest.mark.parametrize("N,M", [(5, 4), (6, 5), (6, 4), (4, 3)])
def test_corner_fix_contains_nc_span(N, M):
    for k in range(4):
        outer = corner_quantum_fix(CornerEmbedding(N, M), k)
        inner = nc_span(N, k)
        assert intersect_subspaces(outer, inner).dim == inner.dim


@pytest.mark.parametrize("N,M", [(6, 5), (5, 4), (6, 4)])
def test_topgen_equal(N, M):
    for k in range(5):
        c = topgen_certificate(N, M, k)
        assert c.verdict is Verdict.EQUAL
        assert c.dim_lhs == c.dim_rhs == catalan(k)


def test_topgen_negative_control():
    c = topgen_certificate(4, 3, 4)
    assert c.verdict is Verdict.STRICTLY_LARGER
    assert (c.dim_lhs, c.dim_rhs) == (15, 14)
    assert c.witness_partitions == ["0101"]
    assert len(c.witness) == 1


def test_topgen_preconditions():
    with pytest.raises(DomainError):
        topgen_certificate(5, 2, 2)
    with pytest.raises(DomainError):
        topgen_certificate(5, 5, 2)


def test_topgen_inconclusive_on_knife_edge(monkeypatch):
    def knife_edge(*args, **kwargs):
        raise InconclusiveError("singular value 3e-8 within a factor 10 of the tolerance")

    monkeypatch.setattr(invariants, "intersect_subspaces", knife_edge)
    c = topgen_certificate(5, 4, 2)
    assert c.verdict is Verdict.INCONCLUSIVE
    assert c.dim_lhs is None and "factor 10" in c.note


def test_certificate_invariants_enforced():
    with pytest.raises(AssertionError):
        Certificate("x", {}, 2, 1, Verdict.EQUAL, 1e-8)
    with pytest.raises(AssertionError):
        Certificate("x", {}, 2, 1, Verdict.STRICTLY_LARGER, 1e-8)


def test_certificate_serialization():
    certs = [topgen_certificate(5, 4, k) for k in (1, 2)]
    rows = list(csv.reader(io.StringIO(certificates_to_csv(certs))))
    assert rows[0] == CSV_COLUMNS
    assert rows[1] == ["topgen", "N=5;M=4;k=1", "1", "1", "EQUAL", "1e-08", "float64-svd", ""]
    data = json.loads(certificates_to_json(certs))
    assert data[1]["verdict"] == "EQUAL" and data[1]["params"] == {"N": 5, "M": 4, "k": 2}
    timed = list(csv.reader(io.StringIO(certificates_to_csv(certs, timing=True))))
    assert timed[1][-1] != ""


def test_reflection_classical_examples():
    for k in range(4):
        w = ColoredWord(1, (0,) * k)
        assert reflection_classical_fix(4, 1, w, group="S").dim == classical_fix(4, k).dim
        assert reflection_classical_fix(4, 1, w, group="H").dim == classical_fix(4, k).dim
    # H_2^2 on w = (1,1): only the diagonal orbit survives
    h22 = reflection_classical_fix(2, 2, ColoredWord(2, (1, 1)))
    assert h22.dim == 1
    for s in (2, 3, 4):
        assert reflection_classical_fix(4, s, ColoredWord(s, (1,))).dim == 0


def test_h22_oracle_by_averaging():
    w = ColoredWord(2, (1, 1))
    oracle = reflection_fix_by_averaging(2, 2, w)
    assert oracle.dim == 1
    assert len(list(invariants.monomial_matrices(2, 2))) == 8


@pytest.mark.parametrize("N,s", [(2, 2), (3, 2), (3, 3), (2, 4)])
def test_reflection_classical_matches_averaging(N, s):
    for w in all_words(s, 3 if N**3 * s**N * factorial(N) <= 50000 else 2):
        a = reflection_classical_fix(N, s, w)
        b = reflection_fix_by_averaging(N, s, w)
        assert a.dim == b.dim, str(w)
        if a.dim:
            assert intersect_subspaces(a, b).dim == a.dim


def test_reflection_caps():
    with pytest.raises(DomainError):
        reflection_classical_fix(7, 2, ColoredWord(2, (1,)))
    with pytest.raises(DomainError):
        reflection_classical_fix(4, 5, ColoredWord(5, (1,)))
    with pytest.raises(DomainError):
        reflection_classical_fix(4, 2, ColoredWord(3, (1,)))


def test_reflection_quantum_examples():
    assert reflection_quantum_fix(CornerEmbedding(5, 5), 1, ColoredWord(1, (0, 0, 0))).dim == 5
    assert reflection_quantum_fix(CornerEmbedding(5, 5), 2, ColoredWord(2, (1, 1))).dim == 1
    assert reflection_quantum_fix(CornerEmbedding(5, 5), 2, ColoredWord(2, (1, 0))).dim == 0
    with pytest.raises(DomainError):
        reflection_quantum_fix(CornerEmbedding(5, 3), 2, ColoredWord(2, (1,)))


def test_reflection_s1_matches_uncolored():
    for k in range(4):
        w = ColoredWord(1, (0,) * k)
        assert reflection_quantum_fix(CornerEmbedding(5, 4), 1, w).dim == corner_quantum_fix(CornerEmbedding(5, 4), k).dim


def test_reflection_certificates():
    c = reflection_topgen_certificate(6, 2, ColoredWord(2, (1, 1)))
    assert c.verdict is Verdict.EQUAL and c.dim_lhs == 1
    c = reflection_topgen_certificate(6, 1, ColoredWord(1, (0, 0, 0)))
    assert c.verdict is Verdict.EQUAL and c.dim_lhs == c.dim_rhs == 5
    c = reflection_topgen_certificate(6, 2, ColoredWord(2, (1,)))
    assert c.verdict is Verdict.EQUAL and c.dim_lhs == c.dim_rhs == 0
    with pytest.raises(DomainError):
        reflection_topgen_certificate(4, 2, ColoredWord(2, (1,)))


def test_all_words_counts():
    assert len(list(all_words(2, 3))) == 2 + 4 + 8
    assert [str(w) for w in all_words(3, 1)] == [str(ColoredWord(3, (a,))) for a in range(3)]

import itertools
from fractions import Fraction

import numpy as np
import pytest

from qperm import exact
from qperm.errors import DomainError, InconclusiveError, ResourceError
from qperm.partitions import Partition, catalan, enumerate_partitions, join
from qperm.tensor_calc import (
    Subspace,
    TensorOperator,
    gram_matrix,
    gram_matrix_direct,
    intersect_subspaces,
    numerical_rank,
    partition_map,
    partition_vector,
    span_rank,
)

P = Partition.from_blocks


def direct_inner_product(p, q, N):
    # sum over all multi-indices of delta_p(i) delta_q(i)
    total = 0
    for i in itertools.product(range(N), repeat=p.k):
        dp = all(len({i[x - 1] for x in b}) == 1 for b in p.blocks)
        dq = all(len({i[x - 1] for x in b}) == 1 for b in q.blocks)
        total += dp and dq
    return total


def test_partition_map_identity():
    for N in (1, 3, 5):
        T = partition_map(P([[1, 2]]), 1, 1, N)
        assert T.scalar_kind == "int"
        assert np.array_equal(T.entries, np.eye(N, dtype=int))


def test_partition_map_all_ones():
    T = partition_map(Partition.singletons(2), 1, 1, 4)
    assert np.array_equal(T.entries, np.ones((4, 4), dtype=int))


def test_partition_map_one_block_vector():
    T = partition_map(Partition.one_block(4), 0, 4, 3)
    v = T.flat()
    assert v.sum() == 3
    for a in range(3):
        assert v[a * (27 + 9 + 3 + 1)] == 1


def test_partition_map_orientation():
    # p = {{1,3},{2}} with k=1 input slot and l=2 output slots: T(e_i) = sum_j e_i ⊗ e_j
    N = 3
    T = partition_map(P([[1, 2], [3]]), 1, 2, N)
    assert T.shape == (N**2, N)
    for i in range(N):
        col = T.entries[:, i].reshape(N, N)
        expected = np.zeros((N, N), dtype=int)
        expected[i, :] = 1
        assert np.array_equal(col, expected)


def test_partition_map_functional_and_size_errors():
    T = partition_map(P([[1, 2]]), 2, 0, 3)
    assert T.shape == (1, 9)
    with pytest.raises(DomainError):
        partition_map(P([[1, 2]]), 1, 2, 3)


def test_resource_cap(monkeypatch):
    monkeypatch.setenv("QPERM_CAP", "100")
    with pytest.raises(ResourceError):
        partition_map(Partition.one_block(4), 0, 4, 5)


def test_operator_json_roundtrip():
    T = partition_map(P([[1, 3], [2]]), 1, 2, 2)
    back = TensorOperator.from_json(T.to_json())
    assert back == T
    R = TensorOperator(2, 1, 1, np.array([[Fraction(1, 2), 0], [0, Fraction(-3, 4)]], dtype=object), "rational")
    data = R.to_json()
    assert data["entries"] == ["1/2", "0", "0", "-3/4"]
    assert TensorOperator.from_json(data) == R


def test_gram_nc2_n4():
    # oracle: direct summation over the 16 index pairs
    nc2 = enumerate_partitions(2)
    expected = [[direct_inner_product(p, q, 4) for q in nc2] for p in nc2]
    assert expected == [[4, 4], [4, 16]]
    assert gram_matrix(nc2, 4) == expected


def test_gram_k1():
    for N in (1, 4, 7):
        assert gram_matrix(enumerate_partitions(1), N) == [[N]]


def test_gram_diagonal_counts_blocks():
    for p in enumerate_partitions(4, False):
        assert gram_matrix([p], 3) == [[3**p.n_blocks]]
        assert direct_inner_product(p, p, 3) == 3**p.n_blocks


@pytest.mark.parametrize("k,N", [(k, N) for k in range(1, 6) for N in range(1, 7) if N**k <= 8000])
def test_gram_identity_against_direct_summation(k, N):
    parts = enumerate_partitions(k, False)
    assert gram_matrix(parts, N) == gram_matrix_direct(parts, N)


def test_gram_identity_small_bruteforce():
    for p, q in itertools.product(enumerate_partitions(3, False), repeat=2):
        assert N_pow(p, q, 2) == direct_inner_product(p, q, 2)


def N_pow(p, q, N):
    return N ** join(p, q).n_blocks


def test_gram_mixed_k_rejected():
    with pytest.raises(DomainError):
        gram_matrix([Partition.singletons(1), Partition.singletons(2)], 2)


def nc_vectors(k, N):
    return [partition_map(p, 0, k, N) for p in enumerate_partitions(k)]


def test_span_rank_nc4_n5():
    assert span_rank(nc_vectors(4, 5)) == 14
    assert span_rank(nc_vectors(4, 5), exact_backend=True) == 14


def test_span_rank_nc3_n2():
    assert span_rank(nc_vectors(3, 2)) == 4
    assert span_rank(nc_vectors(3, 2), exact_backend=True) == 4


def test_span_rank_duplicates_and_empty():
    v = partition_vector(Partition.one_block(2), 3)
    assert span_rank([v, v, 2 * v]) == 1
    assert span_rank([]) == 0


@pytest.mark.parametrize("k", range(6))
@pytest.mark.parametrize("N", [4, 5])
def test_nc_vectors_form_a_basis(k, N):
    if N**k > 5000:
        pytest.skip("covered by the acceptance suite")
    assert span_rank(nc_vectors(k, N), exact_backend=True) == catalan(k)
    assert exact.determinant(gram_matrix(enumerate_partitions(k), N)) != 0


def test_gram_singular_small_n():
    assert exact.determinant(gram_matrix(enumerate_partitions(3), 2)) == 0


def test_numerical_rank_strict():
    with pytest.raises(InconclusiveError):
        numerical_rank(np.array([1.0, 2e-8]), 1e-8, strict=True)
    assert numerical_rank(np.array([1.0, 1e-12]), 1e-8, strict=True) == 1


def test_intersect_examples():
    e = np.eye(3)
    A = Subspace.span([e[0], e[1]])
    B = Subspace.span([e[1], e[2]])
    C = intersect_subspaces(A, B)
    assert C.dim == 1 and C.contains(e[1])
    assert intersect_subspaces(A, A).dim == 2
    assert intersect_subspaces(Subspace.span([e[0]]), Subspace.span([e[1], e[2]])).dim == 0


def test_intersect_mismatch():
    with pytest.raises(DomainError):
        intersect_subspaces(Subspace.span([np.ones(2)]), Subspace.span([np.ones(3)]))


def test_intersect_knife_edge_is_inconclusive():
    a = np.array([1.0, 0.0])
    b = np.array([1.0, 3e-8])
    with pytest.raises(InconclusiveError):
        intersect_subspaces(Subspace.span([a]), Subspace.span([b]), 1e-8, strict=True)


def test_intersect_symmetric_dimensions():
    rng = np.random.default_rng(3)
    for _ in range(20):
        common = rng.standard_normal((2, 8))
        A = Subspace.span(list(common) + list(rng.standard_normal((2, 8))))
        B = Subspace.span(list(common) + list(rng.standard_normal((3, 8))))
        assert intersect_subspaces(A, B).dim == intersect_subspaces(B, A).dim == 2


def test_subspace_is_orthonormal():
    S = Subspace.span([partition_vector(p, 3) for p in enumerate_partitions(3, False)])
    assert S.dim == 5
    assert S.orthogonality_defect() < 1e-10
    assert S.to_json()["dim"] == 5

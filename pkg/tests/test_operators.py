import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qasep.config import Configuration, Sector, all_configurations, counts, index, occupations
from qasep.laurent import ONE, Q, Q_INV, ZERO, q_power
from qasep.operators import (
    QVector,
    SiteOperator,
    SparseQMatrix,
    basis_vector,
    commutator,
    conjugate_by_diagonal,
    diagonal_lift,
    embed,
    sector_summation_vector,
    site_ops,
    summation_vector,
)

O = site_ops()
C = Configuration.parse
A, E, B = 0, 1, 2  # row/col of the 3x3 site matrices


def unit3(r, c):
    rows = [[ZERO] * 3 for _ in range(3)]
    rows[r][c] = ONE
    return SiteOperator(rows)


def test_site_matrices_are_the_expected_units():
    assert O["a+"] == unit3(A, E)
    assert O["a-"] == unit3(E, A)
    assert O["b+"] == unit3(B, E)
    assert O["b-"] == unit3(E, B)
    assert O["c+"] == unit3(A, B)
    assert O["c-"] == unit3(B, A)
    assert O["ahat"] + O["vhat"] + O["bhat"] == O["1"]
    assert O["a+"] @ O["b-"] == O["c+"]


def test_site_product_table():
    """All 36 products of a projector with a flip: the result is either 0 or the flip."""
    projectors = {"ahat": A, "vhat": E, "bhat": B}
    zero = SiteOperator([[ZERO] * 3 for _ in range(3)])
    for pname, p in projectors.items():
        for fname in ("a+", "a-", "b+", "b-", "c+", "c-"):
            f = O[fname]
            (r, c), = [(r, c) for r in range(3) for c in range(3) if not f[r, c].is_zero()]
            assert O[pname] @ f == (f if r == p else zero)
            assert f @ O[pname] == (f if c == p else zero)


def test_embed_examples():
    assert embed(O["ahat"], 1, 1) == SparseQMatrix(3, {(1, 1): 1})
    assert (embed(O["ahat"], 2, 2) @ basis_vector(C("AB"))).is_zero()
    assert embed(O["a-"], 1, 2) @ basis_vector(C("A0")) == basis_vector(C("00"))


def test_commutator_examples():
    assert commutator(embed(O["ahat"], 1, 2), embed(O["bhat"], 2, 2)).is_zero()
    lhs = commutator(embed(O["a+"], 1, 1), embed(O["a-"], 1, 1))
    assert lhs == embed(O["ahat"] - O["vhat"], 1, 1)


def test_conjugate_by_diagonal_examples():
    A_ = SparseQMatrix(2, {(1, 2): 1, (2, 1): Q})
    assert conjugate_by_diagonal(SparseQMatrix.identity(2), A_) == A_
    D = SparseQMatrix.diagonal([Q, ONE])
    assert conjugate_by_diagonal(D, SparseQMatrix(2, {(1, 2): 1})) == SparseQMatrix(2, {(1, 2): Q})
    assert conjugate_by_diagonal(D, conjugate_by_diagonal(D, A_)) == conjugate_by_diagonal(D @ D, A_)
    assert conjugate_by_diagonal(D, A_) == D @ A_ @ D.diagonal_inverse()
    with pytest.raises(ValueError):
        conjugate_by_diagonal(SparseQMatrix.diagonal([Q + ONE, ONE]), A_)


def test_summation_vectors():
    assert summation_vector(1) == QVector(3, {1: 1, 2: 1, 3: 1})
    s = sector_summation_vector(2, Sector(1, 0))
    assert dict(s.items()) == {index(C("A0")): ONE, index(C("0A")): ONE}


def test_diagonal_lift_examples():
    assert diagonal_lift(lambda c: 1, 2) == SparseQMatrix.identity(9)
    assert diagonal_lift(lambda c: occupations(c, 1)[0], 2) == embed(O["ahat"], 1, 2)
    assert diagonal_lift(lambda c: counts(c)[0], 2) == embed(O["ahat"], 1, 2) + embed(O["ahat"], 2, 2)


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_summation_absorption(L):
    s = summation_vector(L)
    rules = {"a+": "vhat", "b+": "vhat", "c+": "bhat", "a-": "ahat", "b-": "bhat", "c-": "ahat"}
    for k in range(1, L + 1):
        for op, proj in rules.items():
            assert s @ embed(O[op], k, L) == s @ embed(O[proj], k, L)


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_projectors_act_diagonally(L):
    for c in all_configurations(L):
        v = basis_vector(c)
        for k in range(1, L + 1):
            a, _, b = occupations(c, k)
            assert embed(O["ahat"], k, L) @ v == v.scale(a)
            assert embed(O["bhat"], k, L) @ v == v.scale(b)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_completeness(L):
    total = SparseQMatrix.zeros(3**L)
    for c in all_configurations(L):
        i = index(c)
        total = total + SparseQMatrix(3**L, {(i, i): 1})
    assert total == SparseQMatrix.identity(3**L)


site_vectors = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


@given(st.integers(1, 4).flatmap(lambda L: st.lists(st.tuples(site_vectors, site_vectors), min_size=L, max_size=L)))
def test_inner_product_factorises(pairs):
    L = len(pairs)
    W, V, expected = {}, {}, 1
    for c in all_configurations(L):
        w = v = 1
        for k, s in enumerate(c.sites):
            w *= pairs[k][0][s]
            v *= pairs[k][1][s]
        if w:
            W[index(c)] = w
        if v:
            V[index(c)] = v
    for u, v in pairs:
        expected *= sum(x * y for x, y in zip(u, v))
    assert QVector(3**L, W).dot(QVector(3**L, V)) == ONE * expected


sparse = st.integers(1, 2).flatmap(
    lambda L: st.dictionaries(
        st.tuples(st.integers(1, 3**L), st.integers(1, 3**L)),
        st.sampled_from([ONE, -ONE, Q, Q_INV, q_power(1), Q + ONE]),
        max_size=12,
    ).map(lambda d, L=L: SparseQMatrix(3**L, d))
)


@given(sparse)
def test_transpose_involution_and_commutator_antisymmetry(M):
    assert M.transpose().transpose() == M
    N = M @ M + M
    assert commutator(M, N) == -commutator(N, M)
    assert (M @ N).transpose() == N.transpose() @ M.transpose()


def test_first_mismatch_and_dump():
    M = SparseQMatrix(3, {(1, 2): Q})
    assert M.first_mismatch(M) is None
    r, c, a, b = M.first_mismatch(M.with_entry(1, 2, ONE))
    assert (r, c) == (1, 2) and a == Q and b == ONE
    assert M.dump() == "1 2 1*q^1\n"

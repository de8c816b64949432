import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qasep.laurent import (
    ONE,
    Q,
    Q_INV,
    ZERO,
    LaurentPoly,
    evaluate,
    monomial,
    parse,
    q_binomial,
    q_factorial,
    q_multinomial,
    q_number,
    q_power,
    render,
)

coeffs = st.one_of(st.integers(-9, 9), st.builds(Fraction, st.integers(-9, 9), st.integers(1, 7)))
polys = st.dictionaries(st.integers(-40, 40), coeffs, max_size=6).map(LaurentPoly)


def P(d):
    """Build from integer powers of q."""
    return LaurentPoly({2 * k: c for k, c in d.items()})


def test_monomial_examples():
    assert monomial(1, 2) == Q
    assert monomial(1, -1) == q_power(-1)
    assert render(monomial(1, -1)) == "1*q^(-1/2)"
    assert monomial(0, 5).is_zero()


def test_ring_examples():
    assert (Q + Q_INV) * Q == P({2: 1, 0: 1})
    assert (Q - Q).is_zero()
    assert (Q - Q_INV) * (Q + Q_INV) == P({2: 1, -2: -1})


def test_q_number_examples():
    assert q_number(0) == ZERO
    assert q_number(2) == P({1: 1, -1: 1})
    assert q_number(3) == P({2: 1, 0: 1, -2: 1})


def test_q_factorial_examples():
    assert q_factorial(0) == ONE
    assert q_factorial(2) == P({1: 1, -1: 1})
    assert q_factorial(3) == P({3: 1, 1: 2, -1: 2, -3: 1})
    with pytest.raises(ValueError):
        q_factorial(-1)


def test_q_multinomial_examples():
    assert q_multinomial(2, 1, 0) == P({1: 1, -1: 1})
    assert q_multinomial(3, 1, 1) == P({3: 1, 1: 2, -1: 2, -3: 1})
    for L in range(6):
        assert q_multinomial(L, 0, 0) == ONE
    with pytest.raises(ValueError):
        q_multinomial(2, 2, 1)


def test_evaluate_examples():
    assert evaluate(q_number(2), 2) == pytest.approx(2.5)
    assert evaluate(Q_INV, 1) == 1
    assert evaluate(q_multinomial(3, 1, 1), 1) == 6
    assert evaluate(q_power(1), 4.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        evaluate(Q, 0)


def test_render_format():
    p = P({1: 1, -1: -2}) + monomial(Fraction(1, 3), 3)
    assert render(p) == "-2*q^-1 + 1*q^1 + 1/3*q^(3/2)"
    assert render(ZERO) == "0"
    assert render(-Q) == "-1*q^1"


def _gaussian_sym(n, k):
    """Inversion-count oracle: q^(-k(n-k)) * sum over k-subsets of q^(2 inv)."""
    acc = {}
    for S in combinations(range(n), k):
        inv = sum(1 for s in S for j in range(n) if j not in S and j < s)
        acc[2 * inv - k * (n - k)] = acc.get(2 * inv - k * (n - k), 0) + 1
    return P(acc)


@pytest.mark.parametrize("n", range(0, 8))
def test_q_binomial_matches_inversion_oracle(n):
    for k in range(n + 1):
        assert q_binomial(n, k) == _gaussian_sym(n, k)


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == ZERO
    assert a * ONE == a


@given(polys)
def test_render_parse_roundtrip(p):
    assert parse(render(p)) == p


@given(st.integers(-30, 30))
def test_q_number_odd_and_inversion_symmetric(x):
    assert q_number(-x) == -q_number(x)
    assert q_number(x).invert_variable() == q_number(x)


@given(st.integers(1, 30))
def test_q_number_defining_relation(n):
    assert q_number(n) * (Q - Q_INV) == q_power(2 * n) - q_power(-2 * n)


@given(st.integers(0, 9).flatmap(lambda L: st.tuples(st.just(L), st.integers(0, L)).flatmap(lambda t: st.tuples(st.just(t[0]), st.just(t[1]), st.integers(0, t[0] - t[1])))))
def test_multinomial_at_one_is_classical(t):
    L, N, M = t
    expected = math.factorial(L) // (math.factorial(N) * math.factorial(M) * math.factorial(L - N - M))
    assert evaluate(q_multinomial(L, N, M), 1) == expected


@given(polys, st.floats(0.1, 5))
def test_evaluate_is_a_ring_homomorphism(p, q0):
    r = p * p + Q
    bound = evaluate(LaurentPoly({k: abs(c) for k, c in p.items()}), q0) ** 2 + q0
    assert abs(evaluate(r, q0) - (evaluate(p, q0) ** 2 + q0)) <= 1e-12 * bound


@given(st.integers(-20, 20), coeffs.filter(bool))
def test_monomial_inverse(h, c):
    m = monomial(c, h)
    assert m * m.inverse() == ONE

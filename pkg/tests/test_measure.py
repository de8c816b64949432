import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qasep.config import Configuration, Sector, all_configurations, enumerate_sector, index, sectors
from qasep.laurent import ONE, LaurentPoly, evaluate, q_multinomial, q_number, q_power
from qasep.measure import (
    TABULATED_WEIGHTS,
    tabulated_weights_check,
    kernel_check,
    measure_conjugate,
    measure_occupation,
    measure_position,
    numeric_rank,
    partition_check,
    sector_measure,
    sector_partition,
    verify_detailed_balance,
    verify_measure_formulas,
    verify_stationarity,
)

C = Configuration.parse
configs = st.integers(1, 7).flatmap(lambda L: st.lists(st.integers(0, 2), min_size=L, max_size=L)).map(lambda s: Configuration(tuple(s)))


def qe(k):
    return q_power(2 * k)


def test_formula_examples():
    assert measure_occupation(C("A0")) == qe(-1)
    assert measure_occupation(C("AB")) == qe(-1)
    assert measure_occupation(C("0000")) == ONE
    assert measure_position(C("A0")) == qe(-1)
    assert measure_position(C("B0")) == qe(1)
    assert measure_conjugate(C("A0")) == qe(-1)
    assert measure_conjugate(C("00")) == ONE
    assert measure_conjugate(C("0A")) == qe(1)


@given(st.integers(1, 8), st.data())
def test_single_particle_closed_form(L, data):
    x = data.draw(st.integers(1, L))
    sites = [1] * L
    sites[x - 1] = 0
    assert measure_position(Configuration(tuple(sites))) == qe(2 * x - L - 1)


def test_sector_measure_examples():
    w = sector_measure(2, Sector(1, 0)).weights
    assert w == {C("A0"): qe(-1), C("0A"): qe(1)}
    w = sector_measure(3, Sector(1, 1)).weights
    assert w == {C("A0B"): qe(-3), C("AB0"): qe(-1), C("0AB"): qe(-1), C("BA0"): qe(1), C("0BA"): qe(1), C("B0A"): qe(3)}
    p = sector_measure(2, Sector(1, 0), normalize_at=2.0).probabilities()
    assert p[C("A0")] == pytest.approx(0.2) and p[C("0A")] == pytest.approx(0.8)
    assert sector_measure(4, Sector(2, 1)).weights[C("A0AB")] == qe(-3)
    assert sector_measure(3, Sector(2, 0)).weights == {C("AA0"): qe(-2), C("A0A"): ONE, C("0AA"): qe(2)}
    with pytest.raises(ValueError):
        sector_measure(2, Sector(1, 0)).probabilities()
    with pytest.raises(ValueError):
        sector_measure(2, Sector(2, 1))


def test_sector_measure_output_formats():
    m = sector_measure(2, Sector(1, 1), normalize_at=1.0)
    data = json.loads(m.to_json())
    assert data["L"] == 2 and data["normalized"] is True and data["q0"] == 1.0
    assert [(w["config"], w["q_exponent"], w["value"]) for w in data["weights"]] == [("AB", -1, 0.5), ("BA", 1, 0.5)]
    assert m.to_csv().splitlines()[0] == "config,q_exponent,value"


@pytest.mark.parametrize("L", range(1, 6))
def test_measure_identities(L):
    for check in (verify_measure_formulas, verify_detailed_balance, verify_stationarity, partition_check):
        assert check(L).holds


def test_detailed_balance_negative_control():
    pi = {c: measure_occupation(c) for c in all_configurations(3)}
    pi[C("A0B")] = pi[C("A0B")] * 2
    rep = verify_detailed_balance(3, pi)
    assert not rep.holds
    failing = rep.failed()[0].detail["failing_pairs"]
    assert set(failing) == {"A0B<->0AB", "A0B<->AB0"}


def test_partition_examples():
    assert sector_partition(2, Sector(1, 0)) == q_number(2)
    expected = LaurentPoly({10: 1, 6: 2, 2: 3, -2: 3, -6: 2, -10: 1})
    assert sector_partition(4, Sector(1, 1)) == expected == q_number(4) * q_number(3)
    assert sector_partition(5, Sector(0, 0)) == ONE


@pytest.mark.parametrize("L,table", sorted(TABULATED_WEIGHTS.items()))
def test_tabulated_weights_by_direct_lookup(L, table):
    for (n, m), weights in table.items():
        assert q_multinomial(L, n, m) == sum((qe(e) for e in weights.values()), LaurentPoly())
        for cfg, e in weights.items():
            assert measure_occupation(C(cfg)) == qe(e)


def test_tabulated_weights_check_and_global_factor():
    rep = tabulated_weights_check()
    assert rep.holds
    for r in rep:
        if r.detail:
            n, m = (int(t.split("=")[1]) for t in r.relation.split()[2:4])
            assert r.detail["global_factor_q_exponent"] == (n - m) * r.L


def test_kernel_examples():
    rep = kernel_check(3, Sector(1, 1), 1.5)
    assert rep.holds
    assert rep.results[1].detail["kernel_dim"] == 1
    for s in sectors(1):
        assert kernel_check(1, s, 2.0).results[1].detail == {"kernel_dim": 1, "sector_size": 1}
    assert kernel_check(2, Sector(2, 0), 2.0).holds


def test_numeric_rank():
    import numpy as np

    assert numeric_rank(np.eye(4)) == 4
    assert numeric_rank(np.zeros((3, 3))) == 0
    assert numeric_rank(np.array([[1.0, 2.0], [2.0, 4.0]])) == 1
    rng = np.random.default_rng(1)
    A = rng.standard_normal((6, 3)) @ rng.standard_normal((3, 6))
    assert numeric_rank(A) == 3


@given(configs)
def test_positivity_and_monomial(c):
    w = measure_occupation(c)
    assert w.is_unit_monomial()
    assert evaluate(w, 0.3) > 0


@given(configs)
def test_inversion_swaps_species(c):
    swapped = Configuration(tuple(2 - s for s in c.sites))
    assert measure_occupation(c).invert_variable() == measure_occupation(swapped)


@given(configs)
def test_three_formulas_agree(c):
    assert measure_occupation(c) == measure_position(c) == measure_conjugate(c)

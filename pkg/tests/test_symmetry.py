import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qasep.config import Configuration, Sector, all_configurations, index
from qasep.generator import generator, perk_schultz
from qasep.laurent import ONE, Q, evaluate, q_power
from qasep.operators import SparseQMatrix, basis_vector, embed, site_ops
from qasep.symmetry import (
    build_R,
    compare_closed_forms,
    lowering_construction_check,
    rep_global,
    rep_X3,
    transform_Y,
    u_exponent,
    verify_algebra,
    verify_gl3,
    verify_similarity,
    verify_sl3,
    verify_symmetry,
    verify_transformation_identities,
)

O = site_ops()
C = Configuration.parse


def oracle_X(i, sign, L):
    """Coproduct generators written out configuration by configuration."""
    # (code a flip needs at the site, code it produces, code pair weighting the exponent)
    moves = {(1, "+"): (1, 0, (0, 1)), (1, "-"): (0, 1, (0, 1)), (2, "+"): (2, 1, (1, 2)), (2, "-"): (1, 2, (1, 2))}
    need, make, (p, m) = moves[(i, sign)]
    entries = {}
    for c in all_configurations(L):
        for k in range(1, L + 1):
            if c.sites[k - 1] != need:
                continue
            weight = lambda s: int(s == p) - int(s == m)  # noqa: E731
            half = -sum(weight(s) for s in c.sites[: k - 1]) + sum(weight(s) for s in c.sites[k:])
            t = list(c.sites)
            t[k - 1] = make
            entries[(index(Configuration(tuple(t))), index(c))] = q_power(half)
    return SparseQMatrix(3**L, entries)


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_generators_match_oracle(L):
    g = rep_global(L)
    for i in (1, 2):
        for s in "+-":
            assert g.X(i, s) == oracle_X(i, s, L)


def test_fundamental_representation():
    g = rep_global(1)
    assert g.X(1, "+") == embed(O["a+"], 1, 1)
    assert g.X(2, "+") == embed(O["b-"], 1, 1)
    assert g.X(1, "-") == embed(O["a-"], 1, 1)
    assert g.X(2, "-") == embed(O["b+"], 1, 1)
    assert rep_X3(g, "+") == embed(O["c+"], 1, 1).scale(q_power(1))
    assert rep_X3(g, "-") == embed(O["c-"], 1, 1).scale(-q_power(-1))
    assert verify_algebra(1).holds


def test_nilpotency_and_ordering_at_two_sites():
    from qasep.symmetry import rep_local_X

    x1, x2 = rep_local_X(1, "+", 1, 2), rep_local_X(1, "+", 2, 2)
    assert (x1 @ x1).is_zero() and (x2 @ x2).is_zero()
    assert x1 @ x2 == (x2 @ x1).scale(Q * Q)


def test_cartan_and_L_examples():
    g = rep_global(3)
    v = basis_vector(C("A0B"))
    assert g.N_hat @ v == v and g.M_hat @ v == v
    assert g.L_diag[1][index(C("A0B")), index(C("A0B"))] == q_power(-1)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_algebra_holds(L):
    report = verify_algebra(L)
    assert report.holds, [r.to_dict() for r in report.failed()]
    names = report.names()
    assert len(names) == len(set(names))


def test_R_examples():
    R = build_R(2)
    assert R[index(C("A0")), index(C("A0"))] == q_power(-1)
    assert R[index(C("00")), index(C("00"))] == ONE
    assert (R @ R)[index(C("AB")), index(C("AB"))] == Q.inverse()
    assert u_exponent(C("A0").sites) == -1
    for L in (2, 3):
        assert (build_R(L).to_numpy(1.0) == SparseQMatrix.identity(3**L).to_numpy(1.0)).all()


def test_Y_at_one_site_is_unchanged():
    g = rep_global(1)
    Y = transform_Y(g, build_R(1))
    assert Y[(1, "+")] == embed(O["a+"], 1, 1)


def test_closed_forms_need_target_counts():
    assert compare_closed_forms(3, "target").holds
    src = compare_closed_forms(3, "source")
    assert not src.holds
    assert any("Y_1^+" in r.relation for r in src.failed())


@pytest.mark.parametrize("L", [2, 3, 4])
def test_symmetry_and_similarity(L):
    rep = verify_symmetry(L)
    rep.extend(verify_similarity(L))
    assert rep.holds, [r.to_dict() for r in rep.failed()]


def test_q_one_specialisation():
    assert (perk_schultz(3).to_numpy(1.0) == generator(3).to_numpy(1.0)).all()


def test_lowering_examples():
    r = lowering_construction_check(2, 1, 0)
    assert r.holds
    g = rep_global(2)
    v = basis_vector(C("00")) @ g.X(1, "-")
    assert dict(v.items()) == {index(C("A0")): q_power(-1), index(C("0A")): q_power(1)}
    assert lowering_construction_check(3, 0, 0).holds
    assert lowering_construction_check(3, 1, 1).holds


def test_transformation_identities():
    for L in (1, 2, 3):
        assert verify_transformation_identities(L).holds


nonzero_or_not = st.tuples(st.sampled_from([(1, "+"), (1, "-"), (2, "+"), (2, "-")]), st.integers(1, 9), st.integers(1, 9))


@given(nonzero_or_not)
def test_any_single_corruption_is_detected(spec):
    (i, s), r, c = spec
    g = rep_global(2)
    M = g.X(i, s)
    old = M[r, c]
    bad = g.replace(i, s, M.with_entry(r, c, ONE if old.is_zero() else old * Q))
    report = verify_gl3(bad)
    report.extend(verify_sl3(bad))
    assert not report.holds


def test_corrupted_X1_plus_flags_commutator():
    g = rep_global(2)
    r, c, v = next(iter(g.X(1, "+").entries()))
    bad = g.replace(1, "+", g.X(1, "+").with_entry(r, c, v * Q))
    failed = [x.relation for x in verify_gl3(bad).failed()]
    assert any("[X_1^+, X_1^-]" in name for name in failed)


def test_report_json_shape():
    data = json.loads(verify_similarity(2).to_json())
    assert {"relation", "L", "holds", "first_mismatch"} <= set(data[0])

import json
import math

import numpy as np
import pytest

from qasep.config import Configuration, Sector
from qasep.measure import sector_measure
from qasep.simulate import EmpiricalMeasure, SimConfig, rate_consistency, run, step, tv_distance

C = Configuration.parse


def test_step_examples():
    rng = np.random.default_rng(0)
    dwells = []
    for _ in range(4000):
        nxt, d = step(C("A0"), (2.0, 1.0), rng)
        assert nxt == C("0A")
        dwells.append(d)
    assert np.mean(dwells) == pytest.approx(0.5, rel=0.05)
    assert step(C("AA"), (2.0, 1.0), rng) == (C("AA"), math.inf)
    targets = [str(step(C("A0B"), (1.0, 1.0), rng)[0]) for _ in range(4000)]
    assert set(targets) == {"0AB", "AB0"}
    assert targets.count("0AB") / len(targets) == pytest.approx(0.5, abs=0.03)


def test_simconfig_validation():
    s = Sector(1, 0)
    for kwargs in [
        dict(t_max=None),
        dict(t_max=1.0, n_events=3),
        dict(t_max=1.0, burn_in=1.0),
        dict(t_max=1.0, replicas=0),
        dict(t_max=1.0, initial="AB"),
    ]:
        with pytest.raises(ValueError):
            SimConfig(2, s, 2.0, **kwargs)
    with pytest.raises(ValueError):
        SimConfig(2, s, 0.0, t_max=1.0)


def test_two_state_chain():
    emp = run(SimConfig(2, Sector(1, 0), 2.0, seed=11, t_max=2e5))
    p = emp.probabilities()
    assert p[C("A0")] == pytest.approx(0.2, abs=0.01)
    assert p[C("0A")] == pytest.approx(0.8, abs=0.01)


def test_uniform_at_q_one():
    emp = run(SimConfig(3, Sector(1, 1), 1.0, seed=5, t_max=2e5, replicas=2))
    assert tv_distance(emp, sector_measure(3, Sector(1, 1), normalize_at=1.0)) < 0.01


def test_determinism_and_replicas():
    cfg = SimConfig(3, Sector(1, 1), 1.5, seed=42, t_max=2e3, replicas=4)
    a, b = run(cfg), run(cfg, workers=1)
    assert a.to_csv() == b.to_csv()
    assert a.events == b.events
    c = run(SimConfig(3, Sector(1, 1), 1.5, seed=43, t_max=2e3, replicas=4))
    assert c.to_csv() != a.to_csv()


def test_burn_in_and_total_time():
    emp = run(SimConfig(3, Sector(1, 1), 1.5, seed=1, t_max=1000.0, burn_in=0.25, replicas=3))
    assert emp.total_time == pytest.approx(3 * 750.0)
    assert sum(emp.dwell.values()) == pytest.approx(emp.total_time)
    assert all(v >= 0 for v in emp.dwell.values())


def test_events_mode():
    emp = run(SimConfig(3, Sector(1, 1), 1.5, seed=2, n_events=5000, replicas=2))
    assert emp.events == 10000
    assert emp.total_time > 0
    again = run(SimConfig(3, Sector(1, 1), 1.5, seed=2, n_events=5000, replicas=2))
    assert again.to_csv() == emp.to_csv()


def test_explicit_initial_state_and_sector_conservation():
    emp = run(SimConfig(4, Sector(2, 1), 2.0, seed=3, t_max=500.0, initial="AAB0"))
    assert all(c.sites.count(0) == 2 and c.sites.count(2) == 1 for c in emp.dwell)


def test_absorbing_state():
    emp = run(SimConfig(2, Sector(2, 0), 2.0, t_max=10.0))
    assert emp.absorbing and emp.warnings
    assert emp.probabilities() == {C("AA"): 1.0}
    ev = run(SimConfig(2, Sector(2, 0), 2.0, n_events=10))
    assert ev.absorbing and ev.probabilities() == {C("AA"): 1.0}


def test_tv_distance_examples():
    exact = sector_measure(2, Sector(1, 0), normalize_at=1.0)
    same = EmpiricalMeasure(2, Sector(1, 0), {C("A0"): 1.0, C("0A"): 1.0}, 2.0)
    assert tv_distance(same, exact) == 0
    point = EmpiricalMeasure(2, Sector(1, 0), {C("A0"): 3.0, C("0A"): 0.0}, 3.0)
    assert tv_distance(point, exact) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        tv_distance(point, sector_measure(2, Sector(0, 1), normalize_at=1.0))


@pytest.mark.parametrize("L", [1, 2, 3, 4])
@pytest.mark.parametrize("q0,w", [(0.5, 1.0), (1.0, 2.0), (2.0, 0.3)])
def test_rate_consistency(L, q0, w):
    assert rate_consistency(L, q0, w) == []


def test_outputs():
    emp = run(SimConfig(2, Sector(1, 1), 2.0, seed=9, t_max=100.0))
    exact = sector_measure(2, Sector(1, 1), normalize_at=2.0)
    lines = emp.to_csv(exact).splitlines()
    assert lines[0] == "config,dwell_time,empirical_prob,exact_prob,abs_diff"
    assert len(lines) == 3
    summary = json.loads(emp.summary_json(exact))
    assert {"tv_distance", "total_time", "events", "seed", "rng"} <= set(summary)
    assert "PCG64" in summary["rng"]


@pytest.mark.parametrize("q0", [0.5, 1.0, 2.0])
def test_convergence_every_small_sector(q0):
    for L in range(2, 5):
        for n in range(L + 1):
            for m in range(L - n + 1):
                s = Sector(n, m)
                emp = run(SimConfig(L, s, q0, seed=L * 100 + n * 10 + m, t_max=1e5))
                assert tv_distance(emp, sector_measure(L, s, normalize_at=q0)) < 0.02, (L, n, m)

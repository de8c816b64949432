"""Continuous-time Monte Carlo (direct-method Gillespie) restricted to one sector.

Each replica r draws from PCG64 seeded by ``SeedSequence(seed, spawn_key=(r,))``.
Random numbers are produced in fixed-size chunks by numpy and consumed by a
compiled kernel, so results do not depend on whether numba is present.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import Configuration, Sector, all_configurations, as_config, enumerate_sector, index, sector_of
from .generator import generator, jumps
from .laurent import evaluate

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


RNG_ALGORITHM = "PCG64 (numpy), replica stream SeedSequence(entropy=seed, spawn_key=(replica,))"
CHUNK = 1 << 16


@dataclass(frozen=True)
class SimConfig:
    L: int
    sector: Sector
    q0: float
    w: float = 1.0
    seed: int = 0
    t_max: float | None = None
    n_events: int | None = None
    burn_in: float = 0.1
    replicas: int = 1
    initial: Configuration | str | None = None  # None: uniform random in the sector

    def __post_init__(self):
        self.sector.validate(self.L)
        if not self.q0 > 0 or not self.w > 0:
            raise ValueError("q0 and w must be positive")
        if (self.t_max is None) == (self.n_events is None):
            raise ValueError("set exactly one of t_max and n_events")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.n_events is not None and self.n_events < 1:
            raise ValueError("n_events must be at least 1")
        if not 0 <= self.burn_in < 1:
            raise ValueError("burn_in must lie in [0, 1)")
        if self.replicas < 1:
            raise ValueError("replicas must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.initial is not None:
            c = as_config(self.initial)
            if c.L != self.L or sector_of(c) != self.sector:
                raise ValueError(f"initial configuration {c} is not in sector ({self.sector.N},{self.sector.M}) of L={self.L}")


@dataclass
class EmpiricalMeasure:
    L: int
    sector: Sector
    dwell: dict[Configuration, float]
    total_time: float
    events: int = 0
    absorbing: bool = False
    seed: int | None = None
    replicas: int = 1
    rng: str = RNG_ALGORITHM
    warnings: list[str] = field(default_factory=list)

    def probabilities(self) -> dict[Configuration, float]:
        if self.total_time > 0:
            return {c: t / self.total_time for c, t in self.dwell.items()}
        # absorbing run without elapsed time: point mass on the frozen state
        return {c: 1.0 for c in self.dwell}

    def histogram_rows(self, exact=None) -> list[dict]:
        probs = self.probabilities()
        exact_p = exact.probabilities() if exact is not None else None
        rows = []
        for c in enumerate_sector(self.L, self.sector):
            row = {"config": str(c), "dwell_time": self.dwell.get(c, 0.0), "empirical_prob": probs.get(c, 0.0)}
            if exact_p is not None:
                row["exact_prob"] = exact_p[c]
                row["abs_diff"] = abs(row["empirical_prob"] - exact_p[c])
            rows.append(row)
        return rows

    def to_csv(self, exact=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["config", "dwell_time", "empirical_prob", "exact_prob", "abs_diff"])
        for r in self.histogram_rows(exact):
            writer.writerow([r["config"], repr(r["dwell_time"]), repr(r["empirical_prob"]), repr(r["exact_prob"]) if "exact_prob" in r else "", repr(r["abs_diff"]) if "abs_diff" in r else ""])
        return buf.getvalue()

    def summary(self, exact=None) -> dict:
        return {
            "L": self.L,
            "N": self.sector.N,
            "M": self.sector.M,
            "tv_distance": tv_distance(self, exact) if exact is not None else None,
            "total_time": self.total_time,
            "events": self.events,
            "seed": self.seed,
            "replicas": self.replicas,
            "rng": self.rng,
            "absorbing": self.absorbing,
            "warnings": list(self.warnings),
        }

    def summary_json(self, exact=None) -> str:
        return json.dumps(self.summary(exact), indent=2)


def tv_distance(emp: EmpiricalMeasure, exact) -> float:
    """Half the l1 distance between the empirical frequencies and a normalised sector measure."""
    if emp.L != exact.L or emp.sector != exact.sector:
        raise ValueError("empirical and exact measures live on different sectors")
    p = emp.probabilities()
    e = exact.probabilities()
    return 0.5 * sum(abs(p.get(c, 0.0) - e[c]) for c in e)


def step(state: Configuration, params, rng: np.random.Generator) -> tuple[Configuration, float]:
    """One Gillespie move. ``params`` is (q0, w). Frozen states return (state, inf)."""
    q0, w = params
    js = jumps(state, q0, w)
    if not js:
        return state, math.inf
    rates = np.array([j.rate for j in js])
    total = rates.sum()
    dwell = rng.exponential(1.0 / total)
    k = int(np.searchsorted(np.cumsum(rates), rng.random() * total, side="right"))
    return js[min(k, len(js) - 1)].target, float(dwell)


def rate_consistency(L: int, q0: float, w: float = 1.0, rtol: float = 1e-12) -> list[Configuration]:
    """Configurations whose summed jump rates differ from the diagonal of H at (q0, w)."""
    H = generator(L)
    bad = []
    for c in all_configurations(L):
        exit_rate = sum(j.rate for j in jumps(c, q0, w))
        diag = w * evaluate(H[index(c), index(c)], q0)
        if abs(exit_rate - diag) > rtol * max(1.0, abs(diag)):
            bad.append(c)
    return bad


# -- compiled kernel ---------------------------------------------------------------


def _tables(L: int, sector: Sector, q0: float, w: float):
    configs = enumerate_sector(L, sector)
    pos = {c: i for i, c in enumerate(configs)}
    width = max(L - 1, 1)
    targets = np.zeros((len(configs), width), dtype=np.int64)
    cumrates = np.full((len(configs), width), np.inf)
    totals = np.zeros(len(configs))
    for i, c in enumerate(configs):
        acc = 0.0
        for k, j in enumerate(jumps(c, q0, w)):
            acc += j.rate
            targets[i, k] = pos[j.target]
            cumrates[i, k] = acc
        totals[i] = acc
    return configs, targets, cumrates, totals


@njit(cache=True, nogil=True)
def _advance(state, t, t_stop, burn, n_left, targets, cumrates, totals, expo, unif, dwell):
    """Consume draws until they run out, time passes t_stop or n_left events are done."""
    used = 0
    n = expo.shape[0]
    while used < n and t < t_stop and n_left > 0:
        tot = totals[state]
        t_next = t + expo[used] / tot
        lo = t if t > burn else burn
        hi = t_next if t_next < t_stop else t_stop
        if hi > lo:
            dwell[state] += hi - lo
        u = unif[used] * tot
        row = cumrates[state]
        k = 0
        while k < row.shape[0] - 1 and u >= row[k]:
            k += 1
        state = targets[state, k]
        t = t_next
        used += 1
        n_left -= 1
    return state, t, used


def _trajectory(cfg: SimConfig, replica: int, tables, t_stop: float, burn: float, n_events: int | None):
    configs, targets, cumrates, totals = tables
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(replica,))))
    if cfg.initial is None:
        state = int(rng.integers(len(configs)))
    else:
        state = configs.index(as_config(cfg.initial))
    dwell = np.zeros(len(configs))
    t = 0.0
    events = 0
    n_left = n_events if n_events is not None else np.iinfo(np.int64).max
    while t < t_stop and n_left > 0:
        expo = rng.standard_exponential(CHUNK)
        unif = rng.random(CHUNK)
        state, t, used = _advance(state, t, t_stop, burn, n_left, targets, cumrates, totals, expo, unif, dwell)
        events += used
        n_left -= used
    return dwell, t, events, state


def _replica(cfg: SimConfig, replica: int, tables):
    if cfg.t_max is not None:
        dwell, _, events, _ = _trajectory(cfg, replica, tables, cfg.t_max, cfg.burn_in * cfg.t_max, None)
        return dwell, events
    # event budget: a first pass fixes the horizon so burn-in is a fraction of time
    _, horizon, _, _ = _trajectory(cfg, replica, tables, math.inf, math.inf, cfg.n_events)
    dwell, _, events, _ = _trajectory(cfg, replica, tables, horizon, cfg.burn_in * horizon, cfg.n_events)
    return dwell, events


def run(cfg: SimConfig, workers: int | None = None) -> EmpiricalMeasure:
    """Time-weighted occupancy after burn-in, summed over replicas in replica order."""
    tables = _tables(cfg.L, cfg.sector, cfg.q0, cfg.w)
    configs = tables[0]
    if len(configs) == 1:
        c = configs[0]
        kept = (1 - cfg.burn_in) * cfg.t_max * cfg.replicas if cfg.t_max is not None else 0.0
        return EmpiricalMeasure(
            cfg.L, cfg.sector, {c: kept}, kept, 0, True, cfg.seed, cfg.replicas,
            warnings=[f"absorbing state {c}: no jumps are possible"],
        )
    n = workers or min(cfg.replicas, 4)
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(lambda r: _replica(cfg, r, tables), range(cfg.replicas)))
    else:
        parts = [_replica(cfg, r, tables) for r in range(cfg.replicas)]
    dwell = np.zeros(len(configs))
    events = 0
    for d, e in parts:
        dwell += d
        events += e
    total = float(dwell.sum())
    return EmpiricalMeasure(cfg.L, cfg.sector, {c: float(d) for c, d in zip(configs, dwell)}, total, events, False, cfg.seed, cfg.replicas)

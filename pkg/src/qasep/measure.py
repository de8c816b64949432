"""Reversible measure: three closed forms, sector restriction and
normalisation, detailed balance, kernel and partition checks, and the
tabulated small-lattice weights.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .config import (
    Configuration,
    Sector,
    all_configurations,
    as_config,
    enumerate_sector,
    index,
    left_counts,
    sectors,
    to_positions,
)
from .generator import generator, reversed_generator
from .laurent import ZERO, LaurentPoly, evaluate, q_multinomial, q_power, render
from .operators import QVector, SparseQMatrix, diagonal_lift
from .symmetry import RelationReport, RelationResult, build_R, check_equal

# -- the three formulas --------------------------------------------------------


def _indicators(config: Configuration):
    a = [int(s == 0) for s in config.sites]
    b = [int(s == 2) for s in config.sites]
    return a, b


def occupation_exponent(config: Configuration) -> int:
    config = as_config(config)
    L = config.L
    a, b = _indicators(config)
    linear = sum((2 * k - L - 1) * (a[k - 1] - b[k - 1]) for k in range(1, L + 1))
    cross = sum(a[l - 1] * b[k] - b[l - 1] * a[k] for k in range(1, L) for l in range(1, k + 1))
    return linear + cross


def position_exponent(config: Configuration) -> int:
    config = as_config(config)
    L = config.L
    pos = to_positions(config)
    e = sum(2 * x - L - 1 - left_counts(config, x)[1] for x in pos.x)
    e -= sum(2 * y - L - 1 - left_counts(config, y)[0] for y in pos.y)
    return e


def conjugate_exponent(config: Configuration) -> int:
    config = as_config(config)
    L = config.L
    a, b = _indicators(config)
    abar = [1 - v for v in a]
    bbar = [1 - v for v in b]
    return sum(abar[l - 1] * bbar[k] - bbar[l - 1] * abar[k] for k in range(1, L) for l in range(1, k + 1))


def measure_occupation(config) -> LaurentPoly:
    return q_power(2 * occupation_exponent(config))


def measure_position(config) -> LaurentPoly:
    return q_power(2 * position_exponent(config))


def measure_conjugate(config) -> LaurentPoly:
    return q_power(2 * conjugate_exponent(config))


# -- sector measures --------------------------------------------------------------


@dataclass
class SectorMeasure:
    L: int
    sector: Sector
    weights: dict[Configuration, LaurentPoly]
    normalized: bool = False
    q0: float | None = None
    values: dict[Configuration, float] | None = None

    def q_exponent(self, config: Configuration) -> int:
        return self.weights[config].q_exponent()

    def probabilities(self) -> dict[Configuration, float]:
        if self.values is None or not self.normalized:
            raise ValueError("measure is not normalised; build it with normalize_at=q0")
        return self.values

    def rows(self) -> list[dict]:
        return [
            {
                "config": str(c),
                "q_exponent": w.q_exponent(),
                "value": None if self.values is None else self.values[c],
            }
            for c, w in self.weights.items()
        ]

    def to_json(self, indent: int | None = 2) -> str:
        payload = {
            "L": self.L,
            "N": self.sector.N,
            "M": self.sector.M,
            "normalized": self.normalized,
            "q0": self.q0,
            "weights": self.rows(),
        }
        return json.dumps(payload, indent=indent)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["config", "q_exponent", "value"])
        for row in self.rows():
            writer.writerow([row["config"], row["q_exponent"], "" if row["value"] is None else repr(row["value"])])
        return buf.getvalue()


def sector_measure(L: int, sector: Sector, normalize_at: float | None = None, evaluate_at: float | None = None) -> SectorMeasure:
    """Unnormalised weights on the sector; with ``normalize_at`` also the probabilities at that q."""
    sector.validate(L)
    weights = {c: measure_occupation(c) for c in enumerate_sector(L, sector)}
    q0 = normalize_at if normalize_at is not None else evaluate_at
    if q0 is None:
        return SectorMeasure(L, sector, weights)
    if not q0 > 0:
        raise ValueError(f"q0 must be positive, got {q0}")
    raw = {c: evaluate(w, q0) for c, w in weights.items()}
    if normalize_at is None:
        return SectorMeasure(L, sector, weights, False, q0, raw)
    total = sum(raw.values())
    return SectorMeasure(L, sector, weights, True, q0, {c: v / total for c, v in raw.items()})


def pi_diagonal(L: int) -> SparseQMatrix:
    return diagonal_lift(measure_occupation, L)


def pi_vector(L: int, sector: Sector | None = None) -> QVector:
    configs = all_configurations(L) if sector is None else enumerate_sector(L, sector)
    return QVector(3**L, {index(c): measure_occupation(c) for c in configs})


def sector_partition(L: int, sector: Sector) -> LaurentPoly:
    total = ZERO
    for c in enumerate_sector(L, sector):
        total = total + measure_occupation(c)
    return total


# -- checks -----------------------------------------------------------------------


def verify_detailed_balance(L: int, pi=None, H: SparseQMatrix | None = None) -> RelationReport:
    """pi(eta) w(eta->eta') = pi(eta') w(eta'->eta) for every adjacent swap, and pi H^T pi^-1 = H.

    ``pi`` may be a mapping or callable overriding the measure (for negative controls).
    """
    H = generator(L) if H is None else H
    if pi is None:
        weight = measure_occupation
    elif callable(pi):
        weight = pi
    else:
        weight = lambda c: pi[as_config(c)]  # noqa: E731
    configs = all_configurations(L)
    failing = []
    first = None
    for c in configs:
        i = index(c)
        for k in range(1, L):
            s = list(c.sites)
            if s[k - 1] == s[k]:
                continue
            s[k - 1], s[k] = s[k], s[k - 1]
            d = Configuration(tuple(s))
            j = index(d)
            if j < i:
                continue
            lhs = weight(c) * -H[j, i]
            rhs = weight(d) * -H[i, j]
            if lhs != rhs:
                failing.append(f"{c}<->{d}")
                if first is None:
                    first = {"row": j, "col": i, "lhs": render(lhs), "rhs": render(rhs), "instance": f"{c}<->{d}"}
    report = RelationReport()
    res = RelationResult("pi(eta) w(eta->eta') = pi(eta') w(eta'->eta)", L, not failing, first)
    if failing:
        res.detail = {"failing_pairs": failing}
    report.add(res)
    pi_hat = SparseQMatrix.diagonal(weight(c) for c in configs)
    report.add(check_equal("H^rev = pi H^T pi^-1 = H", L, reversed_generator(H, pi_hat), H))
    return report


def verify_measure_formulas(L: int) -> RelationReport:
    """Occupation, position and conjugate forms agree with each other and with diag(R^2)."""
    R = build_R(L)
    R2 = R @ R
    checks = {
        "pi occupation form = position form": position_exponent,
        "pi occupation form = conjugate form": conjugate_exponent,
        "pi = diag(R^2)": lambda c: R2[index(c), index(c)].q_exponent(),
    }
    report = RelationReport()
    for name, other in checks.items():
        bad = None
        for c in all_configurations(L):
            e1, e2 = occupation_exponent(c), other(c)
            if e1 != e2:
                bad = {"row": index(c), "col": index(c), "lhs": render(q_power(2 * e1)), "rhs": render(q_power(2 * e2)), "instance": str(c)}
                break
        report.add(RelationResult(name, L, bad is None, bad))
    return report


def verify_stationarity(L: int, H: SparseQMatrix | None = None) -> RelationReport:
    """H|pi> = 0 on every sector, exactly."""
    H = generator(L) if H is None else H
    report = RelationReport()
    bad = None
    for sec in sectors(L):
        v = H @ pi_vector(L, sec)
        if not v.is_zero():
            i, val = next(v.items())
            bad = {"row": i, "col": None, "lhs": render(val), "rhs": "0", "instance": f"sector ({sec.N},{sec.M})"}
            break
    report.add(RelationResult("H|pi> = 0 on every sector", L, bad is None, bad))
    return report


def partition_check(L: int) -> RelationReport:
    """Sector sums of pi against the q-multinomial C_L(N, M), every sector."""
    report = RelationReport()
    for sec in sectors(L):
        z = sector_partition(L, sec)
        c = q_multinomial(L, sec.N, sec.M)
        ok = z == c
        report.add(
            RelationResult(
                f"sum of pi over sector ({sec.N},{sec.M}) = C_{L}({sec.N},{sec.M})",
                L,
                ok,
                None if ok else {"row": None, "col": None, "lhs": render(z), "rhs": render(c)},
            )
        )
    return report


def numeric_rank(A: np.ndarray, rtol: float = 1e-9) -> int:
    """Rank by Gaussian elimination with partial pivoting; pivots below rtol * max|A| count as zero."""
    A = np.array(A, dtype=float)
    n_rows, n_cols = A.shape
    scale = np.abs(A).max() if A.size else 0.0
    if scale == 0.0:
        return 0
    tol = rtol * scale
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = rank + int(np.argmax(np.abs(A[rank:, col])))
        if abs(A[pivot, col]) <= tol:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        A[rank + 1 :] -= np.outer(A[rank + 1 :, col] / A[rank, col], A[rank])
        rank += 1
    return rank


def kernel_check(L: int, sector: Sector, q0: float, H: SparseQMatrix | None = None) -> RelationReport:
    """Exact H|pi> = 0 on the sector block, and a one-dimensional numeric kernel at q0."""
    sector.validate(L)
    if not q0 > 0:
        raise ValueError(f"q0 must be positive, got {q0}")
    H = generator(L) if H is None else H
    configs = enumerate_sector(L, sector)
    idx = [index(c) for c in configs]
    report = RelationReport()
    v = H @ pi_vector(L, sector)
    first = None if v.is_zero() else {"row": next(v.items())[0], "col": None, "lhs": render(next(v.items())[1]), "rhs": "0"}
    report.add(RelationResult(f"H|pi> = 0 on sector ({sector.N},{sector.M})", L, first is None, first))
    block = np.zeros((len(idx), len(idx)))
    for (r, c), val in H.submatrix(idx).items():
        block[r, c] = evaluate(val, q0)
    dim = len(idx) - numeric_rank(block)
    res = RelationResult(f"kernel of H on sector ({sector.N},{sector.M}) is one-dimensional at q={q0}", L, dim == 1)
    res.detail = {"kernel_dim": dim, "sector_size": len(idx)}
    if dim != 1:
        res.first_mismatch = {"row": None, "col": None, "lhs": str(dim), "rhs": "1"}
    report.add(res)
    return report


# -- tabulated weights ------------------------------------------------------------

# Unnormalised weights (integer q-exponents) for L = 2, 3, 4, every sector.
TABULATED_WEIGHTS: dict[int, dict[tuple[int, int], dict[str, int]]] = {
    2: {
        (0, 0): {"00": 0},
        (1, 0): {"A0": -1, "0A": 1},
        (0, 1): {"B0": 1, "0B": -1},
        (2, 0): {"AA": 0},
        (1, 1): {"AB": -1, "BA": 1},
        (0, 2): {"BB": 0},
    },
    3: {
        (0, 0): {"000": 0},
        (1, 0): {"A00": -2, "0A0": 0, "00A": 2},
        (0, 1): {"00B": -2, "0B0": 0, "B00": 2},
        (2, 0): {"AA0": -2, "A0A": 0, "0AA": 2},
        (1, 1): {"A0B": -3, "AB0": -1, "0AB": -1, "BA0": 1, "0BA": 1, "B0A": 3},
        (0, 2): {"0BB": -2, "B0B": 0, "BB0": 2},
        (3, 0): {"AAA": 0},
        (2, 1): {"AAB": -2, "ABA": 0, "BAA": 2},
        (1, 2): {"ABB": -2, "BAB": 0, "BBA": 2},
        (0, 3): {"BBB": 0},
    },
    4: {
        (0, 0): {"0000": 0},
        (1, 0): {"A000": -3, "0A00": -1, "00A0": 1, "000A": 3},
        (0, 1): {"000B": -3, "00B0": -1, "0B00": 1, "B000": 3},
        (2, 0): {"AA00": -4, "A0A0": -2, "A00A": 0, "0AA0": 0, "0A0A": 2, "00AA": 4},
        (1, 1): {
            "A00B": -5, "A0B0": -3, "0A0B": -3, "AB00": -1, "0AB0": -1, "00AB": -1,
            "BA00": 1, "0BA0": 1, "00BA": 1, "B0A0": 3, "0B0A": 3, "B00A": 5,
        },
        (0, 2): {"00BB": -4, "0B0B": -2, "B00B": 0, "0BB0": 0, "B0B0": 2, "BB00": 4},
        (3, 0): {"AAA0": -3, "AA0A": -1, "A0AA": 1, "0AAA": 3},
        (2, 1): {
            "AA0B": -5, "AAB0": -3, "A0AB": -3, "0AAB": -1, "ABA0": -1, "A0BA": -1,
            "AB0A": 1, "0ABA": 1, "BAA0": 1, "BA0A": 3, "0BAA": 3, "B0AA": 5,
        },
        (1, 2): {
            "A0BB": -5, "AB0B": -3, "0ABB": -3, "BA0B": -1, "0BAB": -1, "ABB0": -1,
            "0BBA": 1, "BAB0": 1, "B0AB": 1, "BBA0": 3, "B0BA": 3, "BB0A": 5,
        },
        (0, 3): {"0BBB": -3, "B0BB": -1, "BB0B": 1, "BBB0": 3},
        (4, 0): {"AAAA": 0},
        (3, 1): {"AAAB": -3, "AABA": -1, "ABAA": 1, "BAAA": 3},
        (2, 2): {"AABB": -4, "ABAB": -2, "ABBA": 0, "BAAB": 0, "BABA": 2, "BBAA": 4},
        (1, 3): {"ABBB": -3, "BABB": -1, "BBAB": 1, "BBBA": 3},
        (0, 4): {"BBBB": 0},
    },
}

# Closed forms for N + M <= 4 on any L: weight proportional to q^(2 sum x - 2 sum y + c),
# with c fixed by the left-to-right order of the particles (X = A particle, Y = B particle).
CLOSED_FORM_OFFSETS: dict[tuple[int, int], dict[str, int]] = {
    (1, 0): {"X": -1},
    (0, 1): {"Y": 1},
    (2, 0): {"XX": -2},
    (1, 1): {"YX": -1, "XY": 1},
    (0, 2): {"YY": 2},
    (3, 0): {"XXX": -3},
    (2, 1): {"YXX": -3, "XYX": -1, "XXY": 1},
    (1, 2): {"YYX": -1, "YXY": 1, "XYY": 3},
    (0, 3): {"YYY": 3},
    (4, 0): {"XXXX": -4},
    (3, 1): {"YXXX": -5, "XYXX": -3, "XXYX": -1, "XXXY": 1},
    (2, 2): {"YYXX": -4, "YXYX": -2, "YXXY": 0, "XYYX": 0, "XYXY": 2, "XXYY": 4},
    (1, 3): {"YYYX": -1, "YYXY": 1, "YXYY": 3, "XYYY": 5},
    (0, 4): {"YYYY": 4},
}


def closed_form_exponent(config: Configuration) -> int:
    pos = to_positions(config)
    pattern = "".join("X" if s == 0 else "Y" for s in config.sites if s != 1)
    offset = CLOSED_FORM_OFFSETS[(len(pos.x), len(pos.y))][pattern]
    return 2 * sum(pos.x) - 2 * sum(pos.y) + offset


def tabulated_weights_check(tables_L=(2, 3, 4), closed_form_L=range(2, 9)) -> RelationReport:
    """Tabulated weights exactly, then the N+M <= 4 closed forms up to one monomial per sector."""
    report = RelationReport()
    for L in tables_L:
        table = TABULATED_WEIGHTS[L]
        listed = {Sector(n, m) for (n, m) in table}
        missing = [s for s in sectors(L) if s not in listed]
        for (n, m), weights in table.items():
            sec = Sector(n, m)
            computed = sector_measure(L, sec).weights
            expected = {as_config(k): q_power(2 * e) for k, e in weights.items()}
            first = None
            if set(expected) != set(computed):
                extra = sorted(str(c) for c in set(expected) ^ set(computed))
                first = {"row": None, "col": None, "lhs": "configs listed", "rhs": "sector configs", "instance": ",".join(extra)}
            else:
                for c in sorted(expected, key=index):
                    if expected[c] != computed[c]:
                        first = {"row": index(c), "col": index(c), "lhs": render(expected[c]), "rhs": render(computed[c]), "instance": str(c)}
                        break
            report.add(RelationResult(f"tabulated weights L={L} sector ({n},{m})", L, first is None, first))
        if missing:
            report.add(
                RelationResult(
                    f"tabulated weights L={L} covers every sector", L, False, {"row": None, "col": None, "lhs": "", "rhs": "", "instance": str(missing)}
                )
            )
    for L in closed_form_L:
        for (n, m) in CLOSED_FORM_OFFSETS:
            if n + m > L:
                continue
            offsets = set()
            for c in enumerate_sector(L, Sector(n, m)):
                offsets.add(closed_form_exponent(c) - position_exponent(c))
            ok = len(offsets) == 1
            res = RelationResult(f"closed form N={n} M={m} proportional to pi", L, ok)
            if ok:
                res.detail = {"global_factor_q_exponent": offsets.pop()}
            else:
                res.first_mismatch = {"row": None, "col": None, "lhs": str(sorted(offsets)), "rhs": "single offset"}
            report.add(res)
    return report

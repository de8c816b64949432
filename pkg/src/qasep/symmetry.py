"""U_q[gl(3)] tensor representations, the diagonal transform R and exact
verification of the algebra relations and the symmetries of H and G.

Every check returns a :class:`RelationReport`; nothing here raises on a
failed identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

from .config import Configuration, Sector, all_configurations, enumerate_sector, index, left_counts, to_positions
from .generator import generator, hopping_embedded, perk_schultz, perk_schultz_bond
from .laurent import ONE, ZERO, LaurentPoly, q_factorial, q_number, q_power, render
from .operators import (
    QVector,
    SiteOperator,
    SparseQMatrix,
    basis_vector,
    commutator,
    conjugate_by_diagonal,
    embed,
    q_diagonal,
    sector_summation_vector,
    site_ops,
)

CARTAN = ((2, -1), (-1, 2))

SIGNS = ("+", "-")
_SIGN = {"+": 1, "-": -1}

# Cartan weights per site code (A, 0, B): H_1 = ahat - vhat, H_2 = vhat - bhat
_H_WEIGHT = {1: (1, -1, 0), 2: (0, 1, -1)}


# -- reports ----------------------------------------------------------------


@dataclass
class RelationResult:
    relation: str
    L: int
    holds: bool
    first_mismatch: dict | None = None
    detail: dict | None = None

    def to_dict(self) -> dict:
        out = {"relation": self.relation, "L": self.L, "holds": self.holds, "first_mismatch": self.first_mismatch}
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass
class RelationReport:
    results: list[RelationResult] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.results)

    def failed(self) -> list[RelationResult]:
        return [r for r in self.results if not r.holds]

    def names(self) -> list[str]:
        return [r.relation for r in self.results]

    def extend(self, other: "RelationReport") -> "RelationReport":
        self.results.extend(other.results)
        return self

    def add(self, result: RelationResult) -> None:
        self.results.append(result)

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps([r.to_dict() for r in self.results], indent=indent)

    def __iter__(self):
        return iter(self.results)

    def __len__(self):
        return len(self.results)


def _mismatch(r, c, lhs: LaurentPoly, rhs: LaurentPoly) -> dict:
    return {"row": r, "col": c, "lhs": render(lhs), "rhs": render(rhs)}


def check_equal(name: str, L: int, lhs: SparseQMatrix, rhs: SparseQMatrix) -> RelationResult:
    diff = lhs.first_mismatch(rhs)
    if diff is None:
        return RelationResult(name, L, True)
    return RelationResult(name, L, False, _mismatch(*diff))


def check_zero(name: str, L: int, expr: SparseQMatrix) -> RelationResult:
    return check_equal(name, L, expr, SparseQMatrix.zeros(expr.dim))


def check_vectors(name: str, L: int, lhs: QVector, rhs: QVector) -> RelationResult:
    diff = lhs.first_mismatch(rhs)
    if diff is None:
        return RelationResult(name, L, True)
    i, a, b = diff
    return RelationResult(name, L, False, {"row": i, "col": None, "lhs": render(a), "rhs": render(b)})


def _first_failure(name: str, L: int, checks: Iterable[tuple[str, SparseQMatrix, SparseQMatrix]]) -> RelationResult:
    """Fold many instances of one identity into a single result naming the first failing instance."""
    for label, lhs, rhs in checks:
        diff = lhs.first_mismatch(rhs)
        if diff is not None:
            mm = _mismatch(*diff)
            mm["instance"] = label
            return RelationResult(name, L, False, mm)
    return RelationResult(name, L, True)


# -- representations -------------------------------------------------------


def _dressed(op: SiteOperator, k: int, L: int, half_exponent: Callable[[tuple[int, ...]], int]) -> SparseQMatrix:
    """q^(D/2) op_k with the diagonal D evaluated away from site k (so it commutes with op_k)."""
    bare = embed(op, k, L)
    configs = all_configurations(L)
    rows = {}
    for r, c, v in bare.entries():
        rows.setdefault(r, {})[c] = v * q_power(half_exponent(configs[c - 1].sites))
    return SparseQMatrix._from_rows(3**L, rows)


def _coproduct_exponent(i: int, k: int) -> Callable[[tuple[int, ...]], int]:
    w = _H_WEIGHT[i]

    def exponent(sites):
        return -sum(w[s] for s in sites[: k - 1]) + sum(w[s] for s in sites[k:])

    return exponent


def rep_local_X(i: int, sign: str, k: int, L: int) -> SparseQMatrix:
    """X_i^sign(k): fundamental generator at site k dressed by q^(-H_i/2) to the left and q^(H_i/2) to the right."""
    if i not in (1, 2) or sign not in SIGNS:
        raise ValueError(f"invalid generator X_{i}^{sign}")
    if not 1 <= k <= L:
        raise IndexError(f"site {k} outside 1..{L}")
    o = site_ops()
    # x_1^pm = a^pm, x_2^pm = b^mp
    op = o[f"a{sign}"] if i == 1 else o["b-" if sign == "+" else "b+"]
    return _dressed(op, k, L, _coproduct_exponent(i, k))


@dataclass(frozen=True)
class Gl3Reps:
    L: int
    X_plus: dict
    X_minus: dict
    H_cartan: dict
    L_diag: dict
    N_hat: SparseQMatrix
    V_hat: SparseQMatrix
    M_hat: SparseQMatrix

    def X(self, i: int, sign: str) -> SparseQMatrix:
        if i == 3:
            return rep_X3(self, sign)
        return (self.X_plus if sign == "+" else self.X_minus)[i]

    def replace(self, i: int, sign: str, matrix: SparseQMatrix) -> "Gl3Reps":
        plus, minus = dict(self.X_plus), dict(self.X_minus)
        (plus if sign == "+" else minus)[i] = matrix
        return Gl3Reps(self.L, plus, minus, self.H_cartan, self.L_diag, self.N_hat, self.V_hat, self.M_hat)


def _count_diag(code: int, L: int) -> SparseQMatrix:
    return SparseQMatrix.diagonal(c.sites.count(code) for c in all_configurations(L))


@lru_cache(maxsize=None)
def rep_global(L: int) -> Gl3Reps:
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    dim = 3**L
    X_plus, X_minus = {}, {}
    for i in (1, 2):
        for sign, target in (("+", X_plus), ("-", X_minus)):
            total = SparseQMatrix.zeros(dim)
            for k in range(1, L + 1):
                total = total + rep_local_X(i, sign, k, L)
            target[i] = total
    N_hat, V_hat, M_hat = _count_diag(0, L), _count_diag(1, L), _count_diag(2, L)
    H_cartan = {1: N_hat - V_hat, 2: V_hat - M_hat}
    # L_1 = q^(-N/2), L_2 = q^(-V/2), L_3 = q^(-M/2)
    L_diag = {j: q_diagonal(lambda c, code=code: -c.sites.count(code), L) for j, code in ((1, 0), (2, 1), (3, 2))}
    return Gl3Reps(L, X_plus, X_minus, H_cartan, L_diag, N_hat, V_hat, M_hat)


def rep_X3(gens: Gl3Reps, sign: str) -> SparseQMatrix:
    """X_3 = q^(1/2) X_1 X_2 - q^(-1/2) X_2 X_1 (same sign throughout)."""
    X1, X2 = gens.X(1, sign), gens.X(2, sign)
    return (X1 @ X2).scale(q_power(1)) - (X2 @ X1).scale(q_power(-1))


# -- the diagonal transform R ----------------------------------------------------


def u_exponent(sites: tuple[int, ...]) -> int:
    """Integer U(eta): sum_k (2k-L-1)(a_k-b_k) + sum_{l<m} (a_l b_m - b_l a_m)."""
    L = len(sites)
    total = 0
    a_seen = b_seen = 0
    for k, s in enumerate(sites, 1):
        if s == 0:
            total += 2 * k - L - 1 - b_seen
            a_seen += 1
        elif s == 2:
            total -= 2 * k - L - 1 - a_seen
            b_seen += 1
    return total


@lru_cache(maxsize=None)
def build_R(L: int) -> SparseQMatrix:
    """R = q^(U/2), diagonal with entry t^U(eta)."""
    return q_diagonal(lambda c: u_exponent(c.sites), L)


def diag_power(D: SparseQMatrix, n: int) -> SparseQMatrix:
    out = SparseQMatrix.identity(D.dim)
    base = D if n >= 0 else D.diagonal_inverse()
    for _ in range(abs(n)):
        out = out @ base
    return out


def transform_Y(gens: Gl3Reps, R: SparseQMatrix) -> dict[tuple[int, str], SparseQMatrix]:
    """Y_i^pm = R X_i^pm R^-1 by exact diagonal conjugation."""
    return {(i, s): conjugate_by_diagonal(R, gens.X(i, s)) for i in (1, 2) for s in SIGNS}


def closed_form_generators(L: int, reference: str = "target") -> dict:
    """Y_i^pm assembled entry by entry from the closed-form matrix elements.

    The total counts N, M, V in the exponents are taken from the configuration
    named by ``reference`` ("source" = column, "target" = row); the
    left counts N_k, M_k, V_k do not depend on this choice.
    """
    if reference not in ("source", "target"):
        raise ValueError("reference must be 'source' or 'target'")
    o = site_ops()
    configs = all_configurations(L)
    dim = 3**L
    # (op at site k, left-count code, total-count code, sign of the exponent)
    table = {
        (1, "+"): (o["a+"], 1, +1),
        (1, "-"): (o["a-"], 0, -1),
        (2, "+"): (o["b-"], 2, +1),
        (2, "-"): (o["b+"], 1, -1),
    }
    out = {}
    for key, (op, code, sgn) in table.items():
        rows: dict[int, dict[int, LaurentPoly]] = {}
        for k in range(1, L + 1):
            for r, c, _ in embed(op, k, L).entries():
                src, tgt = configs[c - 1], configs[r - 1]
                left = src.sites[: k - 1].count(code)
                total = (tgt if reference == "target" else src).sites.count(code)
                # q^(sgn*(2*left - total)) in half-steps
                rows.setdefault(r, {})[c] = q_power(2 * sgn * (2 * left - total))
        out[key] = SparseQMatrix._from_rows(dim, rows)
    gens = rep_global(L)
    out.update({("L", j): gens.L_diag[j] for j in (1, 2, 3)})
    return out


def compare_closed_forms(L: int, reference: str = "target", R: SparseQMatrix | None = None) -> RelationReport:
    R = build_R(L) if R is None else R
    Y = transform_Y(rep_global(L), R)
    closed = closed_form_generators(L, reference)
    report = RelationReport()
    for (i, s), m in Y.items():
        report.add(check_equal(f"closed form Y_{i}^{s} ({reference} counts) == R X_{i}^{s} R^-1", L, closed[(i, s)], m))
    configs = all_configurations(L)
    for j, code in ((1, 0), (2, 1), (3, 2)):
        expected = SparseQMatrix.diagonal(q_power(-c.sites.count(code)) for c in configs)
        report.add(check_equal(f"closed form L_{j} == q^(-count/2)", L, closed[("L", j)], expected))
    return report


# -- algebra relations ----------------------------------------------------------


def _delta(a, b) -> int:
    return int(a == b)


def verify_gl3(gens: Gl3Reps) -> RelationReport:
    """Defining relations of U_q[gl(3)] in the tensor representation, checked exactly."""
    L = gens.L
    Ld, X = gens.L_diag, gens.X
    report = RelationReport()
    for i in (1, 2, 3):
        for j in range(i + 1, 4):
            report.add(check_zero(f"[L_{i}, L_{j}] = 0", L, commutator(Ld[i], Ld[j])))
    for i in (1, 2, 3):
        for j in (1, 2):
            for s in SIGNS:
                half = _SIGN[s] * (_delta(i, j + 1) - _delta(i, j))
                report.add(
                    check_equal(
                        f"L_{i} X_{j}^{s} = q^({half}/2) X_{j}^{s} L_{i}",
                        L,
                        Ld[i] @ X(j, s),
                        (X(j, s) @ Ld[i]).scale(q_power(half)),
                    )
                )
    q_minus_qinv = q_power(2) - q_power(-2)
    for i in (1, 2):
        K = Ld[i + 1] @ Ld[i].diagonal_inverse()
        K2 = K @ K
        for j in (1, 2):
            lhs = commutator(X(i, "+"), X(j, "-")).scale(q_minus_qinv)
            rhs = (K2 - K2.diagonal_inverse()) if i == j else SparseQMatrix.zeros(lhs.dim)
            report.add(check_equal(f"(q - 1/q)[X_{i}^+, X_{j}^-] = delta_{i}{j} (K_{i}^2 - K_{i}^-2)", L, lhs, rhs))
    for i, j in ((1, 2), (2, 1)):
        for s in SIGNS:
            Xi, Xj = X(i, s), X(j, s)
            serre = Xi @ Xi @ Xj - (Xi @ Xj @ Xi).scale(q_power(2) + q_power(-2)) + Xj @ Xi @ Xi
            report.add(check_zero(f"cubic Serre X_{i}^{s} X_{i}^{s} X_{j}^{s}", L, serre))
    return report


def verify_sl3(gens: Gl3Reps) -> RelationReport:
    """Cartan-generator form: [H_i, H_j] = 0, [H_i, X_j] = +-A_ij X_j, q^H_i X_j q^-H_i = q^(+-A_ij) X_j, [X_i^+, X_i^-] = [H_i]_q."""
    L = gens.L
    H, X = gens.H_cartan, gens.X
    report = RelationReport()
    report.add(check_zero("[H_1, H_2] = 0", L, commutator(H[1], H[2])))
    configs = all_configurations(L)
    for i in (1, 2):
        w = _H_WEIGHT[i]
        qH = q_diagonal(lambda c: 2 * sum(w[s] for s in c.sites), L)
        for j in (1, 2):
            for s in SIGNS:
                a = _SIGN[s] * CARTAN[i - 1][j - 1]
                report.add(check_equal(f"[H_{i}, X_{j}^{s}] = {a:+d} X_{j}^{s}", L, commutator(H[i], X(j, s)), X(j, s).scale(a)))
                report.add(
                    check_equal(
                        f"q^H_{i} X_{j}^{s} q^-H_{i} = q^({a}) X_{j}^{s}",
                        L,
                        conjugate_by_diagonal(qH, X(j, s)),
                        X(j, s).scale(q_power(2 * a)),
                    )
                )
        bracket = SparseQMatrix.diagonal(q_number(sum(w[s] for s in c.sites)) for c in configs)
        report.add(check_equal(f"[X_{i}^+, X_{i}^-] = [H_{i}]_q", L, commutator(X(i, "+"), X(i, "-")), bracket))
    report.add(check_zero("[X_1^+, X_2^-] = 0", L, commutator(X(1, "+"), X(2, "-"))))
    report.add(check_zero("[X_2^+, X_1^-] = 0", L, commutator(X(2, "+"), X(1, "-"))))
    return report


def verify_X3(gens: Gl3Reps) -> RelationReport:
    L = gens.L
    report = RelationReport()
    for s in SIGNS:
        X1, X2, X3 = gens.X(1, s), gens.X(2, s), rep_X3(gens, s)
        report.add(check_zero(f"q^(-1/2) X_1^{s} X_3^{s} - q^(1/2) X_3^{s} X_1^{s} = 0", L, (X1 @ X3).scale(q_power(-1)) - (X3 @ X1).scale(q_power(1))))
        report.add(check_zero(f"q^(1/2) X_2^{s} X_3^{s} - q^(-1/2) X_3^{s} X_2^{s} = 0", L, (X2 @ X3).scale(q_power(1)) - (X3 @ X2).scale(q_power(-1))))
        for i in (1, 2):
            report.add(check_equal(f"[H_{i}, X_3^{s}] = {s}X_3^{s}", L, commutator(gens.H_cartan[i], X3), X3.scale(_SIGN[s])))
    if L == 1:
        o = site_ops()
        report.add(check_equal("X_3^+ = q^(1/2) c^+ at L=1", L, rep_X3(gens, "+"), embed(o["c+"], 1, 1).scale(q_power(1))))
        report.add(check_equal("X_3^- = -q^(-1/2) c^- at L=1", L, rep_X3(gens, "-"), embed(o["c-"], 1, 1).scale(-q_power(-1))))
    return report


def verify_local_relations(L: int) -> RelationReport:
    """Nilpotency and ordering relations of the single-site pieces X_i^pm(k)."""
    report = RelationReport()
    loc = {(i, s, k): rep_local_X(i, s, k, L) for i in (1, 2) for s in SIGNS for k in range(1, L + 1)}
    zero = SparseQMatrix.zeros(3**L)
    report.add(
        _first_failure(
            "X_i^pm(k)^2 = 0",
            L,
            ((f"i={i} {s} k={k}", loc[i, s, k] @ loc[i, s, k], zero) for i in (1, 2) for s in SIGNS for k in range(1, L + 1)),
        )
    )
    report.add(
        _first_failure(
            "X_i^pm(k) X_j^mp(k) = 0 for i != j",
            L,
            (
                (f"i={i} {s} k={k}", loc[i, s, k] @ loc[3 - i, "-" if s == "+" else "+", k], zero)
                for i in (1, 2)
                for s in SIGNS
                for k in range(1, L + 1)
            ),
        )
    )

    def ordering():
        for i in (1, 2):
            for s in SIGNS:
                for k in range(1, L + 1):
                    for l in range(k + 1, L + 1):
                        # k < l: X(k) X(l) = q^(+-2) X(l) X(k)
                        yield (
                            f"i={i} {s} k={k} l={l}",
                            loc[i, s, k] @ loc[i, s, l],
                            (loc[i, s, l] @ loc[i, s, k]).scale(q_power(4 * _SIGN[s])),
                        )

    report.add(_first_failure("X_i^pm(k) X_i^pm(l) = q^(pm2) X_i^pm(l) X_i^pm(k) for k < l", L, ordering()))

    def mixed():
        for i in (1, 2):
            for s in SIGNS:
                t = "-" if s == "+" else "+"
                for k in range(1, L + 1):
                    for l in range(1, L + 1):
                        if k != l:
                            yield (f"i={i} {s} k={k} l={l}", loc[i, s, k] @ loc[3 - i, t, l], loc[3 - i, t, l] @ loc[i, s, k])

    report.add(_first_failure("X_i^pm(k) X_j^mp(l) = X_j^mp(l) X_i^pm(k) for i != j, k != l", L, mixed()))
    return report


def verify_algebra(L: int, gens: Gl3Reps | None = None) -> RelationReport:
    """Everything checked by ``verify algebra``: gl(3) and sl(3) relations, X_3 relations,
    single-site relations, the closed-form cross-check and the transformation identities."""
    gens = rep_global(L) if gens is None else gens
    report = RelationReport()
    report.extend(verify_gl3(gens))
    report.extend(verify_sl3(gens))
    report.extend(verify_X3(gens))
    report.extend(verify_local_relations(L))
    report.extend(compare_closed_forms(L))
    report.extend(verify_transformation_identities(L))
    return report


# -- symmetry of H and G ---------------------------------------------------------


def commutes(name: str, L: int, A: SparseQMatrix, B: SparseQMatrix) -> RelationResult:
    return check_zero(name, L, commutator(A, B))


def verify_symmetry(
    L: int,
    H: SparseQMatrix | None = None,
    G: SparseQMatrix | None = None,
    gens: Gl3Reps | None = None,
    R: SparseQMatrix | None = None,
) -> RelationReport:
    """[H, Y_i^pm] = [H, L_j] = 0, and bond-wise [g_k, X_i^pm] = [g_k, H_i] = 0 and [h_k, Y_i^pm] = 0."""
    H = generator(L) if H is None else H
    gens = rep_global(L) if gens is None else gens
    R = build_R(L) if R is None else R
    Y = transform_Y(gens, R)
    report = RelationReport()
    for (i, s), m in Y.items():
        report.add(commutes(f"[H, Y_{i}^{s}] = 0", L, H, m))
    for j in (1, 2, 3):
        report.add(commutes(f"[H, L_{j}] = 0", L, H, gens.L_diag[j]))
    bonds = range(1, L)
    g_bonds = [perk_schultz_bond(k, L) for k in bonds] if G is None else None
    h_bonds = [hopping_embedded(k, L) for k in bonds]
    zero = SparseQMatrix.zeros(3**L)
    if G is not None:
        for (i, s) in Y:
            report.add(commutes(f"[G, X_{i}^{s}] = 0", L, G, gens.X(i, s)))
    else:
        for i in (1, 2):
            for s in SIGNS:
                report.add(
                    _first_failure(
                        f"[g_k,k+1, X_{i}^{s}] = 0 for all bonds",
                        L,
                        ((f"k={k}", commutator(g, gens.X(i, s)), zero) for k, g in zip(bonds, g_bonds)),
                    )
                )
            report.add(
                _first_failure(
                    f"[g_k,k+1, H_{i}] = 0 for all bonds",
                    L,
                    ((f"k={k}", commutator(g, gens.H_cartan[i]), zero) for k, g in zip(bonds, g_bonds)),
                )
            )
    for (i, s), m in Y.items():
        report.add(
            _first_failure(
                f"[h_k,k+1, Y_{i}^{s}] = 0 for all bonds",
                L,
                ((f"k={k}", commutator(h, m), zero) for k, h in zip(bonds, h_bonds)),
            )
        )
    return report


def verify_similarity(
    L: int, H: SparseQMatrix | None = None, G: SparseQMatrix | None = None, R: SparseQMatrix | None = None
) -> RelationReport:
    """G = R^-1 H R and H^T = R^-2 H R^2, both exactly."""
    H = generator(L) if H is None else H
    G = perk_schultz(L) if G is None else G
    R = build_R(L) if R is None else R
    R_inv = R.diagonal_inverse()
    report = RelationReport()
    report.add(check_equal("G = R^-1 H R", L, G, conjugate_by_diagonal(R_inv, H)))
    report.add(check_equal("G = G^T", L, G, G.transpose()))
    R2_inv = R_inv @ R_inv
    report.add(check_equal("H^T = R^-2 H R^2", L, H.transpose(), conjugate_by_diagonal(R2_inv, H)))
    return report


# -- lowering construction of R ------------------------------------------------------


def rbfz_exponent(config: Configuration) -> int:
    """Half-step exponent from the shifted-coordinate formula: (M-N)(L+1) - MN + 2 sum x - 2 sum (y - N_y)."""
    L = config.L
    pos = to_positions(config)
    N, M = len(pos.x), len(pos.y)
    y_shifted = [y - left_counts(config, y)[0] for y in pos.y]
    return (M - N) * (L + 1) - M * N + 2 * sum(pos.x) - 2 * sum(y_shifted)


def lowering_construction_check(L: int, N: int, M: int, gens: Gl3Reps | None = None, R: SparseQMatrix | None = None) -> RelationReport:
    """<0,0| (X_1^-)^N (X_2^+)^M = [N]! [M]! <s_{N,M}| R, plus the shifted-coordinate exponent entrywise."""
    sector = Sector(N, M).validate(L)
    gens = rep_global(L) if gens is None else gens
    R = build_R(L) if R is None else R
    empty = basis_vector(Configuration((1,) * L))
    v = empty
    for _ in range(N):
        v = v @ gens.X(1, "-")
    for _ in range(M):
        v = v @ gens.X(2, "+")
    rhs = (sector_summation_vector(L, sector) @ R).scale(q_factorial(N) * q_factorial(M))
    report = RelationReport()
    report.add(check_vectors(f"<0|(X_1^-)^{N}(X_2^+)^{M} = [{N}]![{M}]! <s_{N},{M}| q^(U/2)", L, v, rhs))
    bad = None
    for c in enumerate_sector(L, sector):
        lhs, rhs_e = q_power(rbfz_exponent(c)), R[index(c), index(c)]
        if lhs != rhs_e:
            bad = {"row": index(c), "col": index(c), "lhs": render(lhs), "rhs": render(rhs_e), "instance": str(c)}
            break
    report.add(RelationResult(f"shifted-coordinate exponent of R on sector ({N},{M})", L, bad is None, bad))
    return report


# -- transformation identities ------------------------------------------------------------


def _exponential_identities(L: int, p_half: int) -> RelationReport:
    """p^D X p^-D identities for p = t^p_half, over all sites l, m, x and both signs."""
    o = site_ops()
    label = {2: "q", 4: "q^2"}.get(p_half, f"t^{p_half}")

    def pdiag(f):
        return q_diagonal(lambda c: p_half * f(c.sites), L)

    def gen(kind, lhs_exp, rhs_exp, two_sites=False):
        for x in range(1, L + 1):
            for s in SIGNS:
                X = embed(o[f"{kind}{s}"], x, L)
                for l in range(1, L + 1):
                    for args in ([(l, m) for m in range(1, L + 1)] if two_sites else [(l,)]):
                        lhs = conjugate_by_diagonal(pdiag(lambda st: lhs_exp(st, *args)), X)
                        rhs = pdiag(lambda st: _SIGN[s] * rhs_exp(st, x, *args)) @ X
                        yield f"x={x} {s} l,m={args}", lhs, rhs

    a = lambda st, k: int(st[k - 1] == 0)  # noqa: E731
    b = lambda st, k: int(st[k - 1] == 2)  # noqa: E731
    report = RelationReport()
    report.add(_first_failure(f"p^ahat_l a_x p^-ahat_l = p^(pm delta_lx) a_x, p={label}", L, gen("a", lambda st, l: a(st, l), lambda st, x, l: _delta(l, x))))
    report.add(_first_failure(f"p^bhat_l a_x p^-bhat_l = a_x, p={label}", L, gen("a", lambda st, l: b(st, l), lambda st, x, l: 0)))
    report.add(_first_failure(f"p^bhat_l b_x p^-bhat_l = p^(pm delta_lx) b_x, p={label}", L, gen("b", lambda st, l: b(st, l), lambda st, x, l: _delta(l, x))))
    report.add(_first_failure(f"p^ahat_l b_x p^-ahat_l = b_x, p={label}", L, gen("b", lambda st, l: a(st, l), lambda st, x, l: 0)))
    report.add(
        _first_failure(
            f"p^(ahat_l bhat_m) a_x p^-(ahat_l bhat_m) = p^(pm delta_lx bhat_m) a_x, p={label}",
            L,
            gen("a", lambda st, l, m: a(st, l) * b(st, m), lambda st, x, l, m: _delta(l, x) * b(st, m), True),
        )
    )
    report.add(
        _first_failure(
            f"p^(ahat_l bhat_m) b_x p^-(ahat_l bhat_m) = p^(pm delta_mx ahat_l) b_x, p={label}",
            L,
            gen("b", lambda st, l, m: a(st, l) * b(st, m), lambda st, x, l, m: _delta(m, x) * a(st, l), True),
        )
    )
    return report


def _dressed_identities(L: int, R: SparseQMatrix) -> RelationReport:
    """R a_x R^-1, R b_x R^-1, R c_x R^-1 as site-dressed operators."""
    o = site_ops()

    def side_sum(st, x, code, shift):
        left = sum(int(s == code) + shift for s in st[: x - 1])
        right = sum(int(s == code) + shift for s in st[x:])
        return left, right

    # half-step exponent for sign +; the - sign negates it
    forms = {
        "a": lambda st, x: -side_sum(st, x, 2, -1)[0] + side_sum(st, x, 2, -1)[1],
        "b": lambda st, x: side_sum(st, x, 0, -1)[0] - side_sum(st, x, 0, -1)[1],
        "c": lambda st, x: side_sum(st, x, 1, +1)[0] - side_sum(st, x, 1, +1)[1],
    }
    report = RelationReport()
    for kind, f in forms.items():

        def gen(kind=kind, f=f):
            for x in range(1, L + 1):
                for s in SIGNS:
                    X = embed(o[f"{kind}{s}"], x, L)
                    dressed = q_diagonal(lambda c: _SIGN[s] * f(c.sites, x), L) @ X
                    yield f"x={x} {s}", conjugate_by_diagonal(R, X), dressed

        report.add(_first_failure(f"R {kind}_x^pm R^-1 = site-dressed {kind}_x^pm", L, gen()))
    return report


def _bond_conjugations(L: int, R: SparseQMatrix) -> RelationReport:
    """R u_k v_{k+1} R^-1 = q^(...) u_k v_{k+1} for the six hopping pairs."""
    o = site_ops()
    pairs = [  # (left op, right op, q-power)
        ("a+", "a-", -1),
        ("a-", "a+", +1),
        ("b+", "b-", +1),
        ("b-", "b+", -1),
        ("c+", "c-", -1),
        ("c-", "c+", +1),
    ]
    report = RelationReport()
    for u, v, e in pairs:

        def gen(u=u, v=v, e=e):
            for k in range(1, L):
                P = embed(o[u], k, L) @ embed(o[v], k + 1, L)
                yield f"k={k}", conjugate_by_diagonal(R, P), P.scale(q_power(2 * e))

        report.add(_first_failure(f"R {u}_k {v}_k+1 R^-1 = q^({e}) {u}_k {v}_k+1", L, gen()))
    return report


def verify_transformation_identities(L: int, R: SparseQMatrix | None = None) -> RelationReport:
    R = build_R(L) if R is None else R
    report = RelationReport()
    report.extend(_exponential_identities(L, 2))
    report.extend(_exponential_identities(L, 4))
    report.extend(_dressed_identities(L, R))
    report.extend(_bond_conjugations(L, R))
    return report

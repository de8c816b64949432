"""Transition matrix H of the two-species exclusion process, the Perk-Schultz
chain G, numeric jump lists for simulation and the reversed generator.

Orientation: column = source configuration, row = target, off-diagonal
entries are negated rates and the diagonal holds the total exit rate, so
probabilities evolve as exp(-H t).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .config import Configuration, swap
from .laurent import Q, Q_INV, LaurentPoly
from .operators import SiteOperator, SparseQMatrix, conjugate_by_diagonal, embed, site_ops

__all__ = [
    "ProcessParams",
    "Jump",
    "local_hopping_matrix",
    "hopping_embedded",
    "perk_schultz_bond",
    "generator",
    "perk_schultz",
    "jumps",
    "jump_classes",
    "reversed_generator",
]


@dataclass(frozen=True)
class ProcessParams:
    L: int
    w: LaurentPoly | int = 1

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")


@dataclass(frozen=True)
class Jump:
    target: Configuration
    rate: float
    forward: bool  # True for the rate w*q moves


def _two_site(u: SiteOperator, v: SiteOperator, k: int, L: int) -> SparseQMatrix:
    return embed(u, k, L) @ embed(v, k + 1, L)


def _bond_parts(k: int, L: int):
    """Diagonal and off-diagonal pieces of bond (k, k+1), split by rate class q and 1/q."""
    if not 1 <= k <= L - 1:
        raise IndexError(f"bond {k} outside 1..{L - 1}")
    o = site_ops()
    diag_fwd = _two_site(o["ahat"], o["vhat"], k, L) + _two_site(o["vhat"], o["bhat"], k, L) + _two_site(o["ahat"], o["bhat"], k, L)
    diag_bwd = _two_site(o["vhat"], o["ahat"], k, L) + _two_site(o["bhat"], o["vhat"], k, L) + _two_site(o["bhat"], o["ahat"], k, L)
    off_fwd = _two_site(o["a-"], o["a+"], k, L) + _two_site(o["b+"], o["b-"], k, L) + _two_site(o["c-"], o["c+"], k, L)
    off_bwd = _two_site(o["a+"], o["a-"], k, L) + _two_site(o["b-"], o["b+"], k, L) + _two_site(o["c+"], o["c-"], k, L)
    return diag_fwd, diag_bwd, off_fwd, off_bwd


@lru_cache(maxsize=None)
def hopping_embedded(k: int, L: int, w=1) -> SparseQMatrix:
    """h_{k,k+1} = wq(diag - hops) for A0->0A, 0B->B0, AB->BA plus wq^-1 for the reverse moves."""
    diag_fwd, diag_bwd, off_fwd, off_bwd = _bond_parts(k, L)
    return (diag_fwd - off_fwd).scale(Q * w) + (diag_bwd - off_bwd).scale(Q_INV * w)


@lru_cache(maxsize=None)
def perk_schultz_bond(k: int, L: int, w=1) -> SparseQMatrix:
    """g_{k,k+1}: same diagonal as h_{k,k+1}, every off-diagonal entry equal to -w."""
    diag_fwd, diag_bwd, off_fwd, off_bwd = _bond_parts(k, L)
    return (diag_fwd.scale(Q) + diag_bwd.scale(Q_INV) - off_fwd - off_bwd).scale(w)


def local_hopping_matrix(w=1) -> SparseQMatrix:
    """The 9x9 two-site matrix h."""
    return hopping_embedded(1, 2, w)


@lru_cache(maxsize=None)
def _generator(L: int, w) -> SparseQMatrix:
    H = SparseQMatrix.zeros(3**L)
    for k in range(1, L):
        H = H + hopping_embedded(k, L, w)
    return H


@lru_cache(maxsize=None)
def _perk_schultz(L: int, w) -> SparseQMatrix:
    G = SparseQMatrix.zeros(3**L)
    for k in range(1, L):
        G = G + perk_schultz_bond(k, L, w)
    return G


def generator(params: ProcessParams | int) -> SparseQMatrix:
    """H = sum of bond matrices; reflecting ends mean no terms past sites 1 and L."""
    p = params if isinstance(params, ProcessParams) else ProcessParams(params)
    return _generator(p.L, p.w)


def perk_schultz(params: ProcessParams | int) -> SparseQMatrix:
    p = params if isinstance(params, ProcessParams) else ProcessParams(params)
    return _perk_schultz(p.L, p.w)


# move table: (left, right) codes -> forward (rate w*q) or backward (w/q)
_FORWARD = {(0, 1), (1, 2), (0, 2)}  # A0, 0B, AB


def jump_classes(config: Configuration) -> list[tuple[int, Configuration, bool]]:
    """(bond k, target, forward?) for every active bond, in bond order."""
    s = config.sites
    out = []
    for k in range(1, len(s)):
        left, right = s[k - 1], s[k]
        if left == right:
            continue
        out.append((k, swap(config, k), (left, right) in _FORWARD))
    return out


def jumps(config: Configuration, q0: float, w: float = 1.0) -> list[Jump]:
    """Numeric jump list: w*q0 for A0->0A, 0B->B0, AB->BA and w/q0 for the reverses."""
    if not q0 > 0 or not w > 0:
        raise ValueError("q0 and w must be positive")
    return [Jump(t, w * q0 if fwd else w / q0, fwd) for _, t, fwd in jump_classes(config)]


def reversed_generator(H: SparseQMatrix, pi_diag: SparseQMatrix) -> SparseQMatrix:
    """pi H^T pi^-1 for a diagonal pi with monomial entries."""
    return conjugate_by_diagonal(pi_diag, H.transpose())




"""Lattice configurations over the alphabet {A, 0, B} and their functionals.

Sites are 1-based. A configuration is stored as a tuple of integer codes
(A=0, empty=1, B=2). The canonical basis index is 1-based with site 1 as the
most significant ternary digit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence


class SiteState(IntEnum):
    A = 0
    E = 1
    B = 2

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]


_SYMBOLS = "A0B"
_CODES = {"A": 0, "0": 1, "B": 2, "E": 1}


@dataclass(frozen=True, order=True)
class Configuration:
    """A length-L word over the site states; ``str(c)`` gives the ket label, e.g. ``A0B``."""

    sites: tuple[int, ...]

    def __post_init__(self):
        if not self.sites:
            raise ValueError("a configuration needs at least one site")
        if any(s not in (0, 1, 2) for s in self.sites):
            raise ValueError(f"site codes must be 0, 1 or 2: {self.sites}")

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        try:
            return cls(tuple(_CODES[ch] for ch in text.strip()))
        except KeyError as exc:
            raise ValueError(f"bad configuration string {text!r}") from exc

    @property
    def L(self) -> int:
        return len(self.sites)

    def __str__(self) -> str:
        return "".join(_SYMBOLS[s] for s in self.sites)

    def __getitem__(self, k: int) -> SiteState:
        """State at 1-based site k."""
        _check_site(k, self.L)
        return SiteState(self.sites[k - 1])

    def __len__(self) -> int:
        return len(self.sites)


def as_config(c: Configuration | str | Sequence[int]) -> Configuration:
    if isinstance(c, Configuration):
        return c
    if isinstance(c, str):
        return Configuration.parse(c)
    return Configuration(tuple(int(s) for s in c))


def _check_site(k: int, upper: int) -> None:
    if not 1 <= k <= upper:
        raise IndexError(f"site {k} outside 1..{upper}")


@dataclass(frozen=True)
class Sector:
    N: int
    M: int

    def validate(self, L: int) -> "Sector":
        if self.N < 0 or self.M < 0 or self.N + self.M > L:
            raise ValueError(f"invalid sector (N={self.N}, M={self.M}) for L={L}")
        return self


@dataclass(frozen=True)
class PositionRep:
    x: tuple[int, ...]
    y: tuple[int, ...]


# -- indexing ---------------------------------------------------------------


def index(config: Configuration) -> int:
    i = 0
    for s in config.sites:
        i = 3 * i + s
    return i + 1


def decode(i: int, L: int) -> Configuration:
    if L < 1:
        raise ValueError("L must be at least 1")
    if not 1 <= i <= 3**L:
        raise IndexError(f"index {i} outside 1..{3**L}")
    return Configuration(_digits(i - 1, L))


@lru_cache(maxsize=None)
def _digits(n: int, L: int) -> tuple[int, ...]:
    out = []
    for _ in range(L):
        n, r = divmod(n, 3)
        out.append(r)
    return tuple(reversed(out))


@lru_cache(maxsize=None)
def all_configurations(L: int) -> tuple[Configuration, ...]:
    """Every configuration in canonical index order (position p holds index p+1)."""
    return tuple(Configuration(_digits(n, L)) for n in range(3**L))


# -- occupation functionals -------------------------------------------------


def occupations(config: Configuration, k: int) -> tuple[int, int, int]:
    """(a_k, v_k, b_k) indicators at site k."""
    s = config[k]
    return int(s == 0), int(s == 1), int(s == 2)


def counts(config: Configuration) -> tuple[int, int, int]:
    """(N, M, V): numbers of A particles, B particles and vacancies."""
    s = config.sites
    return s.count(0), s.count(2), s.count(1)


def left_counts(config: Configuration, k: int) -> tuple[int, int, int]:
    """(N_k, M_k, V_k) counted over sites 1..k-1."""
    _check_site(k, config.L)
    prefix = config.sites[: k - 1]
    return prefix.count(0), prefix.count(2), prefix.count(1)


def sector_of(config: Configuration) -> Sector:
    n, m, _ = counts(config)
    return Sector(n, m)


# -- local moves ----------------------------------------------------------


def cyclic_flip(config: Configuration, k: int, direction: int | str = +1) -> Configuration:
    """Shift the code at site k by +1 or -1 modulo 3."""
    _check_site(k, config.L)
    step = {"+": 1, "-": -1, 1: 1, -1: -1}.get(direction)
    if step is None:
        raise ValueError(f"direction must be +1 or -1, got {direction!r}")
    sites = list(config.sites)
    sites[k - 1] = (sites[k - 1] + step) % 3
    return Configuration(tuple(sites))


def swap(config: Configuration, k: int) -> Configuration:
    """Exchange sites k and k+1."""
    _check_site(k, config.L - 1)
    sites = list(config.sites)
    sites[k - 1], sites[k] = sites[k], sites[k - 1]
    return Configuration(tuple(sites))


# -- position representation -------------------------------------------------


def to_positions(config: Configuration) -> PositionRep:
    x = tuple(k for k, s in enumerate(config.sites, 1) if s == 0)
    y = tuple(k for k, s in enumerate(config.sites, 1) if s == 2)
    return PositionRep(x, y)


def from_positions(L: int, pos: PositionRep | tuple[Sequence[int], Sequence[int]]) -> Configuration:
    x, y = (pos.x, pos.y) if isinstance(pos, PositionRep) else pos
    for name, seq in (("x", x), ("y", y)):
        if list(seq) != sorted(set(seq)):
            raise ValueError(f"{name} positions must be strictly increasing: {list(seq)}")
        if any(not 1 <= p <= L for p in seq):
            raise ValueError(f"{name} positions must lie in 1..{L}: {list(seq)}")
    if set(x) & set(y):
        raise ValueError(f"A and B positions overlap: {sorted(set(x) & set(y))}")
    sites = [1] * L
    for p in x:
        sites[p - 1] = 0
    for p in y:
        sites[p - 1] = 2
    return Configuration(tuple(sites))


# -- sectors ---------------------------------------------------------------


@lru_cache(maxsize=None)
def enumerate_sector(L: int, sector: Sector) -> tuple[Configuration, ...]:
    """All configurations with (N, M) particles, in increasing canonical index."""
    sector.validate(L)
    out = []
    for xs in combinations(range(1, L + 1), sector.N):
        rest = [k for k in range(1, L + 1) if k not in xs]
        for ys in combinations(rest, sector.M):
            out.append(from_positions(L, (xs, ys)))
    return tuple(sorted(out, key=index))


def sectors(L: int) -> Iterator[Sector]:
    for n in range(L + 1):
        for m in range(L - n + 1):
            yield Sector(n, m)

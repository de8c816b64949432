"""Exact Laurent polynomials in t = q^(1/2) with rational coefficients.

Exponents are stored in half-steps: the term ``c * t**k`` means ``c * q**(k/2)``.
Coefficients are plain ``int`` whenever they are integral and
:class:`fractions.Fraction` otherwise, so the common all-integer case stays fast.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Union

Coefficient = Union[int, Fraction]

__all__ = [
    "LaurentPoly",
    "ZERO",
    "ONE",
    "Q",
    "Q_INV",
    "monomial",
    "q_power",
    "q_number",
    "q_factorial",
    "q_binomial",
    "q_multinomial",
    "evaluate",
]


def _canon(c) -> Coefficient:
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return _canon(Fraction(c.numerator, c.denominator))
    raise TypeError(f"coefficient must be rational, got {type(c).__name__}")


class LaurentPoly:
    """Immutable element of Q[t, 1/t] in canonical (zero-free) form."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Coefficient] | Iterable[tuple[int, Coefficient]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Coefficient] = {}
        for k, c in items:
            if not isinstance(k, int) or isinstance(k, bool):
                raise TypeError("half-step exponents must be integers")
            acc[k] = acc.get(k, 0) + _canon(c)
        self._terms = {k: _canon(c) for k, c in sorted(acc.items()) if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[int, Coefficient]) -> "LaurentPoly":
        # caller guarantees: sorted keys, no zero coefficients, canonical coefficients
        obj = object.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def _from_acc(cls, acc: dict[int, Coefficient]) -> "LaurentPoly":
        terms = {}
        for k in sorted(acc):
            c = acc[k]
            if c != 0:
                terms[k] = c.numerator if isinstance(c, Fraction) and c.denominator == 1 else c
        return cls._raw(terms)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict[int, Coefficient]:
        """Copy of the half-exponent -> coefficient map."""
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_unit_monomial(self) -> bool:
        """True for ``t**k`` with coefficient exactly one."""
        return len(self._terms) == 1 and next(iter(self._terms.values())) == 1

    def monomial_data(self) -> tuple[Coefficient, int]:
        """Return ``(coeff, half_exponent)`` of a single-term polynomial."""
        if len(self._terms) != 1:
            raise ValueError(f"not a monomial: {self}")
        (k, c), = self._terms.items()
        return c, k

    def q_exponent(self) -> int:
        """Integer q-exponent of a unit monomial q**e (raises otherwise)."""
        c, k = self.monomial_data()
        if c != 1 or k % 2:
            raise ValueError(f"not a unit monomial with integer q-power: {self}")
        return k // 2

    def min_exponent(self) -> int:
        return next(iter(self._terms)) if self._terms else 0

    def max_exponent(self) -> int:
        return next(reversed(self._terms)) if self._terms else 0

    # -- ring operations --------------------------------------------------

    @staticmethod
    def _coerce(other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            c = _canon(other)
            return LaurentPoly._raw({0: c} if c != 0 else {})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, 0) + c
        return LaurentPoly._from_acc(acc)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return ZERO
        if len(a) == 1 and len(b) == 1:
            (ka, ca), = a.items()
            (kb, cb), = b.items()
            c = ca * cb
            if isinstance(c, Fraction) and c.denominator == 1:
                c = c.numerator
            return LaurentPoly._raw({ka + kb: c})
        acc: dict[int, Coefficient] = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                acc[k] = acc.get(k, 0) + ca * cb
        return LaurentPoly._from_acc(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = ONE, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self) -> "LaurentPoly":
        """Multiplicative inverse; only monomials are units of the ring."""
        c, k = self.monomial_data()
        return LaurentPoly._raw({-k: _canon(Fraction(1) / c) if c not in (1, -1) else c})

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        # only monomials are invertible in the ring
        return self * other.inverse()

    def shift(self, half_steps: int) -> "LaurentPoly":
        """Multiply by t**half_steps."""
        if half_steps == 0:
            return self
        return LaurentPoly._raw({k + half_steps: c for k, c in self._terms.items()})

    def invert_variable(self) -> "LaurentPoly":
        """Substitute t -> 1/t (equivalently q -> 1/q)."""
        return LaurentPoly._raw({-k: self._terms[k] for k in reversed(self._terms)})

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- numerics and text ------------------------------------------------

    def evaluate(self, q0: float) -> float:
        return evaluate(self, q0)

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"LaurentPoly({render(self)!r})"


ZERO = LaurentPoly._raw({})
ONE = LaurentPoly._raw({0: 1})
Q = LaurentPoly._raw({2: 1})
Q_INV = LaurentPoly._raw({-2: 1})


def monomial(coeff: Coefficient, half_exponent: int) -> LaurentPoly:
    """``coeff * q**(half_exponent/2)``; a zero coefficient gives the zero polynomial."""
    return LaurentPoly({half_exponent: coeff})


@lru_cache(maxsize=None)
def q_power(half_exponent: int) -> LaurentPoly:
    """Unit monomial ``t**half_exponent`` (cached; these dominate matrix entries)."""
    return LaurentPoly._raw({half_exponent: 1})


@lru_cache(maxsize=None)
def q_number(n: int) -> LaurentPoly:
    """Symmetric q-number [n]_q = sum_{k=0}^{n-1} q^(2k-n+1); odd in n."""
    if n < 0:
        return -q_number(-n)
    # q^(2k-n+1) has half-exponent 2(2k-n+1)
    return LaurentPoly._raw({2 * (2 * k - n + 1): 1 for k in range(n)})


@lru_cache(maxsize=None)
def q_factorial(n: int) -> LaurentPoly:
    if n < 0:
        raise ValueError(f"q_factorial needs n >= 0, got {n}")
    result = ONE
    for k in range(1, n + 1):
        result = result * q_number(k)
    return result


@lru_cache(maxsize=None)
def q_binomial(n: int, k: int) -> LaurentPoly:
    """Symmetric Gaussian binomial via q-Pascal: C(n,k) = q^k C(n-1,k) + q^-(n-k) C(n-1,k-1)."""
    if n < 0 or k < 0 or k > n:
        raise ValueError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return ONE
    return q_binomial(n - 1, k).shift(2 * k) + q_binomial(n - 1, k - 1).shift(-2 * (n - k))


def q_multinomial(L: int, N: int, M: int) -> LaurentPoly:
    """C_L(N, M) = [L]! / ([N]! [M]! [L-N-M]!) as C_L(N) * C_{L-N}(M)."""
    if N < 0 or M < 0 or N + M > L:
        raise ValueError(f"invalid multinomial arguments L={L}, N={N}, M={M}")
    return q_binomial(L, N) * q_binomial(L - N, M)


def evaluate(p: LaurentPoly, q0: float) -> float:
    """Numeric value at q = q0 > 0, i.e. t = sqrt(q0)."""
    if not q0 > 0:
        raise ValueError(f"q0 must be positive, got {q0}")
    if q0 == 1:
        return float(sum(p._terms.values()))
    t = math.sqrt(q0)
    total = 0.0
    for k, c in p._terms.items():
        if k % 2 == 0:
            total += float(c) * q0 ** (k // 2)
        else:
            total += float(c) * t**k
    return total


# -- canonical text -------------------------------------------------------


def _render_coeff(c: Coefficient) -> str:
    return str(c) if isinstance(c, int) else f"{c.numerator}/{c.denominator}"


def _render_power(k: int) -> str:
    return f"q^{k // 2}" if k % 2 == 0 else f"q^({k}/2)"


def render(p: LaurentPoly) -> str:
    """Canonical text: increasing exponent, ``c*q^k`` or ``c*q^(k/2)``, joined by ' + ' / ' - '."""
    if p.is_zero():
        return "0"
    parts = []
    for i, (k, c) in enumerate(p.items()):
        body = f"{_render_coeff(abs(c))}*{_render_power(k)}"
        if i == 0:
            parts.append(f"-{body}" if c < 0 else body)
        else:
            parts.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(parts)


_TERM = re.compile(r"^(-?\d+(?:/\d+)?)\*q\^(?:(-?\d+)|\((-?\d+)/2\))$")


def parse(text: str) -> LaurentPoly:
    """Inverse of :func:`render`."""
    text = text.strip()
    if text == "0":
        return ZERO
    tokens = text.replace(" - ", " + -").split(" + ")
    terms = []
    for tok in tokens:
        m = _TERM.match(tok.strip())
        if m is None:
            raise ValueError(f"cannot parse term {tok!r} in {text!r}")
        coeff = Fraction(m.group(1))
        half = 2 * int(m.group(2)) if m.group(2) is not None else int(m.group(3))
        if m.group(3) is not None and half % 2 == 0:
            raise ValueError(f"non-canonical half power in {tok!r}")
        terms.append((half, coeff))
    return LaurentPoly(terms)

"""Sparse matrices and vectors over the Laurent ring, single-site operators,
tensor embedding and diagonal lifts of configuration functions.

Rows and columns are 1-based canonical indices, so ``M[i, j]`` is the
matrix element between configurations ``decode(i)`` (row) and ``decode(j)``.
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from .config import Configuration, Sector, all_configurations, index
from .laurent import ONE, ZERO, LaurentPoly, evaluate, q_power, render

__all__ = [
    "SiteOperator",
    "SparseQMatrix",
    "QVector",
    "site_ops",
    "embed",
    "commutator",
    "conjugate_by_diagonal",
    "summation_vector",
    "sector_summation_vector",
    "diagonal_lift",
    "q_diagonal",
    "basis_vector",
]


def _as_poly(x) -> LaurentPoly:
    return x if isinstance(x, LaurentPoly) else LaurentPoly._coerce(x)


class SiteOperator:
    """Dense 3x3 operator on one site, basis order A, 0, B."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = tuple(tuple(_as_poly(x) for x in row) for row in rows)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("a site operator is exactly 3x3")
        self.rows = rows

    @classmethod
    def unit(cls, r: int, c: int) -> "SiteOperator":
        """|r)(c| with 0-based codes."""
        return cls([[ONE if (i, j) == (r, c) else ZERO for j in range(3)] for i in range(3)])

    def __getitem__(self, rc):
        r, c = rc
        return self.rows[r][c]

    def __add__(self, other):
        return SiteOperator([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return SiteOperator([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)])

    def __neg__(self):
        return SiteOperator([[-a for a in r] for r in self.rows])

    def __mul__(self, scalar):
        s = _as_poly(scalar)
        return SiteOperator([[a * s for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        return SiteOperator(
            [[sum((self.rows[i][k] * other.rows[k][j] for k in range(3)), ZERO) for j in range(3)] for i in range(3)]
        )

    def transpose(self):
        return SiteOperator([[self.rows[j][i] for j in range(3)] for i in range(3)])

    def __eq__(self, other):
        return isinstance(other, SiteOperator) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def is_zero(self) -> bool:
        return all(x.is_zero() for r in self.rows for x in r)

    def __repr__(self):
        return "SiteOperator(" + "; ".join(", ".join(render(x) for x in r) for r in self.rows) + ")"


_A, _E, _B = 0, 1, 2


def site_ops() -> dict[str, SiteOperator]:
    """Creation/annihilation/exchange operators, projectors and the unit."""
    u = SiteOperator.unit
    ops = {
        "a+": u(_A, _E),
        "b+": u(_B, _E),
        "c+": u(_A, _B),
        "a-": u(_E, _A),
        "b-": u(_E, _B),
        "c-": u(_B, _A),
        "ahat": u(_A, _A),
        "vhat": u(_E, _E),
        "bhat": u(_B, _B),
    }
    ops["1"] = ops["ahat"] + ops["vhat"] + ops["bhat"]
    return ops


class SparseQMatrix:
    """Square sparse matrix over LaurentPoly with no stored zeros."""

    __slots__ = ("dim", "_rows")

    def __init__(self, dim: int, entries: Mapping[tuple[int, int], object] | Iterable = ()):
        self.dim = dim
        rows: dict[int, dict[int, LaurentPoly]] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for (r, c), v in items:
            if not (1 <= r <= dim and 1 <= c <= dim):
                raise IndexError(f"entry ({r}, {c}) outside 1..{dim}")
            row = rows.setdefault(r, {})
            row[c] = row.get(c, ZERO) + _as_poly(v)
        self._rows = _prune(rows)

    @classmethod
    def _from_rows(cls, dim: int, rows: dict[int, dict[int, LaurentPoly]]) -> "SparseQMatrix":
        obj = object.__new__(cls)
        obj.dim = dim
        obj._rows = rows
        return obj

    @classmethod
    def zeros(cls, dim: int) -> "SparseQMatrix":
        return cls._from_rows(dim, {})

    @classmethod
    def identity(cls, dim: int) -> "SparseQMatrix":
        return cls._from_rows(dim, {i: {i: ONE} for i in range(1, dim + 1)})

    @classmethod
    def diagonal(cls, values: Iterable) -> "SparseQMatrix":
        vals = [_as_poly(v) for v in values]
        return cls._from_rows(len(vals), {i: {i: v} for i, v in enumerate(vals, 1) if not v.is_zero()})

    # -- access ------------------------------------------------------------

    def __getitem__(self, rc) -> LaurentPoly:
        r, c = rc
        return self._rows.get(r, {}).get(c, ZERO)

    def entries(self) -> Iterator[tuple[int, int, LaurentPoly]]:
        """Nonzero entries in row-major sorted order."""
        for r in sorted(self._rows):
            row = self._rows[r]
            for c in sorted(row):
                yield r, c, row[c]

    def row(self, r: int) -> dict[int, LaurentPoly]:
        return dict(self._rows.get(r, {}))

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    @property
    def L(self) -> int:
        n, d = 0, 1
        while d < self.dim:
            d *= 3
            n += 1
        if d != self.dim:
            raise ValueError(f"dimension {self.dim} is not a power of 3")
        return n

    def is_zero(self) -> bool:
        return not self._rows

    def is_diagonal(self) -> bool:
        return all(list(row) == [r] for r, row in self._rows.items())

    def diagonal_entries(self) -> list[LaurentPoly]:
        return [self[i, i] for i in range(1, self.dim + 1)]

    def with_entry(self, r: int, c: int, value) -> "SparseQMatrix":
        """Copy with one entry replaced (used for negative controls)."""
        rows = {k: dict(v) for k, v in self._rows.items()}
        rows.setdefault(r, {})[c] = _as_poly(value)
        return SparseQMatrix._from_rows(self.dim, _prune(rows))

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "SparseQMatrix") -> None:
        if not isinstance(other, SparseQMatrix):
            raise TypeError(f"expected SparseQMatrix, got {type(other).__name__}")
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "SparseQMatrix") -> "SparseQMatrix":
        self._check(other)
        rows = {r: dict(row) for r, row in self._rows.items()}
        for r, row in other._rows.items():
            target = rows.setdefault(r, {})
            for c, v in row.items():
                target[c] = target[c] + v if c in target else v
        return SparseQMatrix._from_rows(self.dim, _prune(rows))

    def __neg__(self) -> "SparseQMatrix":
        return SparseQMatrix._from_rows(self.dim, {r: {c: -v for c, v in row.items()} for r, row in self._rows.items()})

    def __sub__(self, other: "SparseQMatrix") -> "SparseQMatrix":
        return self + (-other)

    def scale(self, scalar) -> "SparseQMatrix":
        s = _as_poly(scalar)
        if s.is_zero():
            return SparseQMatrix.zeros(self.dim)
        return SparseQMatrix._from_rows(
            self.dim, _prune({r: {c: v * s for c, v in row.items()} for r, row in self._rows.items()})
        )

    def __mul__(self, scalar) -> "SparseQMatrix":
        if isinstance(scalar, (SparseQMatrix, QVector)):
            return NotImplemented
        return self.scale(scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, QVector):
            return self.apply(other)
        self._check(other)
        rows = {}
        orows = other._rows
        for r, row in self._rows.items():
            acc: dict[int, LaurentPoly] = {}
            for k, a in row.items():
                brow = orows.get(k)
                if not brow:
                    continue
                for c, b in brow.items():
                    p = a * b
                    acc[c] = acc[c] + p if c in acc else p
            acc = {c: v for c, v in acc.items() if not v.is_zero()}
            if acc:
                rows[r] = acc
        return SparseQMatrix._from_rows(self.dim, rows)

    def apply(self, vec: "QVector") -> "QVector":
        """Column action M|v>."""
        if vec.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {vec.dim}")
        out = {}
        for r, row in self._rows.items():
            acc = ZERO
            for c, a in row.items():
                v = vec._entries.get(c)
                if v is not None:
                    acc = acc + a * v
            if not acc.is_zero():
                out[r] = acc
        return QVector._from_entries(self.dim, out)

    def transpose(self) -> "SparseQMatrix":
        rows: dict[int, dict[int, LaurentPoly]] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                rows.setdefault(c, {})[r] = v
        return SparseQMatrix._from_rows(self.dim, rows)

    def __pow__(self, n: int) -> "SparseQMatrix":
        if n < 0:
            raise ValueError("only non-negative matrix powers")
        result = SparseQMatrix.identity(self.dim)
        for _ in range(n):
            result = result @ self
        return result

    def diagonal_inverse(self) -> "SparseQMatrix":
        """Inverse of a diagonal matrix whose diagonal entries are all nonzero monomials."""
        _require_monomial_diagonal(self)
        return SparseQMatrix._from_rows(self.dim, {r: {r: row[r].inverse()} for r, row in self._rows.items()})

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SparseQMatrix):
            return NotImplemented
        return self.dim == other.dim and self._rows == other._rows

    __hash__ = None

    def first_mismatch(self, other: "SparseQMatrix"):
        """First (row, col, self_entry, other_entry) in row-major order where the two differ, or None."""
        self._check(other)
        keys = set()
        for m in (self, other):
            for r, row in m._rows.items():
                keys.update((r, c) for c in row)
        for r, c in sorted(keys):
            a, b = self[r, c], other[r, c]
            if a != b:
                return r, c, a, b
        return None

    # -- output ------------------------------------------------------------

    def dump(self) -> str:
        """One ``row col polynomial`` line per nonzero entry, row-major sorted."""
        return "".join(f"{r} {c} {render(v)}\n" for r, c, v in self.entries())

    def to_numpy(self, q0: float, w: float = 1.0) -> np.ndarray:
        out = np.zeros((self.dim, self.dim))
        for r, c, v in self.entries():
            out[r - 1, c - 1] = evaluate(v, q0) * w
        return out

    def submatrix(self, indices: list[int]) -> dict[tuple[int, int], LaurentPoly]:
        """Entries restricted to rows and columns in ``indices`` (keys are positions within the list)."""
        pos = {i: p for p, i in enumerate(indices)}
        out = {}
        for i in indices:
            for c, v in self._rows.get(i, {}).items():
                if c in pos:
                    out[pos[i], pos[c]] = v
        return out

    def __repr__(self):
        return f"SparseQMatrix(dim={self.dim}, nnz={self.nnz})"


def _prune(rows: dict[int, dict[int, LaurentPoly]]) -> dict[int, dict[int, LaurentPoly]]:
    out = {}
    for r, row in rows.items():
        kept = {c: v for c, v in row.items() if not v.is_zero()}
        if kept:
            out[r] = kept
    return out


def _require_monomial_diagonal(D: SparseQMatrix) -> None:
    if not D.is_diagonal():
        raise ValueError("matrix is not diagonal")
    if len(D._rows) != D.dim:
        raise ValueError("diagonal matrix has zero entries and is not invertible")
    for r, row in D._rows.items():
        if not row[r].is_monomial():
            raise ValueError(f"diagonal entry {r} is not a monomial: {render(row[r])}")


class QVector:
    """Sparse vector over LaurentPoly; used as a ket (``M @ v``) or a bra (``v @ M``)."""

    __slots__ = ("dim", "_entries")

    def __init__(self, dim: int, entries: Mapping[int, object] = ()):
        self.dim = dim
        acc: dict[int, LaurentPoly] = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for i, v in items:
            if not 1 <= i <= dim:
                raise IndexError(f"index {i} outside 1..{dim}")
            acc[i] = acc.get(i, ZERO) + _as_poly(v)
        self._entries = {i: v for i, v in acc.items() if not v.is_zero()}

    @classmethod
    def _from_entries(cls, dim: int, entries: dict[int, LaurentPoly]) -> "QVector":
        obj = object.__new__(cls)
        obj.dim = dim
        obj._entries = entries
        return obj

    def __getitem__(self, i: int) -> LaurentPoly:
        return self._entries.get(i, ZERO)

    def items(self) -> Iterator[tuple[int, LaurentPoly]]:
        for i in sorted(self._entries):
            yield i, self._entries[i]

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def __add__(self, other: "QVector") -> "QVector":
        acc = dict(self._entries)
        for i, v in other._entries.items():
            acc[i] = acc[i] + v if i in acc else v
        return QVector._from_entries(self.dim, {i: v for i, v in acc.items() if not v.is_zero()})

    def __neg__(self):
        return QVector._from_entries(self.dim, {i: -v for i, v in self._entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, scalar) -> "QVector":
        s = _as_poly(scalar)
        scaled = ((i, v * s) for i, v in self._entries.items())
        return QVector._from_entries(self.dim, {i: v for i, v in scaled if not v.is_zero()})

    __mul__ = scale
    __rmul__ = scale

    def __matmul__(self, other):
        """Row action <v|M, or the bilinear inner product with another vector."""
        if isinstance(other, QVector):
            return self.dot(other)
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        out: dict[int, LaurentPoly] = {}
        for r, v in self._entries.items():
            for c, a in other._rows.get(r, {}).items():
                p = v * a
                out[c] = out[c] + p if c in out else p
        return QVector._from_entries(self.dim, {c: v for c, v in out.items() if not v.is_zero()})

    def dot(self, other: "QVector") -> LaurentPoly:
        acc = ZERO
        small, big = (self, other) if self.nnz <= other.nnz else (other, self)
        for i, v in small._entries.items():
            w = big._entries.get(i)
            if w is not None:
                acc = acc + v * w
        return acc

    def __eq__(self, other):
        if not isinstance(other, QVector):
            return NotImplemented
        return self.dim == other.dim and self._entries == other._entries

    __hash__ = None

    def first_mismatch(self, other: "QVector"):
        for i in sorted(set(self._entries) | set(other._entries)):
            if self[i] != other[i]:
                return i, self[i], other[i]
        return None

    def __repr__(self):
        return f"QVector(dim={self.dim}, nnz={self.nnz})"


def basis_vector(config: Configuration) -> QVector:
    return QVector._from_entries(3**config.L, {index(config): ONE})


# -- tensor embedding -----------------------------------------------------


def embed(u: SiteOperator, k: int, L: int) -> SparseQMatrix:
    """1^(k-1) (x) u (x) 1^(L-k) in the canonical basis."""
    if not 1 <= k <= L:
        raise IndexError(f"site {k} outside 1..{L}")
    dim = 3**L
    stride = 3 ** (L - k)
    cols = {d: [(r, u.rows[r][d]) for r in range(3) if not u.rows[r][d].is_zero()] for d in range(3)}
    rows: dict[int, dict[int, LaurentPoly]] = {}
    for n in range(dim):
        d = (n // stride) % 3
        for r, v in cols[d]:
            target = n + (r - d) * stride
            rows.setdefault(target + 1, {})[n + 1] = v
    return SparseQMatrix._from_rows(dim, rows)


def commutator(A: SparseQMatrix, B: SparseQMatrix) -> SparseQMatrix:
    return A @ B - B @ A


def conjugate_by_diagonal(D: SparseQMatrix, A: SparseQMatrix) -> SparseQMatrix:
    """D A D^-1 computed entry-wise as d_r * A_rc / d_c."""
    _require_monomial_diagonal(D)
    if D.dim != A.dim:
        raise ValueError(f"dimension mismatch: {D.dim} vs {A.dim}")
    d = {r: row[r] for r, row in D._rows.items()}
    dinv = {r: v.inverse() for r, v in d.items()}
    rows = {r: {c: d[r] * v * dinv[c] for c, v in row.items()} for r, row in A._rows.items()}
    return SparseQMatrix._from_rows(A.dim, rows)


# -- summation vectors and diagonal lifts -----------------------------------------


def summation_vector(L: int) -> QVector:
    dim = 3**L
    return QVector._from_entries(dim, {i: ONE for i in range(1, dim + 1)})


def sector_summation_vector(L: int, sector: Sector) -> QVector:
    from .config import enumerate_sector

    return QVector._from_entries(3**L, {index(c): ONE for c in enumerate_sector(L, sector)})


def diagonal_lift(f: Callable[[Configuration], object], L: int) -> SparseQMatrix:
    """Diagonal matrix with entry f(eta) at eta."""
    return SparseQMatrix.diagonal(f(c) for c in all_configurations(L))


def q_diagonal(half_exponent: Callable[[Configuration], int], L: int) -> SparseQMatrix:
    """Diagonal matrix t^e(eta): the exponential q^(D/2) of an integer diagonal D, entry by entry."""
    return SparseQMatrix._from_rows(
        3**L, {i: {i: q_power(half_exponent(c))} for i, c in enumerate(all_configurations(L), 1)}
    )

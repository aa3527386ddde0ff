"""Exact linear algebra over the rationals and the Gaussian rationals.

Everything here is dense and exact.  Rational scalars are plain
:class:`fractions.Fraction` (ints are accepted wherever a scalar is
expected); Gaussian scalars are :class:`GaussianRational`.  Subspaces are
stored by their reduced row echelon basis, so equal spans compare equal.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "GaussianRational",
    "Matrix",
    "Subspace",
    "ScalarParseError",
    "parse_scalar",
    "format_scalar",
    "is_gaussian",
    "rank_and_rref",
    "kernel_basis",
    "intersect",
    "image_and_quotient",
    "span",
    "solve",
]


class GaussianRational:
    """An element ``re + im*i`` of Q(i) with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / n, (self.im * o.re - self.re * o.im) / n
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __repr__(self):
        return f"GaussianRational({format_scalar(self)!r})"

    __str__ = lambda self: format_scalar(self)


Scalar = Union[int, Fraction, GaussianRational]


class ScalarParseError(ValueError):
    pass


_RAT = r"[+-]?\d+(?:/\d+)?"
_RAT_RE = re.compile(rf"^\s*({_RAT})\s*$")
_GAUSS_RE = re.compile(rf"^\s*({_RAT})\s*([+-])\s*(\d+(?:/\d+)?)?\s*\*?\s*i\s*$")
_IMAG_RE = re.compile(rf"^\s*([+-]?(?:\d+(?:/\d+)?)?)\s*\*?\s*i\s*$")


def _rat(text: str) -> Fraction:
    p, _, q = text.partition("/")
    if q and int(q) == 0:
        raise ScalarParseError(f"zero denominator in {text!r}")
    return Fraction(int(p), int(q) if q else 1)


def parse_scalar(text, mode: str = "rational") -> Scalar:
    """Parse ``"p"``, ``"p/q"`` or (Gaussian mode) ``"p/q+r/si"``.

    Plain ints are accepted too.  An imaginary part in rational mode is an
    error; in Gaussian mode every result is a :class:`GaussianRational`.
    """
    if mode not in ("rational", "gaussian"):
        raise ScalarParseError(f"unknown scalar mode {mode!r}")
    if isinstance(text, bool):
        raise ScalarParseError(f"not a scalar: {text!r}")
    if isinstance(text, int):
        value: Scalar = Fraction(text)
    elif isinstance(text, str):
        m = _RAT_RE.match(text)
        if m:
            value = _rat(m.group(1))
        else:
            m = _GAUSS_RE.match(text)
            if m:
                im = _rat(m.group(3)) if m.group(3) else Fraction(1)
                value = GaussianRational(_rat(m.group(1)), im if m.group(2) == "+" else -im)
            else:
                m = _IMAG_RE.match(text)
                if not m:
                    raise ScalarParseError(f"malformed scalar literal {text!r}")
                coef = m.group(1)
                if coef in ("", "+"):
                    im = Fraction(1)
                elif coef == "-":
                    im = Fraction(-1)
                else:
                    im = _rat(coef)
                value = GaussianRational(0, im)
    else:
        raise ScalarParseError(f"not a scalar: {text!r}")

    if mode == "rational":
        if isinstance(value, GaussianRational):
            raise ScalarParseError(f"imaginary literal {text!r} in rational mode")
        return value
    if not isinstance(value, GaussianRational):
        value = GaussianRational(value, 0)
    return value


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    if isinstance(x, GaussianRational):
        sign = "-" if x.im < 0 else "+"
        return f"{_fmt_rat(x.re)}{sign}{_fmt_rat(abs(x.im))}i"
    return _fmt_rat(Fraction(x))


def is_gaussian(x) -> bool:
    return isinstance(x, GaussianRational)


class Matrix:
    """Dense immutable matrix of exact scalars."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, rows: Iterable[Sequence[Scalar]], ncols: int | None = None):
        self._rows = tuple(tuple(r) for r in rows)
        self.nrows = len(self._rows)
        if ncols is None:
            if not self._rows:
                raise ValueError("empty matrix needs an explicit column count")
            ncols = len(self._rows[0])
        self.ncols = ncols
        for r in self._rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls(((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)) if n else cls((), 0)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[Scalar]], nrows: int) -> Matrix:
        return cls((tuple(c[i] for c in cols) for i in range(nrows)), len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[tuple[Scalar, ...], ...]:
        return self._rows

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self._rows)

    def transpose(self) -> Matrix:
        if not self.nrows:
            return Matrix(((),) * self.ncols, 0)
        return Matrix(zip(*self._rows), self.nrows)

    T = property(transpose)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.transpose().rows
            return Matrix(
                (tuple(_dot(r, c) for c in cols) for r in self._rows), other.ncols
            )
        vec = tuple(other)
        if len(vec) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(vec)}")
        return tuple(_dot(r, vec) for r in self._rows)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def hstack(self, other: Matrix) -> Matrix:
        if self.nrows != other.nrows:
            raise ValueError("hstack row mismatch")
        return Matrix((a + b for a, b in zip(self._rows, other._rows)), self.ncols + other.ncols)

    def to_strings(self) -> list[list[str]]:
        return [[format_scalar(x) for x in r] for r in self._rows]

    def __repr__(self):
        return f"Matrix({self.to_strings()!r})"


def _dot(a, b):
    s = 0
    for x, y in zip(a, b):
        if x and y:
            s = s + x * y
    return s


def _inverse(x: Scalar) -> Scalar:
    if isinstance(x, GaussianRational):
        return 1 / x
    return 1 / Fraction(x)


def _rref_rows(rows: list[list[Scalar]], ncols: int) -> tuple[list[list[Scalar]], list[int]]:
    """In-place Gauss-Jordan elimination; returns (nonzero rows, pivot columns)."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        inv = _inverse(pr[c])
        if pr[c] != 1:
            pr = [x * inv if x else x for x in pr]
            rows[r] = pr
        nz = [j for j in range(c, ncols) if pr[j] != 0]
        for i in range(nrows):
            if i == r:
                continue
            f = rows[i][c]
            if f == 0:
                continue
            ri = rows[i]
            for j in nz:
                ri[j] = ri[j] - f * pr[j]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _canon(x: Scalar) -> Scalar:
    # ints become Fractions so stored bases compare and hash uniformly
    if isinstance(x, GaussianRational):
        return x
    return Fraction(x)


def rank_and_rref(m: Matrix) -> tuple[int, Matrix]:
    """Rank and reduced row echelon form (zero rows kept at the bottom)."""
    rows = [list(r) for r in m.rows]
    nz, _ = _rref_rows(rows, m.ncols)
    rank = len(nz)
    out = [tuple(_canon(x) for x in r) for r in nz]
    out += [(Fraction(0),) * m.ncols] * (m.nrows - rank)
    return rank, Matrix(out, m.ncols)


class Subspace:
    """A linear subspace of ``ambient``-space with canonical rref basis."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: int, vectors: Iterable[Sequence[Scalar]] = ()):
        self.ambient = ambient
        rows = [list(v) for v in vectors]
        for v in rows:
            if len(v) != ambient:
                raise ValueError(f"vector of length {len(v)} in {ambient}-space")
        nz, _ = _rref_rows(rows, ambient)
        self.basis: tuple[tuple[Scalar, ...], ...] = tuple(
            tuple(_canon(x) for x in r) for r in nz
        )

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, (tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls(n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __add__(self, other: Subspace) -> Subspace:
        _check_ambient(self, other)
        return Subspace(self.ambient, self.basis + other.basis)

    def contains(self, v: Sequence[Scalar]) -> bool:
        return Subspace(self.ambient, self.basis + (tuple(v),)).dim == self.dim

    def issubspace(self, other: Subspace) -> bool:
        _check_ambient(self, other)
        return (self + other).dim == other.dim

    def as_matrix(self) -> Matrix:
        """Basis vectors as rows."""
        return Matrix(self.basis, self.ambient)

    def __repr__(self):
        return f"Subspace(ambient={self.ambient}, dim={self.dim})"


def span(ambient: int, vectors: Iterable[Sequence[Scalar]]) -> Subspace:
    return Subspace(ambient, vectors)


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient != b.ambient:
        raise ValueError(f"ambient dimension mismatch: {a.ambient} vs {b.ambient}")


def kernel_basis(m: Matrix) -> Subspace:
    """The null space ``{v : m v = 0}``."""
    rows = [list(r) for r in m.rows]
    nz, pivots = _rref_rows(rows, m.ncols)
    pivset = set(pivots)
    vecs = []
    for f in range(m.ncols):
        if f in pivset:
            continue
        v: list[Scalar] = [0] * m.ncols
        v[f] = 1
        for r, p in zip(nz, pivots):
            if r[f] != 0:
                v[p] = -r[f]
        vecs.append(v)
    return Subspace(m.ncols, vecs)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient)
    # columns a_i and -b_j; a kernel vector (alpha, beta) gives sum alpha_i a_i
    cols = list(a.basis) + [tuple(-x for x in v) for v in b.basis]
    ker = kernel_basis(Matrix.from_columns(cols, a.ambient))
    vecs = []
    for k in ker.basis:
        alpha = k[: a.dim]
        vecs.append(
            tuple(_dot(alpha, [v[i] for v in a.basis]) for i in range(a.ambient))
        )
    return Subspace(a.ambient, vecs)


def image_and_quotient(m: Matrix, target_sub: Subspace) -> tuple[Subspace, int]:
    """Column space of ``m`` and ``dim(target) - dim(image ∩ target)``."""
    if target_sub.ambient != m.nrows:
        raise ValueError(
            f"target ambient {target_sub.ambient} does not match row count {m.nrows}"
        )
    image = Subspace(m.nrows, m.transpose().rows if m.ncols else ())
    return image, target_sub.dim - intersect(image, target_sub).dim


def solve(m: Matrix, b: Sequence[Scalar]) -> tuple[Scalar, ...] | None:
    """One exact solution of ``m x = b`` (free variables zero), or None."""
    if len(b) != m.nrows:
        raise ValueError("right-hand side length mismatch")
    rows = [list(r) + [bi] for r, bi in zip(m.rows, b)]
    nz, pivots = _rref_rows(rows, m.ncols + 1)
    if pivots and pivots[-1] == m.ncols:
        return None
    x: list[Scalar] = [Fraction(0)] * m.ncols
    for r, p in zip(nz, pivots):
        x[p] = _canon(r[-1])
    return tuple(x)

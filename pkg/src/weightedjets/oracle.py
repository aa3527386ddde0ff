"""Brute-force ground truth on the nilpotent group in exponential coordinates.

The group law comes from the BCH series (exact after truncation at the
nilpotency step), invariant fields are read off by differentiating it,
and operators act on honest polynomials.  Nothing here uses the
enveloping-algebra normal forms, except that Taylor coordinates are
indexed by PBW monomials so they line up with the jet fibers.

Right-invariant fields realise the bracket up to a sign ``s``
(``[F_i, F_j] = s F_[e_i, e_j]``).  The sign is measured on heisenberg(1)
and the basis element ``e_i`` then acts as ``s^(w_i + 1) F_i``, which turns
the assignment into an algebra homomorphism for every graded algebra.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterable, Sequence

from .checks import Ledger, check
from .exactlin import GaussianRational, Matrix, format_scalar, kernel_basis
from .gla import GradedLieAlgebra, bracket, builtin
from .pbw import component, exponents_of_weight
from .weightedsym import OperatorSpec

__all__ = [
    "Poly",
    "WeightedPolynomial",
    "GroupModel",
    "InvariantField",
    "OracleError",
    "bch_product",
    "invariant_fields",
    "field_bracket_sign",
    "act",
    "apply_word",
    "apply_operator",
    "polynomial_solutions",
    "weighted_taylor",
    "jet_field",
    "monomials_up_to",
    "random_polynomial",
    "check_group_law",
    "Solutions",
]

MAX_DEPTH = 6


class OracleError(ValueError):
    pass


class Poly:
    """Sparse polynomial ``{exponents: coeff}`` in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict | None = None):
        self.nvars = nvars
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def const(cls, nvars: int, c) -> Poly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> Poly:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c=Fraction(1)) -> Poly:
        return cls(len(exps), {tuple(exps): c})

    def _lift(self, other):
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different variable sets")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if not other:
                return Poly(self.nvars)
            return Poly(self.nvars, {k: v * other for k, v in self.terms.items()})
        o = self._lift(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return Poly(self.nvars, out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = Poly.const(self.nvars, Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == self._lift(other)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def diff(self, i: int) -> Poly:
        out = {}
        for k, v in self.terms.items():
            if k[i]:
                k2 = list(k)
                k2[i] -= 1
                out[tuple(k2)] = v * k[i]
        return Poly(self.nvars, out)

    def evaluate(self, point: Sequence):
        total = 0
        for k, v in self.terms.items():
            term = v
            for x, a in zip(point, k):
                if a:
                    term = term * x**a
            total = total + term
        return total

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def compose(self, subs: Sequence[Poly]) -> Poly:
        """Substitute ``subs[i]`` for variable ``i``."""
        if len(subs) != self.nvars:
            raise ValueError("need one substitution per variable")
        nv = subs[0].nvars
        out = Poly(nv)
        powers: dict[tuple[int, int], Poly] = {}
        for k, v in self.terms.items():
            term = Poly.const(nv, v)
            for i, a in enumerate(k):
                if a:
                    if (i, a) not in powers:
                        powers[(i, a)] = subs[i] ** a
                    term = term * powers[(i, a)]
            out = out + term
        return out

    def weighted_degree(self, weights: Sequence[int]) -> int:
        if not self.terms:
            return -1
        return max(sum(a * w for a, w in zip(k, weights)) for k in self.terms)

    def homogeneous_part(self, weights: Sequence[int], d: int) -> Poly:
        return Poly(
            self.nvars,
            {k: v for k, v in self.terms.items() if sum(a * w for a, w in zip(k, weights)) == d},
        )

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda e: (sum(e), tuple(-a for a in e))):
            mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, k) if a)
            c = _display(self.terms[k])
            if not mono:
                parts.append(c)
            elif c == "1":
                parts.append(mono)
            elif c == "-1":
                parts.append(f"-{mono}")
            else:
                parts.append(f"({c})*{mono}" if "/" in c or "+" in c[1:] or "-" in c[1:] else f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.format([f'y{i + 1}' for i in range(self.nvars)])})"


def _display(c) -> str:
    """Shortest readable form: drop a zero real or imaginary part."""
    if isinstance(c, GaussianRational):
        if not c.im:
            return format_scalar(c.re)
        if not c.re:
            im = format_scalar(c.im)
            return {"1": "i", "-1": "-i"}.get(im, f"{im}i")
    return format_scalar(c)


@dataclass(frozen=True)
class WeightedPolynomial:
    components: tuple[Poly, ...]
    weights: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max((c.weighted_degree(self.weights) for c in self.components), default=-1)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __sub__(self, other: WeightedPolynomial) -> WeightedPolynomial:
        return WeightedPolynomial(
            tuple(a - b for a, b in zip(self.components, other.components)), self.weights
        )

    def format(self, names: Sequence[str]) -> str:
        body = [c.format(names) for c in self.components]
        return body[0] if len(body) == 1 else "(" + ", ".join(body) + ")"

    @classmethod
    def scalar(cls, p: Poly, weights: Sequence[int]) -> WeightedPolynomial:
        return cls((p,), tuple(weights))


@dataclass(frozen=True)
class InvariantField:
    index: int
    coeffs: tuple[Poly, ...]  # coefficient of d/dy_j

    def __call__(self, p: Poly) -> Poly:
        out = Poly(p.nvars)
        for j, c in enumerate(self.coeffs):
            if c:
                d = p.diff(j)
                if d:
                    out = out + c * d
        return out


def _field_bracket(f: InvariantField, h: InvariantField) -> tuple[Poly, ...]:
    n = len(f.coeffs)
    out = []
    for k in range(n):
        acc = Poly(n)
        for l in range(n):
            if f.coeffs[l]:
                acc = acc + f.coeffs[l] * h.coeffs[k].diff(l)
            if h.coeffs[l]:
                acc = acc - h.coeffs[l] * f.coeffs[k].diff(l)
        out.append(acc)
    return tuple(out)


@dataclass
class GroupModel:
    algebra: GradedLieAlgebra
    product: tuple[Poly, ...]  # in variables (a_1..a_n, b_1..b_n)
    fields: tuple[InvariantField, ...] = ()
    sign: int = 0
    action_signs: tuple[int, ...] = ()

    @property
    def coordinate_names(self) -> tuple[str, ...]:
        return tuple(n.lower() for n in self.algebra.names)

    def multiply_points(self, a: Sequence, b: Sequence) -> tuple:
        pt = tuple(a) + tuple(b)
        return tuple(p.evaluate(pt) for p in self.product)


def _dynkin_words(depth: int) -> dict[tuple[int, ...], Fraction]:
    """Coefficient of each right-nested bracket word in log(e^A e^B)."""
    words: dict[tuple[int, ...], Fraction] = {}

    def pairs(total: int, k: int):
        if k == 0:
            if total == 0:
                yield ()
            return
        for m in range(1, total - k + 2):
            for r in range(m + 1):
                for rest in pairs(total - m, k - 1):
                    yield ((r, m - r),) + rest

    for N in range(1, depth + 1):
        for k in range(1, N + 1):
            base = Fraction((-1) ** (k - 1), k * N)
            for seq in pairs(N, k):
                denom = 1
                word: list[int] = []
                for r, s in seq:
                    denom *= factorial(r) * factorial(s)
                    word += [0] * r + [1] * s
                key = tuple(word)
                words[key] = words.get(key, 0) + base / denom
    return {w: c for w, c in words.items() if c}


@lru_cache(maxsize=None)
def bch_product(g: GradedLieAlgebra) -> GroupModel:
    """Group law ``m(a, b) = log(exp(a) exp(b))`` as polynomial maps."""
    if g.depth > MAX_DEPTH:
        raise OracleError(f"depth {g.depth} exceeds the BCH guard of {MAX_DEPTH}")
    n = g.dim
    A = tuple(Poly.var(2 * n, i) for i in range(n))
    B = tuple(Poly.var(2 * n, n + i) for i in range(n))
    letters = (A, B)
    memo: dict[tuple[int, ...], tuple] = {}

    def nested(word: tuple[int, ...]) -> tuple:
        if word in memo:
            return memo[word]
        if len(word) == 1:
            val = letters[word[0]]
        else:
            val = bracket(g, letters[word[0]], nested(word[1:]))
        memo[word] = val
        return val

    prod = [Poly(2 * n) for _ in range(n)]
    for word, c in sorted(_dynkin_words(g.depth).items()):
        if len(word) > 1 and word[-1] == word[-2]:
            continue
        vec = nested(word)
        for j in range(n):
            if vec[j]:
                prod[j] = prod[j] + vec[j] * c
    model = GroupModel(g, tuple(prod))
    model.fields = tuple(_fields_from_product(model))
    model.sign = field_bracket_sign() if g != _HEIS1 else _measure_sign(model)
    model.action_signs = tuple(model.sign ** (w + 1) for w in g.weights)
    return model


_HEIS1 = builtin("heisenberg", 1)


def _fields_from_product(model: GroupModel) -> list[InvariantField]:
    """Field i at b is d/dt m(t e_i, b) at t = 0: right-invariant."""
    n = model.algebra.dim
    out = []
    for i in range(n):
        coeffs = []
        for pj in model.product:
            d = pj.diff(i)
            keep = {}
            for k, v in d.terms.items():
                if not any(k[:n]):
                    keep[k[n:]] = v
            coeffs.append(Poly(n, keep))
        out.append(InvariantField(i, tuple(coeffs)))
    return out


def _measure_sign(model: GroupModel) -> int:
    fx, fy, fz = model.fields
    br = _field_bracket(fx, fy)
    if br == fz.coeffs:
        return 1
    if br == tuple(-c for c in fz.coeffs):
        return -1
    raise OracleError("invariant fields do not realise the Heisenberg bracket")


@lru_cache(maxsize=None)
def field_bracket_sign() -> int:
    """``s`` with ``[F_X, F_Y] = s F_Z`` on heisenberg(1)."""
    return bch_product(_HEIS1).sign


def check_group_law(model: GroupModel, ledger: Ledger | None = None, samples: int = 20, seed: int = 0) -> None:
    """Identity and associativity of the polynomial group law."""
    g, n = model.algebra, model.algebra.dim
    zero = [Poly(n) for _ in range(n)]
    ys = [Poly.var(n, i) for i in range(n)]
    left = all(p.compose(zero + ys) == ys[j] for j, p in enumerate(model.product))
    right = all(p.compose(ys + zero) == ys[j] for j, p in enumerate(model.product))
    check(ledger, "oracle.group_identity", left and right, "m(0,b) != b or m(a,0) != a")

    if g.depth <= 3:
        three = 3 * n
        a = [Poly.var(three, i) for i in range(n)]
        b = [Poly.var(three, n + i) for i in range(n)]
        c = [Poly.var(three, 2 * n + i) for i in range(n)]
        ab = [p.compose(a + b) for p in model.product]
        bc = [p.compose(b + c) for p in model.product]
        lhs = [p.compose(ab + c) for p in model.product]
        rhs = [p.compose(a + bc) for p in model.product]
        ok = lhs == rhs
    else:
        rng = random.Random(seed)
        ok = True
        for _ in range(samples):
            pts = [[Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)] for _ in range(3)]
            lhs = model.multiply_points(model.multiply_points(pts[0], pts[1]), pts[2])
            rhs = model.multiply_points(pts[0], model.multiply_points(pts[1], pts[2]))
            ok = ok and lhs == rhs
    check(ledger, "oracle.group_associativity", ok, "BCH product is not associative")


def invariant_fields(model: GroupModel, ledger: Ledger | None = None) -> tuple[InvariantField, ...]:
    """The right-invariant fields, after checking they realise the bracket."""
    g = model.algebra
    s = model.sign
    ok = True
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            br = _field_bracket(model.fields[i], model.fields[j])
            expect = [Poly(g.dim) for _ in range(g.dim)]
            for m, c in g.bracket_basis(i, j).items():
                for k in range(g.dim):
                    expect[k] = expect[k] + model.fields[m].coeffs[k] * (c * s)
            ok = ok and br == tuple(expect)
    check(ledger, f"oracle.field_bracket_realisation[sign={s}]", ok, "fields violate the bracket")
    return model.fields


def act(model: GroupModel, word: Sequence[int], p: Poly) -> Poly:
    """``word . p`` with the letters acting as signed invariant fields."""
    for i in reversed(tuple(word)):
        if p.is_zero():
            return p
        p = model.fields[i](p)
        if model.action_signs[i] < 0:
            p = -p
    return p


apply_word = act


def apply_operator(op: OperatorSpec, p: WeightedPolynomial) -> WeightedPolynomial:
    if p.rank != op.rank_e:
        raise OracleError(f"section of rank {p.rank} for an operator on rank {op.rank_e}")
    model = bch_product(op.algebra)
    n = op.algebra.dim
    out = [Poly(n) for _ in range(op.rank_f)]
    for t in op.terms:
        if t.coeff.is_zero():
            continue
        acted = [act(model, t.word, c) for c in p.components]
        for b in range(op.rank_f):
            for a in range(op.rank_e):
                c = t.coeff[b, a]
                if c and acted[a]:
                    out[b] = out[b] + acted[a] * c
    return WeightedPolynomial(tuple(out), op.algebra.weights)


def monomials_up_to(weights: Sequence[int], N: int) -> list[tuple[int, ...]]:
    """Exponent vectors of weighted degree <= N, graded then descending lex."""
    out: list[tuple[int, ...]] = []
    for d in range(N + 1):
        out.extend(exponents_of_weight(weights, d))
    return out


@dataclass
class Solutions:
    degree: int
    basis: list[WeightedPolynomial]

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __iter__(self):
        yield self.dimension
        yield self.basis


def polynomial_solutions(op: OperatorSpec, N: int) -> Solutions:
    """All polynomial solutions of weighted degree <= N, as an exact basis."""
    if N < 0:
        raise OracleError("degree must be non-negative")
    g, e, f = op.algebra, op.rank_e, op.rank_f
    n = g.dim
    monos = monomials_up_to(g.weights, N)
    unknowns = [(k, a) for k in range(len(monos)) for a in range(e)]
    images = []
    row_keys: dict[tuple, int] = {}
    for k, a in unknowns:
        comps = [Poly(n) for _ in range(e)]
        comps[a] = Poly.monomial(monos[k])
        img = apply_operator(op, WeightedPolynomial(tuple(comps), g.weights))
        entry = {}
        for b, pb in enumerate(img.components):
            for exps, c in pb.terms.items():
                key = (b, exps)
                if key not in row_keys:
                    row_keys[key] = len(row_keys)
                entry[row_keys[key]] = c
        images.append(entry)
    ncols = len(unknowns)
    rows = [[0] * ncols for _ in range(len(row_keys))]
    for col, entry in enumerate(images):
        for r, c in entry.items():
            rows[r][col] = c
    mat = Matrix(rows, ncols)
    ker = kernel_basis(mat)
    basis = []
    for v in ker.basis:
        comps = [dict() for _ in range(e)]
        for (k, a), c in zip(unknowns, v):
            if c:
                comps[a][monos[k]] = c
        basis.append(WeightedPolynomial(tuple(Poly(n, d) for d in comps), g.weights))
    return Solutions(N, basis)


def weighted_taylor(model: GroupModel, p: WeightedPolynomial, m: int) -> tuple:
    """Coordinates ``(u . p_a)(0)`` over the jet fiber of order ``m``."""
    if m < 0:
        raise OracleError("order must be non-negative")
    g = model.algebra
    out = []
    for i in range(m + 1):
        parts = [c.homogeneous_part(g.weights, i) for c in p.components]
        for u in component(g, i).monomials:
            for part in parts:
                out.append(act(model, u, part).constant_term() if part else Fraction(0))
    return tuple(out)


def jet_field(model: GroupModel, p: WeightedPolynomial, r: int) -> list[Poly]:
    """The section ``x -> j^r_x p`` in the invariant trivialisation."""
    g = model.algebra
    return [
        act(model, u, c)
        for i in range(r + 1)
        for u in component(g, i).monomials
        for c in p.components
    ]


def random_polynomial(
    g: GradedLieAlgebra,
    rank: int,
    degree: int,
    rng: random.Random,
    density: float = 0.5,
    coeff_range: int = 3,
    gaussian: bool = False,
) -> WeightedPolynomial:
    monos = monomials_up_to(g.weights, degree)
    comps = []
    for _ in range(rank):
        terms = {}
        for e in monos:
            if rng.random() < density:
                c = Fraction(rng.randint(-coeff_range, coeff_range))
                if gaussian:
                    c = GaussianRational(c, rng.randint(-coeff_range, coeff_range))
                if c:
                    terms[e] = c
        comps.append(Poly(g.dim, terms))
    return WeightedPolynomial(tuple(comps), g.weights)


def format_solutions(model: GroupModel, basis: Iterable[WeightedPolynomial]) -> list[str]:
    return [p.format(model.coordinate_names) for p in basis]

"""Operators, weighted principal symbols and the prolonged symbol spaces.

Coordinates on ``U_{-w}^* (x) E`` are indexed ``mono * rank_e + a`` over the
dual PBW basis; rows of a symbol map into ``U_{-l}^* (x) F`` are indexed
``mono * rank_f + b`` in the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .checks import Ledger, check
from .exactlin import Matrix, Subspace, intersect, kernel_basis, solve
from .gla import GradedLieAlgebra
from .pbw import component, multiplication_matrix, normal_form_dict

__all__ = [
    "BundleSpec",
    "Term",
    "OperatorSpec",
    "OperatorError",
    "SymbolData",
    "SymbolSpaceTower",
    "make_operator",
    "principal_symbol",
    "prolonged_symbol_matrix",
    "symbol_space",
    "symbol_space_kernel_route",
    "symbol_space_intersection_route",
    "dual_multiplication_embedding",
    "finite_type",
]


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class BundleSpec:
    rank_e: int = 1
    rank_f: int = 1

    def __post_init__(self):
        if self.rank_e < 1 or self.rank_f < 1:
            raise OperatorError("bundle ranks must be at least 1")


@dataclass(frozen=True)
class Term:
    word: tuple[int, ...]
    coeff: Matrix  # rank_f x rank_e


class OperatorSpec:
    """``sum coeff * word`` with words in the Lie algebra basis.

    The weighted order is the largest word weight carrying a nonzero
    coefficient, unless ``order`` is given explicitly (which is how zero
    operators of a prescribed order are built).
    """

    def __init__(
        self,
        algebra: GradedLieAlgebra,
        bundle: BundleSpec,
        terms: Iterable[Term],
        order: int | None = None,
    ):
        self.algebra = algebra
        self.bundle = bundle
        self.terms = tuple(terms)
        for t in self.terms:
            if t.coeff.shape != (bundle.rank_f, bundle.rank_e):
                raise OperatorError(
                    f"coefficient of word {t.word} has shape {t.coeff.shape}, "
                    f"expected {(bundle.rank_f, bundle.rank_e)}"
                )
            for i in t.word:
                algebra.index(i)
        live = [algebra.word_weight(t.word) for t in self.terms if not t.coeff.is_zero()]
        if order is None:
            if not live:
                raise OperatorError("operator has no nonzero term; give its order explicitly")
            order = max(live)
            top = max(algebra.word_weight(t.word) for t in self.terms)
            if top > order:
                # weighted order is part of the input; never lower it silently
                raise OperatorError(
                    f"terms of weight {top} all have zero coefficient; the live order would drop to {order}"
                )
        elif live and max(live) > order:
            raise OperatorError(f"term of weight {max(live)} exceeds declared order {order}")
        if order < 1:
            raise OperatorError(f"weighted order must be at least 1, got {order}")
        self.order = order

    @property
    def rank_e(self) -> int:
        return self.bundle.rank_e

    @property
    def rank_f(self) -> int:
        return self.bundle.rank_f

    def top_terms(self) -> list[Term]:
        return [t for t in self.terms if self.algebra.word_weight(t.word) == self.order]

    def is_homogeneous(self) -> bool:
        return all(
            self.algebra.word_weight(t.word) == self.order
            for t in self.terms
            if not t.coeff.is_zero()
        )

    def __repr__(self):
        return (
            f"OperatorSpec({self.algebra!r}, r={self.order}, "
            f"E={self.rank_e}, F={self.rank_f}, terms={len(self.terms)})"
        )


def make_operator(
    g: GradedLieAlgebra,
    terms: Sequence[tuple[Sequence, object]],
    rank_e: int = 1,
    rank_f: int = 1,
    order: int | None = None,
) -> OperatorSpec:
    """Convenience constructor.

    Each term is ``(word, coeff)`` with the word given by basis names or
    indices and ``coeff`` either a scalar (for ``rank_e == rank_f == 1``)
    or a nested ``rank_f x rank_e`` list.
    """
    built = []
    for word, coeff in terms:
        idx = tuple(g.index(x) for x in word)
        if isinstance(coeff, Matrix):
            mat = coeff
        elif isinstance(coeff, (list, tuple)):
            try:
                mat = Matrix(coeff, rank_e)
            except ValueError as exc:
                raise OperatorError(f"coefficient of word {tuple(word)}: {exc}") from None
        else:
            mat = Matrix([[coeff]], 1)
        built.append(Term(idx, mat))
    return OperatorSpec(g, BundleSpec(rank_e, rank_f), built, order)


@dataclass
class SymbolData:
    order: int
    matrix: Matrix
    kernel: Subspace

    @property
    def kernel_dim(self) -> int:
        return self.kernel.dim


def principal_symbol(op: OperatorSpec) -> SymbolData:
    """Symbol ``U_{-r}^* (x) E -> F`` from the weight-``r`` terms only."""
    g, r, e, f = op.algebra, op.order, op.rank_e, op.rank_f
    comp = component(g, r)
    rows = [[Fraction(0)] * (comp.dim * e) for _ in range(f)]
    for t in op.top_terms():
        for mono, c in normal_form_dict(g, t.word).items():
            v = comp.index(mono)
            for b in range(f):
                for a in range(e):
                    cba = t.coeff[b, a]
                    if cba:
                        rows[b][v * e + a] = rows[b][v * e + a] + c * cba
    mat = Matrix(rows, comp.dim * e)
    return SymbolData(r, mat, kernel_basis(mat))


def prolonged_symbol_matrix(op: OperatorSpec, ell: int) -> Matrix:
    """The ``ell``-th symbol map ``U_{-r-l}^* (x) E -> U_{-l}^* (x) F``.

    ``f`` goes to ``u -> sigma(v -> f(u v))``: the principal symbol composed
    with the dual of ``U_{-l} (x) U_{-r} -> U_{-r-l}``.
    """
    if ell < 1:
        raise OperatorError("ell must be >= 1; use principal_symbol for ell = 0")
    g, r, e, f = op.algebra, op.order, op.rank_e, op.rank_f
    S = principal_symbol(op).matrix
    mult = multiplication_matrix(g, ell, r)
    dl, dr, drl = component(g, ell).dim, component(g, r).dim, component(g, r + ell).dim
    rows = []
    for u in range(dl):
        for b in range(f):
            row = [Fraction(0)] * (drl * e)
            for v in range(dr):
                col = u * dr + v
                for a in range(e):
                    s = S[b, v * e + a]
                    if not s:
                        continue
                    for m in range(drl):
                        c = mult[m, col]
                        if c:
                            row[m * e + a] = row[m * e + a] + s * c
            rows.append(row)
    return Matrix(rows, drl * e)


def dual_multiplication_embedding(
    g: GradedLieAlgebra, left: int, right: int, rank: int
) -> Matrix:
    """``U_{-l-r}^* (x) E -> U_{-l}^* (x) U_{-r}^* (x) E``, ``f -> f(u v)``.

    Rows are indexed ``(u * dim_r + v) * rank + a``.
    """
    mult = multiplication_matrix(g, left, right)
    dtot = mult.nrows
    rows = []
    for col in range(mult.ncols):
        for a in range(rank):
            row = [0] * (dtot * rank)
            for m in range(dtot):
                c = mult[m, col]
                if c:
                    row[m * rank + a] = c
            rows.append(row)
    return Matrix(rows, dtot * rank)


def _pullback(emb: Matrix, target: Subspace) -> Subspace:
    """Preimage of ``target`` under an injective ``emb``."""
    image = Subspace(emb.nrows, emb.transpose().rows)
    meet = intersect(image, target)
    vecs = []
    for x in meet.basis:
        sol = solve(emb, x)
        if sol is None:  # pragma: no cover - meet lies in the image
            raise AssertionError("vector of the intersection is not in the image")
        vecs.append(sol)
    return Subspace(emb.ncols, vecs)


def lift_tensor(left_dim: int, space: Subspace) -> Subspace:
    """``U^* (x) space`` inside ``U^* (x) ambient`` for ``dim U = left_dim``."""
    n = space.ambient
    vecs = []
    for u in range(left_dim):
        for k in space.basis:
            v = [0] * (left_dim * n)
            v[u * n : (u + 1) * n] = k
            vecs.append(v)
    return Subspace(left_dim * n, vecs)


def symbol_space_kernel_route(op: OperatorSpec, ell: int) -> Subspace:
    return kernel_basis(prolonged_symbol_matrix(op, ell))


def symbol_space_intersection_route(op: OperatorSpec, ell: int) -> Subspace:
    """``U_{-r-l}^* (x) E  ∩  U_{-l}^* (x) K`` pulled back to ``U_{-r-l}^* (x) E``."""
    g, r, e = op.algebra, op.order, op.rank_e
    K = principal_symbol(op).kernel
    emb = dual_multiplication_embedding(g, ell, r, e)
    return _pullback(emb, lift_tensor(component(g, ell).dim, K))


def symbol_space(op: OperatorSpec, ell: int, ledger: Ledger | None = None) -> Subspace:
    """``g^{r+l}``, computed by both routes and checked equal."""
    if ell < 1:
        raise OperatorError("ell must be >= 1")
    a = symbol_space_kernel_route(op, ell)
    b = symbol_space_intersection_route(op, ell)
    check(
        ledger,
        f"symbol_space.two_route[l={ell}]",
        a == b,
        f"kernel route dim {a.dim} vs intersection route dim {b.dim}",
    )
    return a


def symbol_space_at(op: OperatorSpec, ell: int, ledger: Ledger | None = None) -> Subspace:
    """``g^{r+l}`` for any ``l >= 0``; ``l = 0`` is the symbol kernel K."""
    if ell == 0:
        return principal_symbol(op).kernel
    return symbol_space(op, ell, ledger)


@dataclass
class SymbolSpaceTower:
    order: int
    cap: int
    dims: list[int] = field(default_factory=list)
    spaces: dict[int, Subspace] = field(default_factory=dict)
    ell0: int | None = None

    @property
    def finite(self) -> bool:
        return self.ell0 is not None

    @property
    def verdict(self) -> str:
        return "finite" if self.finite else "undetermined"


def finite_type(op: OperatorSpec, cap: int = 10, ledger: Ledger | None = None) -> SymbolSpaceTower:
    """Scan ``dim g^{r+l}`` for ``l = 1..cap`` and stop at the first zero."""
    if cap < 1:
        raise OperatorError("cap must be >= 1")
    tower = SymbolSpaceTower(op.order, cap)
    for ell in range(1, cap + 1):
        space = symbol_space(op, ell, ledger)
        tower.spaces[ell] = space
        tower.dims.append(space.dim)
        if space.dim == 0:
            tower.ell0 = ell - 1
            break
    return tower

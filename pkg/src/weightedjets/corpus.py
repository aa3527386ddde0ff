"""Named example operators and a seeded random operator generator."""

from __future__ import annotations

import random
from fractions import Fraction

from .exactlin import GaussianRational, Matrix
from .gla import GradedLieAlgebra, builtin
from .weightedsym import BundleSpec, OperatorSpec, Term, make_operator

__all__ = ["named", "NAMES", "random_operator", "random_corpus", "CORPUS_ALGEBRAS"]


def _gradient() -> OperatorSpec:
    h = builtin("heisenberg", 1)
    return make_operator(h, [(["X"], [[1], [0]]), (["Y"], [[0], [1]])], 1, 2)


def _second_derivative() -> OperatorSpec:
    return make_operator(builtin("abelian", 1), [(["Y", "Y"], 1)])


def _x_only() -> OperatorSpec:
    return make_operator(builtin("heisenberg", 1), [(["X"], 1)])


def _sublaplacian(a=1) -> OperatorSpec:
    """``-X^2 - Y^2 + i a Z`` with Gaussian coefficients."""
    h = builtin("heisenberg", 1)
    m1 = GaussianRational(-1)
    return make_operator(
        h, [(["X", "X"], m1), (["Y", "Y"], m1), (["Z"], GaussianRational(0, a))]
    )


def _hessian() -> OperatorSpec:
    a2 = builtin("abelian", 2)
    return make_operator(
        a2,
        [
            (["Y1", "Y1"], [[1], [0], [0]]),
            (["Y1", "Y2"], [[0], [1], [0]]),
            (["Y2", "Y2"], [[0], [0], [1]]),
        ],
        1,
        3,
    )


def _engel_gradient() -> OperatorSpec:
    return make_operator(builtin("engel"), [(["e1"], [[1], [0]]), (["e2"], [[0], [1]])], 1, 2)


_NAMED = {
    "gradient": _gradient,
    "second_derivative": _second_derivative,
    "x_only": _x_only,
    "sublaplacian": _sublaplacian,
    "hessian": _hessian,
    "engel_gradient": _engel_gradient,
}
NAMES = tuple(_NAMED)


def named(name: str) -> OperatorSpec:
    try:
        return _NAMED[name]()
    except KeyError:
        raise KeyError(f"unknown corpus operator {name!r}; known: {', '.join(NAMES)}") from None


CORPUS_ALGEBRAS = (
    ("abelian", 1),
    ("abelian", 2),
    ("heisenberg", 1),
    ("engel", None),
)


def _random_word(g: GradedLieAlgebra, w: int, rng: random.Random) -> tuple[int, ...]:
    """A uniformly built word of exact weight ``w`` (letters of weight <= w)."""
    word: list[int] = []
    left = w
    while left:
        choices = [i for i in range(g.dim) if g.weights[i] <= left]
        i = rng.choice(choices)
        word.append(i)
        left -= g.weights[i]
    return tuple(word)


def _random_coeff(rank_f: int, rank_e: int, rng: random.Random, nonzero: bool) -> Matrix:
    while True:
        rows = [[Fraction(rng.randint(-2, 2)) for _ in range(rank_e)] for _ in range(rank_f)]
        m = Matrix(rows, rank_e)
        if not nonzero or not m.is_zero():
            return m


def random_operator(
    rng: random.Random,
    algebra: GradedLieAlgebra | None = None,
    max_order: int = 2,
    max_rank: int = 2,
    max_terms: int = 3,
) -> OperatorSpec:
    """Random operator with at least one live top-weight term.

    Words have weight <= r, coefficients are small integers and both bundle
    ranks are drawn from ``1..max_rank``.
    """
    if algebra is None:
        name, n = rng.choice(CORPUS_ALGEBRAS)
        algebra = builtin(name, n)
    r = rng.randint(1, max_order)
    rank_e, rank_f = rng.randint(1, max_rank), rng.randint(1, max_rank)
    terms = [Term(_random_word(algebra, r, rng), _random_coeff(rank_f, rank_e, rng, True))]
    for _ in range(rng.randint(0, max_terms - 1)):
        w = rng.randint(1, r)
        terms.append(Term(_random_word(algebra, w, rng), _random_coeff(rank_f, rank_e, rng, False)))
    return OperatorSpec(algebra, BundleSpec(rank_e, rank_f), terms)


def random_corpus(count: int = 50, seed: int = 0, **kw) -> list[OperatorSpec]:
    """``count`` operators, cycling through the corpus algebras."""
    rng = random.Random(seed)
    algebras = [builtin(name, n) for name, n in CORPUS_ALGEBRAS]
    return [random_operator(rng, algebras[k % len(algebras)], **kw) for k in range(count)]

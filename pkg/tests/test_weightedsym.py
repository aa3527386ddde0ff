from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weightedjets import corpus
from weightedjets.checks import ConsistencyError, Ledger
from weightedjets.exactlin import GaussianRational, Matrix, Subspace, intersect, kernel_basis
from weightedjets.gla import builtin
from weightedjets.pbw import component
from weightedjets.weightedsym import (
    OperatorError,
    finite_type,
    make_operator,
    principal_symbol,
    prolonged_symbol_matrix,
    symbol_space,
    symbol_space_intersection_route,
    symbol_space_kernel_route,
)

H1 = builtin("heisenberg", 1)


def test_symbol_of_x():
    op = corpus.named("x_only")
    sym = principal_symbol(op)
    assert op.order == 1
    assert sym.matrix == Matrix([[1, 0]])
    assert sym.kernel == Subspace(2, [[0, 1]])


def test_symbol_of_gradient_invertible():
    sym = principal_symbol(corpus.named("gradient"))
    assert sym.matrix == Matrix.identity(2)
    assert sym.kernel_dim == 0


def test_sublaplacian_symbol_contains_z():
    op = corpus.named("sublaplacian")
    sym = principal_symbol(op)
    assert op.order == 2
    z_col = component(H1, 2).index((2,))
    assert sym.matrix[0, z_col] == GaussianRational(0, 1)
    assert sym.matrix.rows[0] == (-1, 0, -1, GaussianRational(0, 1))


def test_lower_order_terms_do_not_enter_symbol():
    op = make_operator(H1, [(["X", "Y"], 1), (["Y"], 5)])
    assert principal_symbol(op).matrix == Matrix([[0, 1, 0, 0]])


def test_operator_order_rules():
    with pytest.raises(OperatorError):
        make_operator(H1, [(["X"], 0)])
    # zero top coefficient would silently lower the order
    with pytest.raises(OperatorError):
        make_operator(H1, [(["X", "X"], 0), (["Y"], 1)])
    with pytest.raises(OperatorError):
        make_operator(H1, [(["X"], [[1, 0]])], rank_e=1, rank_f=1)
    zero = make_operator(H1, [(["X"], 0)], order=1)
    assert zero.order == 1


def test_prolonged_second_derivative():
    op = corpus.named("second_derivative")
    m = prolonged_symbol_matrix(op, 1)
    assert m.shape == (1, 1) and m[0, 0] != 0


def test_prolonged_x_matrix():
    m = prolonged_symbol_matrix(corpus.named("x_only"), 1)
    # rows f(X . X) and f(Y . X) = f(XY) - f(Z) over (X^2, XY, Y^2, Z)
    assert m == Matrix([[1, 0, 0, 0], [0, 1, 0, -1]])
    assert kernel_basis(m).dim == 2


def test_prolonged_zero_operator_is_zero():
    zero = make_operator(H1, [(["X"], 0)], order=1)
    assert prolonged_symbol_matrix(zero, 1).is_zero()
    with pytest.raises(OperatorError):
        prolonged_symbol_matrix(zero, 0)


def test_symbol_space_examples():
    assert symbol_space(corpus.named("gradient"), 1).dim == 0
    x = corpus.named("x_only")
    assert symbol_space(x, 1).dim == 2
    assert symbol_space(x, 3).dim == 3


def test_finite_type_examples():
    t = finite_type(corpus.named("gradient"), 5)
    assert t.finite and t.ell0 == 0 and t.dims == [0]
    t = finite_type(corpus.named("second_derivative"), 5)
    assert t.finite and t.ell0 == 0
    t = finite_type(corpus.named("x_only"), 10)
    assert not t.finite and t.verdict == "undetermined"
    assert t.dims[:5] == [2, 2, 3, 3, 4]


def _monomial_count(weights, w):
    return sum(1 for a, b in product(range(w + 1), repeat=2) if a * weights[0] + b * weights[1] == w)


def test_x_tower_matches_solution_monomials():
    # weighted monomials in y (weight 1) and t = z - xy/2 (weight 2)
    t = finite_type(corpus.named("x_only"), 8)
    assert t.dims == [_monomial_count((1, 2), 1 + ell) for ell in range(1, 9)]


def test_route_mismatch_raises():
    # a corrupted kernel must trip the two-route assertion
    op = corpus.named("x_only")
    import weightedjets.weightedsym as ws

    original = ws.symbol_space_kernel_route
    try:
        ws.symbol_space_kernel_route = lambda op, ell: Subspace.zero(original(op, ell).ambient)
        ledger = Ledger()
        with pytest.raises(ConsistencyError):
            ws.symbol_space(op, 1, ledger)
        assert ledger.as_dict() == {"symbol_space.two_route[l=1]": "fail"}
    finally:
        ws.symbol_space_kernel_route = original


def test_two_routes_and_rank_bound_on_named_corpus():
    for name in corpus.NAMES:
        op = corpus.named(name)
        for ell in range(1, 5 if op.algebra.dim <= 3 else 4):
            a = symbol_space_kernel_route(op, ell)
            b = symbol_space_intersection_route(op, ell)
            assert a == b, (name, ell)
            lower = component(op.algebra, op.order + ell).dim * op.rank_e - component(op.algebra, ell).dim * op.rank_f
            assert a.dim >= lower


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_two_routes_random(seed):
    import random

    op = corpus.random_operator(random.Random(seed))
    for ell in range(1, 4):
        assert symbol_space_kernel_route(op, ell) == symbol_space_intersection_route(op, ell)


def test_monotone_vanishing_on_random_corpus():
    for op in corpus.random_corpus(50, seed=1):
        dims = [symbol_space(op, ell).dim for ell in range(1, 5)]
        for k, d in enumerate(dims):
            if d == 0:
                assert all(x == 0 for x in dims[k:]), dims


# independent classical computation for abelian algebras


def _exponents(n, d):
    return sorted((e for e in product(range(d + 1), repeat=n) if sum(e) == d), reverse=True)


def _classical_symbol_kernel(symbol_rows, n, r, rank_e):
    """K inside Sym^r* (x) E from a symbol given as {(F row): {(exp, a): c}}."""
    exps = _exponents(n, r)
    cols = {(e, a): k * rank_e + a for k, e in enumerate(exps) for a in range(rank_e)}
    rows = []
    for entries in symbol_rows:
        row = [0] * (len(exps) * rank_e)
        for key, c in entries.items():
            row[cols[key]] += c
        rows.append(row)
    return kernel_basis(Matrix(rows, len(exps) * rank_e))


def _first_prolongation(space, n, d, rank_e):
    """{f on degree d+1 : each contraction v -> f(v + e_i) lies in space}."""
    hi, lo = _exponents(n, d + 1), _exponents(n, d)
    hi_idx = {e: k for k, e in enumerate(hi)}
    full = len(hi) * rank_e
    # rows spanning the annihilator of space; preimage = kernel of annihilator o contraction
    annihilator = kernel_basis(space.as_matrix())
    result = Subspace.full(full)
    for i in range(n):
        # contraction matrix lo-coords <- hi-coords
        rows = []
        for e in lo:
            up = tuple(x + (1 if j == i else 0) for j, x in enumerate(e))
            for a in range(rank_e):
                row = [0] * full
                row[hi_idx[up] * rank_e + a] = 1
                rows.append(row)
        contraction = Matrix(rows, full)
        if annihilator.dim:
            pre = kernel_basis(Matrix(annihilator.basis, space.ambient) @ contraction)
            result = intersect(result, pre)
    return result


@pytest.mark.parametrize("seed", range(12))
def test_abelian_matches_classical_spencer(seed):
    import random

    rng = random.Random(seed)
    n = 1 + seed % 2
    g = builtin("abelian", n)
    op = corpus.random_operator(rng, g, max_order=2)
    r, e = op.order, op.rank_e
    symbol_rows = []
    for b in range(op.rank_f):
        entries: dict = {}
        for t in op.top_terms():
            exp = tuple(t.word.count(j) for j in range(n))
            for a in range(e):
                if t.coeff[b, a]:
                    entries[(exp, a)] = entries.get((exp, a), 0) + t.coeff[b, a]
        symbol_rows.append(entries)
    assert [tuple(x) for x in component(g, r).exponents] == _exponents(n, r)
    classical = _classical_symbol_kernel(symbol_rows, n, r, e)
    assert classical == principal_symbol(op).kernel
    for ell in range(1, 4):
        classical = _first_prolongation(classical, n, r + ell - 1, e)
        assert classical == symbol_space(op, ell), (seed, ell)

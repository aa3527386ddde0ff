"""Acceptance criteria, one test each, run at their stated tolerance.

Every test prints a single ``[C<k>] PASS|FAIL ...`` line (also under pytest's
output capture) before asserting, so a full run doubles as a scorecard.
"""

from __future__ import annotations

import random
import time

import pytest

from weightedjets import corpus
from weightedjets.exactlin import GaussianRational, Matrix, rank_and_rref
from weightedjets.gla import builtin
from weightedjets.jetmodel import (
    equation_tower,
    first_order_symbol_kernel,
    jet_fiber,
    prolongation_matrix,
    rewrite_first_order,
    spencer_kernel_check,
)
from weightedjets.oracle import (
    Poly,
    apply_operator,
    bch_product,
    jet_field,
    polynomial_solutions,
    random_polynomial,
    weighted_taylor,
)
from weightedjets.pbw import component
from weightedjets.weightedsym import (
    finite_type,
    make_operator,
    principal_symbol,
    symbol_space,
    symbol_space_at,
    symbol_space_intersection_route,
    symbol_space_kernel_route,
)


@pytest.fixture
def verdict(capsys):
    def emit(tag: str, ok: bool, elapsed: float, limit: float | None, detail: str) -> None:
        in_time = limit is None or elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        budget = f" (limit {limit:g}s)" if limit is not None else ""
        with capsys.disabled():
            print(f"\n[{tag}] {status} {elapsed:.2f}s{budget}: {detail}")
        assert ok, detail
        assert in_time, f"{tag} took {elapsed:.2f}s, limit {limit}s"

    return emit


def test_c1_horizontal_gradient(verdict):
    t0 = time.perf_counter()
    op = corpus.named("gradient")
    ft = finite_type(op, 10)
    g_dims = [symbol_space(op, ell).dim for ell in range(1, 5)]
    rep = rewrite_first_order(op, None, ft.ell0, 4)
    q1 = equation_tower(op, 0).q_dims()[0]
    sols = polynomial_solutions(op, 6)
    elapsed = time.perf_counter() - t0
    got = dict(
        ell0=ft.ell0,
        g_dims=g_dims,
        q1=q1,
        injective=rep.sigma_injective,
        obstructions=rep.obstruction_dims,
        oracle=sols.dimension,
    )
    want = dict(ell0=0, g_dims=[0, 0, 0, 0], q1=1, injective=True, obstructions=[0, 0, 0, 0], oracle=1)
    verdict("C1", ft.finite and got == want, elapsed, 1.0, f"got {got}")


def test_c2_classical_second_derivative(verdict):
    t0 = time.perf_counter()
    op = corpus.named("second_derivative")
    ft = finite_type(op, 10)
    q2 = equation_tower(op, 0).q_dims()[0]
    rep = rewrite_first_order(op, None, ft.ell0, 1)
    sols = polynomial_solutions(op, 6)
    basis = {p.format(["y"]) for p in sols.basis}
    elapsed = time.perf_counter() - t0
    ok = q2 == 2 and rep.solution_bound == 2 and basis == {"1", "y"}
    verdict("C2", ok, elapsed, 1.0, f"dim Q^2={q2}, bound={rep.solution_bound}, basis={sorted(basis)}")


def test_c3_non_finite_type_witness(verdict):
    t0 = time.perf_counter()
    op = corpus.named("x_only")
    ft = finite_type(op, 10)
    g3 = ft.dims[:3]
    oracle = [polynomial_solutions(op, N).dimension for N in range(1, 5)]
    q = equation_tower(op, 3).q_dims()  # Q^{1+l} for l = 0..3, i.e. N = 1..4
    elapsed = time.perf_counter() - t0
    stated = [2, 3, 4, 6]
    ok = g3 == [2, 2, 3] and ft.verdict == "undetermined" and oracle == stated and oracle == q
    verdict(
        "C3",
        ok,
        elapsed,
        5.0,
        f"g_dims={g3}, verdict={ft.verdict}, oracle N=1..4 {oracle}, Q {q}, stated {stated}",
    )


def test_c4_two_routes_and_kernel_identity(verdict):
    t0 = time.perf_counter()
    ops = corpus.random_corpus(60, seed=2024)
    mismatches = []
    for k, op in enumerate(ops):
        for ell in range(1, 4):
            if symbol_space_kernel_route(op, ell) != symbol_space_intersection_route(op, ell):
                mismatches.append((k, "routes", ell))
        for ell in range(0, 4):
            if first_order_symbol_kernel(op, ell, symbol_space_at(op, ell)) != symbol_space(op, ell + 1):
                mismatches.append((k, "kernel", ell))
    elapsed = time.perf_counter() - t0
    algebras = sorted({op.algebra.label for op in ops})
    verdict(
        "C4",
        not mismatches and len(ops) >= 50,
        elapsed,
        120.0,
        f"{len(ops)} operators over {algebras}, mismatches {mismatches[:5]}",
    )


def test_c5_commuting_diagram_and_spencer(verdict):
    t0 = time.perf_counter()
    rng = random.Random(77)
    diagram_failures = 0
    triples = 0
    for _ in range(120):
        op = corpus.random_operator(rng)
        ell = rng.randint(0, 2)
        model = bch_product(op.algebra)
        p = random_polynomial(op.algebra, op.rank_e, op.order + ell + rng.randint(0, 2), rng)
        lhs = prolongation_matrix(op, ell) @ list(weighted_taylor(model, p, op.order + ell))
        rhs = weighted_taylor(model, apply_operator(op, p), ell)
        triples += 1
        diagram_failures += tuple(lhs) != tuple(rhs)
    genuine_rejected = corrupt_accepted = cases = 0
    for _ in range(40):
        op = corpus.random_operator(rng)
        g, r, e = op.algebra, op.order, op.rank_e
        model = bch_product(g)
        p = random_polynomial(g, e, r + 2, rng)
        field = jet_field(model, p, r)
        genuine_rejected += not spencer_kernel_check(model, field, r, e)
        # perturb one sub-top coordinate by a coordinate function
        k = rng.randrange(jet_fiber(g, e, r).block_slice(r).start)
        broken = list(field)
        broken[k] = broken[k] + Poly.var(g.dim, rng.randrange(g.dim))
        corrupt_accepted += spencer_kernel_check(model, broken, r, e)
        cases += 1
    elapsed = time.perf_counter() - t0
    ok = diagram_failures == 0 and genuine_rejected == 0 and corrupt_accepted == 0 and triples >= 100
    verdict(
        "C5",
        ok,
        elapsed,
        120.0,
        f"{triples} triples, {diagram_failures} diagram failures; "
        f"{cases} Spencer pairs, {genuine_rejected} genuine rejected, {corrupt_accepted} corrupted accepted",
    )


def test_c6_monotone_vanishing(verdict):
    t0 = time.perf_counter()
    cap = 10
    ops = [corpus.named(n) for n in corpus.NAMES] + corpus.random_corpus(50, seed=6)
    violations = []
    vanished = 0
    for k, op in enumerate(ops):
        dims = [symbol_space(op, ell).dim for ell in range(1, cap + 1)]
        if 0 in dims:
            vanished += 1
            first = dims.index(0)
            if any(dims[first:]):
                violations.append((k, dims))
    elapsed = time.perf_counter() - t0
    verdict(
        "C6",
        not violations,
        elapsed,
        None,
        f"{len(ops)} operators to cap {cap}, {vanished} reach zero, violations {violations[:3]}",
    )


def test_c7_weighted_symbol_sees_z(verdict):
    t0 = time.perf_counter()
    op = corpus.named("sublaplacian")
    sym = principal_symbol(op)
    z_col = component(op.algebra, 2).index((2,))
    z_entry = sym.matrix[0, z_col]
    # classical reading: all three fields of weight one, so iZ drops out of the top order
    flat = builtin("abelian", 3)
    i = GaussianRational(0, 1)
    classical = make_operator(flat, [(["Y1", "Y1"], -1), (["Y2", "Y2"], -1), (["Y3"], i)])
    k_classical = principal_symbol(classical).kernel_dim
    elapsed = time.perf_counter() - t0
    ok = z_entry != 0 and k_classical > sym.kernel_dim
    verdict(
        "C7",
        ok,
        elapsed,
        1.0,
        f"Z entry {z_entry}, dim K weighted {sym.kernel_dim}, classical {k_classical}",
    )


def test_c8_jet_determination(verdict):
    t0 = time.perf_counter()
    candidates = [corpus.named(n) for n in corpus.NAMES] + corpus.random_corpus(30, seed=8)
    checked = 0
    violations = []
    for k, op in enumerate(candidates):
        ft = finite_type(op, 6)
        if not ft.finite:
            continue
        model = bch_product(op.algebra)
        R = op.order + ft.ell0
        sols = polynomial_solutions(op, R + (3 if op.algebra.dim <= 3 else 2))
        checked += 1
        if not sols.basis:
            continue
        cols = [weighted_taylor(model, p, R) for p in sols.basis]
        # equal jets for distinct solutions <=> the jet map has a kernel on the solution space
        rank, _ = rank_and_rref(Matrix.from_columns(cols, len(cols[0])))
        if rank != len(cols):
            violations.append((k, rank, len(cols)))
    elapsed = time.perf_counter() - t0
    verdict(
        "C8",
        not violations and checked > 0,
        elapsed,
        None,
        f"{checked} finite-type operators, violations {violations[:3]}",
    )

"""Weighted jet fibers of the flat model and the prolonged equations.

A jet of order ``m`` at the identity is the functional ``u -> (u.s)(e)`` on
``U_0 + ... + U_{-m}``.  Coordinates are laid out block by block in
ascending weight; inside block ``i`` the index is ``mono * rank + a``.
Operators act on jets by right multiplication of their words, so the row
of ``p_l(phi)`` for ``(u, b)`` pairs the jet against ``u * word``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .checks import Ledger, check
from .exactlin import (
    Matrix,
    Subspace,
    image_and_quotient,
    intersect,
    kernel_basis,
    rank_and_rref,
)
from .gla import GradedLieAlgebra
from .pbw import component, is_surjective, multiplication_matrix, multiply
from .weightedsym import (
    OperatorSpec,
    _pullback,
    dual_multiplication_embedding,
    lift_tensor,
    symbol_space_at,
)

__all__ = [
    "JetFiber",
    "EquationTower",
    "RewriteReport",
    "RewriteError",
    "jet_fiber",
    "prolongation_matrix",
    "identity_prolongation_matrix",
    "equation_tower",
    "first_order_symbol_kernel",
    "rewrite_first_order",
    "spencer_kernel_check",
    "truncate",
]


class RewriteError(ValueError):
    pass


@dataclass(frozen=True)
class JetFiber:
    order: int
    rank: int
    blocks: tuple[tuple[int, int], ...]  # (weight, block dimension)

    @property
    def total(self) -> int:
        return sum(d for _, d in self.blocks)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for _, d in self.blocks:
            out.append(acc)
            acc += d
        return tuple(out)

    def block_slice(self, i: int) -> slice:
        off = self.offsets[i]
        return slice(off, off + self.blocks[i][1])


def jet_fiber(g: GradedLieAlgebra, rank: int, m: int) -> JetFiber:
    if m < 0:
        raise ValueError("jet order must be non-negative")
    return JetFiber(m, rank, tuple((i, component(g, i).dim * rank) for i in range(m + 1)))


def truncate(vec: Sequence, fiber: JetFiber) -> tuple:
    """Image of a higher-order jet under the projection to ``fiber``."""
    return tuple(vec[: fiber.total])


def prolongation_matrix(op: OperatorSpec, ell: int) -> Matrix:
    """``p_l(phi): J^{r+l}(E) -> J^l(F)``; ``ell = 0`` gives ``phi`` itself."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    g, e, f = op.algebra, op.rank_e, op.rank_f
    src = jet_fiber(g, e, op.order + ell)
    tgt = jet_fiber(g, f, ell)
    soff = src.offsets
    rows = []
    for i in range(ell + 1):
        for u in component(g, i).monomials:
            prods = []
            for t in op.terms:
                if t.coeff.is_zero():
                    continue
                blk = i + g.word_weight(t.word)
                comp = component(g, blk)
                prods.append((t.coeff, soff[blk], comp, multiply(g, u, t.word)))
            for b in range(f):
                row = [Fraction(0)] * src.total
                for coeff, off, comp, nf in prods:
                    for a in range(e):
                        cba = coeff[b, a]
                        if not cba:
                            continue
                        for mono, c in nf.items():
                            k = off + comp.index(mono) * e + a
                            row[k] = row[k] + cba * c
                rows.append(row)
    assert len(rows) == tgt.total
    return Matrix(rows, src.total)


def identity_prolongation_matrix(g: GradedLieAlgebra, rank: int, m: int, ell: int) -> Matrix:
    """``p_l(id_m): J^{m+l}(E) -> J^l(J^m(E))``.

    Row ``(u, c)`` with ``c = (v, a)`` a coordinate of ``J^m(E)`` reads the
    jet at ``u * v``.
    """
    src = jet_fiber(g, rank, m + ell)
    inner = jet_fiber(g, rank, m)
    soff = src.offsets
    inner_coords = [
        (i, v, a)
        for i in range(m + 1)
        for v in component(g, i).monomials
        for a in range(rank)
    ]
    rows = []
    for i in range(ell + 1):
        for u in component(g, i).monomials:
            for j, v, a in inner_coords:
                row = [0] * src.total
                comp = component(g, i + j)
                for mono, c in multiply(g, u, v).items():
                    row[soff[i + j] + comp.index(mono) * rank + a] = c
                rows.append(row)
    assert len(rows) == jet_fiber(g, inner.total, ell).total
    return Matrix(rows, src.total)


@dataclass
class EquationTower:
    order: int
    fibers: dict[int, JetFiber] = field(default_factory=dict)
    spaces: dict[int, Subspace] = field(default_factory=dict)
    projected: dict[int, Subspace] = field(default_factory=dict)

    @property
    def levels(self) -> int:
        return max(self.spaces) if self.spaces else -1

    def q_dims(self) -> list[int]:
        return [self.spaces[k].dim for k in sorted(self.spaces)]

    def space(self, ell: int) -> Subspace:
        return self.spaces[ell]


def _project(space: Subspace, fiber: JetFiber) -> Subspace:
    return Subspace(fiber.total, (truncate(v, fiber) for v in space.basis))


def equation_tower(
    op: OperatorSpec,
    L: int,
    ledger: Ledger | None = None,
    symbols: dict[int, Subspace] | None = None,
) -> EquationTower:
    """``Q^{r+l} = ker p_l(phi)`` for ``l = 0..L`` with the symbol checks."""
    if L < 0:
        raise ValueError("L must be non-negative")
    g, r, e = op.algebra, op.order, op.rank_e
    tower = EquationTower(r)
    for ell in range(L + 1):
        fiber = jet_fiber(g, e, r + ell)
        Q = kernel_basis(prolongation_matrix(op, ell))
        tower.fibers[ell] = fiber
        tower.spaces[ell] = Q
        if ell == 0:
            continue
        prev = tower.fibers[ell - 1]
        proj = _project(Q, prev)
        tower.projected[ell] = proj
        check(
            ledger,
            f"equation_tower.projection_into_previous[l={ell}]",
            proj.issubspace(tower.spaces[ell - 1]),
            "pi(Q^{r+l}) is not contained in Q^{r+l-1}",
        )
        top = fiber.block_slice(r + ell)
        top_coords = Subspace(
            fiber.total,
            (
                tuple(1 if k == j else 0 for k in range(fiber.total))
                for j in range(top.start, top.stop)
            ),
        )
        ker = intersect(Q, top_coords)
        ker_top = Subspace(top.stop - top.start, (v[top] for v in ker.basis))
        gsp = symbols[ell] if symbols and ell in symbols else symbol_space_at(op, ell, ledger)
        check(
            ledger,
            f"equation_tower.projection_kernel_is_symbol[l={ell}]",
            ker_top == gsp,
            f"ker(pi|Q) dim {ker_top.dim} vs g dim {gsp.dim}",
        )
        check(
            ledger,
            f"equation_tower.rank_nullity[l={ell}]",
            Q.dim == proj.dim + gsp.dim,
            f"{Q.dim} != {proj.dim} + {gsp.dim}",
        )
    return tower


def first_order_symbol_kernel(op: OperatorSpec, ell: int, g_space: Subspace) -> Subspace:
    """Kernel of the symbol of the first-order operator on ``Q^{r+l}``.

    ``U_{-r-l-1}^* (x) E  ∩  U_{-1}^* (x) g^{r+l}`` pulled back into
    ``U_{-r-l-1}^* (x) E`` through the dual of ``U_{-1} (x) U_{-r-l}``.
    """
    g, R, e = op.algebra, op.order + ell, op.rank_e
    emb = dual_multiplication_embedding(g, 1, R, e)
    return _pullback(emb, lift_tensor(component(g, 1).dim, g_space))


@dataclass
class RewriteReport:
    ell0: int
    order: int
    solution_bound: int
    w_dim: int
    sigma_injective: bool
    witness_kernel: Subspace | None
    obstruction_dims: list[int]
    effective_bound: int
    forced: bool = False

    def as_dict(self) -> dict:
        return {
            "ell0": self.ell0,
            "first_order_jet_order": self.order + self.ell0,
            "solution_bound": self.solution_bound,
            "w_dim": self.w_dim,
            "sigma_injective": self.sigma_injective,
            "witness_kernel_dim": 0 if self.witness_kernel is None else self.witness_kernel.dim,
            "obstruction_dims": list(self.obstruction_dims),
            "effective_bound": self.effective_bound,
            "forced": self.forced,
        }


def rewrite_first_order(
    op: OperatorSpec,
    tower: EquationTower | None,
    ell0: int,
    depth: int = 4,
    force: bool = False,
    ledger: Ledger | None = None,
    symbols: dict[int, Subspace] | None = None,
) -> RewriteReport:
    """First-order rewrite data on ``Q^{r+l0}`` plus obstruction dimensions."""
    if ell0 < 0 or depth < 0:
        raise ValueError("ell0 and depth must be non-negative")
    g, r, e = op.algebra, op.order, op.rank_e
    R = r + ell0
    symbols = dict(symbols or {})

    def gspace(k: int) -> Subspace:
        if k not in symbols:
            symbols[k] = symbol_space_at(op, k, ledger)
        return symbols[k]

    g_next = gspace(ell0 + 1)
    if g_next.dim and not force:
        raise RewriteError(
            f"ell0={ell0} is inconsistent with the symbol tower: dim g^{R + 1} = {g_next.dim}"
        )

    if tower is None or tower.levels < ell0 + depth:
        tower = equation_tower(op, ell0 + depth, ledger, symbols)

    mult = multiplication_matrix(g, 1, R)
    emb = dual_multiplication_embedding(g, 1, R, e)
    emb_rank, _ = rank_and_rref(emb)
    check(
        ledger,
        f"rewrite.p1_id_injective[R={R}]",
        is_surjective(mult) and emb_rank == emb.ncols,
        "U_{-1} (x) U_{-R} -> U_{-R-1} is not onto",
    )
    jR = jet_fiber(g, e, R)
    dim_u1 = component(g, 1).dim
    w_dim = dim_u1 * jR.total - component(g, R + 1).dim * e

    # W as the cokernel of the full p_1(id_R) must agree
    p1 = identity_prolongation_matrix(g, e, R, 1)
    p1_rank, _ = rank_and_rref(p1)
    check(
        ledger,
        f"rewrite.w_dim_matches_cokernel[R={R}]",
        p1_rank == p1.ncols and p1.nrows - p1_rank == w_dim,
        f"cokernel {p1.nrows - p1_rank} vs {w_dim}",
    )

    ker = first_order_symbol_kernel(op, ell0, gspace(ell0))
    check(
        ledger,
        f"rewrite.first_order_kernel_is_next_symbol[l={ell0}]",
        ker == g_next,
        f"dim {ker.dim} vs dim g^{R + 1} = {g_next.dim}",
    )

    QR = tower.space(ell0)
    obs = []
    for m in range(1, depth + 1):
        proj = _project(tower.space(ell0 + m), jR)
        check(
            ledger,
            f"rewrite.lift_image_in_base[m={m}]",
            proj.issubspace(QR),
            "projected lift leaves Q^{r+l0}",
        )
        basis_cols = Matrix.from_columns(proj.basis, jR.total) if proj.dim else Matrix.zeros(jR.total, 0)
        _, quot = image_and_quotient(basis_cols, QR)
        obs.append(quot)
    check(
        ledger,
        "rewrite.obstructions_monotone",
        all(a <= b for a, b in zip(obs, obs[1:])),
        f"obstruction dims {obs}",
    )
    effective = QR.dim - (obs[-1] if obs else 0)
    return RewriteReport(
        ell0=ell0,
        order=r,
        solution_bound=QR.dim,
        w_dim=w_dim,
        sigma_injective=ker.dim == 0,
        witness_kernel=None if ker.dim == 0 else ker,
        obstruction_dims=obs,
        effective_bound=effective,
        forced=force,
    )


def spencer_kernel_check(model, jet_field: Sequence, r: int, rank: int = 1, points=None) -> bool:
    """Is ``S(j^1 J) = 0`` for the jet field ``J`` of order ``r``?

    ``S = e_1(pi^r_{r-1}) - p_1(id_{r-1}) o pi^1_0`` evaluated on the
    polynomial field.  With ``points=None`` the components must vanish
    identically; otherwise they must vanish at every given point.
    """
    from .oracle import act

    if r < 1:
        raise ValueError("r must be >= 1")
    g = model.algebra
    lower = jet_fiber(g, rank, r - 1)
    full = jet_fiber(g, rank, r)
    if len(jet_field) != full.total:
        raise ValueError(f"jet field has {len(jet_field)} entries, expected {full.total}")
    truncated = list(jet_field[: lower.total])
    first = list(truncated)
    for u in component(g, 1).monomials:
        first.extend(act(model, u, c) for c in truncated)
    second = identity_prolongation_matrix(g, rank, r - 1, 1) @ list(jet_field)
    diffs = [a - b for a, b in zip(first, second)]
    if points is None:
        return all(_is_zero(d) for d in diffs)
    return all(_value(d, pt) == 0 for d in diffs for pt in points)


def _is_zero(p) -> bool:
    return p == 0 if not hasattr(p, "is_zero") else p.is_zero()


def _value(p, pt):
    return p.evaluate(pt) if hasattr(p, "evaluate") else p

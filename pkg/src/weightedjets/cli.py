"""Command-line front end: ``weightedjets COMMAND FILE [flags]``.

Exit codes: 0 success, 1 input error, 2 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Sequence

from . import pbw
from .checks import ConsistencyError, Ledger, check
from .exactlin import Matrix, rank_and_rref
from .jetmodel import (
    RewriteError,
    equation_tower,
    prolongation_matrix,
    rewrite_first_order,
    spencer_kernel_check,
)
from .oracle import (
    OracleError,
    apply_operator,
    bch_product,
    check_group_law,
    field_bracket_sign,
    invariant_fields,
    jet_field,
    polynomial_solutions,
    random_polynomial,
    weighted_taylor,
)
from .problem import OPTION_DEFAULTS, Problem, ProblemError, load_problem
from .weightedsym import finite_type, principal_symbol, symbol_space

COMMANDS = (
    "validate",
    "symbol",
    "prolong",
    "finite-type",
    "rewrite",
    "obstructions",
    "oracle",
    "report",
)

# which pipeline stages each command runs
_STAGES = {
    "validate": (),
    "symbol": ("symbol",),
    "prolong": ("symbol", "prolong"),
    "finite-type": ("symbol", "finite"),
    "rewrite": ("symbol", "finite", "rewrite"),
    "obstructions": ("symbol", "finite", "rewrite", "obstructions"),
    "oracle": ("symbol", "finite", "rewrite", "obstructions", "oracle"),
    "report": ("symbol", "finite", "rewrite", "obstructions", "oracle", "consistency"),
}


class Run:
    """Mutable state of one pipeline run; ``report`` is the JSON payload."""

    def __init__(self, problem: Problem, command: str, opts: dict):
        self.problem = problem
        self.op = problem.operator
        self.command = command
        self.opts = opts
        self.ledger = Ledger()
        self.symbols: dict = {}
        self.tower = None
        self.finite = None
        self.rewrite = None
        self.solutions = None
        self.report: dict = {
            "command": command,
            "problem": problem.raw,
            "options": dict(opts),
            "algebra": problem.algebra.describe(),
            "validation": problem.validation.as_dict() if problem.validation else {},
        }

    def ensure_tower(self, L: int) -> None:
        if self.tower is None or self.tower.levels < L:
            self.tower = equation_tower(self.op, L, self.ledger, self.symbols)


def _symbol(run: Run) -> None:
    op = run.op
    sym = principal_symbol(op)
    run.report.update(
        order=op.order,
        homogeneous=op.is_homogeneous(),
        symbol={
            "matrix": sym.matrix.to_strings(),
            "kernel_dim": sym.kernel_dim,
            "domain_dim": sym.matrix.ncols,
        },
    )


def _prolong(run: Run) -> None:
    L = run.opts["max_ell"]
    dims = []
    for ell in range(1, L + 1):
        run.symbols[ell] = symbol_space(run.op, ell, run.ledger)
        dims.append(run.symbols[ell].dim)
    run.ensure_tower(L)
    run.report.update(g_dims=dims, q_dims=run.tower.q_dims())


def _finite(run: Run) -> None:
    cap = run.opts["max_ell"]
    tower = finite_type(run.op, cap, run.ledger)
    run.symbols.update(tower.spaces)
    run.finite = tower
    # monotone vanishing: once zero, the next level must vanish too
    if tower.finite:
        ell = tower.ell0 + 2
        if ell <= cap:
            nxt = symbol_space(run.op, ell, run.ledger)
            run.symbols[ell] = nxt
            check(run.ledger, "finite_type.vanishing_persists", nxt.dim == 0, f"dim g at l={ell} is {nxt.dim}")
    run.report.update(
        g_dims=tower.dims,
        finite_type={"verdict": tower.verdict, "ell0": tower.ell0, "cap": cap},
    )


def _rewrite(run: Run, depth: int) -> None:
    tower = run.finite
    if not tower.finite:
        run.report["rewrite"] = {
            "skipped": f"finite type not reached within max_ell={tower.cap}"
        }
        for key in ("w_dim", "sigma_injective", "solution_bound"):
            run.report[key] = None
        if depth:
            run.report.update(obstruction_dims=None, effective_bound=None)
        return
    run.ensure_tower(tower.ell0 + depth)
    rep = rewrite_first_order(
        run.op, run.tower, tower.ell0, depth, ledger=run.ledger, symbols=run.symbols
    )
    run.rewrite = rep
    data = rep.as_dict()
    run.report["rewrite"] = data
    run.report.update(
        w_dim=rep.w_dim,
        sigma_injective=rep.sigma_injective,
        solution_bound=rep.solution_bound,
        q_dims=run.tower.q_dims(),
    )
    if depth:
        run.report.update(obstruction_dims=rep.obstruction_dims, effective_bound=rep.effective_bound)


def _oracle(run: Run) -> None:
    op = run.op
    degree = run.opts["degree"]
    model = bch_product(run.problem.algebra)
    check_group_law(model, run.ledger)
    invariant_fields(model, run.ledger)
    dims = []
    for N in range(degree + 1):
        sols = polynomial_solutions(op, N)
        dims.append(sols.dimension)
    run.solutions = sols
    names = model.coordinate_names
    run.report.update(
        field_bracket_sign=field_bracket_sign(),
        oracle={
            "degree": degree,
            "dims": dims,
            "dimension": sols.dimension,
            "coordinates": list(names),
            "basis": [p.format(names) for p in sols.basis],
        },
    )


def _consistency(run: Run) -> None:
    g, op, r = run.problem.algebra, run.op, run.op.order
    model = bch_product(g)
    degree = run.opts["degree"]
    sols = run.solutions
    dims = run.report["oracle"]["dims"]

    # equation spaces for every degree the oracle saw
    if degree >= r:
        run.ensure_tower(min(degree - r, run.opts["max_ell"]))
    q = run.tower.q_dims() if run.tower else []
    run.report["q_dims"] = q
    exact = op.is_homogeneous()
    for ell, qd in enumerate(q):
        N = r + ell
        if N > degree:
            break
        ok = dims[N] == qd if exact else dims[N] <= qd
        rel = "==" if exact else "<="
        check(run.ledger, f"oracle.dims_vs_q[N={N}]", ok, f"oracle {dims[N]} {rel} Q {qd} fails")

    for ell in range(len(q)):
        Q = run.tower.space(ell)
        ok = all(Q.contains(weighted_taylor(model, p, r + ell)) for p in sols.basis)
        check(run.ledger, f"oracle.taylor_in_q[l={ell}]", ok, "solution jet outside Q")

    rng = random.Random(0)
    for ell in range(3):
        p = random_polynomial(g, op.rank_e, r + ell + 1, rng)
        lhs = prolongation_matrix(op, ell) @ list(weighted_taylor(model, p, r + ell))
        rhs = weighted_taylor(model, apply_operator(op, p), ell)
        check(run.ledger, f"jetmodel.commuting_diagram[l={ell}]", tuple(lhs) == tuple(rhs), "p_l(phi) j p != j(D p)")

    ok = all(spencer_kernel_check(model, jet_field(model, p, r), r, op.rank_e) for p in sols.basis[:4])
    check(run.ledger, "jetmodel.spencer_on_solutions", ok, "genuine jet field not in ker S")

    if run.rewrite is not None:
        rep = run.rewrite
        check(
            run.ledger,
            "oracle.dimension_within_bound",
            sols.dimension <= rep.effective_bound,
            f"{sols.dimension} solutions exceed bound {rep.effective_bound}",
        )
        R = r + rep.ell0
        if sols.basis:
            cols = [weighted_taylor(model, p, R) for p in sols.basis]
            rank, _ = rank_and_rref(Matrix.from_columns(cols, len(cols[0])))
            ok = rank == len(cols)
        else:
            ok = True
        check(run.ledger, "oracle.jet_determination", ok, "two solutions share a finite jet")


def execute(problem: Problem, command: str, opts: dict) -> tuple[dict, int]:
    """Run ``command`` on a parsed problem; returns (report, exit code)."""
    if command not in COMMANDS:
        raise ProblemError(f"unknown command {command!r}")
    run = Run(problem, command, opts)
    stages = _STAGES[command]
    code = 0
    try:
        for stage in stages:
            if stage == "symbol":
                _symbol(run)
            elif stage == "prolong":
                _prolong(run)
            elif stage == "finite":
                _finite(run)
            elif stage == "rewrite":
                _rewrite(run, 0 if "obstructions" not in stages else opts["depth"])
            elif stage == "oracle":
                _oracle(run)
            elif stage == "consistency":
                _consistency(run)
    except ConsistencyError as exc:
        run.report["error"] = str(exc)
        code = 2
    except (OracleError, RewriteError) as exc:
        raise ProblemError(str(exc)) from None
    run.report["checks"] = run.ledger.as_dict()
    if run.ledger.details:
        run.report["check_details"] = dict(run.ledger.details)
    return run.report, code


def to_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def to_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    alg = report["algebra"]
    lines.append(f"algebra: dim {alg['dim']}, weights {alg['weights']}, basis {' '.join(alg['names'])}")
    val = report.get("validation", {})
    if val:
        lines.append("validation: " + ", ".join(f"{k} {'ok' if v['pass'] else 'FAILED'}" for k, v in val.items()))
    for key in (
        "order",
        "g_dims",
        "q_dims",
        "w_dim",
        "sigma_injective",
        "solution_bound",
        "obstruction_dims",
        "effective_bound",
        "field_bracket_sign",
    ):
        if key in report:
            lines.append(f"{key}: {report[key]}")
    if "symbol" in report:
        lines.append(f"symbol kernel dim: {report['symbol']['kernel_dim']}")
    if "finite_type" in report:
        ft = report["finite_type"]
        lines.append(f"finite type: {ft['verdict']} (ell0={ft['ell0']}, cap={ft['cap']})")
    if "oracle" in report:
        o = report["oracle"]
        lines.append(f"oracle: dim {o['dimension']} at degree <= {o['degree']}, dims by degree {o['dims']}")
        for p in o["basis"]:
            lines.append(f"  {p}")
    checks = report.get("checks", {})
    failed = [k for k, v in checks.items() if v != "pass"]
    lines.append(f"checks: {len(checks) - len(failed)}/{len(checks)} pass")
    for k in failed:
        lines.append(f"  FAIL {k}")
    if "error" in report:
        lines.append(f"error: {report['error']}")
    return "\n".join(lines) + "\n"


def _options(problem: Problem, args: argparse.Namespace) -> dict:
    opts = dict(OPTION_DEFAULTS)
    opts.update(problem.options)
    for key in OPTION_DEFAULTS:
        flag = getattr(args, key)
        if flag is not None:
            opts[key] = flag
    if opts["max_ell"] < 1:
        raise ProblemError("--max-ell must be at least 1")
    return opts


def _run_file(path: str, args: argparse.Namespace) -> tuple[dict | None, int]:
    try:
        problem = load_problem(path)
        return execute(problem, args.command, _options(problem, args))
    except ProblemError as exc:
        return None, _fail(str(exc))


def _render(report: dict, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_text(report)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (1); argparse's own 2 means a failed check here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="weightedjets",
        description="Weighted symbol prolongation and finite-type analysis of constant-coefficient operators.",
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("file", help="problem file (JSON) or a directory of them")
    p.add_argument("--max-ell", type=int, default=None, dest="max_ell", help="prolongation cap (default 10)")
    p.add_argument("--depth", type=int, default=None, help="obstruction depth (default 4)")
    p.add_argument("--degree", type=int, default=None, help="oracle weighted degree (default 6)")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--out", default=None, help="write output here (a directory in batch mode)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    for key in ("max_ell", "depth", "degree"):
        value = getattr(args, key)
        if value is not None and value < 0:
            return _fail(f"--{key.replace('_', '-')} must be non-negative")
    pbw.load_cache()
    try:
        if os.path.isdir(args.file):
            return _batch(args)
        report, code = _run_file(args.file, args)
        if report is not None:
            text = _render(report, args.format)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
        return code
    finally:
        pbw.save_cache()


def _batch(args: argparse.Namespace) -> int:
    files = sorted(f for f in os.listdir(args.file) if f.endswith(".json"))
    if not files:
        return _fail(f"no .json problem files in {args.file}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    ext = "json" if args.format == "json" else "txt"
    worst = 0
    collected: dict[str, dict] = {}
    for name in files:
        report, code = _run_file(os.path.join(args.file, name), args)
        worst = max(worst, code)
        if report is None:
            collected[name] = {"error": "input error", "exit_code": code}
            continue
        report = dict(report, exit_code=code)
        if args.out:
            stem = os.path.splitext(name)[0]
            with open(os.path.join(args.out, f"{stem}.{ext}"), "w", encoding="utf-8") as fh:
                fh.write(_render(report, args.format))
        elif args.format == "text":
            sys.stdout.write(f"== {name} (exit {code})\n" + to_text(report))
        collected[name] = report
    if args.format == "json" and not args.out:
        sys.stdout.write(to_json(collected))
    return worst


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Problem files: JSON describing an algebra, a bundle and an operator.

Example::

    {
      "algebra": {"builtin": "heisenberg", "n": 1},
      "scalars": "rational",
      "rank_e": 1, "rank_f": 2,
      "operator": [
        {"word": ["X"], "coeff": [["1"], ["0"]]},
        {"word": ["Y"], "coeff": [["0"], ["1"]]}
      ],
      "options": {"max_ell": 10, "depth": 4, "degree": 6}
    }

A ``bundle`` block ``{"rank_e": .., "rank_f": ..}`` may replace the two
top-level ranks.  Coefficients are scalar literals for rank 1 x 1, nested
``rank_f x rank_e`` lists otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .exactlin import Matrix, ScalarParseError, parse_scalar
from .gla import AlgebraError, GradedLieAlgebra, ValidationReport, from_description, validate
from .weightedsym import BundleSpec, OperatorError, OperatorSpec, Term

__all__ = ["ProblemError", "Problem", "parse_problem", "load_problem", "OPTION_DEFAULTS"]

OPTION_DEFAULTS = {"max_ell": 10, "depth": 4, "degree": 6}
_TOP_KEYS = {"algebra", "scalars", "rank_e", "rank_f", "bundle", "operator", "terms", "options", "name"}


class ProblemError(ValueError):
    """Input error, anchored at a line/column or a JSON path."""

    def __init__(self, message: str, where: str = "$"):
        super().__init__(f"{where}: {message}")
        self.where = where


@dataclass
class Problem:
    raw: dict
    algebra: GradedLieAlgebra
    operator: OperatorSpec
    scalars: str
    options: dict = field(default_factory=dict)
    validation: ValidationReport | None = None
    source: str = "<string>"


def _int(value: Any, where: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ProblemError(f"expected an integer >= {minimum}, got {value!r}", where)
    return value


def _scalar(value: Any, mode: str, where: str):
    try:
        return parse_scalar(value, mode)
    except ScalarParseError as exc:
        raise ProblemError(str(exc), where) from None


def _coeff(value: Any, rank_e: int, rank_f: int, mode: str, where: str) -> Matrix:
    if not isinstance(value, list):
        if rank_e != 1 or rank_f != 1:
            raise ProblemError(f"scalar coefficient needs rank 1 x 1, bundle is {rank_f} x {rank_e}", where)
        return Matrix([[_scalar(value, mode, where)]], 1)
    if len(value) != rank_f:
        raise ProblemError(f"expected {rank_f} rows, got {len(value)}", where)
    rows = []
    for b, row in enumerate(value):
        if not isinstance(row, list) or len(row) != rank_e:
            raise ProblemError(f"expected a row of {rank_e} entries", f"{where}[{b}]")
        rows.append([_scalar(x, mode, f"{where}[{b}][{a}]") for a, x in enumerate(row)])
    return Matrix(rows, rank_e)


def parse_problem(data: Any, source: str = "<string>") -> Problem:
    """Turn decoded JSON into a validated algebra and operator."""
    if not isinstance(data, dict):
        raise ProblemError("problem file must hold a JSON object")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        raise ProblemError(f"unknown field {unknown[0]!r}", f"$.{unknown[0]}")

    if "algebra" not in data:
        raise ProblemError("missing 'algebra' block")
    if not isinstance(data["algebra"], dict):
        raise ProblemError("algebra block must be an object", "$.algebra")
    try:
        g = from_description(data["algebra"])
    except (AlgebraError, KeyError, TypeError, ValueError) as exc:
        raise ProblemError(str(exc), "$.algebra") from None
    report = validate(g)
    if not report.ok:
        bad = next(k for k, ok in report.checks.items() if not ok)
        raise ProblemError(
            f"algebra fails {bad} check, witness {list(report.violations[bad])}", "$.algebra"
        )

    mode = data.get("scalars", "rational")
    if mode not in ("rational", "gaussian"):
        raise ProblemError(f"scalars must be 'rational' or 'gaussian', got {mode!r}", "$.scalars")

    if "bundle" in data:
        bundle = data["bundle"]
        if not isinstance(bundle, dict):
            raise ProblemError("bundle block must be an object", "$.bundle")
        rank_e = _int(bundle.get("rank_e", 1), "$.bundle.rank_e", 1)
        rank_f = _int(bundle.get("rank_f", 1), "$.bundle.rank_f", 1)
    else:
        rank_e = _int(data.get("rank_e", 1), "$.rank_e", 1)
        rank_f = _int(data.get("rank_f", 1), "$.rank_f", 1)

    key = "operator" if "operator" in data else "terms"
    entries = data.get(key)
    if not isinstance(entries, list) or not entries:
        raise ProblemError("operator must be a non-empty list of terms", f"$.{key}")
    terms = []
    for k, entry in enumerate(entries):
        where = f"$.{key}[{k}]"
        if not isinstance(entry, dict) or "word" not in entry or "coeff" not in entry:
            raise ProblemError("term must be an object with 'word' and 'coeff'", where)
        word = entry["word"]
        if not isinstance(word, list) or not word:
            raise ProblemError("word must be a non-empty list of basis names or indices", f"{where}.word")
        try:
            idx = tuple(g.index(x) for x in word)
        except (KeyError, IndexError, ValueError, AlgebraError) as exc:
            raise ProblemError(f"bad letter in word: {exc}", f"{where}.word") from None
        terms.append(Term(idx, _coeff(entry["coeff"], rank_e, rank_f, mode, f"{where}.coeff")))
    try:
        op = OperatorSpec(g, BundleSpec(rank_e, rank_f), terms)
    except OperatorError as exc:
        raise ProblemError(str(exc), f"$.{key}") from None

    options = dict(OPTION_DEFAULTS)
    raw_opts = data.get("options", {})
    if not isinstance(raw_opts, dict):
        raise ProblemError("options must be an object", "$.options")
    for name, value in raw_opts.items():
        if name not in OPTION_DEFAULTS:
            raise ProblemError(f"unknown option {name!r}", f"$.options.{name}")
        options[name] = _int(value, f"$.options.{name}", 1 if name == "max_ell" else 0)
    return Problem(data, g, op, mode, options, report, source)


def load_problem(path: str) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemError(f"cannot read file: {exc.strerror}", path) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    try:
        return parse_problem(data, path)
    except ProblemError as exc:
        raise ProblemError(str(exc).split(": ", 1)[1], f"{path} {exc.where}") from None

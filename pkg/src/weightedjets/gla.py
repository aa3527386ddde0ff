"""Graded nilpotent Lie algebras given by structure constants.

Weights are stored positive: a basis vector of weight ``w`` sits in degree
``-w`` of the graded algebra.  Brackets are supplied for ``i < j`` only and
the other half is derived.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .exactlin import Subspace

__all__ = [
    "GradedLieAlgebra",
    "ValidationReport",
    "builtin",
    "validate",
    "bracket",
    "from_description",
    "AlgebraError",
]


class AlgebraError(ValueError):
    pass


class GradedLieAlgebra:
    """Finite-dimensional positively weighted Lie algebra.

    ``brackets`` maps ``(i, j)`` with ``i < j`` to ``{m: c}`` meaning
    ``[e_i, e_j] = sum c * e_m``.  Instances are immutable and hashable so
    they can key the enveloping-algebra caches.
    """

    __slots__ = ("names", "weights", "_table", "_key", "_hash", "label")

    def __init__(
        self,
        weights: Sequence[int],
        brackets: Mapping[tuple[int, int], Mapping[int, object]] | None = None,
        names: Sequence[str] | None = None,
        label: str | None = None,
    ):
        weights = tuple(int(w) for w in weights)
        n = len(weights)
        if n == 0:
            raise AlgebraError("algebra must have positive dimension")
        if any(w <= 0 for w in weights):
            raise AlgebraError(f"weights must be positive, got {weights}")
        if names is None:
            names = tuple(f"e{i + 1}" for i in range(n))
        names = tuple(names)
        if len(names) != n or len(set(names)) != n:
            raise AlgebraError("basis names must be distinct, one per basis vector")

        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), terms in (brackets or {}).items():
            if not (0 <= i < n and 0 <= j < n):
                raise AlgebraError(f"bracket index out of range: ({i}, {j})")
            if i >= j:
                raise AlgebraError(f"brackets are given for i < j only, got ({i}, {j})")
            clean = {}
            for m, c in terms.items():
                if not 0 <= m < n:
                    raise AlgebraError(f"bracket term index out of range: {m}")
                c = Fraction(c)
                if c:
                    clean[int(m)] = clean.get(int(m), 0) + c
            clean = {m: c for m, c in sorted(clean.items()) if c}
            if clean:
                table[(i, j)] = clean
        self.weights = weights
        self.names = names
        self.label = label
        self._table = table
        self._key = (
            weights,
            names,
            tuple(sorted((k, tuple(v.items())) for k, v in table.items())),
        )
        self._hash = hash(self._key)

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def depth(self) -> int:
        return max(self.weights)

    def __eq__(self, other):
        if not isinstance(other, GradedLieAlgebra):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        tag = self.label or f"dim={self.dim}"
        return f"GradedLieAlgebra({tag})"

    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        """``[e_i, e_j]`` as a sparse dict."""
        if i < j:
            return dict(self._table.get((i, j), {}))
        if i > j:
            return {m: -c for m, c in self._table.get((j, i), {}).items()}
        return {}

    def structure_constants(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        return {k: dict(v) for k, v in self._table.items()}

    def slice(self, w: int) -> list[int]:
        return [i for i, wi in enumerate(self.weights) if wi == w]

    def index(self, name_or_index) -> int:
        if isinstance(name_or_index, int) and not isinstance(name_or_index, bool):
            if not 0 <= name_or_index < self.dim:
                raise AlgebraError(f"basis index out of range: {name_or_index}")
            return name_or_index
        try:
            return self.names.index(name_or_index)
        except ValueError:
            raise AlgebraError(f"unknown basis element {name_or_index!r}") from None

    def word_weight(self, word: Sequence[int]) -> int:
        return sum(self.weights[i] for i in word)

    def describe(self) -> dict:
        return {
            "dim": self.dim,
            "names": list(self.names),
            "weights": list(self.weights),
            "degrees": [-w for w in self.weights],
            "brackets": [
                {"i": i, "j": j, "terms": [{"m": m, "c": _fmt(c)} for m, c in terms.items()]}
                for (i, j), terms in sorted(self._table.items())
            ],
        }


def _fmt(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def bracket(g: GradedLieAlgebra, a: Sequence, b: Sequence) -> tuple:
    """Bilinear bracket of coefficient vectors."""
    if len(a) != g.dim or len(b) != g.dim:
        raise AlgebraError(f"element length mismatch: {len(a)}, {len(b)} vs dim {g.dim}")
    out = [0] * g.dim
    for (i, j), terms in g._table.items():
        c = a[i] * b[j] - a[j] * b[i]
        if c:
            for m, s in terms.items():
                out[m] = out[m] + c * s
    return tuple(out)


@dataclass
class ValidationReport:
    checks: dict[str, bool] = field(default_factory=dict)
    violations: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, witness: tuple | None) -> None:
        self.checks[name] = witness is None
        if witness is not None:
            self.violations[name] = witness

    def as_dict(self) -> dict:
        return {
            name: {"pass": ok, **({"witness": list(self.violations[name])} if not ok else {})}
            for name, ok in self.checks.items()
        }


def _unit(n: int, i: int) -> tuple:
    return tuple(1 if k == i else 0 for k in range(n))


def validate(g: GradedLieAlgebra) -> ValidationReport:
    """Check antisymmetry, Jacobi, grading and generation; failures are data."""
    n = g.dim
    report = ValidationReport()

    # storage enforces i < j, so antisymmetry can only fail through a
    # hand-built table; still check the derived half explicitly
    witness = None
    for i in range(n):
        if g.bracket_basis(i, i):
            witness = (i, i)
            break
        for j in range(i + 1, n):
            bij, bji = g.bracket_basis(i, j), g.bracket_basis(j, i)
            if any(bij.get(m, 0) + bji.get(m, 0) for m in set(bij) | set(bji)):
                witness = (i, j)
                break
        if witness:
            break
    report.record("antisymmetry", witness)

    witness = None
    for (i, j), terms in sorted(g._table.items()):
        for m in terms:
            if g.weights[m] != g.weights[i] + g.weights[j]:
                witness = (g.names[i], g.names[j])
                break
        if witness:
            break
    report.record("grading", witness)

    witness = None
    units = [_unit(n, i) for i in range(n)]
    for i, j, k in combinations(range(n), 3):
        a, b, c = units[i], units[j], units[k]
        jac = [
            x + y + z
            for x, y, z in zip(
                bracket(g, a, bracket(g, b, c)),
                bracket(g, b, bracket(g, c, a)),
                bracket(g, c, bracket(g, a, b)),
            )
        ]
        if any(jac):
            witness = (g.names[i], g.names[j], g.names[k])
            break
    report.record("jacobi", witness)

    report.record("generation", _generation_witness(g))
    return report


def _generation_witness(g: GradedLieAlgebra) -> tuple | None:
    """First weight whose slice is not reached by brackets of weight-1 elements."""
    n = g.dim
    reached: dict[int, Subspace] = {1: Subspace(n, [_unit(n, i) for i in g.slice(1)])}
    gen1 = reached[1].basis
    for w in range(1, g.depth + 1):
        if w > 1:
            vecs = [bracket(g, x, y) for x in gen1 for y in reached[w - 1].basis]
            reached[w] = Subspace(n, vecs)
        target = Subspace(n, [_unit(n, i) for i in g.slice(w)])
        if reached[w] != target:
            return (w, reached[w].dim, target.dim)
    return None


def builtin(name: str, n: int | None = None) -> GradedLieAlgebra:
    """``abelian(n)``, ``heisenberg(n)`` or ``engel``."""
    if name == "abelian":
        n = 1 if n is None else n
        _positive(n)
        names = ["Y"] if n == 1 else [f"Y{i + 1}" for i in range(n)]
        return GradedLieAlgebra([1] * n, {}, names, label=f"abelian({n})")
    if name == "heisenberg":
        n = 1 if n is None else n
        _positive(n)
        if n == 1:
            names = ["X", "Y", "Z"]
        else:
            names = [f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n)] + ["Z"]
        brackets = {(i, n + i): {2 * n: 1} for i in range(n)}
        return GradedLieAlgebra([1] * (2 * n) + [2], brackets, names, label=f"heisenberg({n})")
    if name == "engel":
        return GradedLieAlgebra(
            [1, 1, 2, 3],
            {(0, 1): {2: 1}, (0, 2): {3: 1}},
            ["e1", "e2", "e3", "e4"],
            label="engel",
        )
    raise AlgebraError(f"unknown builtin algebra {name!r}")


def _positive(n) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
        raise AlgebraError(f"builtin parameter must be a positive integer, got {n!r}")


def from_description(desc: Mapping) -> GradedLieAlgebra:
    """Build an algebra from a problem-file block.

    Either ``{"builtin": name, "n": k}`` or
    ``{"dim", "weights", "brackets": [{"i", "j", "terms": [{"m", "c"}]}]}``
    with 0-based indices; ``names`` is optional.
    """
    if "builtin" in desc:
        return builtin(desc["builtin"], desc.get("n"))
    try:
        dim = int(desc["dim"])
        weights = list(desc["weights"])
    except KeyError as exc:
        raise AlgebraError(f"algebra block is missing {exc.args[0]!r}") from None
    if len(weights) != dim:
        raise AlgebraError(f"dim {dim} but {len(weights)} weights")
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for entry in desc.get("brackets", []):
        i, j = int(entry["i"]), int(entry["j"])
        terms = {}
        for t in entry.get("terms", []):
            terms[int(t["m"])] = terms.get(int(t["m"]), 0) + _parse_const(t["c"])
        if i > j:
            i, j = j, i
            terms = {m: -c for m, c in terms.items()}
        if (i, j) in brackets:
            raise AlgebraError(f"bracket ({i}, {j}) given twice")
        brackets[(i, j)] = terms
    return GradedLieAlgebra(weights, brackets, desc.get("names"))


def _parse_const(c) -> Fraction:
    from .exactlin import ScalarParseError, parse_scalar

    try:
        return parse_scalar(c, "rational")
    except ScalarParseError as exc:
        raise AlgebraError(f"structure constant: {exc}") from None

"""Weight-graded pieces of the universal enveloping algebra.

A PBW monomial is stored internally as a non-decreasing tuple of basis
indices, so ``X^2 Y`` in heisenberg(1) is ``(0, 0, 1)``.  Within a weight
component monomials are ordered by descending lexicographic order of
their exponent vectors (``X^2, XY, Y^2, Z``).
"""

from __future__ import annotations

import os
import pickle
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from hashlib import sha256
from typing import Sequence

from .exactlin import Matrix, Subspace
from .gla import GradedLieAlgebra

__all__ = [
    "UeaComponent",
    "UeaElement",
    "component",
    "normal_form",
    "normal_form_dict",
    "multiply",
    "multiplication_matrix",
    "monomial_name",
    "load_cache",
    "save_cache",
]

Mono = tuple  # sorted tuple of basis indices


@dataclass(frozen=True)
class UeaComponent:
    weight: int
    monomials: tuple[Mono, ...]
    exponents: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.monomials)

    def index(self, mono: Mono) -> int:
        return _index_map(self)[mono]


@lru_cache(maxsize=None)
def _index_map(c: UeaComponent) -> dict:
    return {m: k for k, m in enumerate(c.monomials)}


@dataclass(frozen=True)
class UeaElement:
    weight: int
    coeffs: tuple

    def __len__(self):
        return len(self.coeffs)


def exponents_of_weight(weights: Sequence[int], w: int) -> list[tuple[int, ...]]:
    n = len(weights)
    out: list[tuple[int, ...]] = []

    def rec(i: int, left: int, acc: list[int]) -> None:
        if i == n:
            if left == 0:
                out.append(tuple(acc))
            return
        for a in range(left // weights[i], -1, -1):
            acc.append(a)
            rec(i + 1, left - a * weights[i], acc)
            acc.pop()

    rec(0, w, [])
    return out


@lru_cache(maxsize=None)
def component(g: GradedLieAlgebra, w: int) -> UeaComponent:
    """Basis of the weight-``w`` piece, descending lex on exponent vectors."""
    if w < 0:
        raise ValueError(f"weight must be non-negative, got {w}")
    exps = exponents_of_weight(g.weights, w)  # already descending lex
    monos = tuple(tuple(i for i, a in enumerate(e) for _ in range(a)) for e in exps)
    return UeaComponent(w, monos, tuple(exps))


@lru_cache(maxsize=None)
def _times_gen(g: GradedLieAlgebra, mono: Mono, j: int) -> tuple:
    """Normal form of ``mono * e_j`` as a tuple of (monomial, coeff) pairs."""
    if not mono or mono[-1] <= j:
        return ((mono + (j,), Fraction(1)),)
    head, last = mono[:-1], mono[-1]
    # head e_last e_j = head e_j e_last + head [e_last, e_j]
    acc: dict[Mono, Fraction] = {}
    for m, c in _times_gen(g, head, j):
        for m2, c2 in _times_gen(g, m, last):
            acc[m2] = acc.get(m2, 0) + c * c2
    for k, ck in g.bracket_basis(last, j).items():
        for m2, c2 in _times_gen(g, head, k):
            acc[m2] = acc.get(m2, 0) + ck * c2
    return tuple((m, c) for m, c in sorted(acc.items()) if c)


def _times_word(g: GradedLieAlgebra, elem: dict, word: Sequence[int]) -> dict:
    for j in word:
        nxt: dict[Mono, object] = {}
        for m, c in elem.items():
            for m2, c2 in _times_gen(g, m, j):
                nxt[m2] = nxt.get(m2, 0) + c * c2
        elem = {m: c for m, c in nxt.items() if c}
    return elem


def normal_form_dict(g: GradedLieAlgebra, word: Sequence[int], coeff=1) -> dict:
    """PBW expansion ``{monomial: coeff}`` of ``coeff * e_{w0} e_{w1} ...``."""
    for i in word:
        if not 0 <= i < g.dim:
            raise IndexError(f"basis index {i} out of range for dim {g.dim}")
    if not coeff:
        return {}
    out = _times_word(g, {(): Fraction(1)}, word)
    return {m: c * coeff for m, c in out.items()}


def normal_form(g: GradedLieAlgebra, word: Sequence[int], coeff=1) -> UeaElement:
    w = g.word_weight(word)
    comp = component(g, w)
    vec = [0] * comp.dim
    for m, c in normal_form_dict(g, word, coeff).items():
        vec[comp.index(m)] = c
    return UeaElement(w, tuple(vec))


def multiply(g: GradedLieAlgebra, left: Mono, right: Mono) -> dict:
    """Product of two PBW monomials, in normal form."""
    return _times_word(g, {tuple(left): Fraction(1)}, right)


_cache_lock = threading.Lock()
_mult_cache: dict[tuple, Matrix] = {}
CACHE_VERSION = 1


def _fingerprint(g: GradedLieAlgebra) -> str:
    return sha256(repr(g._key).encode()).hexdigest()[:16]


def multiplication_matrix(g: GradedLieAlgebra, a: int, b: int) -> Matrix:
    """Matrix of ``U_{-a} (x) U_{-b} -> U_{-a-b}``.

    Column ``i * dim_b + j`` holds the normal form of ``m_i * m_j``.
    """
    if a < 0 or b < 0:
        raise ValueError("weights must be non-negative")
    key = (_fingerprint(g), a, b)
    with _cache_lock:
        hit = _mult_cache.get(key)
    if hit is not None:
        return hit
    ca, cb, cab = component(g, a), component(g, b), component(g, a + b)
    cols = []
    for ma in ca.monomials:
        for mb in cb.monomials:
            col = [Fraction(0)] * cab.dim
            for m, c in multiply(g, ma, mb).items():
                col[cab.index(m)] = c
            cols.append(col)
    mat = Matrix.from_columns(cols, cab.dim)
    with _cache_lock:
        _mult_cache.setdefault(key, mat)
        return _mult_cache[key]


def is_surjective(m: Matrix) -> bool:
    if m.nrows == 0:
        return True
    return Subspace(m.nrows, m.transpose().rows).dim == m.nrows


def monomial_name(g: GradedLieAlgebra, mono: Mono) -> str:
    if not mono:
        return "1"
    parts = []
    for i in sorted(set(mono)):
        k = mono.count(i)
        parts.append(g.names[i] if k == 1 else f"{g.names[i]}^{k}")
    return " ".join(parts)


def _cache_path(directory: str) -> str:
    return os.path.join(directory, f"weightedjets-mult-v{CACHE_VERSION}.pkl")


def load_cache(directory: str | None = None) -> int:
    """Load persisted multiplication matrices from ``WP_CACHE_DIR``."""
    directory = directory or os.environ.get("WP_CACHE_DIR")
    if not directory:
        return 0
    path = _cache_path(directory)
    try:
        with open(path, "rb") as fh:
            version, entries = pickle.load(fh)
    except (OSError, EOFError, pickle.UnpicklingError, ValueError):
        return 0
    if version != CACHE_VERSION:
        return 0
    with _cache_lock:
        for key, (shape, rows) in entries.items():
            _mult_cache.setdefault(key, Matrix(rows, shape[1]))
    return len(entries)


def save_cache(directory: str | None = None) -> int:
    directory = directory or os.environ.get("WP_CACHE_DIR")
    if not directory:
        return 0
    os.makedirs(directory, exist_ok=True)
    with _cache_lock:
        entries = {k: (m.shape, m.rows) for k, m in _mult_cache.items()}
    tmp = _cache_path(directory) + ".tmp"
    with open(tmp, "wb") as fh:
        pickle.dump((CACHE_VERSION, entries), fh)
    os.replace(tmp, _cache_path(directory))
    return len(entries)

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weightedjets.exactlin import (
    GaussianRational,
    Matrix,
    ScalarParseError,
    Subspace,
    format_scalar,
    image_and_quotient,
    intersect,
    kernel_basis,
    parse_scalar,
    rank_and_rref,
    solve,
)

small = st.integers(-3, 3)


def matrices(max_rows=5, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r).map(
                lambda rows: Matrix(rows, c)
            )
        )
    )


def subspaces(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), max_size=4).map(lambda vs: Subspace(n, vs))


# scalars


def test_parse_rational_forms():
    assert parse_scalar("3") == 3
    assert parse_scalar("-4/6") == Fraction(-2, 3)
    assert parse_scalar(7) == 7


def test_parse_gaussian_forms():
    assert parse_scalar("1/2+3/4i", "gaussian") == GaussianRational(Fraction(1, 2), Fraction(3, 4))
    assert parse_scalar("i", "gaussian") == GaussianRational(0, 1)
    assert parse_scalar("-2i", "gaussian") == GaussianRational(0, -2)
    assert parse_scalar("5", "gaussian") == GaussianRational(5, 0)


@pytest.mark.parametrize("bad", ["1/0", "x", "1.5", "", "2+"])
def test_parse_rejects_malformed(bad):
    with pytest.raises(ScalarParseError):
        parse_scalar(bad, "gaussian")


def test_imaginary_literal_rejected_in_rational_mode():
    with pytest.raises(ScalarParseError):
        parse_scalar("1+2i", "rational")


def test_format_roundtrip():
    for text in ["0", "-3", "5/7", "1/2+3/4i", "0-1i"]:
        mode = "gaussian" if "i" in text else "rational"
        assert parse_scalar(format_scalar(parse_scalar(text, mode)), mode) == parse_scalar(text, mode)


@given(small, small, small, st.integers(1, 3))
def test_gaussian_field_axioms(a, b, c, d):
    x = GaussianRational(a, b)
    y = GaussianRational(c, d)  # d != 0, so y is invertible
    assert (x * y) / y == x
    assert x * y == y * x
    assert x - x == 0
    assert (x * y).conjugate() == x.conjugate() * y.conjugate()


# worked examples


def test_rref_examples():
    assert rank_and_rref(Matrix.identity(2)) == (2, Matrix.identity(2))
    assert rank_and_rref(Matrix([[1, 1]])) == (1, Matrix([[1, 1]]))
    assert rank_and_rref(Matrix([[1, 2], [2, 4]])) == (1, Matrix([[1, 2], [0, 0]]))


def test_kernel_examples():
    assert kernel_basis(Matrix.identity(2)).dim == 0
    k = kernel_basis(Matrix([[1, 1]]))
    assert k == Subspace(2, [[1, -1]])
    assert kernel_basis(Matrix.zeros(1, 3)) == Subspace.full(3)


def test_intersect_examples():
    e1, e2 = (1, 0, 0), (0, 1, 0)
    a = Subspace(3, [e1, e2])
    line = Subspace(3, [(1, 1, 0)])
    assert intersect(a, line) == line
    assert intersect(Subspace(3, [e1]), Subspace(3, [e2])).dim == 0
    assert intersect(a, a) == a


def test_intersect_ambient_mismatch():
    with pytest.raises(ValueError):
        intersect(Subspace.full(2), Subspace.full(3))


def test_image_and_quotient_examples():
    assert image_and_quotient(Matrix.identity(3), Subspace.full(3))[1] == 0
    assert image_and_quotient(Matrix.zeros(3, 2), Subspace.full(3))[1] == 3
    img, q = image_and_quotient(Matrix([[1], [0]]), Subspace.full(2))
    assert img == Subspace(2, [[1, 0]]) and q == 1


def test_solve():
    m = Matrix([[1, 2], [3, 4]])
    x = solve(m, [5, 6])
    assert m @ x == (5, 6)
    assert solve(Matrix([[1, 1], [1, 1]]), [1, 2]) is None


def test_gaussian_kernel():
    i = GaussianRational(0, 1)
    k = kernel_basis(Matrix([[1, i]]))
    assert k.dim == 1
    v = k.basis[0]
    assert v[0] + i * v[1] == 0


# properties


@given(matrices())
def test_rank_of_transpose(m):
    assert rank_and_rref(m)[0] == rank_and_rref(m.transpose())[0]


@given(matrices())
def test_rank_nullity_and_kernel_annihilated(m):
    k = kernel_basis(m)
    assert k.dim + rank_and_rref(m)[0] == m.ncols
    for v in k.basis:
        assert all(x == 0 for x in m @ v)


@settings(max_examples=60)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(subspaces(n), subspaces(n), subspaces(n))))
def test_intersection_laws(abc):
    a, b, c = abc
    assert intersect(a, b) == intersect(b, a)
    assert intersect(intersect(a, b), c) == intersect(a, intersect(b, c))
    assert intersect(a, a) == a
    assert intersect(a, b).dim == a.dim + b.dim - (a + b).dim


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(subspaces(n), st.lists(small, min_size=1, max_size=3))))
def test_canonical_basis(data):
    a, coeffs = data
    # an alternative spanning set: the basis plus random combinations, reversed
    extra = [tuple(sum(c * v[i] for c, v in zip(coeffs, a.basis)) for i in range(a.ambient))]
    b = Subspace(a.ambient, list(reversed(a.basis)) + extra)
    assert b == a
    assert b.basis == a.basis

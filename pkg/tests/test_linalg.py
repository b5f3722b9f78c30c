import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gauss
from hyperholo.errors import NoUnitMinor, WrongShape
from hyperholo.linalg import Matrix, det, inverse, minor_det, unit_minor
from hyperholo.scalars import GaussRat, Scalar

V = ("x", "y")


def test_det_and_inverse_of_unipotent_polynomial_matrix():
    m = Matrix.from_text(V, [[1, "x", "x*y"], [0, 1, "y^2"], [0, 0, 1]])
    assert det(m) == Scalar.one(V)
    assert m @ inverse(m) == Matrix.identity(V, 3)
    assert inverse(m) @ m == Matrix.identity(V, 3)


def test_frozen_determinant():
    m = Matrix.from_text(V, [["x", 1], ["y", "i"]])
    assert str(det(m)) == "i*x - y"
    assert minor_det(m, (0,), (1,)) == Scalar.one(V)


def test_inverse_needs_constant_determinant():
    m = Matrix.from_text(V, [["x", 0], [0, 1]])
    with pytest.raises(ZeroDivisionError):
        inverse(m)
    with pytest.raises(WrongShape):
        inverse(Matrix.from_text(V, [[1, 0]]))


def test_unit_minor_prefers_and_falls_back():
    m = Matrix.from_text(V, [["x", 0], [1, 0], [0, 2]])
    rows, d = unit_minor(m)
    assert rows == (1, 2) and d == GaussRat(2)
    with pytest.raises(NoUnitMinor):
        unit_minor(Matrix.from_text(V, [["x", 0], [0, "y"]]))


def test_block_transpose_conj():
    a = Matrix.from_text(V, [["i*x"]])
    b = Matrix.block([[a, Matrix.zeros(V, 1)], [Matrix.identity(V, 1), a]])
    assert b.shape == (2, 2)
    assert b.T().T() == b
    assert b.conj()[0, 0] == Scalar.var(V, "x").scale(GaussRat(0, -1))


@st.composite
def constant_matrices(draw, n=3):
    return Matrix.from_numbers((), [[draw(gauss) for _ in range(n)] for _ in range(n)])


@settings(max_examples=150)
@given(constant_matrices(), constant_matrices())
def test_det_is_multiplicative(a, b):
    assert det(a @ b) == det(a) * det(b)


@settings(max_examples=150)
@given(constant_matrices())
def test_constant_inverse(a):
    if det(a).is_zero():
        return
    assert a @ inverse(a) == Matrix.identity((), 3)


def test_scale_by_rational():
    m = Matrix.identity(V, 2).scale(GaussRat(mpq(1, 2)))
    assert m @ m.scale(GaussRat(4)) == Matrix.identity(V, 2)

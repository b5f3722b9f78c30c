import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import VARS4, scalars
from hyperholo.chartcalc import coord_form, form, real_chart
from hyperholo.courant import (
    ChartBackend,
    PointBackend,
    Section,
    anchor_apply,
    b_transform_matrix,
    dee,
    dorfman,
    frame,
    pairing,
    quaternion_point_backend,
    skew_bracket,
    verify_axioms,
)
from hyperholo.errors import ConstructionError, UnsupportedOnPoint
from hyperholo.graded import wedge
from hyperholo.scalars import GaussRat, Scalar

R4 = real_chart(4)
T4 = ChartBackend(R4)
HALF = GaussRat(mpq(1, 2))


def sec(vec, frm=(0, 0, 0, 0), backend=T4):
    return Section.from_parts(backend, vec, frm)


def s(text):
    return R4.parse(text)


D0 = sec([1, 0, 0, 0])
D1 = sec([0, 1, 0, 0])
DX0 = sec([0] * 4, [1, 0, 0, 0])
DX1 = sec([0] * 4, [0, 1, 0, 0])


def test_dorfman_examples():
    assert dorfman(D0, sec([0, "x0", 0, 0])) == D1
    assert dorfman(D0 + DX1, D1).is_zero()
    assert dorfman(D0, DX0.scale(s("x1"))).is_zero()
    assert dorfman(D0, DX1.scale(s("x0"))) == DX1


def test_pairing_and_anchor_examples():
    u = D0 + DX0
    assert pairing(u, u) == Scalar.one(VARS4)
    assert pairing(D0, DX1).is_zero()
    assert pairing(D0, DX0) == Scalar.const(VARS4, HALF)
    assert anchor_apply(D0 + DX1, s("x0^2")) == s("2*x0")


def test_dee_is_the_exterior_derivative():
    assert dee(T4, s("x0^2")) == DX0.scale(s("2*x0"))
    f = s("x0*x1 + x3^2")
    for u in frame(T4) + [sec(["x1", 0, 1, "x0"], [0, "x2", 0, 1])]:
        assert pairing(dee(T4, f), u) == anchor_apply(u, f).scale(HALF)


def test_bracket_is_not_skew():
    u, v = D0, DX0.scale(s("x0"))
    assert dorfman(u, v) + dorfman(v, u) == dee(T4, pairing(u, v)).scale(2)
    assert not (dorfman(u, v) + dorfman(v, u)).is_zero()
    assert skew_bracket(u, v) == -skew_bracket(v, u)


def test_quaternion_backend():
    H = quaternion_point_backend()
    one, i, j, k = frame(H)
    assert dorfman(i, j) == k.scale(2)
    assert dorfman(j, i) == k.scale(-2)
    assert dorfman(one, i).is_zero()
    assert pairing(i, i) == Scalar.one(())
    assert pairing(i, j).is_zero()
    with pytest.raises(UnsupportedOnPoint):
        dee(H, Scalar.one(()))
    with pytest.raises(UnsupportedOnPoint):
        i.vec


def test_axioms_hold_on_standard_backends():
    assert verify_axioms(T4).ok
    assert verify_axioms(ChartBackend(real_chart(2))).ok
    assert verify_axioms(quaternion_point_backend()).ok


def test_closed_twist_is_accepted_and_satisfies_the_axioms():
    phi = form(R4, 3, {(0, 1, 2): "x0"})
    H = ChartBackend(R4, phi)
    assert H.twist == phi
    rep = verify_axioms(H)
    assert rep.ok and rep.conventions
    # the twist contributes i_X i_Y phi
    assert dorfman(sec([1, 0, 0, 0], backend=H), sec([0, 1, 0, 0], backend=H)) == sec([0] * 4, [0, 0, "-x0", 0], backend=H)


def test_non_closed_twist_is_rejected():
    with pytest.raises(ConstructionError, match="not closed"):
        ChartBackend(R4, form(R4, 3, {(0, 1, 2): "x3"}))
    with pytest.raises(ConstructionError):
        ChartBackend(R4, coord_form(R4, 0))


def test_point_backend_rejects_non_invariant_pairing():
    structure = [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]]
    with pytest.raises(ConstructionError, match="ad-invariant"):
        PointBackend(structure, [[1, 0], [0, 1]])
    with pytest.raises(ConstructionError, match="degenerate"):
        PointBackend([[[0]]], [[0]])


def test_b_field_transform_is_an_automorphism():
    B = wedge(coord_form(R4, 0), coord_form(R4, 1)).scale(s("x2")) - wedge(coord_form(R4, 1), coord_form(R4, 2)).scale(s("x0"))
    M = b_transform_matrix(T4, B)
    apply = lambda u: Section(T4, [sum((M[r, c] * u.coeffs[c] for c in range(8)), Scalar.zero(VARS4)) for r in range(8)])
    samples = frame(T4) + [sec(["x1", 0, "x3", 1], ["x0", 0, 0, "x2"])]
    for u in samples:
        for v in samples:
            assert pairing(apply(u), apply(v)) == pairing(u, v)
            assert apply(dorfman(u, v)) == dorfman(apply(u), apply(v))


def sections(max_terms=2):
    return st.lists(scalars(VARS4, max_terms, 2, False), min_size=8, max_size=8).map(lambda cs: Section(T4, cs))


@settings(max_examples=60)
@given(sections(), sections())
def test_symmetric_part_is_exact(u, v):
    assert dorfman(u, v) + dorfman(v, u) == dee(T4, pairing(u, v)).scale(2)


@settings(max_examples=40)
@given(sections(), sections(), sections())
def test_leibniz_identity(u, v, w):
    assert dorfman(u, dorfman(v, w)) == dorfman(dorfman(u, v), w) + dorfman(v, dorfman(u, w))


@settings(max_examples=60)
@given(sections(), sections(), scalars(VARS4, 2, 2, False))
def test_leibniz_rule(u, v, f):
    assert dorfman(u, v.scale(f)) == v.scale(anchor_apply(u, f)) + dorfman(u, v).scale(f)

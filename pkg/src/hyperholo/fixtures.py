"""Builders for the bundled example geometries.

Each builder returns a :class:`Fixture`; the JSON scenes under ``scenes/`` are
generated from these by ``scripts/make_fixtures.py``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .chartcalc import Chart, TanEndo, bivector_sharp, covector, ext_d, form, form_from_sharp, form_sharp, multivec, real_chart, vector
from .courant import ChartBackend, b_transform_matrix, lifted_matrix, quaternion_point_backend
from .endo import Endo, Triple
from .errors import ConstructionError
from .linalg import Matrix, inverse
from .scalars import GaussRat, Scalar

# Left multiplication by i, j, k on H = R^4 with basis (1, i, j, k).
QUAT_LEFT = {
    "i": [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]],
    "j": [[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]],
    "k": [[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
}

# Standard complex structure on C^2 with real coordinates (x1, y1, x2, y2).
C2_J = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]


@dataclass
class Fixture:
    name: str
    backend: object
    triple: Triple | None = None
    tangent: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    hypercomplex: bool = True
    orientation: int = 1
    description: str = ""


def _lift_triple(backend, mats) -> Triple:
    return Triple(*(Endo(backend, lifted_matrix(backend, m)) for m in mats))


def flatq() -> Fixture:
    chart = real_chart(4)
    B = ChartBackend(chart)
    tangent = {k: TanEndo.from_numbers(chart, v) for k, v in QUAT_LEFT.items()}
    T = _lift_triple(B, [tangent[k].matrix for k in "ijk"])
    return Fixture("FLATQ", B, T, tangent, description="R^4 with left quaternion multiplications lifted to T+T*")


def c2std() -> Fixture:
    chart = Chart(("x1", "y1", "x2", "y2"))
    B = ChartBackend(chart)
    j = Matrix.from_numbers(chart.vars, C2_J)
    # omega1 = Re(dz1 ^ dz2) = dx1^dx2 - dy1^dy2
    w1 = form(chart, 2, {(0, 2): 1, (1, 3): -1})
    w1s = form_sharp(w1)
    z = Matrix.zeros(chart.vars, 4)
    I = Endo(B, Matrix.block([[z, inverse(w1s)], [-w1s, z]]))
    J = Endo(B, lifted_matrix(B, j))
    T = Triple(I, J, I @ J)
    w2 = form_from_sharp(chart, w1s @ j)
    return Fixture(
        "C2STD",
        B,
        T,
        {"j": TanEndo(chart, j)},
        {"omega1": w1, "omega2": w2},
        description="C^2 with the holomorphic symplectic form dz1^dz2",
    )


def hpt() -> Fixture:
    B = quaternion_point_backend()
    mats = [Matrix.from_numbers((), QUAT_LEFT[k]) for k in "ijk"]
    T = Triple(*(Endo(B, m) for m in mats))
    return Fixture("HPT", B, T, description="quaternions over a point with the commutator bracket")


def b_field_closed(chart: Chart):
    """B = x2 dx0^dx1 - x0 dx1^dx2, a closed non-constant 2-form on R^4."""
    return form(chart, 2, {(0, 1): "x2", (1, 2): "-x0"})


def conjugate_triple(T: Triple, A: Matrix, A_inv: Matrix) -> Triple:
    B = T.backend
    return Triple(*(Endo(B, A @ E.matrix @ A_inv) for _, E in T.members()))


def flatq_b() -> Fixture:
    base = flatq()
    B = base.backend
    bf = b_field_closed(B.chart)
    if not ext_d(bf).is_zero():
        raise ConstructionError("B-field is not closed")
    eB = b_transform_matrix(B, bf)
    eB_inv = b_transform_matrix(B, -bf)
    T = conjugate_triple(base.triple, eB, eB_inv)
    return Fixture("FLATQ-B", B, T, data={"B": bf}, description="FLATQ conjugated by the B-field transform of a closed 2-form")


def nonint() -> Fixture:
    chart = real_chart(4)
    B = ChartBackend(chart)
    A = Matrix.from_text(chart.vars, [[1, 0, 0, 0], [0, 1, 0, "x1"], [0, 0, 1, 0], [0, 0, 0, 1]])
    A_inv = Matrix.from_text(chart.vars, [[1, 0, 0, 0], [0, 1, 0, "-x1"], [0, 0, 1, 0], [0, 0, 0, 1]])
    tangent = {k: TanEndo(chart, A @ Matrix.from_numbers(chart.vars, v) @ A_inv) for k, v in QUAT_LEFT.items()}
    T = _lift_triple(B, [tangent[k].matrix for k in "ijk"])
    # skew endomorphism with a non-Poisson upper-right block, for Jacobiator tests
    P = bivector_sharp(multivec(chart, 2, {(0, 1): "x2", (2, 3): "x0"}))
    zero = Matrix.zeros(chart.vars, 4)
    F = Endo(B, Matrix.block([[tangent["i"].matrix, P], [zero, -tangent["i"].matrix.T()]]))
    return Fixture("NONINT", B, T, tangent, {"F_poisson": F}, hypercomplex=False, description="quaternionic triple conjugated by 1 + x1 E_13")


def hp_kahler(broken=False) -> Fixture:
    """Flat hyper-Poisson structure: pi_a# = (g# a)^-1 for a = i, j, k and g euclidean."""
    chart = real_chart(4)
    B = ChartBackend(chart)
    tangent = {k: TanEndo.from_numbers(chart, v) for k, v in QUAT_LEFT.items()}
    g = Matrix.identity(chart.vars, 4)
    pis = {}
    for n, k in enumerate("ijk", start=1):
        pis[f"pi{n}"] = inverse(g @ tangent[k].matrix)
    if broken:
        pis["pi3"] = pis["pi3"].scale(2)
    bivs = {name: _biv(chart, m) for name, m in pis.items()}
    I = Endo(B, Matrix.block([[tangent["i"].matrix, pis["pi3"]], [Matrix.zeros(chart.vars, 4), -tangent["i"].matrix.T()]]))
    J = Endo(B, lifted_matrix(B, tangent["j"].matrix))
    K = Endo(B, Matrix.block([[tangent["k"].matrix, -pis["pi1"]], [Matrix.zeros(chart.vars, 4), -tangent["k"].matrix.T()]]))
    T = Triple(I, J, K)
    name = "HP-KAHLER-BROKEN" if broken else "HP-KAHLER"
    return Fixture(name, B, T, tangent, dict(bivs, g=g), hypercomplex=not broken, description="flat hyper-Poisson structure on R^4")


def _biv(chart, m):
    from .chartcalc import bivector_from_sharp

    return bivector_from_sharp(chart, m)


def twist_c2() -> Fixture:
    """FLATQ triple on T+T* twisted by phi = d(x0 x1 dx2^dx3)."""
    chart = real_chart(4)
    phi = ext_d(form(chart, 2, {(2, 3): "x0*x1"}))
    B = ChartBackend(chart, phi)
    tangent = {k: TanEndo.from_numbers(chart, v) for k, v in QUAT_LEFT.items()}
    T = _lift_triple(B, [tangent[k].matrix for k in "ijk"])
    return Fixture("TWIST-C2", B, T, tangent, {"phi": phi}, description="closed 3-form twist on a complex surface chart")


def twist_c3_neg() -> Fixture:
    """R^6 = C^3 twisted by phi = Re(dz1^dz2^dz3); the lifted standard J is not integrable."""
    chart = Chart(("x1", "y1", "x2", "y2", "x3", "y3"))
    # Re((dx1 + i dy1)(dx2 + i dy2)(dx3 + i dy3))
    phi = form(chart, 3, {(0, 2, 4): 1, (0, 3, 5): -1, (1, 2, 5): -1, (1, 3, 4): -1})
    B = ChartBackend(chart, phi)
    j = Matrix.from_numbers(chart.vars, _std_j(3))
    J = Endo(B, lifted_matrix(B, j))
    return Fixture("TWIST-C3-NEG", B, None, {"j": TanEndo(chart, j)}, {"phi": phi, "J": J}, hypercomplex=False)


def _std_j(n):
    m = [[0] * (2 * n) for _ in range(2 * n)]
    for a in range(n):
        m[2 * a + 1][2 * a] = 1
        m[2 * a][2 * a + 1] = -1
    return m


def nilpotent_perturbation(coord: str) -> Matrix:
    """A = 1 + f N on R^4 with N^2 = 0 complex-linear for the j of FLATQ, f a coordinate."""
    chart = real_chart(4)
    rows = [[1, coord, 0, 0], [0, 1, 0, 0], [0, 0, 1, f"-{coord}"], [0, 0, 0, 1]]
    return Matrix.from_text(chart.vars, rows)


def broken_omega(coord: str) -> Fixture:
    """FLATQ with i and k conjugated by 1 + f N; J stays flat so Omega stays nondegenerate."""
    base = flatq()
    B = base.backend
    chart = B.chart
    A = nilpotent_perturbation(coord)
    A_inv = Matrix.identity(chart.vars, 4) + (Matrix.identity(chart.vars, 4) - A)
    ti = TanEndo(chart, A @ base.tangent["i"].matrix @ A_inv)
    tk = TanEndo(chart, A @ base.tangent["k"].matrix @ A_inv)
    tj = base.tangent["j"]
    T = _lift_triple(B, [ti.matrix, tj.matrix, tk.matrix])
    return Fixture(f"BROKEN-OMEGA-{coord}", B, T, {"i": ti, "j": tj, "k": tk}, hypercomplex=False)


def broken_omegas():
    return [broken_omega(c) for c in ("x0", "x2", "x3")]


def _complex_fields(chart):
    """d/dz1, d/dz2 and dz1, dz2, conj dz1, conj dz2 on C^2 with coordinates (x1, y1, x2, y2)."""
    v = chart.vars
    h, ih = GaussRat(mpq(1, 2)), GaussRat(0, mpq(-1, 2))
    i = GaussRat(0, 1)
    dz = [vector(chart, [h, ih, 0, 0]), vector(chart, [0, 0, h, ih])]
    forms = {
        "dz1": covector(chart, [1, i, 0, 0]),
        "dz2": covector(chart, [0, 0, 1, i]),
        "dzb1": covector(chart, [1, -i, 0, 0]),
        "dzb2": covector(chart, [0, 0, 1, -i]),
    }
    z2 = Scalar.var(v, "x2") + Scalar.var(v, "y2").scale(i)
    return dz, forms, z2


def c2lag() -> Fixture:
    """C^2 with omega = dz1^dz2 (J oriented as diag(-j, j*)) and two Lagrangian foliations in T^{1,0}.

    ``flat``: spanned by d/dz1.  ``twisted``: spanned by d/dz1 + z2 d/dz2.
    Each foliation carries the (0,1) part of its conormal, which completes it to a
    Lagrangian subalgebroid of L*.
    """
    fx = c2std()
    chart = fx.backend.chart
    dz, forms, z2 = _complex_fields(chart)
    w = fx.data["omega1"] + fx.data["omega2"].scale(GaussRat(0, -1))
    twisted = dz[0] + dz[1].scale(z2)
    conormal_twisted = forms["dz2"] - forms["dz1"].scale(z2)
    fx.name = "C2LAG"
    fx.orientation = -1
    fx.data.update(
        {
            "omega": w,
            "foliations": {"flat": [dz[0]], "twisted": [twisted]},
            "conormals01": {"flat": [forms["dzb2"]], "twisted": [conormal_twisted.conj()]},
        }
    )
    fx.description = "C^2 with omega = dz1^dz2 and Lagrangian foliations d/dz1 and d/dz1 + z2 d/dz2"
    return fx


def hypercomplex_fixtures():
    return [flatq(), c2std(), flatq_b(), hpt(), hp_kahler()]


def all_fixtures():
    return [flatq(), c2std(), hpt(), flatq_b(), nonint(), hp_kahler(), hp_kahler(broken=True), twist_c2(), twist_c3_neg()] + broken_omegas()


BUILDERS = {
    "flatq": flatq,
    "c2std": c2std,
    "c2lag": c2lag,
    "hpt": hpt,
    "flatq_b": flatq_b,
    "nonint": nonint,
    "hp_kahler": hp_kahler,
    "hp_kahler_broken": lambda: hp_kahler(broken=True),
    "twist_c2": twist_c2,
    "twist_c3_neg": twist_c3_neg,
    "broken_omega_x0": lambda: broken_omega("x0"),
    "broken_omega_x2": lambda: broken_omega("x2"),
    "broken_omega_x3": lambda: broken_omega("x3"),
}

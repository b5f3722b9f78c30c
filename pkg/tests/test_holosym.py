import pytest
from gmpy2 import mpq

from hyperholo.chartcalc import multivec
from hyperholo.courant import Section
from hyperholo.eigencalc import AltTensor, IsoFrame, eigenframe, projector_Lstar
from hyperholo.errors import InvariantViolated, NotHypercomplex, NotHypercomplexBase, WrongShape
from hyperholo.fixtures import broken_omegas, c2std, flatq, flatq_b, hp_kahler, hpt, nonint
from hyperholo.holosym import (
    HoloSymp,
    HyperPoisson,
    closedness_equivalences,
    decompose,
    deformation_check,
    deformation_family,
    eigen_membership,
    from_triple,
    hyper_poisson_check,
    hyper_poisson_equivalence,
    nijenhuis_form_identities,
    omega_sharp_of,
    roundtrip_report,
    to_triple,
)
from hyperholo.linalg import Matrix
from hyperholo.scalars import GaussRat, Scalar

HALF = GaussRat(mpq(1, 2))
I_UNIT = GaussRat(0, 1)
C2 = c2std()
FLATQ = flatq()


def _hp(fx, **override):
    parts = {f"pi{n}": fx.data[f"pi{n}"] for n in (1, 2, 3)}
    parts.update(override)
    return HyperPoisson(*(fx.tangent[k] for k in "ijk"), parts["pi1"], parts["pi2"], parts["pi3"])


def test_c2std_decomposition():
    H = from_triple(C2.triple)
    dec, rep = decompose(H)
    assert rep.ok
    assert dec.theta.is_zero() and not dec.pi.is_zero() and not dec.omega.is_zero()
    n = 4
    p10 = (Matrix.identity(dec.pi_sharp.vars, n) - C2.tangent["j"].matrix.scale(I_UNIT)).scale(HALF)
    assert dec.pi_sharp @ dec.omega_sharp.conj() == p10.scale(-1)


def test_flatq_decomposition():
    H = from_triple(FLATQ.triple)
    dec, rep = decompose(H)
    assert rep.ok
    assert dec.pi.is_zero() and dec.omega.is_zero()
    i, k = FLATQ.tangent["i"].matrix, FLATQ.tangent["k"].matrix
    assert dec.theta == (i + k.scale(I_UNIT)).scale(HALF)


def test_hp_kahler_decomposition_has_theta_and_pi():
    fx = hp_kahler()
    dec, rep = decompose(from_triple(fx.triple))
    assert rep.ok
    assert not dec.theta.is_zero() and not dec.pi.is_zero() and dec.omega.is_zero()


def test_decompose_needs_block_diagonal_j():
    with pytest.raises(WrongShape):
        decompose(from_triple(flatq_b().triple))


def test_point_omega_is_constant():
    H = from_triple(hpt().triple)
    assert H.pair.n == 2
    assert all(v.is_constant() for _, v in H.omega.items()) and not H.omega.is_zero()


@pytest.mark.parametrize("build", [c2std, flatq_b, hpt])
def test_roundtrip(build):
    rep = roundtrip_report(build().triple)
    assert rep.ok


def test_to_triple_recovers_i_and_k():
    H = from_triple(flatq_b().triple)
    T = to_triple(H.J, H.omega_sharp)
    assert (T.I, T.K) == (flatq_b().triple.I, flatq_b().triple.K)


def test_scaled_omega_breaks_nondegeneracy():
    H = from_triple(C2.triple)
    with pytest.raises(InvariantViolated) as info:
        to_triple(H.J, H.omega_sharp.scale(2))
    assert info.value.which == "Omega1"


def test_non_hypercomplex_triple_is_rejected():
    with pytest.raises(NotHypercomplex):
        from_triple(nonint().triple)


def test_eigen_membership():
    T = C2.triple
    d0 = Section.basis(C2.backend, 0)
    e = projector_Lstar(T.J)(d0)
    label, rep = eigen_membership(T, e)
    assert label == "in_Lstar" and rep.ok
    label, rep = eigen_membership(T, e.conj())
    assert label == "in_L" and rep.ok
    label, rep = eigen_membership(T, d0)
    assert label == "neither" and rep.ok
    with pytest.raises(ValueError):
        eigen_membership(T, Section.zero(C2.backend))


@pytest.mark.parametrize("build", [c2std, flatq, flatq_b])
def test_closedness_equivalences_on_hypercomplex_fixtures(build):
    rep = closedness_equivalences(from_triple(build().triple))
    assert rep["three conditions agree"].ok and rep["d_{L*} Omega = 0"].ok
    assert rep["1/4 N_{I,J} = (dW - conj dW)/2i"].ok and rep["-1/4 N_{J,K} = (dW + conj dW)/2"].ok


@pytest.mark.parametrize("fx", broken_omegas(), ids=lambda f: f.name)
def test_broken_omega_fails_closedness_coherently(fx):
    H = HoloSymp(fx.triple.J, omega_sharp_of(fx.triple))
    assert H.invariants(closed=False).ok
    rep = closedness_equivalences(H)
    assert not rep["d_{L*} Omega = 0"].ok and not rep["[Omega,Omega] = 0"].ok
    assert rep["three conditions agree"].ok
    assert nijenhuis_form_identities(H).ok


@pytest.mark.parametrize("fx", broken_omegas(), ids=lambda f: f.name)
def test_duality_factor_two_breaks_the_identities(fx):
    T = fx.triple
    base = eigenframe(T.J).frameLstar
    seed = IsoFrame(base.backend, base.sections, base.rows, base.det, None, "L*", GaussRat(2))
    H = HoloSymp(T.J, omega_sharp_of(T), eigenframe(T.J, seed))
    assert not nijenhuis_form_identities(H).ok


def test_deformation_family_examples():
    H = from_triple(C2.triple)
    S, frame, rep = deformation_family(H, 0, 0)
    assert rep.ok and S == H.J
    assert all(H.pair.frameLstar.in_span(s) for s in frame)
    S, frame, rep = deformation_family(H, 1, 0)
    assert rep.ok and S == H.K()
    expect = [xi + H.omega_sharp(xi) for xi in H.pair.frameLstar]
    assert list(frame) == expect
    S, _, rep = deformation_family(from_triple(FLATQ.triple), 1, 2)
    assert rep.ok
    assert S == FLATQ.triple.I.scale(GaussRat(mpq(2, 3))) + FLATQ.triple.J.scale(GaussRat(mpq(-2, 3))) + FLATQ.triple.K.scale(GaussRat(mpq(1, 3)))


def test_deformation_check_examples():
    H = from_triple(FLATQ.triple)
    frS = H.pair.frameLstar
    assert deformation_check(H.pair, AltTensor.zero(frS, 2)).ok
    Hc = from_triple(C2.triple)
    assert deformation_check(Hc.pair, Hc.omega).ok
    W = AltTensor(frS, 2, {(2, 3): Scalar.var(frS.vars, "x0")})
    rep = deformation_check(H.pair, W)
    assert not rep["Maurer-Cartan"].ok
    assert not rep["graph (1 + W#) L* involutive"].ok
    assert rep["graph (1 + W#) L* involutive"].witness["pair"]
    assert rep["Maurer-Cartan iff involutive"].ok


def test_hyper_poisson_examples():
    fx = hp_kahler()
    rep = hyper_poisson_check(_hp(fx))
    assert rep.ok and rep.info["g"] == Matrix.identity(fx.backend.vars, 4)
    zero = multivec(fx.backend.chart, 2, {})
    rep = hyper_poisson_check(_hp(fx, pi1=zero, pi2=zero, pi3=zero))
    assert rep.ok and "g" not in rep.info
    broken = hyper_poisson_check(_hp(fx, pi2=fx.data["pi2"].scale(2)))
    assert not broken.ok
    assert not broken["corollary (2): pi3# = i pi2#"].ok
    assert broken["corollary (2): pi3# = i pi2#"].witness is not None


def test_hyper_poisson_equivalence():
    rep = hyper_poisson_equivalence(_hp(hp_kahler()))
    assert rep.ok
    zero = multivec(FLATQ.backend.chart, 2, {})
    fx = FLATQ
    HP = HyperPoisson(*(fx.tangent[k] for k in "ijk"), zero, zero, zero)
    assert hyper_poisson_equivalence(HP).ok
    broken = hp_kahler(broken=True)
    rep = hyper_poisson_equivalence(_hp(broken))
    assert not rep["(1) hyper-Poisson with compatibility"].ok and not rep["(2) Courant triple hypercomplex"].ok
    assert rep["assertions concur"].ok


def test_non_hypercomplex_base_is_rejected():
    fx = nonint()
    pi = multivec(fx.backend.chart, 2, {(0, 1): 1})
    with pytest.raises(NotHypercomplexBase):
        hyper_poisson_check(HyperPoisson(*(fx.tangent[k] for k in "ijk"), pi, pi, pi))
    rep = hyper_poisson_equivalence(HyperPoisson(*(fx.tangent[k] for k in "ijk"), pi, pi, pi))
    assert not rep["(1) hyper-Poisson with compatibility"].ok
    assert not rep["(2) Courant triple hypercomplex"].ok


"""The hypercomplex connection of a hypercomplex triple on a Courant algebroid.

``nabla_U V = -1/2 K(JV o IU - J(V o IU) - I(JV o U) + JI(V o U))`` with ``o``
the Dorfman bracket.  The connection is evaluated extensionally on sections;
Christoffel tables are produced only for restrictions to frames.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .chartcalc import (
    DiffForm,
    MultiVec,
    TanEndo,
    components,
    dpartial,
    form_sharp,
    interior,
    is_integrable,
    lie_bracket,
    lie_derivative,
    projector_01,
    projector_10,
    type_project,
    vector,
)
from .courant import Section, anchor_apply, dee_or_zero, dorfman, frame as standard_frame, pairing, skew_bracket
from .eigencalc import (
    DualPair,
    IsoFrame,
    algebroid_d,
    algebroid_lie,
    certify,
    eigenframe,
    evaluate_form,
    frame_interior,
    subalgebroid_check,
)
from .endo import Endo, Triple, hypercomplex_check, nijenhuis
from .errors import (
    BackendMismatch,
    NoUnitMinor,
    NotHypercomplex,
    NotInSpan,
    NotLagrangian,
    NotLagrangianFoliation,
    NotQuaternionic,
    NotStable,
    NotStableFoliation,
)
from .graded import AltTensor
from .linalg import Matrix, inverse, unit_minor
from .report import Report
from .scalars import GaussRat, Scalar

HALF = GaussRat(mpq(1, 2))
I_UNIT = GaussRat(0, 1)


class HXConnection:
    """The connection attached to a triple; ``validated`` records the hypercomplex check."""

    def __init__(self, triple: Triple, check=True):
        self.triple = triple
        self.validated = False
        if check:
            try:
                rep = hypercomplex_check(triple)
            except NotQuaternionic as exc:
                raise NotHypercomplex(str(exc)) from exc
            if not rep.ok:
                raise NotHypercomplex("triple fails: " + ", ".join(c.name for c in rep.failures()))
            self.validated = True

    @property
    def backend(self):
        return self.triple.backend

    def __call__(self, U: Section, V: Section) -> Section:
        return nabla(self, U, V)


def _same_backend(C: HXConnection, *secs):
    for s in secs:
        if s.backend != C.backend:
            raise BackendMismatch("section and connection live on different backends")


def nabla(C: HXConnection, U: Section, V: Section) -> Section:
    _same_backend(C, U, V)
    I, J, K = C.triple.I, C.triple.J, C.triple.K
    IU, JV = I(U), J(V)
    inner = dorfman(JV, IU) - J(dorfman(V, IU)) - I(dorfman(JV, U)) + J(I(dorfman(V, U)))
    return -K(inner).scale(HALF)


def delta_f(C: HXConnection, f: Scalar, U: Section, V: Section) -> Section:
    _same_backend(C, U, V)
    Df = dee_or_zero(C.backend, f)
    out = Df.scale(pairing(U, V))
    for _, A in C.triple.members():
        c = pairing(A(U), V)
        if not c.is_zero():
            out = out + A(Df).scale(c)
    return out


def delta_identities(C: HXConnection, f: Scalar, U: Section, V: Section) -> Report:
    rep = Report("Delta_f identities")
    d = delta_f(C, f, U, V)
    for name, A in C.triple.members():
        lhs, rhs = delta_f(C, f, U, A(V)), A(d)
        rep.add(f"Delta_f(U,{name}V) = {name} Delta_f(U,V)", lhs == rhs, {"lhs": lhs, "rhs": rhs})
    sym = d + delta_f(C, f, V, U)
    target = dee_or_zero(C.backend, f).scale(pairing(U, V).scale((2, 0)))
    rep.add("Delta_f(U,V) + Delta_f(V,U) = 2<U,V> Df", sym == target, {"lhs": sym, "rhs": target})
    return rep


def leibniz_anomaly(C: HXConnection, f: Scalar, U: Section, V: Section):
    """(nabla_U(fV) - (rho(U)f)V - f nabla_U V, -Delta_f(U,V))."""
    lhs = nabla(C, U, V.scale(f)) - V.scale(anchor_apply(U, f)) - nabla(C, U, V).scale(f)
    return lhs, -delta_f(C, f, U, V)


def parallelism_report(C: HXConnection, sections=None) -> Report:
    """nabla_U(AV) - A nabla_U V on all pairs of the given sections (frame by default)."""
    secs = list(sections) if sections is not None else standard_frame(C.backend)
    rep = Report("parallelism")
    for name, A in C.triple.members():
        witness = None
        for a, U in enumerate(secs):
            for b, V in enumerate(secs):
                r = nabla(C, U, A(V)) - A(nabla(C, U, V))
                if not r.is_zero():
                    witness = {"pair": [a, b], "residual": r}
                    break
            if witness:
                break
        rep.add(f"nabla {name} = 0", witness is None, witness)
    return rep


def torsion(C: HXConnection, U: Section, V: Section):
    """(T(U,V), I D<U,IV> + J D<U,JV> + K D<U,KV>)."""
    T = nabla(C, U, V) - nabla(C, V, U) - skew_bracket(U, V)
    rhs = Section.zero(C.backend)
    for _, A in C.triple.members():
        rhs = rhs + A(dee_or_zero(C.backend, pairing(U, A(V))))
    return T, rhs


def torsion_balance(C: HXConnection, U: Section, V: Section):
    """(T(U,V) - 1/2 K N(I,J)(U,V), same right-hand side); balances for any almost hypercomplex triple."""
    T, rhs = torsion(C, U, V)
    N = nijenhuis(C.triple.I, C.triple.J, U, V)
    return T - C.triple.K(N).scale(HALF), rhs


def torsion_report(C: HXConnection, sections=None, balance=False) -> Report:
    secs = list(sections) if sections is not None else standard_frame(C.backend)
    rep = Report("torsion balance" if balance else "torsion")
    fn = torsion_balance if balance else torsion
    witness = None
    for a in range(len(secs)):
        for b in range(a + 1, len(secs)):
            lhs, rhs = fn(C, secs[a], secs[b])
            if lhs != rhs:
                witness = {"pair": [a, b], "lhs": lhs, "rhs": rhs}
                break
        if witness:
            break
    rep.add("balanced" if balance else "torsion identity", witness is None, witness)
    return rep


def curvature(C: HXConnection, U: Section, V: Section, W: Section) -> Section:
    return nabla(C, U, nabla(C, V, W)) - nabla(C, V, nabla(C, U, W)) - nabla(C, skew_bracket(U, V), W)


def _curvature_witness(C, secs):
    for a in range(len(secs)):
        for b in range(a + 1, len(secs)):
            for c in range(len(secs)):
                r = curvature(C, secs[a], secs[b], secs[c])
                if not r.is_zero():
                    return {"slots": [a, b, c], "value": r}
    return None


def pure_slot_curvature(C: HXConnection, pair: DualPair | None = None) -> Report:
    """Curvature on triples drawn entirely from L or entirely from L*."""
    pair = pair or eigenframe(C.triple.J)
    rep = Report("curvature on pure eigen-slots")
    for label, fr in (("L", pair.frameL), ("L*", pair.frameLstar)):
        w = _curvature_witness(C, list(fr))
        rep.add(f"R = 0 on {label}", w is None, w)
    return rep


# -- eigenbundle formulas ---------------------------------------------------------------


def _as_form_on(frame: IsoFrame, section: Section, kappa) -> AltTensor:
    """A section of the dual bundle as a 1-form on ``frame`` through kappa <., .>."""
    comps = {}
    for m, s in enumerate(frame):
        v = pairing(section, s).scale(kappa.pair)
        if not v.is_zero():
            comps[(m,)] = v
    return AltTensor(frame, 1, comps, _trusted=True)


def _one_form_values(w: AltTensor, n):
    return [w[(m,)] for m in range(n)]


def _conj_omega_on_L(pair: DualPair, omega: AltTensor) -> AltTensor:
    """conj(Omega) as a 2-form on the L frame."""
    frL, frS = pair.frameL, pair.frameLstar
    cs = [frS.coords(s.conj()) for s in frL]
    comps = {}
    for a in range(pair.n):
        for b in range(a + 1, pair.n):
            v = evaluate_form(omega, [cs[a], cs[b]]).conj()
            if not v.is_zero():
                comps[(a, b)] = v
    return AltTensor(frL, 2, comps, _trusted=True)


def nabla_eigen_identities(C: HXConnection, pair: DualPair, omega: AltTensor, omega_sharp: Endo) -> Report:
    """The four eigenbundle formulas for nabla, each side computed independently.

    nabla_X xi = i_X d_L xi,  nabla_xi X = i_xi d_{L*} X,
    nabla_X Y = -Omega#(i_X L_Y conj Omega),  nabla_xi eta = -conj(Omega#)(i_xi L_eta Omega).
    """
    rep = Report("nabla on eigenbundles")
    frL, frS, kappa, n = pair.frameL, pair.frameLstar, pair.kappa, pair.n
    conj_sharp = omega_sharp.conj()
    conj_omega = _conj_omega_on_L(pair, omega)
    ones = [[Scalar.one(frL.vars) if m == a else Scalar.zero(frL.vars) for m in range(n)] for a in range(n)]
    w = {"X xi": None, "xi X": None, "X Y": None, "xi eta": None}
    for a in range(n):
        X, xi = frL[a], frS[a]
        for b in range(n):
            Y, eta = frL[b], frS[b]
            if w["X xi"] is None:
                lhs = nabla(C, X, eta)
                alpha = frame_interior(ones[a], algebroid_d(frL, _as_form_on(frL, eta, kappa)))
                rhs = frS.combine(_one_form_values(alpha, n))
                if lhs != rhs:
                    w["X xi"] = {"pair": [a, b], "lhs": lhs, "rhs": rhs}
            if w["xi X"] is None:
                lhs = nabla(C, xi, Y)
                alpha = frame_interior(ones[a], algebroid_d(frS, _as_form_on(frS, Y, kappa)))
                rhs = frL.combine(_one_form_values(alpha, n))
                if lhs != rhs:
                    w["xi X"] = {"pair": [a, b], "lhs": lhs, "rhs": rhs}
            if w["X Y"] is None:
                lhs = nabla(C, X, Y)
                alpha = frame_interior(ones[a], algebroid_lie(frL, Y, conj_omega))
                rhs = -omega_sharp(frS.combine(_one_form_values(alpha, n)))
                if lhs != rhs:
                    w["X Y"] = {"pair": [a, b], "lhs": lhs, "rhs": rhs}
            if w["xi eta"] is None:
                lhs = nabla(C, xi, eta)
                alpha = frame_interior(ones[a], algebroid_lie(frS, eta, omega))
                rhs = -conj_sharp(frL.combine(_one_form_values(alpha, n)))
                if lhs != rhs:
                    w["xi eta"] = {"pair": [a, b], "lhs": lhs, "rhs": rhs}
    rep.add("nabla_X xi = i_X d_L xi", w["X xi"] is None, w["X xi"])
    rep.add("nabla_xi X = i_xi d_L* X", w["xi X"] is None, w["xi X"])
    rep.add("nabla_X Y = -Omega#(i_X L_Y conj Omega)", w["X Y"] is None, w["X Y"])
    rep.add("nabla_xi eta = -conj(Omega#)(i_xi L_eta Omega)", w["xi eta"] is None, w["xi eta"])
    return rep


def parallel_section_check(C: HXConnection, V: Section, omega_sharp: Endo, pairs: dict | None = None) -> Report:
    """Three equivalent descriptions of nabla V = 0.

    ``pairs`` may supply eigenframes keyed by "I", "J", "K"; the one for J must be
    the frame on which Omega is built.
    """
    from .holosym import HoloSymp

    rep = Report("parallel section")
    members = dict(C.triple.members())
    pairs = dict(pairs or {})
    for name in "IJK":
        if name not in pairs:
            pairs[name] = eigenframe(members[name])
    w = None
    for a, U in enumerate(standard_frame(C.backend)):
        r = nabla(C, U, V)
        if not r.is_zero():
            w = {"direction": a, "value": r}
            break
    cond_a = w is None
    rep.add("nabla V = 0", cond_a, w)

    def d_closed(name):
        A, pair = members[name], pairs[name]
        xi = V + A(V).scale(I_UNIT)
        d = algebroid_d(pair.frameL, _as_form_on(pair.frameL, xi, pair.kappa))
        return d.is_zero(), (None if d.is_zero() else {"structure": name, "d": d}), xi

    results = {name: d_closed(name) for name in "IJK"}
    cond_b = all(r[0] for r in results.values())
    wb = next((r[1] for r in results.values() if not r[0]), None)
    rep.add("d_{L_A}(V + iAV) = 0 for A = I, J, K", cond_b, wb)

    pJ = pairs["J"]
    H = HoloSymp(C.triple.J, omega_sharp, pJ)
    xiJ = results["J"][2]
    lie = algebroid_lie(pJ.frameLstar, xiJ, H.omega)
    cond_c = results["J"][0] and lie.is_zero()
    wc = None if cond_c else {"d_L": results["J"][1], "lie": None if lie.is_zero() else lie}
    rep.add("d_{L_J}(V + iJV) = 0 and L_{V+iJV} Omega = 0", cond_c, wc)
    rep.info["conditions"] = {"nabla": cond_a, "three structures": cond_b, "J and Omega": cond_c}
    rep.add("conditions agree", cond_a == cond_b == cond_c)
    return rep


# -- restriction to subbundles ----------------------------------------------------------


@dataclass
class Restriction:
    frame: IsoFrame
    mode: str
    table: dict

    def to_json(self, limit=None):
        return {
            "mode": self.mode,
            "frame": self.frame.label,
            "rank": self.frame.rank,
            "christoffel": {f"{a},{b}": [str(c) for c in v] for (a, b), v in self.table.items()},
        }


def _stability_witness(C: HXConnection, frame: IsoFrame):
    for name, A in C.triple.members():
        for a, s in enumerate(frame):
            if not frame.in_span(A(s)):
                return {"structure": name, "section": a}
    return None


def _verify_restricted(C: HXConnection, frame: IsoFrame, rep: Report, require_flat: bool):
    secs = list(frame)
    r = len(secs)
    table = {}
    closure = None
    for a in range(r):
        for b in range(r):
            v = nabla(C, secs[a], secs[b])
            try:
                table[(a, b)] = frame.coords(v)
            except NotInSpan:
                closure = closure or {"pair": [a, b], "value": v}
    rep.add("closed under nabla", closure is None, closure)
    tw = None
    if closure is None:
        for a in range(r):
            for b in range(a + 1, r):
                t = nabla(C, secs[a], secs[b]) - nabla(C, secs[b], secs[a]) - skew_bracket(secs[a], secs[b])
                if not t.is_zero():
                    tw = {"pair": [a, b], "torsion": t}
                    break
            if tw:
                break
    rep.add("torsion-free", closure is None and tw is None, tw)
    fw = _curvature_witness(C, secs) if closure is None else {"reason": "not closed"}
    if require_flat:
        rep.add("flat", fw is None, fw)
    else:
        rep.info["flat"] = fw is None
    return table


def restrict(C: HXConnection, frame: IsoFrame, mode="dirac", holo=None, require_flat=None):
    """Restrict nabla to a Dirac frame (stable under I, J, K) or a Lagrangian frame in L*.

    The Lagrangian path needs ``holo``, the holomorphic symplectic structure of the triple.
    Returns (Restriction, Report).
    """
    rep = Report(f"restriction to {frame.label}")
    if mode == "lagrangian":
        if holo is None:
            raise ValueError("the Lagrangian path needs the holomorphic symplectic structure")
        try:
            sub = subalgebroid_check(frame, holo.pair, holo.omega)
        except NotInSpan as exc:
            raise NotLagrangian(f"frame leaves L*: {exc}") from exc
        if not sub.ok:
            raise NotLagrangian("frame is not Lagrangian: " + ", ".join(c.name for c in sub.failures()))
        rep.extend(sub, "lagrangian: ")
        flat = True if require_flat is None else require_flat
    elif mode == "dirac":
        iso = frame.isotropy_defect()
        if iso is not None:
            raise NotStable("frame is not isotropic", iso)
        if 2 * frame.rank != C.backend.rank:
            raise NotStable("frame is not maximal isotropic", {"rank": frame.rank})
        w = _stability_witness(C, frame)
        if w is not None:
            raise NotStable(f"frame is not stable under {w['structure']}", w)
        closure = frame.closure_defect()
        rep.add("dirac: involutive", closure is None, closure)
        rep.add("dirac: stable under I, J, K", True)
        flat = bool(require_flat)
    else:
        raise ValueError(f"unknown restriction mode {mode!r}")
    table = _verify_restricted(C, frame, rep, flat)
    rep.info["mode"] = mode
    return Restriction(frame, mode, table), rep


def dirac_frame(C: HXConnection, sections, label="D") -> IsoFrame:
    return certify(C.backend, sections, label=label)


def tangent_sections(backend, vectors=(), forms=()):
    """Sections (Y, 0) and (0, alpha) of T + T* from vector fields and 1-forms."""
    n = backend.n
    zero = [Scalar.zero(backend.vars)] * n
    out = [Section(backend, list(components(Y)) + zero) for Y in vectors]
    out += [Section(backend, zero + list(components(a))) for a in forms]
    return out


def foliation_frame(backend, vectors, conormals, label="L") -> IsoFrame:
    """Certified frame of a foliation's (1,0) fields together with (0,1) conormal forms."""
    return certify(backend, tangent_sections(backend, vectors, conormals), label=label)


def tangent_block(restriction: Restriction, vectors) -> dict:
    """Christoffel symbols of the sections (Y_a, 0) of the restricted frame, indexed like ``vectors``."""
    fr = restriction.frame
    backend = fr.backend
    n = backend.n
    index = []
    for Y in vectors:
        target = Section(backend, list(components(Y)) + [Scalar.zero(backend.vars)] * n)
        pos = next((m for m, s in enumerate(fr) if s == target), None)
        if pos is None:
            raise NotInSpan("vector field is not a member of the restricted frame")
        index.append(pos)
    out = {}
    for a, ia in enumerate(index):
        for b, ib in enumerate(index):
            row = restriction.table[(ia, ib)]
            if any(not row[m].is_zero() for m in range(fr.rank) if m not in index):
                raise NotInSpan("nabla leaves the tangent part of the frame")
            out[(a, b)] = [row[m] for m in index]
    return out


# -- foliation formulas -----------------------------------------------------------------


class _VectorFrame:
    """Coordinates of vector fields in a certified frame of tangent vector fields."""

    def __init__(self, vectors):
        self.vectors = list(vectors)
        chart = self.vectors[0].space
        self.vars = tuple(chart.vars)
        self.m = Matrix(self.vars, [[components(Y)[r] for Y in self.vectors] for r in range(chart.dim)])
        try:
            self.rows, _ = unit_minor(self.m)
        except NoUnitMinor as exc:
            raise NotLagrangianFoliation("frame vectors are not certifiably independent") from exc
        sub = Matrix(self.vars, [self.m.rows[r] for r in self.rows])
        self.inv = inverse(sub)

    def coords(self, Z: MultiVec):
        comps = components(Z)
        c = self.inv.apply([comps[r] for r in self.rows])
        back = self.m.apply(c)
        if any(x != y for x, y in zip(back, comps)):
            raise NotInSpan("vector field is outside the frame span")
        return c

    def in_span(self, Z) -> bool:
        try:
            self.coords(Z)
            return True
        except NotInSpan:
            return False


def _matvec(m: Matrix, Y: MultiVec) -> MultiVec:
    return vector(Y.space, m.apply(components(Y)))


def _table(frame: _VectorFrame, fn) -> dict:
    vs = frame.vectors
    return {(a, b): frame.coords(fn(vs[a], vs[b])) for a in range(len(vs)) for b in range(len(vs))}


def _involution_witness(frame: _VectorFrame):
    vs = frame.vectors
    for a in range(len(vs)):
        for b in range(a + 1, len(vs)):
            if not frame.in_span(lie_bracket(vs[a], vs[b])):
                return [a, b]
    return None


def behrend_fantechi(omega: DiffForm, j: TanEndo, vectors) -> dict:
    """nabla_X Y = omega^{-1}(i_X d'(omega(Y))) on a Lagrangian foliation in T^{1,0}."""
    chart = j.chart
    if not is_integrable(j):
        raise NotLagrangianFoliation("j is not integrable")
    if not type_project(omega, j, 2, 0) == omega:
        raise NotLagrangianFoliation("omega is not of type (2,0)")
    from .chartcalc import ext_d

    if not ext_d(omega).is_zero():
        raise NotLagrangianFoliation("omega is not closed")
    ws = form_sharp(omega)
    both = ws + ws.conj()
    try:
        winv = inverse(both)
    except ZeroDivisionError as exc:
        raise NotLagrangianFoliation("omega is degenerate") from exc
    fr = _VectorFrame(vectors)
    p10 = projector_10(j)
    for a, Y in enumerate(fr.vectors):
        if _matvec(p10, Y) != Y:
            raise NotLagrangianFoliation(f"frame vector {a} is not of type (1,0)")
    if 4 * len(fr.vectors) != chart.dim:
        raise NotLagrangianFoliation("frame is not half of T^{1,0}")
    for a in range(len(fr.vectors)):
        for b in range(a + 1, len(fr.vectors)):
            v = interior(fr.vectors[b], interior(fr.vectors[a], omega))
            if not v.is_zero():
                raise NotLagrangianFoliation(f"omega does not vanish on frame pair ({a}, {b})")
    w = _involution_witness(fr)
    if w is not None:
        raise NotLagrangianFoliation(f"frame pair {w} is not involutive")

    def formula(X, Y):
        alpha = interior(X, dpartial(interior(Y, omega), j))
        Z = vector(chart, winv.apply(components(alpha)))
        if _matvec(p10, Z) != Z:
            raise NotLagrangianFoliation("omega^{-1} image left T^{1,0}")
        return Z

    return _table(fr, formula)


def hypercomplex_foliation_connection(theta_sharp: Matrix, j: TanEndo, vectors) -> dict:
    """nabla_X Y = -theta(i_X d'(conj(theta)(Y))) on a hypercomplex foliation, frame in T^{1,0}.

    ``theta_sharp`` maps T^{0,1} to T^{1,0} and kills T^{1,0}; i and k are recovered from it.
    """
    tb = theta_sharp.conj()
    i_mat = theta_sharp + tb
    k_mat = (theta_sharp - tb).scale(GaussRat(0, -1))
    try:
        fr = _VectorFrame(vectors)
    except NotLagrangianFoliation as exc:
        raise NotStableFoliation(str(exc)) from exc
    conj_fr = _VectorFrame([Y.conj() for Y in fr.vectors])
    p01 = projector_01(j)
    for a, Y in enumerate(fr.vectors):
        if _matvec(j.matrix, Y) != Y.scale(I_UNIT):
            raise NotStableFoliation(f"frame vector {a} is not of type (1,0) for j")
        for name, m in (("i", i_mat), ("k", k_mat)):
            if not conj_fr.in_span(_matvec(m, Y)):
                raise NotStableFoliation(f"frame is not stable under {name}")
    if _involution_witness(fr) is not None:
        raise NotStableFoliation("frame is not involutive")

    def formula(X, Y):
        W = _matvec(tb, Y)
        dW = _matvec(p01, lie_bracket(X, W))
        return -_matvec(theta_sharp, dW)

    return _table(fr, formula)


def lagrangian_real_formula(w1: DiffForm, w2: DiffForm, j: TanEndo, X: MultiVec, Y: MultiVec) -> MultiVec:
    """1/2 (w2^{-1})#((L_{jY} w1)# X + j*((L_Y w1)# X)) evaluated literally."""
    jY = j.apply(Y)
    a = interior(X, lie_derivative(jY, w1))
    b = j.dual_apply(interior(X, lie_derivative(Y, w1)))
    inv = inverse(form_sharp(w2))
    return vector(j.chart, inv.apply(components(a + b))).scale(HALF)


def real_formula_crosscheck(w1: DiffForm, w2: DiffForm, j: TanEndo, bf_vectors, bf_table: dict) -> Report:
    """Compare the literal real formula, projected to T^{1,0}, with the (1,0) table on real parts."""
    rep = Report("real Lagrangian formula")
    p10 = projector_10(j)
    fr = _VectorFrame(bf_vectors)
    reals = [Y + Y.conj() for Y in fr.vectors]
    agree, opposite, witness = True, True, None
    for a, Xr in enumerate(reals):
        for b, Yr in enumerate(reals):
            lit = _matvec(p10, lagrangian_real_formula(w1, w2, j, Xr, Yr))
            ref = _combine_vectors(fr.vectors, bf_table[(a, b)], j.chart)
            if lit != ref:
                agree = False
                witness = witness or {"pair": [a, b], "formula": lit, "table": ref}
            if lit != -ref:
                opposite = False
    rep.info["agrees"] = agree
    rep.info["agrees up to sign"] = opposite
    rep.add("formula matches the (1,0) table", agree, witness)
    return rep


def _combine_vectors(vectors, coeffs, chart) -> MultiVec:
    out = [Scalar.zero(chart.vars)] * chart.dim
    for c, Y in zip(coeffs, vectors):
        out = [o + c * y for o, y in zip(out, components(Y))]
    return vector(chart, out)


def table_is_zero(table: dict) -> bool:
    return all(all(c.is_zero() for c in v) for v in table.values())


def tables_equal(t1: dict, t2: dict) -> bool:
    return t1.keys() == t2.keys() and all(all(x == y for x, y in zip(t1[k], t2[k])) for k in t1)


def vector_table_report(vectors, table: dict) -> Report:
    """Torsion-freeness and flatness of a Christoffel table on vector fields."""
    rep = Report("tangent connection")
    fr = _VectorFrame(vectors)
    vs = fr.vectors
    chart = vs[0].space
    r = len(vs)

    def nab(a, Z):
        """nabla_{Y_a} Z for Z = sum c_b Y_b."""
        c = fr.coords(Z)
        acc = [Scalar.zero(chart.vars)] * chart.dim
        for b, cb in enumerate(c):
            dcb = _apply(vs[a], cb)
            g = components(_combine_vectors(vs, table[(a, b)], chart))
            yb = components(vs[b])
            acc = [x + dcb * y + cb * z for x, y, z in zip(acc, yb, g)]
        return vector(chart, acc)

    tw = None
    for a in range(r):
        for b in range(a + 1, r):
            t = nab(a, vs[b]) - nab(b, vs[a]) - lie_bracket(vs[a], vs[b])
            if not t.is_zero():
                tw = tw or {"pair": [a, b], "torsion": t}
    rep.add("torsion-free", tw is None, tw)
    fw = None
    for a in range(r):
        for b in range(a + 1, r):
            br = fr.coords(lie_bracket(vs[a], vs[b]))
            for c in range(r):
                lhs = nab(a, nab(b, vs[c])) - nab(b, nab(a, vs[c]))
                acc = vector(chart, [Scalar.zero(chart.vars)] * chart.dim)
                for m, cm in enumerate(br):
                    if not cm.is_zero():
                        acc = acc + nab(m, vs[c]).scale(cm)
                R = lhs - acc
                if not R.is_zero():
                    fw = fw or {"slots": [a, b, c], "value": R}
    rep.add("flat", fw is None, fw)
    return rep


def _apply(Y: MultiVec, f: Scalar) -> Scalar:
    acc = Scalar.zero(f.vars)
    for a, y in enumerate(components(Y)):
        if not y.is_zero():
            acc = acc + y * f.partial(a)
    return acc


# -- uniqueness -------------------------------------------------------------------------


def _bilinear(table: dict, backend, U: Section, V: Section) -> Section:
    out = Section.zero(backend)
    for a, u in enumerate(U.coeffs):
        if u.is_zero():
            continue
        for b, v in enumerate(V.coeffs):
            if v.is_zero():
                continue
            out = out + table[(a, b)].scale(u * v)
    return out


def uniqueness_report(C: HXConnection, xi: dict) -> Report:
    """Run the difference argument on a bilinear map given by frame values ``xi[(a, b)]``.

    If xi is A-equivariant in its second slot and symmetric, the chain
    K xi(U,U) = xi(U,KU) = xi(KU,U) = -I xi(KU,IU) = -I xi(IU,KU) = -IK xi(IU,U)
    = -IK xi(U,IU) = -IKI xi(U,U) = -K xi(U,U) forces xi(U,U) = 0 and hence xi = 0.
    """
    T = C.triple
    B = C.backend
    fr = standard_frame(B)
    r = len(fr)
    rep = Report("uniqueness")

    def X(U, V):
        return _bilinear(xi, B, U, V)

    eq = None
    for name, A in T.members():
        for a in range(r):
            for b in range(r):
                if X(fr[a], A(fr[b])) != A(xi[(a, b)]):
                    eq = eq or {"structure": name, "pair": [a, b]}
    sym = None
    for a in range(r):
        for b in range(a + 1, r):
            if xi[(a, b)] != xi[(b, a)]:
                sym = sym or [a, b]
    hyp = eq is None and sym is None
    rep.info["equivariant"] = eq is None
    rep.info["symmetric"] = sym is None
    I, K = T.I, T.K
    chain_ok = True
    for U in fr:
        IU, KU = I(U), K(U)
        chain = [
            K(X(U, U)),
            X(U, KU),
            X(KU, U),
            -I(X(KU, IU)),
            -I(X(IU, KU)),
            -I(K(X(IU, U))),
            -I(K(X(U, IU))),
            -I(K(I(X(U, U)))),
        ]
        links = all(chain[m] == chain[m + 1] for m in range(len(chain) - 1))
        closing = (chain[0] + chain[-1]).is_zero()
        chain_ok = chain_ok and closing and (links or not hyp)
    rep.add("chain closes with a sign flip", chain_ok)
    zero = all(v.is_zero() for v in xi.values())
    rep.add("hypotheses force xi = 0", zero or not hyp, None if zero else {"equivariant": eq, "symmetric": sym})
    return rep


def equivariant_projection(C: HXConnection, table: dict) -> dict:
    """xi(U,V) = 1/4 (b(U,V) - I b(U,IV) - J b(U,JV) - K b(U,KV)), A-equivariant in V."""
    B = C.backend
    fr = standard_frame(B)
    quarter = GaussRat(mpq(1, 4))
    out = {}
    for a, U in enumerate(fr):
        for b, V in enumerate(fr):
            acc = table[(a, b)]
            for _, A in C.triple.members():
                acc = acc - A(_bilinear(table, B, U, A(V)))
            out[(a, b)] = acc.scale(quarter)
    return out


def symmetrization(table: dict) -> dict:
    return {(a, b): (v + table[(b, a)]).scale(HALF) for (a, b), v in table.items()}


def christoffel(C: HXConnection) -> dict:
    """nabla on standard frame pairs."""
    fr = standard_frame(C.backend)
    return {(a, b): nabla(C, fr[a], fr[b]) for a in range(len(fr)) for b in range(len(fr))}

"""Eigenbundle calculus for a complex structure J on a Courant algebroid.

``L`` is the +i eigenbundle of J (projection (1 - iJ)/2) and ``L*`` the -i
eigenbundle (projection (1 + iJ)/2).  Both are spanned by certified frames:
an :class:`IsoFrame` either carries a square minor of its coefficient matrix
with nonzero constant determinant, or a dual frame for the other eigenbundle.

``L`` and ``L*`` are identified with each other's duals through
``DUALITY_FACTOR * <., .>``.  A k-form on the frame xi_1..xi_n of L* is stored
with the same components as the k-vector on the dual frame X_1..X_n of L.
"""

from __future__ import annotations

from itertools import combinations

from gmpy2 import mpq

from .courant import Section, anchor_vector, dorfman, frame as standard_frame, pairing
from .endo import Endo, complex_structure_check
from .errors import ConstructionError, NoUnitMinor, NotInSpan, NotInvolutive
from .graded import AlgebroidData, AltTensor, schouten as graded_schouten
from .linalg import Matrix, inverse, minor_det, unit_minor
from .report import Report
from .scalars import GaussRat, Scalar

DUALITY_FACTOR = GaussRat(1)
I_UNIT = GaussRat(0, 1)
HALF = GaussRat(mpq(1, 2))


class IsoFrame:
    """Ordered sections spanning an isotropic subbundle, with an independence certificate."""

    def __init__(self, backend, sections, rows=None, det=None, dual=None, label="frame", kappa=None):
        self.backend = backend
        self.sections = tuple(sections)
        self.label = label
        self.rows = tuple(rows) if rows is not None else None
        self.det = det
        self.dual = tuple(dual) if dual is not None else None
        self.kappa = DUALITY_FACTOR if kappa is None else kappa
        if self.rows is None and self.dual is None:
            raise ConstructionError("an IsoFrame needs a unit minor or a dual frame")
        self._alg = None
        self._minv = None

    @property
    def vars(self):
        return tuple(self.backend.vars)

    @property
    def dim(self) -> int:
        return len(self.sections)

    @property
    def rank(self) -> int:
        return len(self.sections)

    def __repr__(self):
        return f"IsoFrame({self.label}, rank={self.rank})"

    def __iter__(self):
        return iter(self.sections)

    def __getitem__(self, a):
        return self.sections[a]

    def matrix(self) -> Matrix:
        return Matrix(self.vars, [[s.coeffs[r] for s in self.sections] for r in range(self.backend.rank)])

    def combine(self, coeffs) -> Section:
        out = Section.zero(self.backend)
        for c, s in zip(coeffs, self.sections):
            if not c.is_zero():
                out = out + s.scale(c)
        return out

    def raw_coords(self, e: Section):
        """Coefficients assuming e lies in the span (not verified)."""
        if self.dual is not None:
            return [pairing(e, d).scale(self.kappa.pair) for d in self.dual]
        if self._minv is None:
            sub = Matrix(self.vars, [[s.coeffs[r] for s in self.sections] for r in self.rows])
            self._minv = inverse(sub)
        return self._minv.apply([e.coeffs[r] for r in self.rows])

    def coords(self, e: Section):
        """Coefficients of e in this frame; raises NotInSpan if e is outside."""
        c = self.raw_coords(e)
        if self.combine(c) != e:
            raise NotInSpan(f"section is not in the span of {self.label}")
        return c

    def in_span(self, e: Section) -> bool:
        try:
            self.coords(e)
            return True
        except NotInSpan:
            return False

    def isotropy_defect(self):
        for a in range(self.rank):
            for b in range(a, self.rank):
                p = pairing(self.sections[a], self.sections[b])
                if not p.is_zero():
                    return {"pair": [a, b], "pairing": p}
        return None

    def conj(self, label=None) -> "IsoFrame":
        secs = [s.conj() for s in self.sections]
        dual = [d.conj() for d in self.dual] if self.dual is not None else None
        det = self.det.conj() if self.det is not None else None
        return IsoFrame(self.backend, secs, self.rows, det, dual, label or f"conj({self.label})", self.kappa)

    # -- Lie algebroid data ---------------------------------------------------------

    def closure_defect(self):
        """First pair whose bracket leaves the span, or None."""
        try:
            self.algebroid()
            return None
        except NotInvolutive as exc:
            return exc.witness

    def is_involutive(self) -> bool:
        return self.closure_defect() is None

    def algebroid(self) -> AlgebroidData:
        """Anchor and structure functions of the restricted Dorfman bracket."""
        if self._alg is not None:
            return self._alg
        anchor = []
        for s in self.sections:
            if self.backend.kind == "chart":
                anchor.append(anchor_vector(s))
            else:
                anchor.append([])
        structure = {}
        for a in range(self.rank):
            for b in range(a + 1, self.rank):
                br = dorfman(self.sections[a], self.sections[b])
                c = self.raw_coords(br)
                residual = br - self.combine(c)
                if not residual.is_zero():
                    raise NotInvolutive(f"{self.label} is not closed under the bracket", {"pair": [a, b], "defect": residual})
                structure[(a, b)] = {m: v for m, v in enumerate(c) if not v.is_zero()}
        self._alg = AlgebroidData(self.vars, self.rank, anchor, structure)
        return self._alg


def frame_form(frame: IsoFrame, degree: int, comps) -> AltTensor:
    return AltTensor(frame, degree, comps)


def zero_form(frame: IsoFrame, degree: int) -> AltTensor:
    return AltTensor.zero(frame, degree)


def function_form(frame: IsoFrame, f: Scalar) -> AltTensor:
    return AltTensor(frame, 0, {(): f} if not f.is_zero() else {}, _trusted=True)


def respace(t: AltTensor, frame: IsoFrame) -> AltTensor:
    """Same components, reinterpreted over another frame (e.g. L* forms as L multivectors)."""
    if frame.rank != t.space.dim:
        raise ValueError("frame ranks differ")
    return AltTensor(frame, t.degree, dict(t.comps), _trusted=True)


def certify(backend, sections, preferred=(), label="frame", kappa=None) -> IsoFrame:
    m = Matrix(tuple(backend.vars), [[s.coeffs[r] for s in sections] for r in range(backend.rank)])
    rows, det = unit_minor(m, preferred)
    return IsoFrame(backend, sections, rows, det, None, label, kappa)


# -- the eigenframe pair ------------------------------------------------------------------


class DualPair:
    """Frames of L (+i) and L* (-i) for J with kappa <X_a, xi_b> = delta_ab."""

    def __init__(self, J: Endo, frameL: IsoFrame, frameLstar: IsoFrame):
        self.J = J
        self.backend = J.backend
        self.frameL = frameL
        self.frameLstar = frameLstar
        self.kappa = frameLstar.kappa

    @property
    def n(self) -> int:
        return self.frameLstar.rank

    def project_L(self, e: Section) -> Section:
        return projector_L(self.J)(e)

    def project_Lstar(self, e: Section) -> Section:
        return projector_Lstar(self.J)(e)

    def duality_matrix(self) -> Matrix:
        k = self.kappa.pair
        return Matrix(
            self.frameL.vars,
            [[pairing(X, xi).scale(k) for xi in self.frameLstar] for X in self.frameL],
        )

    def conj_to_Lstar(self, X: Section):
        """Coordinates of conj(X) in the L* frame, for X in L."""
        return self.frameLstar.coords(X.conj())


def projector_L(J: Endo) -> Endo:
    one = Endo.identity(J.backend)
    return (one - J.scale(I_UNIT)).scale(HALF)


def projector_Lstar(J: Endo) -> Endo:
    one = Endo.identity(J.backend)
    return (one + J.scale(I_UNIT)).scale(HALF)


def _gram_inverse(backend) -> Matrix:
    if backend.kind == "chart":
        n = backend.n
        z = Matrix.zeros(backend.vars, n)
        two = Matrix.identity(backend.vars, n).scale(2)
        return Matrix.block([[z, two], [two, z]])
    g = Matrix((), [[Scalar.const((), x) for x in row] for row in backend.pairing])
    return inverse(g)


def dual_sections(frameLstar: IsoFrame, J: Endo, kappa=None):
    """Sections X_a in L with kappa <X_a, xi_b> = delta_ab.

    With R the certified rows of the L* frame and u_r the section with
    <u_r, Z> = Z_r, take X_a = P_L(sum_r v_r u_r) where M_R^T v = e_a / kappa.
    """
    kappa = frameLstar.kappa if kappa is None else kappa
    backend = frameLstar.backend
    R = frameLstar.rows
    n = frameLstar.rank
    ginv = _gram_inverse(backend)
    u = {r: Section(backend, [ginv[s, r] for s in range(backend.rank)]) for r in R}
    MR = Matrix(frameLstar.vars, [[frameLstar.sections[b].coeffs[r] for b in range(n)] for r in R])
    MRT_inv = inverse(MR.T())
    PL = projector_L(J)
    kinv = kappa.inverse().pair
    out = []
    for a in range(n):
        v = [MRT_inv[k, a].scale(kinv) for k in range(n)]
        Y = Section.zero(backend)
        for k, r in enumerate(R):
            if not v[k].is_zero():
                Y = Y + u[r].scale(v[k])
        out.append(PL(Y))
    return out


def eigenframe(J: Endo, seed: IsoFrame | None = None, check=True) -> DualPair:
    """Certified frames for L_J and L_J* built from projections of the standard frame."""
    if check:
        rep = complex_structure_check(J)
        if not rep.ok:
            raise ConstructionError("J is not a complex structure: " + ", ".join(c.name for c in rep.failures()))
    backend = J.backend
    PLs = projector_Lstar(J)
    if seed is not None:
        frameLstar = seed
        for s in seed:
            if PLs(s) != s:
                raise NotInSpan("seed section is not in the -i eigenbundle")
    else:
        frameLstar = _projected_frame(backend, PLs)
    bad = frameLstar.isotropy_defect()
    if bad is not None:
        raise ConstructionError(f"eigenframe is not isotropic: {bad}")
    if frameLstar.rows is None:
        raise ConstructionError("the L* frame needs a unit-minor certificate")
    duals = dual_sections(frameLstar, J)
    Lstar = IsoFrame(backend, frameLstar.sections, frameLstar.rows, frameLstar.det, duals, "L*", frameLstar.kappa)
    L = IsoFrame(backend, duals, None, None, Lstar.sections, "L", frameLstar.kappa)
    pair = DualPair(J, L, Lstar)
    ident = pair.duality_matrix()
    if ident != Matrix.identity(L.vars, L.rank):
        raise ConstructionError("dual frame construction failed")
    return pair


def _projected_frame(backend, PLs: Endo) -> IsoFrame:
    cols = [PLs(e) for e in standard_frame(backend)]
    r = backend.rank
    n = r // 2
    m = PLs.matrix
    # principal minors first, then any rows for each column choice
    choices = list(combinations(range(r), n))
    for S in choices:
        d = minor_det(m, S, S)
        if d.is_constant() and not d.is_zero():
            return IsoFrame(backend, [cols[c] for c in S], S, d.constant_value(), None, "L*")
    for S in choices:
        sub = Matrix(m.vars, [[m[row, c] for c in S] for row in range(r)])
        try:
            rows, det = unit_minor(sub)
        except NoUnitMinor:
            continue
        return IsoFrame(backend, [cols[c] for c in S], rows, det, None, "L*")
    raise NoUnitMinor("no projected standard-frame sections with a unit minor; supply a seed frame")


# -- Cartan calculus on a frame ----------------------------------------------------------


def algebroid_d(frame: IsoFrame, w: AltTensor) -> AltTensor:
    """Koszul differential of the Lie algebroid spanned by an involutive frame."""
    alg = frame.algebroid()
    return koszul(alg, frame, w)


def koszul(alg: AlgebroidData, space, w: AltTensor) -> AltTensor:
    k = w.degree
    r = alg.rank
    out = {}
    for idx in combinations(range(r), k + 1):
        acc = Scalar.zero(alg.vars)
        for i in range(k + 1):
            rest = idx[:i] + idx[i + 1 :]
            val = w[rest]
            if not val.is_zero():
                t = alg.rho(idx[i], val)
                acc = acc - t if i % 2 else acc + t
        for i in range(k + 1):
            for j in range(i + 1, k + 1):
                br = alg.bracket_basis(idx[i], idx[j])
                if not br:
                    continue
                rest = idx[:i] + idx[i + 1 : j] + idx[j + 1 :]
                for m, c in br.items():
                    val = w[(m,) + rest]
                    if not val.is_zero():
                        t = c * val
                        acc = acc - t if (i + j) % 2 else acc + t
        if not acc.is_zero():
            out[idx] = acc
    return AltTensor(space, k + 1, out, _trusted=True)


def frame_interior(coeffs, w: AltTensor) -> AltTensor:
    """Contract a frame vector (coefficient list) into the first slot of a frame form."""
    if w.degree == 0:
        return AltTensor.zero(w.space, 0)
    out = {}
    for idx, c in w.comps.items():
        for pos, a in enumerate(idx):
            x = coeffs[a]
            if x.is_zero():
                continue
            rest = idx[:pos] + idx[pos + 1 :]
            t = x * c
            if pos % 2:
                t = -t
            out[rest] = out[rest] + t if rest in out else t
    return AltTensor(w.space, w.degree - 1, {k: v for k, v in out.items() if not v.is_zero()}, _trusted=True)


def evaluate_form(w: AltTensor, coord_lists) -> Scalar:
    """w(v_1, ..., v_k) for vectors given by frame coefficient lists."""
    acc = w
    for c in coord_lists:
        acc = frame_interior(c, acc)
    return acc.comps.get((), Scalar.zero(w.vars))


def algebroid_lie(frame: IsoFrame, xi: Section, w: AltTensor) -> AltTensor:
    """L_xi = i_xi d + d i_xi on frame forms."""
    c = frame.coords(xi)
    return algebroid_lie_coords(frame, c, w)


def algebroid_lie_coords(frame: IsoFrame, c, w: AltTensor) -> AltTensor:
    out = frame_interior(c, algebroid_d(frame, w))
    if w.degree > 0:
        out = out + algebroid_d(frame, frame_interior(c, w))
    return out


def algebroid_lie_koszul(frame: IsoFrame, xi: Section, w: AltTensor) -> AltTensor:
    """(L_xi w)(a_1..a_k) = rho(xi) w(a..) - sum_i w(.., [xi, a_i], ..), from section brackets."""
    frame.coords(xi)
    brackets = [frame.coords(dorfman(xi, s)) for s in frame]
    k = w.degree
    out = {}
    for idx in combinations(range(frame.rank), k):
        acc = _rho_section(frame, xi, w[idx])
        for pos, a in enumerate(idx):
            for m, cm in enumerate(brackets[a]):
                if not cm.is_zero():
                    acc = acc - cm * w[idx[:pos] + (m,) + idx[pos + 1 :]]
        if not acc.is_zero():
            out[idx] = acc
    return AltTensor(frame, k, out, _trusted=True)


def _rho_section(frame, s: Section, f: Scalar) -> Scalar:
    if frame.backend.kind != "chart":
        return Scalar.zero(f.vars)
    acc = Scalar.zero(f.vars)
    for a, x in enumerate(s.vec):
        if not x.is_zero():
            acc = acc + x * f.partial(a)
    return acc


# -- forms attached to an endomorphism Omega# ---------------------------------------------


def omega_frame_form(pair: DualPair, omega_sharp: Endo) -> AltTensor:
    """Omega(xi_a, xi_b) = kappa <Omega# xi_a, xi_b> on the L* frame."""
    fr = pair.frameLstar
    k = pair.kappa.pair
    images = [omega_sharp(x) for x in fr]
    comps = {}
    for a in range(fr.rank):
        for b in range(a + 1, fr.rank):
            v = pairing(images[a], fr[b]).scale(k)
            if not v.is_zero():
                comps[(a, b)] = v
    return AltTensor(fr, 2, comps, _trusted=True)


def sharp_of_form(pair: DualPair, w: AltTensor, xi_coords) -> Section:
    """For a 2-form w on L* (a bivector on L): w#(xi) = sum_b w(xi, xi_b) X_b."""
    fr = pair.frameL
    out = []
    for b in range(pair.n):
        unit = [Scalar.one(fr.vars) if m == b else Scalar.zero(fr.vars) for m in range(pair.n)]
        out.append(evaluate_form(w, [xi_coords, unit]))
    return fr.combine(out)


def schouten_L(pair: DualPair, P: AltTensor, Q: AltTensor) -> AltTensor:
    """Schouten bracket on sections of wedge L (components on the dual frame of L)."""
    alg = pair.frameL.algebroid()
    Pl, Ql = respace(P, pair.frameL), respace(Q, pair.frameL)
    out = graded_schouten(alg, Pl, Ql)
    return AltTensor(pair.frameLstar, out.degree, out.comps, _trusted=True)


def lie_L_on_Lstar(pair: DualPair, X_coords, eta_coords):
    """Lie derivative along X in L of eta in L* = L^dual, returned as L* coordinates."""
    frL = pair.frameL
    eta = AltTensor(frL, 1, {(m,): c for m, c in enumerate(eta_coords) if not c.is_zero()}, _trusted=True)
    res = algebroid_lie_coords(frL, X_coords, eta)
    return [res[(m,)] for m in range(pair.n)]


def d_L_function(pair: DualPair, f: Scalar):
    frL = pair.frameL
    res = algebroid_d(frL, function_form(frL, f))
    return [res[(m,)] for m in range(pair.n)]


def schouten_formula_bivector(pair: DualPair, omega: AltTensor):
    """Table (a, b) -> L-coordinates of the displayed expression

    Omega#(L_{Omega# xi_a} xi_b - L_{Omega# xi_b} xi_a + d_L <xi_a, Omega# xi_b>) - [Omega# xi_a, Omega# xi_b].
    """
    n = pair.n
    frL = pair.frameL
    vars_ = frL.vars
    unit = [[Scalar.one(vars_) if m == a else Scalar.zero(vars_) for m in range(n)] for a in range(n)]
    sharp = [[evaluate_form(omega, [unit[a], unit[b]]) for b in range(n)] for a in range(n)]
    alg = frL.algebroid()
    table = {}
    for a in range(n):
        for b in range(a + 1, n):
            la = lie_L_on_Lstar(pair, sharp[a], unit[b])
            lb = lie_L_on_Lstar(pair, sharp[b], unit[a])
            pa = sharp[a][b]  # kappa <xi_b, Omega# xi_a> up to orientation
            # <xi_a, Omega# xi_b> in the duality pairing equals Omega(xi_b, xi_a)
            dl = d_L_function(pair, -pa)
            eta = [x - y + z for x, y, z in zip(la, lb, dl)]
            first = [evaluate_form(omega, [eta, unit[c]]) for c in range(n)]
            X = AltTensor(frL, 1, {(m,): v for m, v in enumerate(sharp[a]) if not v.is_zero()}, _trusted=True)
            Y = AltTensor(frL, 1, {(m,): v for m, v in enumerate(sharp[b]) if not v.is_zero()}, _trusted=True)
            br = graded_schouten(alg, X, Y)
            table[(a, b)] = [f - br[(c,)] for c, f in enumerate(first)]
    return table


def trivector_sharp_table(T: AltTensor, n):
    """(a, b) -> coordinates of T(xi_a, xi_b, .)."""
    return {(a, b): [T[(a, b, c)] for c in range(n)] for a in range(n) for b in range(a + 1, n)}


def conj_form_on_L(pair: DualPair, w: AltTensor, sections) -> Scalar:
    """conj(w)(X_1, ..) := conj(w(conj X_1, ..)) for X_i in L and w a form on L*."""
    coords = [pair.frameLstar.coords(s.conj()) for s in sections]
    return evaluate_form(w, coords).conj()


def form_on_sections(pair: DualPair, w: AltTensor, sections) -> Scalar:
    coords = [pair.frameLstar.coords(s) for s in sections]
    return evaluate_form(w, coords)


def extended_form_value(pair: DualPair, w: AltTensor, sections) -> Scalar:
    """w extended to E by precomposition with the projection onto L*."""
    PLs = projector_Lstar(pair.J)
    return form_on_sections(pair, w, [PLs(s) for s in sections])


def conj_extended_form_value(pair: DualPair, w: AltTensor, sections) -> Scalar:
    """conj(w) extended to E by precomposition with the projection onto L."""
    PL = projector_L(pair.J)
    return conj_form_on_L(pair, w, [PL(s) for s in sections])


# -- subalgebroids ---------------------------------------------------------------------


def lagrangian_from_dirac(J: Endo, dirac_sections, label="L") -> IsoFrame:
    """Independent subset of (1 + iJ)/2 applied to a Dirac frame."""
    PLs = projector_Lstar(J)
    images = [PLs(s) for s in dirac_sections]
    images = [s for s in images if not s.is_zero()]
    backend = J.backend
    m = Matrix(tuple(backend.vars), [[s.coeffs[r] for s in images] for r in range(backend.rank)])
    for k in range(len(images), 0, -1):
        for cols in combinations(range(len(images)), k):
            sub = Matrix(m.vars, [[m[r, c] for c in cols] for r in range(backend.rank)])
            try:
                rows, det = unit_minor(sub)
            except NoUnitMinor:
                continue
            return IsoFrame(backend, [images[c] for c in cols], rows, det, None, label)
    raise NoUnitMinor("projected Dirac frame has no certified independent subset")


def subalgebroid_check(frame: IsoFrame, ambient: DualPair, omega: AltTensor) -> Report:
    """Involutivity, Omega-isotropy and maximality of a frame inside L*."""
    rep = Report(f"subalgebroid {frame.label}")
    coords = []
    for s in frame:
        coords.append(ambient.frameLstar.coords(s))
    defect = frame.closure_defect()
    rep.add("involutive", defect is None, defect)
    witness = None
    for a in range(frame.rank):
        for b in range(a + 1, frame.rank):
            v = evaluate_form(omega, [coords[a], coords[b]])
            if not v.is_zero():
                witness = {"pair": [a, b], "value": v}
                break
        if witness:
            break
    rep.add("omega-isotropic", witness is None, witness)
    rep.add("maximal", 2 * frame.rank == ambient.n, {"rank": frame.rank, "ambient": ambient.n})
    return rep

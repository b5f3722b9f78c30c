"""Tensor calculus on a single polynomial coordinate chart.

Sharp conventions: for a bivector ``P`` the map ``P#`` sends a covector
``a`` to ``P(a, .)``; for a 2-form ``w`` the map ``w#`` sends a vector ``X``
to ``w(X, .)``.  As matrices acting on column vectors this gives
``sharp(P)[b][a] = P^{ab}`` and ``sharp(w)[b][a] = w_{ab}``.  The dual of a
tangent endomorphism ``j`` acts on covectors by ``j* a = a o j``, i.e. by the
transposed matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from gmpy2 import mpq

from .errors import ChartMismatch, MetricNotSymmetric, NotAlmostComplex, NotIntegrable, NotQuaternionic
from .graded import AlgebroidData, AltTensor, schouten as _graded_schouten, sort_sign
from .linalg import Matrix, det
from .report import Report
from .scalars import GaussRat, Scalar, parse

HALF = GaussRat(mpq(1, 2))
I_UNIT = GaussRat(0, 1)


@dataclass(frozen=True)
class Chart:
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("coordinate names must be distinct")
        if "i" in self.coords:
            raise ValueError("'i' is reserved for the imaginary unit")

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def vars(self):
        return self.coords

    def parse(self, text) -> Scalar:
        return parse(str(text), self.coords)

    def const(self, c) -> Scalar:
        return Scalar.const(self.coords, c)

    def var(self, k) -> Scalar:
        return Scalar.var(self.coords, self.coords[k] if isinstance(k, int) else k)

    def zero(self) -> Scalar:
        return Scalar.zero(self.coords)

    def __str__(self):
        return f"Chart({', '.join(self.coords)})"


def real_chart(n: int, prefix="x") -> Chart:
    return Chart(tuple(f"{prefix}{a}" for a in range(n)))


class MultiVec(AltTensor):
    """Multivector field; component ``(a, b, ...)`` multiplies d_a ^ d_b ^ ..."""

    @property
    def chart(self) -> Chart:
        return self.space


class DiffForm(AltTensor):
    """Differential form; component ``(a, b, ...)`` multiplies dx_a ^ dx_b ^ ..."""

    @property
    def chart(self) -> Chart:
        return self.space


def _coerce(chart, c):
    if isinstance(c, Scalar):
        if c.vars != chart.vars:
            raise ChartMismatch(f"{c.vars} vs {chart.vars}")
        return c
    if isinstance(c, str):
        return chart.parse(c)
    return chart.const(c)


def vector(chart: Chart, comps) -> MultiVec:
    return MultiVec(chart, 1, {(a,): _coerce(chart, c) for a, c in enumerate(comps)})


def covector(chart: Chart, comps) -> DiffForm:
    return DiffForm(chart, 1, {(a,): _coerce(chart, c) for a, c in enumerate(comps)})


def multivec(chart: Chart, degree: int, comps: dict) -> MultiVec:
    return MultiVec(chart, degree, {tuple(k): _coerce(chart, v) for k, v in comps.items()})


def form(chart: Chart, degree: int, comps: dict) -> DiffForm:
    return DiffForm(chart, degree, {tuple(k): _coerce(chart, v) for k, v in comps.items()})


def function(chart: Chart, f) -> DiffForm:
    f = _coerce(chart, f)
    return DiffForm(chart, 0, {(): f} if not f.is_zero() else {}, _trusted=True)


def components(t: AltTensor):
    """Dense component list of a degree-1 tensor."""
    return [t[(a,)] for a in range(t.space.dim)]


def coord_vector(chart, a) -> MultiVec:
    return MultiVec(chart, 1, {(a,): chart.const(1)}, _trusted=True)


def coord_form(chart, a) -> DiffForm:
    return DiffForm(chart, 1, {(a,): chart.const(1)}, _trusted=True)


# -- exterior calculus ---------------------------------------------------------------


def ext_d(w: DiffForm) -> DiffForm:
    out = {}
    for idx, c in w.comps.items():
        for a in range(w.chart.dim):
            if a in idx:
                continue
            p = c.partial(a)
            if p.is_zero():
                continue
            s, key = sort_sign((a,) + idx)
            t = p if s > 0 else -p
            out[key] = out[key] + t if key in out else t
    return DiffForm(w.chart, w.degree + 1, {k: v for k, v in out.items() if not v.is_zero()}, _trusted=True)


def interior(X: MultiVec, w: DiffForm) -> DiffForm:
    """Contraction of a vector field into the first slot of a form."""
    X.check_space(w)
    if w.degree == 0:
        return DiffForm.zero(w.chart, 0)
    out = {}
    for idx, c in w.comps.items():
        for pos, a in enumerate(idx):
            xa = X.comps.get((a,))
            if xa is None:
                continue
            rest = idx[:pos] + idx[pos + 1 :]
            t = xa * c
            if pos % 2:
                t = -t
            out[rest] = out[rest] + t if rest in out else t
    return DiffForm(w.chart, w.degree - 1, {k: v for k, v in out.items() if not v.is_zero()}, _trusted=True)


def contract_form(w: DiffForm, vectors) -> Scalar:
    """Evaluate a k-form on k vector fields."""
    acc = w
    for X in vectors:
        acc = interior(X, acc)
    return acc.comps.get((), Scalar.zero(w.vars))


def apply_vector(X: MultiVec, f: Scalar) -> Scalar:
    acc = Scalar.zero(X.vars)
    for (a,), c in X.comps.items():
        acc = acc + c * f.partial(a)
    return acc


def lie_bracket(X: MultiVec, Y: MultiVec) -> MultiVec:
    X.check_space(Y)
    n = X.chart.dim
    out = {}
    for b in range(n):
        yb = Y.comps.get((b,))
        xb = X.comps.get((b,))
        acc = Scalar.zero(X.vars)
        if yb is not None:
            acc = acc + apply_vector(X, yb)
        if xb is not None:
            acc = acc - apply_vector(Y, xb)
        if not acc.is_zero():
            out[(b,)] = acc
    return MultiVec(X.chart, 1, out, _trusted=True)


def lie_derivative(X: MultiVec, w: DiffForm) -> DiffForm:
    """Cartan formula L_X = i_X d + d i_X."""
    out = interior(X, ext_d(w))
    if w.degree > 0:
        out = out + ext_d(interior(X, w))
    return out


def lie_derivative_direct(X: MultiVec, w: DiffForm) -> DiffForm:
    """Component transport formula, independent of the Cartan formula."""
    chart = w.chart
    n, k = chart.dim, w.degree
    out = {}
    for idx in combinations(range(n), k):
        acc = apply_vector(X, w[idx])
        for pos in range(k):
            for a in range(n):
                xa = X.comps.get((a,))
                if xa is None:
                    continue
                d = xa.partial(idx[pos])
                if d.is_zero():
                    continue
                acc = acc + w[idx[:pos] + (a,) + idx[pos + 1 :]] * d
        if not acc.is_zero():
            out[idx] = acc
    return DiffForm(chart, k, out, _trusted=True)


@lru_cache(maxsize=None)
def coordinate_algebroid(chart: Chart) -> AlgebroidData:
    one, zero = chart.const(1), chart.zero()
    anchor = [[one if i == a else zero for i in range(chart.dim)] for a in range(chart.dim)]
    return AlgebroidData(chart.vars, chart.dim, anchor, {})


def schouten(P: MultiVec, Q: MultiVec) -> MultiVec:
    """Schouten-Nijenhuis bracket with [X, f] = X(f) and [X, Y] the Lie bracket."""
    P.check_space(Q)
    return _graded_schouten(coordinate_algebroid(P.chart), P, Q)


def pair_bivector(P: MultiVec, a: DiffForm, b: DiffForm) -> Scalar:
    acc = Scalar.zero(P.vars)
    for (i, j), c in P.comps.items():
        t = a[(i,)] * b[(j,)] - a[(j,)] * b[(i,)]
        if not t.is_zero():
            acc = acc + c * t
    return acc


# -- sharps and tangent endomorphisms --------------------------------------------------


def bivector_sharp(P: MultiVec) -> Matrix:
    n = P.chart.dim
    return Matrix(P.vars, [[P[(a, b)] for a in range(n)] for b in range(n)])


def form_sharp(w: DiffForm) -> Matrix:
    n = w.chart.dim
    return Matrix(w.vars, [[w[(a, b)] for a in range(n)] for b in range(n)])


def _is_antisymmetric(m: Matrix) -> bool:
    n = m.shape[0]
    return all((m[i, j] + m[j, i]).is_zero() for i in range(n) for j in range(i, n))


def bivector_from_sharp(chart: Chart, m: Matrix) -> MultiVec:
    if not _is_antisymmetric(m):
        raise ValueError("sharp matrix is not antisymmetric")
    n = chart.dim
    return MultiVec(chart, 2, {(a, b): m[b, a] for a in range(n) for b in range(a + 1, n) if not m[b, a].is_zero()}, _trusted=True)


def form_from_sharp(chart: Chart, m: Matrix) -> DiffForm:
    if not _is_antisymmetric(m):
        raise ValueError("sharp matrix is not antisymmetric")
    n = chart.dim
    return DiffForm(chart, 2, {(a, b): m[b, a] for a in range(n) for b in range(a + 1, n) if not m[b, a].is_zero()}, _trusted=True)


@dataclass(frozen=True)
class TanEndo:
    """Endomorphism of the (complexified) tangent bundle as a matrix on coordinate fields."""

    chart: Chart
    matrix: Matrix

    def __post_init__(self):
        n = self.chart.dim
        if self.matrix.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix")

    @classmethod
    def from_text(cls, chart, rows):
        return cls(chart, Matrix.from_text(chart.vars, rows))

    @classmethod
    def from_numbers(cls, chart, rows):
        return cls(chart, Matrix.from_numbers(chart.vars, rows))

    def apply(self, X: MultiVec) -> MultiVec:
        return vector(self.chart, self.matrix.apply(components(X)))

    def dual_apply(self, a: DiffForm) -> DiffForm:
        return covector(self.chart, self.matrix.T().apply(components(a)))

    def __matmul__(self, other):
        return TanEndo(self.chart, self.matrix @ other.matrix)

    def __neg__(self):
        return TanEndo(self.chart, -self.matrix)

    def conj(self):
        return TanEndo(self.chart, self.matrix.conj())


def identity_matrix(chart) -> Matrix:
    return Matrix.identity(chart.vars, chart.dim)


def is_almost_complex(j: TanEndo) -> bool:
    return (j.matrix @ j.matrix + identity_matrix(j.chart)).is_zero()


def _require_almost_complex(j: TanEndo):
    if not is_almost_complex(j):
        raise NotAlmostComplex("j o j != -1")


def projector_10(j: TanEndo) -> Matrix:
    """Projection (1 - i j)/2 of complex vectors onto T^{1,0}."""
    one = identity_matrix(j.chart)
    return (one - j.matrix.scale(I_UNIT)).scale(HALF)


def projector_01(j: TanEndo) -> Matrix:
    one = identity_matrix(j.chart)
    return (one + j.matrix.scale(I_UNIT)).scale(HALF)


def _full(t: AltTensor):
    full = {}
    for idx, c in t.comps.items():
        for perm in _perms(len(idx)):
            key = tuple(idx[p] for p in perm)
            s, _ = sort_sign(key)
            full[key] = c if s > 0 else -c
    return full


@lru_cache(maxsize=None)
def _perms(k):
    from itertools import permutations

    return tuple(permutations(range(k)))


def _apply_slot(full, slot, m: Matrix, covariant: bool):
    """Transform one tensor slot: forms pull back along m, multivectors push forward."""
    out = {}
    n = m.shape[0]
    for key, c in full.items():
        j = key[slot]
        for i in range(n):
            coef = m[j, i] if covariant else m[i, j]
            if coef.is_zero():
                continue
            nk = key[:slot] + (i,) + key[slot + 1 :]
            t = c * coef
            out[nk] = out[nk] + t if nk in out else t
    return out


def _project_types(t: AltTensor, p10: Matrix, p01: Matrix, p: int, covariant: bool):
    k = t.degree
    if not 0 <= p <= k:
        return type(t).zero(t.space, k)
    if k == 0:
        return t if p == 0 else type(t).zero(t.space, 0)
    total = {}
    base = _full(t)
    for S in combinations(range(k), p):
        cur = base
        for slot in range(k):
            cur = _apply_slot(cur, slot, p10 if slot in S else p01, covariant)
        for key, c in cur.items():
            total[key] = total[key] + c if key in total else c
    comps = {}
    for key in combinations(range(t.space.dim), k):
        c = total.get(key)
        if c is not None and not c.is_zero():
            comps[key] = c
    return type(t)(t.space, k, comps, _trusted=True)


def type_project(w: DiffForm, j: TanEndo, p: int, q: int) -> DiffForm:
    """(p, q)-component of a complexified form relative to j."""
    _require_almost_complex(j)
    if p + q != w.degree or p < 0 or q < 0:
        return DiffForm.zero(w.chart, max(p + q, 0)) if p + q >= 0 else DiffForm.zero(w.chart, 0)
    return _project_types(w, projector_10(j), projector_01(j), p, True)


def multivec_type_project(P: MultiVec, j: TanEndo, p: int, q: int) -> MultiVec:
    """(p, q)-component of a complexified multivector (p slots in T^{1,0})."""
    _require_almost_complex(j)
    if p + q != P.degree or p < 0 or q < 0:
        return MultiVec.zero(P.chart, max(p + q, 0))
    return _project_types(P, projector_10(j), projector_01(j), p, False)


def nijenhuis_tangent_eval(j: TanEndo, X: MultiVec, Y: MultiVec) -> MultiVec:
    jX, jY = j.apply(X), j.apply(Y)
    return lie_bracket(jX, jY) - j.apply(lie_bracket(jX, Y)) - j.apply(lie_bracket(X, jY)) - lie_bracket(X, Y)


def nijenhuis_tangent(j: TanEndo) -> dict:
    """Classical Nijenhuis torsion on coordinate pairs a < b (nonzero entries only)."""
    _require_almost_complex(j)
    n = j.chart.dim
    out = {}
    for a in range(n):
        for b in range(a + 1, n):
            v = nijenhuis_tangent_eval(j, coord_vector(j.chart, a), coord_vector(j.chart, b))
            if not v.is_zero():
                out[(a, b)] = v
    return out


def is_integrable(j: TanEndo) -> bool:
    return is_almost_complex(j) and not nijenhuis_tangent(j)


def _require_integrable(j: TanEndo):
    _require_almost_complex(j)
    if nijenhuis_tangent(j):
        raise NotIntegrable("the Nijenhuis torsion of j does not vanish")


def dbar(w: DiffForm, j: TanEndo, check=True) -> DiffForm:
    if check:
        _require_integrable(j)
    k = w.degree
    out = DiffForm.zero(w.chart, k + 1)
    for p in range(k + 1):
        piece = type_project(w, j, p, k - p)
        if piece.is_zero():
            continue
        out = out + type_project(ext_d(piece), j, p, k - p + 1)
    return out


def dpartial(w: DiffForm, j: TanEndo, check=True) -> DiffForm:
    if check:
        _require_integrable(j)
    k = w.degree
    out = DiffForm.zero(w.chart, k + 1)
    for p in range(k + 1):
        piece = type_project(w, j, p, k - p)
        if piece.is_zero():
            continue
        out = out + type_project(ext_d(piece), j, p + 1, k - p)
    return out


def dbar_multivec(P: MultiVec, j: TanEndo) -> dict:
    """For P of type (p, 0): the (p, 0)-parts of [X, P] on the frame X = (1 + i j)/2 d_a.

    All entries vanish exactly when P is holomorphic.
    """
    _require_integrable(j)
    p01 = projector_01(j)
    out = {}
    for a in range(j.chart.dim):
        Xbar = vector(j.chart, [p01[b, a] for b in range(j.chart.dim)])
        r = multivec_type_project(schouten(Xbar, P), j, P.degree, 0)
        if not r.is_zero():
            out[a] = r
    return out


# -- holomorphic Poisson and hyper-Kahler checks ----------------------------------------


def holomorphic_poisson_check(pi1: MultiVec, pi2: MultiVec, j: TanEndo) -> Report:
    """Sub-checks for pi1 + i pi2 being holomorphic Poisson relative to j."""
    _require_integrable(j)
    rep = Report("holomorphic-poisson")
    s1, s2 = bivector_sharp(pi1), bivector_sharp(pi2)
    left = s2 + j.matrix @ s1
    right = s2 + s1 @ j.matrix.T()
    rep.add("pi2# = -j pi1#", left.is_zero(), left)
    rep.add("pi2# = -pi1# j*", right.is_zero(), right)
    for name, (a, b) in (("[pi1,pi1]", (pi1, pi1)), ("[pi2,pi2]", (pi2, pi2)), ("[pi1,pi2]", (pi1, pi2))):
        r = schouten(a, b)
        rep.add(f"{name} = 0", r.is_zero(), r)
    pi = pi1 + pi2.scale(I_UNIT)
    residue = pi - multivec_type_project(pi, j, 2, 0)
    rep.add("pi1 + i pi2 of type (2,0)", residue.is_zero(), residue)
    defects = dbar_multivec(pi, j)
    rep.add("pi1 + i pi2 dbar-closed", not defects, defects or None)
    return rep


def quaternionic_relations(i: TanEndo, j: TanEndo, k: TanEndo) -> dict:
    one = identity_matrix(i.chart)
    return {
        "i^2": i.matrix @ i.matrix + one,
        "j^2": j.matrix @ j.matrix + one,
        "k^2": k.matrix @ k.matrix + one,
        "ijk": i.matrix @ j.matrix @ k.matrix + one,
    }


def hyperkahler_forms(g: Matrix, i: TanEndo, j: TanEndo, k: TanEndo, origin=None) -> Report:
    """omega_a# = g# o (i, j, k); report alternation and closedness of each."""
    chart = i.chart
    bad = {name: m for name, m in quaternionic_relations(i, j, k).items() if not m.is_zero()}
    if bad:
        raise NotQuaternionic(f"quaternionic relations fail: {sorted(bad)}")
    if not (g - g.T()).is_zero():
        raise MetricNotSymmetric("g is not symmetric")
    d = det(g)
    if d.is_zero():
        raise MetricNotSymmetric("g is degenerate")
    rep = Report("hyperkahler-forms")
    rep.add("g symmetric", True)
    forms = {}
    for name, e in (("omega1", i), ("omega2", j), ("omega3", k)):
        m = g @ e.matrix
        anti = m + m.T()
        ok = anti.is_zero()
        rep.add(f"{name} alternating", ok, anti)
        if ok:
            w = form_from_sharp(chart, m)
            forms[name] = w
            dw = ext_d(w)
            rep.add(f"d{name} = 0", dw.is_zero(), dw)
    rep.info["forms"] = forms
    pt = origin if origin is not None else [0] * chart.dim
    rep.info["positive_definite_at_origin"] = positive_definite_at(g, pt)
    return rep


def positive_definite_at(g: Matrix, point) -> bool:
    """Sylvester criterion on leading minors of g evaluated at a point."""
    vals = [[g[r, c].evaluate(point) for c in range(g.shape[0])] for r in range(g.shape[0])]
    n = len(vals)
    for m in range(1, n + 1):
        sub = Matrix(
            (),
            [[Scalar.const((), vals[r][c]) for c in range(m)] for r in range(m)],
        )
        dv = det(sub).constant_value()
        if dv.im != 0 or dv.re <= 0:
            return False
    return True


def complex_coordinate_forms(chart: Chart, pairs):
    """dz = dx + i dy and dzbar for each (x, y) index pair."""
    out = []
    for x, y in pairs:
        dz = coord_form(chart, x) + coord_form(chart, y).scale(I_UNIT)
        out.append((dz, dz.conj()))
    return out

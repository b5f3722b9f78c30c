"""Courant algebroids: standard (optionally twisted) T + T* over a chart, and
constant-structure algebroids over a point.

A section is a tuple of Scalar coefficients in the backend's standard frame.
On a chart of dimension n the frame is d_0..d_{n-1}, dx_0..dx_{n-1}; over a
point it is the algebra basis.
"""

from __future__ import annotations

from itertools import product

from gmpy2 import mpq

from .chartcalc import Chart, DiffForm, MultiVec, ext_d, form_sharp
from .errors import BackendMismatch, ConstructionError, UnsupportedOnPoint
from .linalg import Matrix, inverse
from .report import Report
from .scalars import GaussRat, Scalar

HALF = (mpq(1, 2), mpq(0))


class ChartBackend:
    """Standard Courant algebroid T + T* over a chart, with optional closed twist."""

    kind = "chart"

    def __init__(self, chart: Chart, twist: DiffForm | None = None):
        self.chart = chart
        if twist is not None:
            if twist.chart != chart or twist.degree != 3:
                raise ConstructionError("twist must be a 3-form on the backend chart")
            dphi = ext_d(twist)
            if not dphi.is_zero():
                raise ConstructionError(f"twist is not closed: d(phi) = {dphi!r}")
            if twist.is_zero():
                twist = None
        self.twist = twist

    @property
    def vars(self):
        return self.chart.vars

    @property
    def n(self) -> int:
        return self.chart.dim

    @property
    def rank(self) -> int:
        return 2 * self.chart.dim

    def __eq__(self, other):
        return isinstance(other, ChartBackend) and self.chart == other.chart and self.twist == other.twist

    def __hash__(self):
        return hash((self.chart, self.twist))

    def __repr__(self):
        return f"ChartBackend({self.chart}, twisted={self.twist is not None})"

    def frame_labels(self):
        return [f"d/d{c}" for c in self.chart.coords] + [f"d{c}" for c in self.chart.coords]


class PointBackend:
    """Courant algebroid over a point: a quadratic Lie algebra.

    ``structure[a][b]`` lists the coefficients of e_a o e_b; ``pairing`` is the
    Gram matrix of the basis.
    """

    kind = "point"
    vars = ()

    def __init__(self, structure, pairing, labels=None):
        dim = len(pairing)
        self.structure = tuple(tuple(tuple(GaussRat.coerce(x) for x in c) for c in row) for row in structure)
        self.pairing = tuple(tuple(GaussRat.coerce(x) for x in row) for row in pairing)
        if len(self.structure) != dim or any(len(r) != dim or any(len(c) != dim for c in r) for r in self.structure):
            raise ConstructionError("structure constants must be dim x dim x dim")
        if any(len(r) != dim for r in self.pairing):
            raise ConstructionError("pairing must be square")
        self.labels = tuple(labels) if labels else tuple(f"e{a}" for a in range(dim))
        for a in range(dim):
            for b in range(dim):
                if self.pairing[a][b] != self.pairing[b][a]:
                    raise ConstructionError("pairing is not symmetric")
        try:
            inverse(Matrix((), [[Scalar.const((), x) for x in r] for r in self.pairing]))
        except ZeroDivisionError as exc:
            raise ConstructionError("pairing is degenerate") from exc
        for a, b, c in product(range(dim), repeat=3):
            s = GaussRat(0)
            for m in range(dim):
                s = s + self.structure[a][b][m] * self.pairing[m][c] + self.structure[a][c][m] * self.pairing[b][m]
            if not s.is_zero():
                raise ConstructionError(f"pairing is not ad-invariant at basis triple ({a}, {b}, {c})")

    @property
    def rank(self) -> int:
        return len(self.pairing)

    def __eq__(self, other):
        return isinstance(other, PointBackend) and self.structure == other.structure and self.pairing == other.pairing

    def __hash__(self):
        return hash((self.structure, self.pairing))

    def __repr__(self):
        return f"PointBackend(dim={self.rank})"

    def frame_labels(self):
        return list(self.labels)


class Section:
    __slots__ = ("backend", "coeffs")

    def __init__(self, backend, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != backend.rank:
            raise ValueError(f"expected {backend.rank} coefficients, got {len(coeffs)}")
        vars = backend.vars
        out = []
        for c in coeffs:
            if isinstance(c, Scalar):
                if c.vars != vars:
                    raise BackendMismatch(f"coefficient over {c.vars}, backend over {vars}")
                out.append(c)
            elif isinstance(c, str):
                from .scalars import parse

                out.append(parse(c, vars))
            else:
                out.append(Scalar.const(vars, c))
        self.backend = backend
        self.coeffs = tuple(out)

    @classmethod
    def zero(cls, backend):
        return cls(backend, [Scalar.zero(backend.vars)] * backend.rank)

    @classmethod
    def basis(cls, backend, a):
        return cls(backend, [Scalar.const(backend.vars, int(b == a)) for b in range(backend.rank)])

    @classmethod
    def from_parts(cls, backend, vec, form):
        """Section X + xi from dense vector and 1-form component lists."""
        return cls(backend, list(vec) + list(form))

    @property
    def vec(self):
        if self.backend.kind != "chart":
            raise UnsupportedOnPoint("sections over a point have no vector part")
        return self.coeffs[: self.backend.n]

    @property
    def form(self):
        if self.backend.kind != "chart":
            raise UnsupportedOnPoint("sections over a point have no form part")
        return self.coeffs[self.backend.n :]

    def vector_field(self) -> MultiVec:
        return MultiVec(self.backend.chart, 1, {(a,): c for a, c in enumerate(self.vec) if not c.is_zero()}, _trusted=True)

    def one_form(self) -> DiffForm:
        return DiffForm(self.backend.chart, 1, {(a,): c for a, c in enumerate(self.form) if not c.is_zero()}, _trusted=True)

    def _check(self, other):
        if not isinstance(other, Section) or other.backend != self.backend:
            raise BackendMismatch("sections live on different backends")

    def __add__(self, other):
        self._check(other)
        return Section(self.backend, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return Section(self.backend, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Section(self.backend, [-a for a in self.coeffs])

    def scale(self, f) -> "Section":
        """Multiply by a Scalar function or an exact number."""
        if isinstance(f, Scalar):
            return Section(self.backend, [a * f for a in self.coeffs])
        p = GaussRat.coerce(f).pair
        return Section(self.backend, [a.scale(p) for a in self.coeffs])

    def conj(self):
        return Section(self.backend, [a.conj() for a in self.coeffs])

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coeffs)

    def __eq__(self, other):
        return isinstance(other, Section) and other.backend == self.backend and other.coeffs == self.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def to_json(self, limit=None):
        from .report import serialize

        if self.backend.kind == "chart":
            return {"vec": serialize(list(self.vec), limit), "form": serialize(list(self.form), limit)}
        return serialize(list(self.coeffs), limit)

    def __repr__(self):
        labels = self.backend.frame_labels()
        body = " + ".join(f"({c})*{l}" for c, l in zip(self.coeffs, labels) if not c.is_zero())
        return f"Section({body or '0'})"


def frame(backend):
    return [Section.basis(backend, a) for a in range(backend.rank)]


def _same(U: Section, V: Section):
    if U.backend != V.backend:
        raise BackendMismatch("sections live on different backends")
    return U.backend


def _derive(f: Scalar, X) -> Scalar:
    acc = Scalar.zero(f.vars)
    for a, x in enumerate(X):
        if x.terms:
            d = f.partial(a)
            if d.terms:
                acc = acc + x * d
    return acc


def dorfman(U: Section, V: Section) -> Section:
    B = _same(U, V)
    if B.kind == "point":
        n = B.rank
        out = [Scalar.zero(()) for _ in range(n)]
        for a, ua in enumerate(U.coeffs):
            if not ua.terms:
                continue
            for b, vb in enumerate(V.coeffs):
                if not vb.terms:
                    continue
                w = ua * vb
                for m, c in enumerate(B.structure[a][b]):
                    if not c.is_zero():
                        out[m] = out[m] + w.scale(c.pair)
        return Section(B, out)
    n = B.n
    X, xi = U.coeffs[:n], U.coeffs[n:]
    Y, eta = V.coeffs[:n], V.coeffs[n:]
    vec = [_derive(Y[b], X) - _derive(X[b], Y) for b in range(n)]
    dxi = [[xi[b].partial(a) for b in range(n)] for a in range(n)]
    form = []
    for b in range(n):
        acc = _derive(eta[b], X)
        for a in range(n):
            if eta[a].terms and X[a].terms:
                acc = acc + eta[a] * X[a].partial(b)
            if Y[a].terms:
                curl = dxi[a][b] - dxi[b][a]
                if curl.terms:
                    acc = acc - Y[a] * curl
        form.append(acc)
    if B.twist is not None:
        for (c, a, b), phi in B.twist.comps.items():
            # (i_X i_Y phi)_m = sum X^a Y^c phi_{c a m}, summed over all orderings
            for (p, q, r), sgn in _PERMS3:
                idx = (c, a, b)
                ic, ia, ib = idx[p], idx[q], idx[r]
                t = Y[ic] * X[ia]
                if t.terms:
                    t = t * phi
                    form[ib] = form[ib] + t if sgn > 0 else form[ib] - t
    return Section(B, vec + form)


_PERMS3 = (((0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1), ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1))


def pairing(U: Section, V: Section) -> Scalar:
    B = _same(U, V)
    if B.kind == "point":
        acc = Scalar.zero(())
        for a, ua in enumerate(U.coeffs):
            for b, vb in enumerate(V.coeffs):
                g = B.pairing[a][b]
                if ua.terms and vb.terms and not g.is_zero():
                    acc = acc + (ua * vb).scale(g.pair)
        return acc
    n = B.n
    acc = Scalar.zero(B.vars)
    for a in range(n):
        p = U.coeffs[n + a] * V.coeffs[a] + V.coeffs[n + a] * U.coeffs[a]
        if p.terms:
            acc = acc + p
    return acc.scale(HALF)


def anchor_vector(U: Section):
    """Components of rho(U) on the coordinate fields; empty over a point."""
    if U.backend.kind == "point":
        return []
    return list(U.vec)


def anchor_apply(U: Section, f: Scalar) -> Scalar:
    if U.backend.kind == "point":
        return Scalar.zero(f.vars)
    return _derive(f, U.vec)


def dee(backend, f: Scalar) -> Section:
    """The section Df with <Df, x> = rho(x) f / 2; on T + T* this is df."""
    if backend.kind == "point":
        raise UnsupportedOnPoint("D vanishes identically over a point")
    n = backend.n
    return Section(backend, [Scalar.zero(backend.vars)] * n + [f.partial(a) for a in range(n)])


def dee_or_zero(backend, f: Scalar) -> Section:
    if backend.kind == "point":
        return Section.zero(backend)
    return dee(backend, f)


def skew_bracket(U: Section, V: Section) -> Section:
    """Courant bracket [[U, V]] = (U o V - V o U) / 2."""
    return (dorfman(U, V) - dorfman(V, U)).scale(GaussRat(mpq(1, 2)))


def b_transform_matrix(backend: ChartBackend, B: DiffForm) -> Matrix:
    """Matrix of X + xi -> X + xi + i_X B in the standard frame."""
    if backend.kind != "chart":
        raise UnsupportedOnPoint("B-field transforms need a chart")
    n = backend.n
    one = Matrix.identity(backend.vars, n)
    zero = Matrix.zeros(backend.vars, n)
    return Matrix.block([[one, zero], [form_sharp(B), one]])


def lifted_matrix(backend: ChartBackend, a: Matrix) -> Matrix:
    """diag(a, -a^T): the Courant endomorphism induced by a tangent endomorphism."""
    zero = Matrix.zeros(backend.vars, backend.n)
    return Matrix.block([[a, zero], [zero, -a.T()]])


# -- axiom verification -----------------------------------------------------------------


def default_samples(backend):
    """Frame sections plus two coordinate-scaled copies of each (chart case)."""
    base = frame(backend)
    if backend.kind == "point":
        return base
    n = backend.n
    xs = [Scalar.var(backend.vars, c) for c in backend.chart.coords]
    scaled = [e.scale(xs[a % n]) for a, e in enumerate(base)]
    shifted = [e.scale(xs[(a + 1) % n]) for a, e in enumerate(base)]
    return base + scaled + shifted


def default_funcs(backend):
    if backend.kind == "point":
        return [Scalar.const((), 1), Scalar.const((), GaussRat(2, 1))]
    xs = [Scalar.var(backend.vars, c) for c in backend.chart.coords]
    out = list(xs)
    out.append(xs[0] * xs[0])
    if len(xs) > 1:
        out.append(xs[0] * xs[1] + xs[-1])
    return out


def verify_axioms(backend, samples=None, funcs=None) -> Report:
    """Check the six Courant axioms exactly on all sample triples and functions."""
    samples = default_samples(backend) if samples is None else list(samples)
    funcs = default_funcs(backend) if funcs is None else list(funcs)
    for s in samples:
        if s.backend != backend:
            raise BackendMismatch("sample section on a different backend")
    rep = Report("courant-axioms")
    rep.info["samples"] = len(samples)
    rep.info["functions"] = len(funcs)
    if backend.kind == "chart" and backend.twist is not None:
        rep.conventions.append("twisted bracket adds i_X i_Y phi to the form part of X+xi o Y+eta")
    m = len(samples)
    br = {}

    def bracket(a, b):
        key = (a, b)
        if key not in br:
            br[key] = dorfman(samples[a], samples[b])
        return br[key]

    pair_cache = {}

    def pair(a, b):
        key = (min(a, b), max(a, b))
        if key not in pair_cache:
            pair_cache[key] = pairing(samples[a], samples[b])
        return pair_cache[key]

    # 1. Jacobi (Leibniz) identity
    witness = None
    for a, b, c in product(range(m), repeat=3):
        lhs = dorfman(samples[a], bracket(b, c))
        rhs = dorfman(bracket(a, b), samples[c]) + dorfman(samples[b], bracket(a, c))
        if lhs != rhs:
            witness = {"triple": [a, b, c], "residual": lhs - rhs}
            break
    rep.add("jacobi", witness is None, witness)

    # 2. anchor is a morphism of brackets
    witness = None
    if backend.kind == "chart":
        for a, b in product(range(m), repeat=2):
            lhs = anchor_vector(bracket(a, b))
            X, Y = anchor_vector(samples[a]), anchor_vector(samples[b])
            rhs = [_derive(Y[k], X) - _derive(X[k], Y) for k in range(backend.n)]
            if lhs != rhs:
                witness = {"pair": [a, b], "residual": [l - r for l, r in zip(lhs, rhs)]}
                break
    rep.add("anchor-homomorphism", witness is None, witness)

    # 3. Leibniz rule in the second argument
    witness = None
    for (a, b), f in product(product(range(m), repeat=2), funcs):
        x, y = samples[a], samples[b]
        lhs = dorfman(x, y.scale(f))
        rhs = y.scale(anchor_apply(x, f)) + bracket(a, b).scale(f)
        if lhs != rhs:
            witness = {"pair": [a, b], "function": f, "residual": lhs - rhs}
            break
    rep.add("leibniz", witness is None, witness)

    # 4. symmetric part is exact
    witness = None
    for a in range(m):
        for b in range(a, m):
            lhs = bracket(a, b) + bracket(b, a)
            rhs = dee_or_zero(backend, pair(a, b)).scale(2)
            if lhs != rhs:
                witness = {"pair": [a, b], "residual": lhs - rhs}
                break
        if witness:
            break
    rep.add("symmetric-part", witness is None, witness)

    # 5. exact sections act trivially
    witness = None
    for f, a in product(funcs, range(m)):
        r = dorfman(dee_or_zero(backend, f), samples[a])
        if not r.is_zero():
            witness = {"function": f, "section": a, "residual": r}
            break
    rep.add("exact-left-trivial", witness is None, witness)

    # 6. invariance of the pairing
    witness = None
    for a, b, c in product(range(m), repeat=3):
        if c < b:
            continue
        lhs = anchor_apply(samples[a], pair(b, c))
        rhs = pairing(bracket(a, b), samples[c]) + pairing(samples[b], bracket(a, c))
        if lhs != rhs:
            witness = {"triple": [a, b, c], "residual": lhs - rhs}
            break
    rep.add("pairing-invariance", witness is None, witness)
    return rep


def quaternion_point_backend() -> PointBackend:
    """Quaternions with the commutator bracket and basis {1, i, j, k} orthonormal."""
    # multiplication table e_a e_b = sign * e_c
    table = {
        (1, 2): (3, 1), (2, 1): (3, -1),
        (2, 3): (1, 1), (3, 2): (1, -1),
        (3, 1): (2, 1), (1, 3): (2, -1),
    }
    structure = [[[0] * 4 for _ in range(4)] for _ in range(4)]
    for (a, b), (c, s) in table.items():
        structure[a][b][c] = 2 * s
    pairing_m = [[int(a == b) for b in range(4)] for a in range(4)]
    return PointBackend(structure, pairing_m, labels=("1", "i", "j", "k"))

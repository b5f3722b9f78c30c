"""Endomorphisms of a Courant algebroid: orthogonality, Nijenhuis concomitants,
induced Poisson bivectors and hypercomplex triples."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from gmpy2 import mpq

from .chartcalc import MultiVec, schouten
from .courant import Section, dee, dorfman, frame, pairing
from .errors import BackendMismatch, HypothesisViolated, NotQuaternionic, NotUnitVector, UnsupportedOnPoint
from .graded import AltTensor
from .linalg import Matrix
from .report import Report
from .scalars import GaussRat, Scalar


@dataclass(frozen=True)
class FrameSpace:
    """Index space for tensors evaluated on a list of sections."""

    vars: tuple
    dim: int
    label: str = "frame"


class Endo:
    """Bundle endomorphism acting on sections through its matrix in the standard frame."""

    __slots__ = ("backend", "matrix")

    def __init__(self, backend, matrix: Matrix):
        if matrix.shape != (backend.rank, backend.rank):
            raise ValueError(f"expected a {backend.rank}x{backend.rank} matrix, got {matrix.shape}")
        if matrix.vars != tuple(backend.vars):
            raise BackendMismatch(f"matrix over {matrix.vars}, backend over {backend.vars}")
        self.backend = backend
        self.matrix = matrix

    @classmethod
    def identity(cls, backend):
        return cls(backend, Matrix.identity(backend.vars, backend.rank))

    @classmethod
    def from_text(cls, backend, rows):
        return cls(backend, Matrix.from_text(backend.vars, rows))

    @classmethod
    def from_numbers(cls, backend, rows):
        return cls(backend, Matrix.from_numbers(backend.vars, rows))

    def __call__(self, U: Section) -> Section:
        if U.backend != self.backend:
            raise BackendMismatch("section and endomorphism live on different backends")
        return Section(self.backend, self.matrix.apply(U.coeffs))

    apply = __call__

    def _check(self, other):
        if other.backend != self.backend:
            raise BackendMismatch("endomorphisms live on different backends")

    def __matmul__(self, other):
        self._check(other)
        return Endo(self.backend, self.matrix @ other.matrix)

    def __add__(self, other):
        self._check(other)
        return Endo(self.backend, self.matrix + other.matrix)

    def __sub__(self, other):
        self._check(other)
        return Endo(self.backend, self.matrix - other.matrix)

    def __neg__(self):
        return Endo(self.backend, -self.matrix)

    def scale(self, c):
        return Endo(self.backend, self.matrix.scale(c))

    def conj(self):
        return Endo(self.backend, self.matrix.conj())

    def is_zero(self):
        return self.matrix.is_zero()

    def __eq__(self, other):
        return isinstance(other, Endo) and other.backend == self.backend and other.matrix == self.matrix

    def __hash__(self):
        return hash(self.matrix)

    def to_json(self, limit=None):
        from .report import serialize

        return serialize(self.matrix, limit)

    def __repr__(self):
        return f"Endo({self.matrix.to_text()})"


@dataclass(frozen=True)
class Triple:
    I: Endo
    J: Endo
    K: Endo

    def __post_init__(self):
        if not (self.I.backend == self.J.backend == self.K.backend):
            raise BackendMismatch("triple members live on different backends")

    @property
    def backend(self):
        return self.I.backend

    def members(self):
        return (("I", self.I), ("J", self.J), ("K", self.K))

    def oriented(self, sign: int) -> "Triple":
        """The triple (I, sJ, sK); sign -1 reverses the orientation of J."""
        if sign not in (1, -1):
            raise ValueError("orientation sign must be +1 or -1")
        if sign == 1:
            return self
        return Triple(self.I, -self.J, -self.K)


# -- pointwise predicates -------------------------------------------------------------


def _frame_pairs(backend, symmetric=True):
    r = backend.rank
    return [(a, b) for a in range(r) for b in range(r) if not symmetric or a <= b]


def is_orthogonal(F: Endo, samples=None):
    """(ok, witness): <FU, FV> = <U, V> on all sample pairs (frame by default)."""
    samples = frame(F.backend) if samples is None else list(samples)
    images = [F(s) for s in samples]
    for a in range(len(samples)):
        for b in range(a, len(samples)):
            r = pairing(images[a], images[b]) - pairing(samples[a], samples[b])
            if not r.is_zero():
                return False, {"pair": [a, b], "residual": r}
    return True, None


def is_skew(F: Endo):
    """(ok, witness): <FU, V> + <U, FV> = 0 on frame pairs."""
    fr = frame(F.backend)
    images = [F(s) for s in fr]
    for a in range(len(fr)):
        for b in range(a, len(fr)):
            r = pairing(images[a], fr[b]) + pairing(fr[a], images[b])
            if not r.is_zero():
                return False, {"pair": [a, b], "residual": r}
    return True, None


def squares_to_minus_one(F: Endo):
    r = F.matrix @ F.matrix + Matrix.identity(F.backend.vars, F.backend.rank)
    return r.is_zero(), (None if r.is_zero() else r)


def quaternionic_check(T: Triple) -> Report:
    rep = Report("quaternionic")
    one = Matrix.identity(T.backend.vars, T.backend.rank)
    for name, m in (
        ("I^2 = -1", T.I.matrix @ T.I.matrix),
        ("J^2 = -1", T.J.matrix @ T.J.matrix),
        ("K^2 = -1", T.K.matrix @ T.K.matrix),
        ("IJK = -1", T.I.matrix @ T.J.matrix @ T.K.matrix),
    ):
        r = m + one
        rep.add(name, r.is_zero(), r)
    return rep


# -- Nijenhuis concomitant --------------------------------------------------------------


def nijenhuis(F: Endo, G: Endo, U: Section, V: Section) -> Section:
    """Eight-term Nijenhuis concomitant N(F, G)(U, V)."""
    F._check(G)
    if U.backend != F.backend or V.backend != F.backend:
        raise BackendMismatch("sections and endomorphisms live on different backends")
    FU, GU, FV, GV = F(U), G(U), F(V), G(V)
    UV = dorfman(U, V)
    out = (
        dorfman(FU, GV)
        - F(dorfman(U, GV))
        - G(dorfman(FU, V))
        + F(G(UV))
        + dorfman(GU, FV)
        - G(dorfman(U, FV))
        - F(dorfman(GU, V))
        + G(F(UV))
    )
    return out


def nijenhuis_table(F: Endo, G: Endo, sections=None) -> dict:
    """N(F, G) on ordered pairs of sections (frame by default), keyed by index pair."""
    sections = frame(F.backend) if sections is None else list(sections)
    return {(a, b): nijenhuis(F, G, sections[a], sections[b]) for a in range(len(sections)) for b in range(len(sections))}


def anticommutator_constant(F: Endo, G: Endo):
    """lambda with FG + GF = lambda id, or None if no constant rational lambda exists."""
    m = F.matrix @ G.matrix + G.matrix @ F.matrix
    lam = m[0, 0]
    if not lam.is_constant() and not lam.is_zero():
        return None
    lam_v = lam.constant_value() if not lam.is_zero() else GaussRat(0)
    if lam_v.im != 0:
        return None
    if m != Matrix.identity(F.backend.vars, F.backend.rank).scale(lam_v):
        return None
    return lam_v


def nijenhuis_form(F: Endo, G: Endo) -> AltTensor:
    """Totally antisymmetric N_{F,G}(e_a, e_b, e_c) = <N(F,G)(e_a, e_b), e_c> on the standard frame."""
    for name, E in (("F", F), ("G", G)):
        ok, w = is_skew(E)
        if not ok:
            raise HypothesisViolated(f"{name}-skew", f"{name} is not skew-symmetric: {w}")
    lam = anticommutator_constant(F, G)
    if lam is None:
        raise HypothesisViolated("anticommutator", "FG + GF is not a constant rational multiple of the identity")
    fr = frame(F.backend)
    r = len(fr)
    table = nijenhuis_table(F, G, fr)
    vals = {}
    for a, b, c in product(range(r), repeat=3):
        vals[(a, b, c)] = pairing(table[(a, b)], fr[c])
    comps = {}
    for (a, b, c), v in vals.items():
        if a < b < c:
            for perm, sgn in (((b, a, c), -1), ((a, c, b), -1), ((c, b, a), -1), ((b, c, a), 1), ((c, a, b), 1)):
                w = vals[perm]
                if (w if sgn > 0 else -w) != v:
                    raise HypothesisViolated("antisymmetry", f"N_(F,G) is not alternating at {(a, b, c)}")
            if not v.is_zero():
                comps[(a, b, c)] = v
        elif len({a, b, c}) < 3 and not v.is_zero():
            raise HypothesisViolated("antisymmetry", f"N_(F,G) has a nonzero repeated-slot entry at {(a, b, c)}")
    return AltTensor(FrameSpace(tuple(F.backend.vars), r, "standard"), 3, comps, _trusted=True)


def nijenhuis_3form_eval(F: Endo, G: Endo, U: Section, V: Section, W: Section) -> Scalar:
    return pairing(nijenhuis(F, G, U, V), W)


# -- induced Poisson bivectors ------------------------------------------------------------


def _require_chart(backend):
    if backend.kind != "chart":
        raise UnsupportedOnPoint("this operation needs a chart backend")


def poisson_bracket(F: Endo, f: Scalar, g: Scalar) -> Scalar:
    """{f, g}_F = <F Df, Dg>."""
    _require_chart(F.backend)
    return pairing(F(dee(F.backend, f)), dee(F.backend, g))


def poisson_of(F: Endo) -> MultiVec:
    """Bivector pi_F with pi_F(dx_a, dx_b) = <F Dx_a, Dx_b>."""
    _require_chart(F.backend)
    chart = F.backend.chart
    n = chart.dim
    xs = [chart.var(a) for a in range(n)]
    comps = {}
    for a in range(n):
        for b in range(a + 1, n):
            v = poisson_bracket(F, xs[a], xs[b])
            if not v.is_zero():
                comps[(a, b)] = v
    return MultiVec(chart, 2, comps, _trusted=True)


def jacobiator_check(F: Endo, f: Scalar, g: Scalar, h: Scalar):
    """(Jacobiator of {,}_F on f, g, h;  -1/4 N_{F,F}(Df, Dg, Dh))."""
    _require_chart(F.backend)
    br = lambda a, b: poisson_bracket(F, a, b)  # noqa: E731
    jac = br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)
    B = F.backend
    n3 = nijenhuis_3form_eval(F, F, dee(B, f), dee(B, g), dee(B, h))
    return jac, n3.scale((mpq(-1, 4), mpq(0)))


# -- complex structures and triples -----------------------------------------------------


def complex_structure_check(J: Endo, name="J") -> Report:
    """J^2 = -1, orthogonality, and vanishing of N(J, J) on frame pairs."""
    rep = Report(f"complex-structure {name}")
    ok, w = squares_to_minus_one(J)
    rep.add(f"{name}^2 = -1", ok, w)
    ok, w = is_orthogonal(J)
    rep.add(f"{name} orthogonal", ok, w)
    w = _first_nonzero_concomitant(J, J)
    rep.add(f"N({name},{name}) = 0", w is None, w)
    return rep


def _first_nonzero_concomitant(F, G):
    fr = frame(F.backend)
    for a, b in _frame_pairs(F.backend):
        r = nijenhuis(F, G, fr[a], fr[b])
        if not r.is_zero():
            return {"pair": [a, b], "residual": r}
    return None


PAIRS = (("I", "I"), ("I", "J"), ("I", "K"), ("J", "J"), ("J", "K"), ("K", "K"))


def hypercomplex_check(T: Triple) -> Report:
    """Quaternionic relations, then all six concomitants on frame pairs."""
    q = quaternionic_check(T)
    if not q.ok:
        raise NotQuaternionic("quaternionic relations fail: " + ", ".join(c.name for c in q.failures()))
    rep = Report("hypercomplex")
    rep.extend(q)
    for name, E in T.members():
        ok, w = is_orthogonal(E)
        rep.add(f"{name} orthogonal", ok, w)
    members = dict(T.members())
    vanish = {}
    for a, b in PAIRS:
        w = _first_nonzero_concomitant(members[a], members[b])
        vanish[(a, b)] = w is None
        rep.add(f"N({a},{b}) = 0", w is None, w)
    shortcut = vanish[("I", "J")]
    full = all(vanish.values())
    rep.info["shortcut N(I,J)=0"] = shortcut
    rep.info["all six vanish"] = full
    rep.add("N(I,J)=0 iff all six vanish", shortcut == full)
    return rep


def is_hypercomplex(T: Triple) -> bool:
    try:
        return hypercomplex_check(T).ok
    except NotQuaternionic:
        return False


def sphere_structure(T: Triple, l1, l2, l3) -> Endo:
    """l1 I + l2 J + l3 K for a rational unit vector (l1, l2, l3)."""
    ls = [GaussRat.coerce(x) for x in (l1, l2, l3)]
    if any(x.im != 0 for x in ls):
        raise NotUnitVector("coefficients must be real rationals")
    if sum((x * x).re for x in ls) != 1:
        raise NotUnitVector(f"({l1}, {l2}, {l3}) is not on the unit sphere")
    return T.I.scale(ls[0]) + T.J.scale(ls[1]) + T.K.scale(ls[2])


def poisson_compatibility(T: Triple) -> Report:
    """Pairwise Schouten brackets of pi_I, pi_J, pi_K vanish."""
    pis = {name: poisson_of(E) for name, E in T.members()}
    rep = Report("poisson-compatibility")
    for a, b in PAIRS:
        r = schouten(pis[a], pis[b])
        rep.add(f"[pi_{a},pi_{b}] = 0", r.is_zero(), r)
    return rep

"""Alternating tensors with Scalar coefficients and the graded Schouten bracket.

An :class:`AltTensor` of degree k over a "space" (anything with ``vars`` and
``dim``) stores one Scalar per strictly increasing k-tuple of basis indices.
The same container holds multivector fields, differential forms and forms on
an eigenframe; the class only fixes how components are indexed.
"""

from __future__ import annotations


from .errors import ChartMismatch
from .scalars import GaussRat, Scalar


def sort_sign(idx):
    """(sign, sorted tuple) for a tuple of indices; sign 0 on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    for i in range(len(idx)):
        for j in range(len(idx) - 1 - i):
            if idx[j] > idx[j + 1]:
                idx[j], idx[j + 1] = idx[j + 1], idx[j]
                sign = -sign
    return sign, tuple(idx)


class AltTensor:
    __slots__ = ("space", "degree", "comps")

    def __init__(self, space, degree, comps=None, _trusted=False):
        self.space = space
        self.degree = degree
        if _trusted:
            self.comps = comps
            return
        clean = {}
        for idx, c in (comps or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} does not have length {degree}")
            if any(not 0 <= a < space.dim for a in idx):
                raise ValueError(f"index {idx} out of range")
            s, key = sort_sign(idx)
            if s == 0:
                if not c.is_zero():
                    raise ValueError(f"repeated index {idx} with nonzero value")
                continue
            c = c if s > 0 else -c
            if key in clean:
                c = clean[key] + c
            clean[key] = c
        self.comps = {k: v for k, v in clean.items() if not v.is_zero()}

    @property
    def vars(self):
        return self.space.vars

    def _new(self, degree, comps):
        return type(self)(self.space, degree, comps, _trusted=True)

    @classmethod
    def zero(cls, space, degree):
        return cls(space, degree, {}, _trusted=True)

    def check_space(self, other):
        if other.space != self.space:
            raise ChartMismatch(f"{self.space} vs {other.space}")

    def __getitem__(self, idx):
        s, key = sort_sign(idx)
        if s == 0:
            return Scalar.zero(self.vars)
        c = self.comps.get(key)
        if c is None:
            return Scalar.zero(self.vars)
        return c if s > 0 else -c

    def __add__(self, other):
        self.check_space(other)
        if other.degree != self.degree:
            raise ValueError("degree mismatch in sum")
        out = dict(self.comps)
        for k, v in other.comps.items():
            s = out[k] + v if k in out else v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return self._new(self.degree, out)

    def __neg__(self):
        return self._new(self.degree, {k: -v for k, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        """Multiply by a Scalar function or an exact number."""
        if isinstance(c, Scalar):
            out = {k: v * c for k, v in self.comps.items()}
        else:
            p = GaussRat.coerce(c).pair
            out = {k: v.scale(p) for k, v in self.comps.items()}
        return self._new(self.degree, {k: v for k, v in out.items() if not v.is_zero()})

    def map(self, fn):
        out = {k: fn(v) for k, v in self.comps.items()}
        return self._new(self.degree, {k: v for k, v in out.items() if not v.is_zero()})

    def conj(self):
        return self._new(self.degree, {k: v.conj() for k, v in self.comps.items()})

    def real_part(self):
        return self.map(lambda v: v.real_part())

    def imag_part(self):
        return self.map(lambda v: v.imag_part())

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        return (
            isinstance(other, AltTensor)
            and self.space == other.space
            and self.degree == other.degree
            and self.comps == other.comps
        )

    def __hash__(self):
        return hash((self.degree, frozenset(self.comps.items())))

    def items(self):
        return sorted(self.comps.items())

    def first_nonzero(self):
        it = self.items()
        return it[0] if it else None

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in self.items())
        return f"{type(self).__name__}[{self.degree}]({{{body}}})"


def wedge(a: AltTensor, b: AltTensor) -> AltTensor:
    a.check_space(b)
    out = {}
    for ka, va in a.comps.items():
        for kb, vb in b.comps.items():
            s, key = sort_sign(ka + kb)
            if s == 0:
                continue
            t = va * vb
            if s < 0:
                t = -t
            out[key] = out[key] + t if key in out else t
    return a._new(a.degree + b.degree, {k: v for k, v in out.items() if not v.is_zero()})


def function(space, f: Scalar, cls=AltTensor) -> AltTensor:
    return cls(space, 0, {(): f} if not f.is_zero() else {}, _trusted=True)


class AlgebroidData:
    """A Lie algebroid in a global frame e_0..e_{r-1} over a chart.

    ``anchor[a]`` lists the chart components of rho(e_a); ``structure[(a, b)]``
    (a < b) maps m to the coefficient of e_m in [e_a, e_b].
    """

    def __init__(self, vars, rank, anchor, structure):
        self.vars = tuple(vars)
        self.rank = rank
        self.anchor = [list(r) for r in anchor]
        self.structure = dict(structure)

    def rho(self, a, f: Scalar) -> Scalar:
        acc = Scalar.zero(self.vars)
        for i, c in enumerate(self.anchor[a]):
            if not c.is_zero():
                acc = acc + c * f.partial(i)
        return acc

    def bracket_basis(self, a, b):
        """Coefficients of [e_a, e_b] as a dict m -> Scalar."""
        if a == b:
            return {}
        if a < b:
            return self.structure.get((a, b), {})
        return {m: -c for m, c in self.structure.get((b, a), {}).items()}


def schouten(alg: AlgebroidData, P: AltTensor, Q: AltTensor) -> AltTensor:
    """Gerstenhaber bracket on sections of the exterior algebra of the algebroid.

    Normalised by [e_a, f] = rho(e_a) f and [e_a, e_b] = Lie bracket, with
    [P, Q] = -(-1)^{(p-1)(q-1)} [Q, P] and Leibniz in the second slot.
    """
    P.check_space(Q)
    space = P.space
    out = AltTensor.zero(space, P.degree + Q.degree - 1) if P.degree + Q.degree >= 1 else None
    for kp, fp in P.comps.items():
        for kq, fq in Q.comps.items():
            t = _bracket_terms(alg, space, _atoms(space, kp, fp), _atoms(space, kq, fq))
            if t is not None:
                out = t if out is None else out + t
    if out is None:
        out = AltTensor.zero(space, max(P.degree + Q.degree - 1, 0))
    return P._new(out.degree, out.comps)


def _atoms(space, idx, f):
    atoms = [AltTensor(space, 0, {(): f}, _trusted=True)]
    one = Scalar.one(space.vars)
    for a in idx:
        atoms.append(AltTensor(space, 1, {(a,): one}, _trusted=True))
    return atoms


def _wedge_all(space, parts):
    acc = parts[0]
    for p in parts[1:]:
        acc = wedge(acc, p)
    return acc


def _atom_bracket(alg, space, x: AltTensor, y: AltTensor):
    """Bracket of two atoms (functions or single basis elements)."""
    if x.degree == 0 and y.degree == 0:
        return AltTensor.zero(space, 0)
    if x.degree == 1 and y.degree == 0:
        if not x.comps or not y.comps:
            return AltTensor.zero(space, 0)
        (a,), = x.comps
        return AltTensor(space, 0, {(): alg.rho(a, y.comps[()])})
    if x.degree == 0 and y.degree == 1:
        return -_atom_bracket(alg, space, y, x)
    if not x.comps or not y.comps:
        return AltTensor.zero(space, 1)
    (a,), = x.comps
    (b,), = y.comps
    return AltTensor(space, 1, {(m,): c for m, c in alg.bracket_basis(a, b).items()})


def _bracket_terms(alg, space, P_atoms, Q_atoms):
    """[P, Q] where P and Q are wedge products of atoms."""
    p = sum(x.degree for x in P_atoms)
    total = None
    deg_before = 0
    for k, qk in enumerate(Q_atoms):
        # [P, qk] = -(-1)^{(p-1)(|qk|-1)} [qk, P]
        inner = None
        pdeg_before = 0
        for l, pl in enumerate(P_atoms):
            br = _atom_bracket(alg, space, qk, pl)
            if not br.is_zero():
                term = _wedge_all(space, P_atoms[:l] + [br] + P_atoms[l + 1 :])
                if ((qk.degree - 1) * pdeg_before) % 2:
                    term = -term
                inner = term if inner is None else inner + term
            pdeg_before += pl.degree
        if inner is not None and not inner.is_zero():
            if not ((p - 1) * (qk.degree - 1)) % 2:
                inner = -inner
            term = _wedge_all(space, Q_atoms[:k] + [inner] + Q_atoms[k + 1 :])
            if ((p - 1) * deg_before) % 2:
                term = -term
            total = term if total is None else total + term
        deg_before += qk.degree
    return total

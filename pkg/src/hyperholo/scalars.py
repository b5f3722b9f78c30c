"""Exact Gaussian-rational polynomial arithmetic and the expression language.

A :class:`Scalar` is a sparse polynomial in a fixed, ordered tuple of
coordinate names whose coefficients are complex numbers with rational real
and imaginary parts.  Coefficients are stored internally as ``(re, im)``
pairs of ``gmpy2.mpq``; :class:`GaussRat` is the public immutable view.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq

from .errors import ParseError, UnknownCoordinate, UnknownIdentifier, VariableMismatch

_ZERO = mpq(0)
_ONE = mpq(1)


def to_mpq(x) -> mpq:
    if isinstance(x, str):
        return mpq(Fraction(x.replace(" ", "")))
    return mpq(x)


def _fmt_rat(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class GaussRat:
    """An exact complex number re + im*i with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", to_mpq(re))
        object.__setattr__(self, "im", to_mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @classmethod
    def coerce(cls, x) -> "GaussRat":
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, complex):
            raise TypeError("floating complex numbers are not exact")
        if isinstance(x, tuple):
            return cls(*x)
        return cls(x, 0)

    @property
    def pair(self):
        return (self.re, self.im)

    def __add__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussRat.coerce(other))

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __mul__(self, other):
        o = GaussRat.coerce(other)
        return GaussRat(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussRat(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussRat.coerce(other).inverse()

    def conj(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __eq__(self, other):
        try:
            o = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussRat({_fmt_rat(self.re)}, {_fmt_rat(self.im)})"

    def __str__(self):
        return _fmt_coeff_standalone((self.re, self.im))


# -- internal coefficient helpers (pairs of mpq) -------------------------------------


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _pair(x):
    if isinstance(x, GaussRat):
        return (x.re, x.im)
    if isinstance(x, tuple):
        return (to_mpq(x[0]), to_mpq(x[1]))
    if isinstance(x, (int, Rational)) or type(x).__name__ == "mpq":
        return (mpq(x), _ZERO)
    if isinstance(x, str):
        return (to_mpq(x), _ZERO)
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


def _grlex_key(exp):
    return (sum(exp), exp)


class Scalar:
    """Polynomial over the Gaussian rationals in an ordered tuple of variables.

    ``terms`` maps exponent tuples to ``(re, im)`` pairs of ``mpq``; zero
    coefficients are never stored.
    """

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, vars, terms=None, _trusted=False):
        self.vars = tuple(vars)
        self._hash = None
        if _trusted:
            self.terms = terms
            return
        clean = {}
        n = len(self.vars)
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp} for variables {self.vars}")
            p = _pair(c)
            if p[0] != 0 or p[1] != 0:
                clean[exp] = p
        self.terms = clean

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, vars) -> "Scalar":
        return cls(vars, {}, _trusted=True)

    @classmethod
    def const(cls, vars, c) -> "Scalar":
        vars = tuple(vars)
        p = _pair(c)
        if p[0] == 0 and p[1] == 0:
            return cls(vars, {}, _trusted=True)
        return cls(vars, {(0,) * len(vars): p}, _trusted=True)

    @classmethod
    def one(cls, vars) -> "Scalar":
        return cls.const(vars, 1)

    @classmethod
    def imag_unit(cls, vars) -> "Scalar":
        return cls.const(vars, GaussRat(0, 1))

    @classmethod
    def var(cls, vars, name) -> "Scalar":
        vars = tuple(vars)
        if name not in vars:
            raise UnknownCoordinate(f"{name!r} is not one of {vars}")
        k = vars.index(name)
        exp = tuple(1 if j == k else 0 for j in range(len(vars)))
        return cls(vars, {exp: (_ONE, _ZERO)}, _trusted=True)

    # -- coercion ----------------------------------------------------------------

    def _lift(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.vars != self.vars:
                raise VariableMismatch(f"{self.vars} vs {other.vars}")
            return other
        return Scalar.const(self.vars, other)

    # -- ring operations ---------------------------------------------------------

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        out = dict(self.terms)
        for exp, c in o.terms.items():
            d = out.get(exp)
            if d is None:
                out[exp] = c
            else:
                s = (d[0] + c[0], d[1] + c[1])
                if s[0] == 0 and s[1] == 0:
                    del out[exp]
                else:
                    out[exp] = s
        return Scalar(self.vars, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Scalar(self.vars, {e: (-c[0], -c[1]) for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                p = _pair(other)
            except TypeError:
                return NotImplemented
            return self.scale(p)
        if other.vars != self.vars:
            raise VariableMismatch(f"{self.vars} vs {other.vars}")
        if not self.terms or not other.terms:
            return Scalar(self.vars, {}, _trusted=True)
        if len(other.terms) == 1:
            e, c = next(iter(other.terms.items()))
            if not any(e):
                return self.scale(c)
        if len(self.terms) == 1:
            e, c = next(iter(self.terms.items()))
            if not any(e):
                return other.scale(c)
        out = {}
        for e1, c1 in self.terms.items():
            a1, b1 = c1
            for e2, c2 in other.terms.items():
                a2, b2 = c2
                exp = tuple(x + y for x, y in zip(e1, e2))
                re = a1 * a2 - b1 * b2
                im = a1 * b2 + b1 * a2
                d = out.get(exp)
                if d is not None:
                    re += d[0]
                    im += d[1]
                out[exp] = (re, im)
        return Scalar(self.vars, {e: c for e, c in out.items() if c[0] != 0 or c[1] != 0}, _trusted=True)

    __rmul__ = __mul__

    def scale(self, c) -> "Scalar":
        p = c if isinstance(c, tuple) else _pair(c)
        if p[0] == 0 and p[1] == 0:
            return Scalar(self.vars, {}, _trusted=True)
        if p[1] == 0 and p[0] == 1:
            return self
        return Scalar(self.vars, {e: _cmul(v, p) for e, v in self.terms.items()}, _trusted=True)

    def __truediv__(self, other):
        if isinstance(other, Scalar):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("division only by nonzero constants")
            c = other.constant_value()
        else:
            c = GaussRat.coerce(other)
        return self.scale(c.inverse().pair)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Scalar.one(self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- predicates and views ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> GaussRat:
        if not self.is_constant():
            raise ValueError("not a constant")
        if not self.terms:
            return GaussRat(0, 0)
        return GaussRat(*next(iter(self.terms.values())))

    def constant_term(self) -> GaussRat:
        c = self.terms.get((0,) * len(self.vars))
        return GaussRat(*c) if c else GaussRat(0, 0)

    def is_real(self) -> bool:
        return all(c[1] == 0 for c in self.terms.values())

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def coeff(self, exp) -> GaussRat:
        c = self.terms.get(tuple(exp))
        return GaussRat(*c) if c else GaussRat(0, 0)

    def conj(self) -> "Scalar":
        return Scalar(self.vars, {e: (c[0], -c[1]) for e, c in self.terms.items()}, _trusted=True)

    def real_part(self) -> "Scalar":
        return Scalar(self.vars, {e: (c[0], _ZERO) for e, c in self.terms.items() if c[0] != 0}, _trusted=True)

    def imag_part(self) -> "Scalar":
        return Scalar(self.vars, {e: (c[1], _ZERO) for e, c in self.terms.items() if c[1] != 0}, _trusted=True)

    def partial(self, coord) -> "Scalar":
        if isinstance(coord, int):
            k = coord
            if not 0 <= k < len(self.vars):
                raise UnknownCoordinate(f"index {coord} out of range for {self.vars}")
        else:
            if coord not in self.vars:
                raise UnknownCoordinate(f"{coord!r} is not one of {self.vars}")
            k = self.vars.index(coord)
        out = {}
        for exp, c in self.terms.items():
            e = exp[k]
            if e:
                ne = exp[:k] + (e - 1,) + exp[k + 1 :]
                out[ne] = (c[0] * e, c[1] * e)
        return Scalar(self.vars, out, _trusted=True)

    def evaluate(self, point) -> GaussRat:
        """Value at a point given as a sequence of exact numbers, one per variable."""
        vals = [_pair(p) for p in point]
        if len(vals) != len(self.vars):
            raise VariableMismatch("point dimension does not match variables")
        total = (_ZERO, _ZERO)
        for exp, c in self.terms.items():
            t = c
            for v, e in zip(vals, exp):
                for _ in range(e):
                    t = _cmul(t, v)
            total = (total[0] + t[0], total[1] + t[1])
        return GaussRat(*total)

    def sorted_terms(self):
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    # -- equality -------------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.vars == other.vars and self.terms == other.terms
        try:
            return self == Scalar.const(self.vars, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return to_text(self)


# -- printing -------------------------------------------------------------------------


def _fmt_coeff_standalone(c) -> str:
    re, im = c
    if im == 0:
        return _fmt_rat(re)
    if re == 0:
        if im == 1:
            return "i"
        if im == -1:
            return "-i"
        return f"{_fmt_rat(im)}*i"
    sign = "-" if im < 0 else "+"
    a = abs(im)
    imag = "i" if a == 1 else f"{_fmt_rat(a)}*i"
    return f"({_fmt_rat(re)} {sign} {imag})"


def _fmt_monomial(vars, exp) -> str:
    parts = []
    for name, e in zip(vars, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def to_text(s: Scalar) -> str:
    """Canonical text in descending graded-lex order; ``parse(to_text(s)) == s``."""
    if not s.terms:
        return "0"
    pieces = []
    for exp, (re, im) in s.sorted_terms():
        mono = _fmt_monomial(s.vars, exp)
        if re != 0 and im != 0:
            neg = False
            coeff = _fmt_coeff_standalone((re, im))
        else:
            neg = (re < 0) if im == 0 else (im < 0)
            coeff = _fmt_coeff_standalone((abs(re), abs(im)))
        if mono:
            if coeff == "1":
                body = mono
            else:
                body = f"{coeff}*{mono}"
        else:
            body = coeff
        pieces.append((neg, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


# -- parsing --------------------------------------------------------------------------

_TOKEN = _re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text):
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            toks.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _Parser:
    def __init__(self, text, vars):
        self.text = text
        self.vars = tuple(vars)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def expect_op(self, ch):
        t = self.peek()
        if t[0] != "op" or t[1] != ch:
            self.fail(f"expected {ch!r}")
        return self.take()

    def parse(self):
        if self.peek()[0] == "end":
            self.fail("empty expression")
        s = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return s

    def expr(self):
        s = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                s = s + rhs if t[1] == "+" else s - rhs
            else:
                return s

    def term(self):
        s = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                rhs_tok = self.peek()
                rhs = self.unary()
                if t[1] == "*":
                    s = s * rhs
                else:
                    if not rhs.is_constant() or rhs.is_zero():
                        self.fail("division is only allowed by a nonzero constant", rhs_tok)
                    s = s / rhs
            else:
                return s

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            s = self.unary()
            return -s if t[1] == "-" else s
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.peek()
            if e[0] != "num":
                self.fail("exponent must be a non-negative integer literal")
            self.take()
            return base ** int(e[1])
        return base

    def atom(self):
        t = self.peek()
        if t[0] == "num":
            self.take()
            return Scalar.const(self.vars, int(t[1]))
        if t[0] == "id":
            self.take()
            name = t[1]
            if name in self.vars:
                return Scalar.var(self.vars, name)
            if name == "i":
                return Scalar.imag_unit(self.vars)
            raise UnknownIdentifier(f"unknown identifier {name!r}", self.text, t[2])
        if t[0] == "op" and t[1] == "(":
            self.take()
            s = self.expr()
            self.expect_op(")")
            return s
        if t[0] == "end":
            self.fail("unexpected end of expression")
        self.fail(f"unexpected token {t[1]!r}")


def parse(text: str, vars) -> Scalar:
    """Parse an expression over the given coordinate names.

    Grammar: integer and ``p/q`` literals, ``i``, coordinate names, binary
    ``+ - * /`` (division by constants only), unary ``+ -``, ``^`` with a
    non-negative integer literal exponent, and parentheses.  ``^`` binds
    tighter than unary minus, so ``-x^2`` is ``-(x^2)``.
    """
    if "i" in tuple(vars):
        raise ValueError("'i' is reserved for the imaginary unit")
    return _Parser(text, vars).parse()


def conj(a: Scalar) -> Scalar:
    return a.conj()


def partial(a: Scalar, coord) -> Scalar:
    return a.partial(coord)


def scalar_arith(a: Scalar, b: Scalar, op: str) -> Scalar:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    raise ValueError(f"unknown operation {op!r}")

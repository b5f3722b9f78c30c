"""Dense matrices of :class:`Scalar` entries with exact determinants and inverses."""

from __future__ import annotations

from itertools import combinations

from .errors import NoUnitMinor, WrongShape
from .scalars import GaussRat, Scalar, parse


class Matrix:
    """Immutable rows x cols matrix of Scalars sharing one variable tuple."""

    __slots__ = ("vars", "rows")

    def __init__(self, vars, rows):
        self.vars = tuple(vars)
        self.rows = tuple(tuple(r) for r in rows)
        width = {len(r) for r in self.rows}
        if len(width) > 1:
            raise WrongShape("ragged matrix")

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    @classmethod
    def zeros(cls, vars, n, m=None):
        m = n if m is None else m
        z = Scalar.zero(vars)
        return cls(vars, [[z] * m for _ in range(n)])

    @classmethod
    def identity(cls, vars, n):
        z, o = Scalar.zero(vars), Scalar.one(vars)
        return cls(vars, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def from_numbers(cls, vars, data):
        return cls(vars, [[Scalar.const(vars, x) for x in row] for row in data])

    @classmethod
    def from_text(cls, vars, data):
        return cls(vars, [[parse(str(x), vars) for x in row] for row in data])

    @classmethod
    def block(cls, blocks):
        """Assemble from a 2D list of Matrix blocks."""
        vars = blocks[0][0].vars
        rows = []
        for brow in blocks:
            for i in range(brow[0].shape[0]):
                rows.append([x for b in brow for x in b.rows[i]])
        return cls(vars, rows)

    def sub(self, r0, r1, c0, c1) -> "Matrix":
        return Matrix(self.vars, [row[c0:c1] for row in self.rows[r0:r1]])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other):
        return Matrix(self.vars, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return Matrix(self.vars, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Matrix(self.vars, [[-a for a in r] for r in self.rows])

    def scale(self, c) -> "Matrix":
        if isinstance(c, Scalar):
            return Matrix(self.vars, [[a * c for a in r] for r in self.rows])
        return Matrix(self.vars, [[a.scale(GaussRat.coerce(c).pair) for a in r] for r in self.rows])

    def __matmul__(self, other):
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise WrongShape(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.rows))
        z = Scalar.zero(self.vars)
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = z
                for a, b in zip(r, c):
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Matrix(self.vars, out)

    def apply(self, vec):
        z = Scalar.zero(self.vars)
        out = []
        for r in self.rows:
            acc = z
            for a, b in zip(r, vec):
                if a.terms and b.terms:
                    acc = acc + a * b
            out.append(acc)
        return out

    def T(self) -> "Matrix":
        return Matrix(self.vars, list(zip(*self.rows)))

    def conj(self) -> "Matrix":
        return Matrix(self.vars, [[a.conj() for a in r] for r in self.rows])

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def is_constant(self) -> bool:
        return all(a.is_constant() for r in self.rows for a in r)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def first_nonzero(self):
        """Index and value of the first nonzero entry, or None."""
        for i, r in enumerate(self.rows):
            for j, a in enumerate(r):
                if not a.is_zero():
                    return (i, j), a
        return None

    def to_text(self):
        return [[str(a) for a in r] for r in self.rows]

    def __repr__(self):
        return f"Matrix({self.to_text()})"


def det(m: Matrix) -> Scalar:
    """Determinant by column-wise Laplace expansion over row subsets."""
    n, k = m.shape
    if n != k:
        raise WrongShape("determinant of a non-square matrix")
    if n == 0:
        return Scalar.one(m.vars)
    return _det_rows(m, tuple(range(n)), tuple(range(n)))


def _det_rows(m: Matrix, rows, cols) -> Scalar:
    n = len(cols)
    rows = tuple(rows)
    prev = {(): Scalar.one(m.vars)}
    for k in range(n):
        c = cols[k]
        cur = {}
        for subset in combinations(rows, k + 1):
            acc = Scalar.zero(m.vars)
            for pos, r in enumerate(subset):
                a = m.rows[r][c]
                if a.is_zero():
                    continue
                rest = prev.get(subset[:pos] + subset[pos + 1 :])
                if rest is None or rest.is_zero():
                    continue
                term = a * rest
                acc = acc - term if (k - pos) % 2 else acc + term
            cur[subset] = acc
        prev = cur
    return prev[rows]


def minor_det(m: Matrix, rows, cols) -> Scalar:
    return _det_rows(m, tuple(rows), tuple(cols))


def _constant_inverse(m: Matrix) -> Matrix:
    n = m.shape[0]
    a = [[m.rows[i][j].constant_value() for j in range(n)] + [GaussRat(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return Matrix(m.vars, [[Scalar.const(m.vars, x) for x in row[n:]] for row in a])


def inverse(m: Matrix) -> Matrix:
    """Exact inverse; polynomial matrices must have a nonzero constant determinant."""
    n, k = m.shape
    if n != k:
        raise WrongShape("inverse of a non-square matrix")
    if m.is_constant():
        return _constant_inverse(m)
    d = det(m)
    if not d.is_constant() or d.is_zero():
        raise ZeroDivisionError("determinant is not a nonzero constant; inverse is not polynomial")
    dinv = d.constant_value().inverse()
    idx = tuple(range(n))
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows = idx[:j] + idx[j + 1 :]
            cols = idx[:i] + idx[i + 1 :]
            c = _det_rows(m, rows, cols)
            if (i + j) % 2:
                c = -c
            out[i][j] = c.scale(dinv.pair)
    return Matrix(m.vars, out)


def unit_minor(m: Matrix, preferred=()):
    """Row indices of a square minor (all columns) whose determinant is a nonzero constant.

    ``preferred`` row tuples are tried first.  Raises :class:`NoUnitMinor`.
    """
    n, k = m.shape
    tried = set()
    for rows in list(preferred) + list(combinations(range(n), k)):
        rows = tuple(rows)
        if rows in tried:
            continue
        tried.add(rows)
        d = _det_rows(m, rows, tuple(range(k)))
        if d.is_constant() and not d.is_zero():
            return rows, d.constant_value()
    raise NoUnitMinor("no square minor with nonzero constant determinant")

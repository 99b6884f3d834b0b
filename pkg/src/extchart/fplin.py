"""Deterministic dense linear algebra over prime fields F_p.

At p = 2 every matrix row (and every vector) is a Python int used as a
bitmask, bit j = column j, so a row operation is one xor and a dot product
is a popcount parity.  At odd p rows live in small numpy int64 arrays with
entries kept reduced in [0, p).

Elimination order is fixed everywhere (scan columns left to right, take the
topmost available nonzero row, reduce fully), so every basis choice made
downstream is reproducible run to run.
"""

from __future__ import annotations

import numpy as np


class NoSolution(Exception):
    """The linear system m x = b has no solution."""


# ---------------------------------------------------------------------------
# Vectors.  p = 2: int bitmask.  Odd p: 1-d int64 array, entries in [0, p).
# Helpers never mutate their arguments.

def vzero(p, n):
    return 0 if p == 2 else np.zeros(n, dtype=np.int64)


def vunit(p, n, i):
    if p == 2:
        return 1 << i
    v = np.zeros(n, dtype=np.int64)
    v[i] = 1
    return v


def vget(p, v, i):
    return (v >> i) & 1 if p == 2 else int(v[i])


def vset(p, v, i, c):
    c %= p
    if p == 2:
        return (v & ~(1 << i)) | (c << i)
    v = v.copy()
    v[i] = c
    return v


def vadd(p, u, v):
    return u ^ v if p == 2 else (u + v) % p


def vsub(p, u, v):
    return u ^ v if p == 2 else (u - v) % p


def vneg(p, v):
    return v if p == 2 else (-v) % p


def vscale(p, c, v):
    c %= p
    if p == 2:
        return v if c else 0
    return (c * v) % p


def is_vzero(p, v):
    return v == 0 if p == 2 else not v.any()


def veq(p, u, v):
    return u == v if p == 2 else bool(np.array_equal(u, v))


def vsupport(p, v, n=None):
    """Indices of the nonzero coordinates, ascending."""
    if p == 2:
        out = []
        while v:
            low = v & -v
            out.append(low.bit_length() - 1)
            v ^= low
        return out
    return [int(i) for i in np.nonzero(v)[0]]


def vfrom_pairs(p, n, pairs):
    """Vector with coordinate i set to c for each (i, c); repeats accumulate."""
    if p == 2:
        v = 0
        for i, c in pairs:
            if c % 2:
                v ^= 1 << i
        return v
    v = np.zeros(n, dtype=np.int64)
    for i, c in pairs:
        v[i] = (v[i] + c) % p
    return v


def vto_list(p, v, n):
    if p == 2:
        return [(v >> i) & 1 for i in range(n)]
    return [int(c) for c in v]


def vfrom_list(p, entries):
    if p == 2:
        return sum((e & 1) << i for i, e in enumerate(entries))
    return np.array(entries, dtype=np.int64) % p


# ---------------------------------------------------------------------------
# Matrices.

class FpMatrix:
    """Dense matrix over F_p acting on column vectors: y = m.matvec(x)."""

    __slots__ = ("p", "nrows", "ncols", "rows", "a")

    def __init__(self, p, nrows, ncols):
        self.p = p
        self.nrows = nrows
        self.ncols = ncols
        if p == 2:
            self.rows = [0] * nrows
            self.a = None
        else:
            self.rows = None
            self.a = np.zeros((nrows, ncols), dtype=np.int64)

    @classmethod
    def zero(cls, p, nrows, ncols):
        return cls(p, nrows, ncols)

    @classmethod
    def identity(cls, p, n):
        m = cls(p, n, n)
        if p == 2:
            m.rows = [1 << i for i in range(n)]
        else:
            m.a = np.eye(n, dtype=np.int64)
        return m

    @classmethod
    def from_rows(cls, p, ncols, rows):
        """Build from row vectors (ints at p=2, arrays otherwise)."""
        m = cls(p, len(rows), ncols)
        if p == 2:
            m.rows = list(rows)
        else:
            m.a = np.array([np.asarray(r) for r in rows],
                           dtype=np.int64).reshape(len(rows), ncols) % p
        return m

    @classmethod
    def from_cols(cls, p, nrows, cols):
        """Build from column vectors."""
        m = cls(p, nrows, len(cols))
        if p == 2:
            for j, c in enumerate(cols):
                bit = 1 << j
                while c:
                    low = c & -c
                    m.rows[low.bit_length() - 1] |= bit
                    c ^= low
        elif cols:
            m.a = np.column_stack([np.asarray(c) for c in cols]).astype(np.int64) % p
        return m

    @classmethod
    def from_dense(cls, p, entries):
        """Build from a list of rows of integer entries."""
        nrows = len(entries)
        ncols = len(entries[0]) if nrows else 0
        m = cls(p, nrows, ncols)
        if p == 2:
            m.rows = [sum((e & 1) << j for j, e in enumerate(r)) for r in entries]
        else:
            m.a = np.array(entries, dtype=np.int64).reshape(nrows, ncols) % p
        return m

    def to_dense(self):
        if self.p == 2:
            return [[(r >> j) & 1 for j in range(self.ncols)] for r in self.rows]
        return self.a.tolist()

    def copy(self):
        m = FpMatrix(self.p, self.nrows, self.ncols)
        if self.p == 2:
            m.rows = list(self.rows)
        else:
            m.a = self.a.copy()
        return m

    def get(self, i, j):
        if self.p == 2:
            return (self.rows[i] >> j) & 1
        return int(self.a[i, j])

    def row(self, i):
        return self.rows[i] if self.p == 2 else self.a[i].copy()

    def col(self, j):
        if self.p == 2:
            v = 0
            bit = 1 << j
            for i, r in enumerate(self.rows):
                if r & bit:
                    v |= 1 << i
            return v
        return self.a[:, j].copy()

    def row_list(self):
        """All rows as vectors."""
        return [self.row(i) for i in range(self.nrows)]

    def matvec(self, x):
        if self.p == 2:
            y = 0
            for i, r in enumerate(self.rows):
                if (r & x).bit_count() & 1:
                    y |= 1 << i
            return y
        return (self.a @ x) % self.p

    def matmul(self, other):
        assert self.p == other.p and self.ncols == other.nrows
        out = FpMatrix(self.p, self.nrows, other.ncols)
        if self.p == 2:
            brows = other.rows
            for i, r in enumerate(self.rows):
                acc = 0
                while r:
                    low = r & -r
                    acc ^= brows[low.bit_length() - 1]
                    r ^= low
                out.rows[i] = acc
        else:
            out.a = (self.a @ other.a) % self.p
        return out

    def transpose(self):
        out = FpMatrix(self.p, self.ncols, self.nrows)
        if self.p == 2:
            for i, r in enumerate(self.rows):
                bit = 1 << i
                while r:
                    low = r & -r
                    out.rows[low.bit_length() - 1] |= bit
                    r ^= low
        else:
            out.a = self.a.T.copy()
        return out

    def is_zero(self):
        if self.p == 2:
            return not any(self.rows)
        return not self.a.any()

    def __eq__(self, other):
        if not isinstance(other, FpMatrix):
            return NotImplemented
        if (self.p, self.nrows, self.ncols) != (other.p, other.nrows, other.ncols):
            return False
        return self.rows == other.rows if self.p == 2 else bool(np.array_equal(self.a, other.a))

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self.nrows}x{self.ncols})"


def vstack(mats):
    top = mats[0]
    assert all(m.p == top.p and m.ncols == top.ncols for m in mats)
    out = FpMatrix(top.p, sum(m.nrows for m in mats), top.ncols)
    if top.p == 2:
        out.rows = [r for m in mats for r in m.rows]
    else:
        out.a = np.vstack([m.a for m in mats])
    return out


def hstack(mats):
    left = mats[0]
    assert all(m.p == left.p and m.nrows == left.nrows for m in mats)
    out = FpMatrix(left.p, left.nrows, sum(m.ncols for m in mats))
    if left.p == 2:
        for i in range(left.nrows):
            acc, off = 0, 0
            for m in mats:
                acc |= m.rows[i] << off
                off += m.ncols
            out.rows[i] = acc
    else:
        out.a = np.hstack([m.a for m in mats])
    return out


# ---------------------------------------------------------------------------
# Echelon forms and derived bases.

class EchelonForm:
    """Reduced row echelon form R of some m, with pivot columns.

    When built with transform=True it also carries an invertible T with
    T m = R, which makes m x = b solvable by one matvec per right-hand side.
    """

    __slots__ = ("p", "matrix", "pivots", "transform")

    def __init__(self, p, matrix, pivots, transform=None):
        self.p = p
        self.matrix = matrix
        self.pivots = pivots
        self.transform = transform

    @property
    def rank(self):
        return len(self.pivots)

    def free_columns(self):
        pivset = set(self.pivots)
        return [c for c in range(self.matrix.ncols) if c not in pivset]

    def reduce(self, v):
        """Reduce v modulo the row space: zero out every pivot coordinate."""
        p = self.p
        R = self.matrix
        if p == 2:
            for i, c in enumerate(self.pivots):
                if (v >> c) & 1:
                    v ^= R.rows[i]
            return v
        v = v % p
        for i, c in enumerate(self.pivots):
            if v[c]:
                v = (v - v[c] * R.a[i]) % p
        return v

    def in_span(self, v):
        return is_vzero(self.p, self.reduce(v))

    def solve(self, b):
        """One x with m x = b, free coordinates set to 0, or NoSolution."""
        assert self.transform is not None, "need rref(m, transform=True)"
        y = self.transform.matvec(b)
        r = self.rank
        n = self.matrix.ncols
        if self.p == 2:
            if y >> r:
                raise NoSolution("inconsistent system")
            x = 0
            for i, c in enumerate(self.pivots):
                if (y >> i) & 1:
                    x |= 1 << c
            return x
        if y[r:].any():
            raise NoSolution("inconsistent system")
        x = np.zeros(n, dtype=np.int64)
        if r:
            x[self.pivots] = y[:r]
        return x


def rref(m, transform=False):
    """Reduced row echelon form; leftmost pivot, topmost row, full reduction."""
    p, n, cols = m.p, m.nrows, m.ncols
    pivots = []
    if p == 2:
        rows = list(m.rows)
        trows = [1 << i for i in range(n)] if transform else None
        r = 0
        for c in range(cols):
            if r == n:
                break
            bit = 1 << c
            piv = next((i for i in range(r, n) if rows[i] & bit), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            if transform:
                trows[r], trows[piv] = trows[piv], trows[r]
            for i in range(n):
                if i != r and rows[i] & bit:
                    rows[i] ^= rows[r]
                    if transform:
                        trows[i] ^= trows[r]
            pivots.append(c)
            r += 1
        R = FpMatrix(2, n, cols)
        R.rows = rows
        T = None
        if transform:
            T = FpMatrix(2, n, n)
            T.rows = trows
        return EchelonForm(2, R, pivots, T)

    a = m.a.copy()
    t = np.eye(n, dtype=np.int64) if transform else None
    r = 0
    for c in range(cols):
        if r == n:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            if transform:
                t[[r, piv]] = t[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
            if transform:
                t[r] = (t[r] * inv) % p
        for i in np.nonzero(a[:, c])[0]:
            if i != r:
                f = int(a[i, c])
                a[i] = (a[i] - f * a[r]) % p
                if transform:
                    t[i] = (t[i] - f * t[r]) % p
        pivots.append(c)
        r += 1
    R = FpMatrix(p, n, cols)
    R.a = a
    T = None
    if transform:
        T = FpMatrix(p, n, n)
        T.a = t
    return EchelonForm(p, R, pivots, T)


def rank(m):
    return rref(m).rank


def solve(m, b):
    """One x with m x = b (free coordinates 0), or NoSolution."""
    return rref(m, transform=True).solve(b)


def kernel_basis(m):
    """Basis of ker(x -> m x) as rows of a matrix, one per free column.

    The vector for free column f has 1 at f and 0 at every other free
    column, so the coefficients of any kernel element in this basis can be
    read straight off its free coordinates.
    """
    ech = m if isinstance(m, EchelonForm) else rref(m)
    p = ech.p
    R = ech.matrix
    n = R.ncols
    out = []
    if p == 2:
        for f in ech.free_columns():
            v = 1 << f
            bit = 1 << f
            for i, c in enumerate(ech.pivots):
                if R.rows[i] & bit:
                    v |= 1 << c
            out.append(v)
    else:
        for f in ech.free_columns():
            v = np.zeros(n, dtype=np.int64)
            v[f] = 1
            for i, c in enumerate(ech.pivots):
                if R.a[i, f]:
                    v[c] = (-R.a[i, f]) % p
            out.append(v)
    return FpMatrix.from_rows(p, n, out)


class QuotientBasis:
    """F_p^n modulo a row span, with a fixed coordinate section.

    The surviving coordinates are the non-pivot columns of the span's rref;
    project() reduces into the complement and reads those coordinates off,
    lift() embeds back on exactly those coordinates (project . lift = id).
    """

    __slots__ = ("p", "n", "ech", "coords")

    def __init__(self, span):
        self.p = span.p
        self.n = span.ncols
        self.ech = span if isinstance(span, EchelonForm) else rref(span)
        self.coords = self.ech.free_columns()

    @property
    def dim(self):
        return len(self.coords)

    def project(self, v):
        v = self.ech.reduce(v)
        if self.p == 2:
            out = 0
            for k, c in enumerate(self.coords):
                if (v >> c) & 1:
                    out |= 1 << k
            return out
        return v[self.coords] if self.coords else np.zeros(0, dtype=np.int64)

    def lift(self, w):
        if self.p == 2:
            v = 0
            for k, c in enumerate(self.coords):
                if (w >> k) & 1:
                    v |= 1 << c
            return v
        v = np.zeros(self.n, dtype=np.int64)
        if self.coords:
            v[self.coords] = w
        return v


def cokernel_coords(m):
    """coker(x -> m x) = F_p^nrows / column space, as a QuotientBasis."""
    return QuotientBasis(m.transpose())

"""Brute-force Ext dimensions from the dual of the normalized bar
resolution.

Test-only cross-check for the resolution engine: nothing here is shared
with resolve beyond the algebra product and the module action, so agreement
between the two tables is meaningful.

Cochains in level s are functionals on tuples (m_1, ..., m_s, x) with m_i
positive-degree basis monomials and x a module basis vector.  Because the
functionals are linear over the algebra into the trivial module, the dual
differential keeps only the terms of the bar differential with unit
coefficient: adjacent products inside the tuple and the action on the
module slot, with alternating signs.
"""

from __future__ import annotations

from .fplin import FpMatrix, rank, vget
from .steenrod import mono_degree, multiply_mono

SIZE_GUARD = 10 ** 6


class SizeGuardError(Exception):
    """A bar basis would exceed the configured size guard."""


class BarComplex:
    def __init__(self, profile, module, s_max, t_max):
        if not module.complete and module.t_max < t_max:
            raise SizeGuardError(
                f"module realized to t={module.t_max} < requested {t_max}")
        self.profile = profile
        self.module = module
        self.s_max = s_max
        self.t_max = t_max
        self._basis = {}
        self._index = {}
        self._dmat = {}

    def basis(self, s, t):
        """Tuples (m_1, ..., m_s, j): positive-degree monomials and a module
        basis index, total degree t.  Fixed enumeration order."""
        key = (s, t)
        hit = self._basis.get(key)
        if hit is not None:
            return hit
        out = []
        if s == 0:
            out = [(j,) for j in range(self.module.dim_at(t))]
        else:
            for d in range(1, t + 1):
                for mono in self.profile.basis(d):
                    for rest in self.basis(s - 1, t - d):
                        out.append((mono,) + rest)
        if len(out) > SIZE_GUARD:
            raise SizeGuardError(f"bar basis at (s,t)=({s},{t}): {len(out)}")
        self._basis[key] = out
        self._index[key] = {tup: i for i, tup in enumerate(out)}
        return out

    def diff_matrix(self, s, t):
        """delta: C^{s,t} -> C^{s+1,t}.  Row tau, column sigma = coefficient
        of sigma in the generator part of the bar boundary of tau."""
        key = (s, t)
        hit = self._dmat.get(key)
        if hit is not None:
            return hit
        p = self.profile.p
        src = self.basis(s, t)
        tgt = self.basis(s + 1, t)
        idx = self._index[(s, t)]
        rows = []
        for tau in tgt:
            row = [0] * len(src)
            monos, j = tau[:-1], tau[-1]
            mdeg = t - sum(mono_degree(p, m) for m in monos)
            # adjacent products (closure keeps every term in the basis)
            for k in range(s):
                prod = multiply_mono(p, monos[k], monos[k + 1])
                sign = (-1) ** (k + 1)
                for m, c in prod.items():
                    sigma = monos[:k] + (m,) + monos[k + 2:] + (j,)
                    pos = idx[sigma]
                    row[pos] = (row[pos] + sign * c) % p
            # action on the module slot
            act = self.module.action(monos[-1], mdeg)
            sign = (-1) ** (s + 1)
            if act.nrows:
                col = act.col(j)
                for r in range(act.nrows):
                    c = vget(p, col, r)
                    if c:
                        pos = idx[monos[:-1] + (r,)]
                        row[pos] = (row[pos] + sign * c) % p
            rows.append(row)
        mat = FpMatrix.from_dense(p, rows) if rows else \
            FpMatrix.zero(p, 0, len(src))
        self._dmat[key] = mat
        return mat

    def cohomology_dim(self, s, t):
        d_out = self.diff_matrix(s, t)
        cycles = d_out.ncols - rank(d_out)
        if s == 0:
            return cycles
        return cycles - rank(self.diff_matrix(s - 1, t))


def bar_ext_dims(profile, module, s_max, t_max):
    """{(s,t): dim Ext} for s <= s_max, t <= t_max, nonzero entries only."""
    bc = BarComplex(profile, module, s_max, t_max)
    out = {}
    for s in range(s_max + 1):
        for t in range(t_max + 1):
            n = bc.cohomology_dim(s, t)
            if n:
                out[(s, t)] = n
    return out

"""Connecting homomorphisms of short exact sequences on Ext charts.

Two routes compute the boundary map delta: Ext^{s,t}(sub) -> Ext^{s+1,t}(quot)
of a verified short exact sequence:

  * the snake route threads the sequence through the horseshoe resolution of
    the middle module: a section of the surjection on level-0 generators
    feeds a column block alpha_s: F_s(quot) -> F_{s-1}(sub) satisfying
    d alpha = -alpha d, and delta reads off alpha's unit coefficients;

  * the Yoneda route builds the extension class as a module-valued cocycle
    on the level-1 generators of the quotient resolution, lifts it to a
    chain representative with the same alternating convention, and
    precomposes chart functionals with it.

At p = 2 the two must agree entrywise; at odd p they differ at most by one
global sign per sequence (the base solves differ by a sign, the recurrences
do not).  Composites of two sequences multiply the per-bidegree matrices,
cross-checked against the spliced two-step chain representative.
"""

from __future__ import annotations

from .fplin import (
    FpMatrix, is_vzero, rank, rref, vadd, vget, vneg, vscale, vset, vunit,
    vzero,
)
from .resolve import (
    ChainMap, compose_chain_maps, induced_chart_matrix, lift_chain_map,
    minimal_resolution,
)


class WiringError(Exception):
    """Sequences or resolutions do not fit together."""


# ---------------------------------------------------------------------------
# module compatibility (for composing sequences loaded from separate files)

def modules_match(a, b, t_hi):
    """Structural equality of two graded modules through degree t_hi: same
    prime, dimensions, labels, and action matrices for every profile
    monomial that stays within the window."""
    if a is b:
        return True
    if a.profile is not b.profile:
        return False
    for t in range(t_hi + 1):
        if a.dim_at(t) != b.dim_at(t):
            return False
        if a.labels(t) != b.labels(t):
            return False
    top = a.profile.top_degree()
    for d in range(1, min(top, t_hi) + 1):
        for mono in a.profile.basis(d):
            for t in range(t_hi - d + 1):
                if a.dim_at(t) == 0:
                    continue
                if a.action(mono, t) != b.action(mono, t):
                    return False
    return True


# ---------------------------------------------------------------------------
# the shared chain-level ingredients

def _solve_cache(map_, cache, t):
    hit = cache.get(t)
    if hit is None:
        hit = rref(map_.matrix(t), transform=True)
        cache[t] = hit
    return hit


def _section_values(ses, res_quot, surj_ech):
    """sigma0 on level-0 quotient generators: vectors in mid with
    surj(sigma0(e)) = augmentation(e)."""
    out = []
    for i, tg in enumerate(res_quot.gens[0]):
        ech = _solve_cache(ses.surj, surj_ech, tg)
        out.append(ech.solve(res_quot.dvals[0][i]))
    return out


def _apply_section(ses, res_quot, sig, t, vec):
    """sigma0 extended linearly over the algebra: (F_0(quot))_t -> mid_t."""
    p = ses.mid.profile.p
    out = vzero(p, ses.mid.dim_at(t))
    for col, (i, mono) in enumerate(res_quot.free[0].labels(t)):
        c = vget(p, vec, col)
        if c:
            tg = res_quot.gens[0][i]
            w = ses.mid.action(mono, tg).matvec(sig[i])
            out = vadd(p, out, vscale(p, c, w))
    return out


def _level1_cocycle(ses, res_quot):
    """Module-valued cocycle on level-1 quotient generators: u_i in sub with
    inj(u_i) = sigma0(d e_i).  This is the extension's class datum."""
    surj_ech, inj_ech = {}, {}
    sig = _section_values(ses, res_quot, surj_ech)
    out = []
    for i, tg in enumerate(res_quot.gens[1]):
        w = _apply_section(ses, res_quot, sig, tg, res_quot.dvals[1][i])
        ech = _solve_cache(ses.inj, inj_ech, tg)
        out.append(ech.solve(w))
    return out


def _connecting_chain(ses, res_sub, res_quot, s_top, base_sign):
    """Chain map F_s(quot) -> F_{s-1}(sub) (level shift 1, no degree shift):
    augmentation o (level 1) = base_sign * cocycle, then d c_{s+1} = -c_s d."""
    p = ses.sub.profile.p
    u = _level1_cocycle(ses, res_quot)
    vals1 = []
    for i, tg in enumerate(res_quot.gens[1]):
        b = u[i] if base_sign == 1 else vneg(p, u[i])
        vals1.append(res_sub.solve_aug(tg, b))
    values = {1: vals1}
    cm = ChainMap(res_quot, res_sub, 1, 0, values)
    for s in range(2, s_top + 1):
        vals = []
        for i, tg in enumerate(res_quot.gens[s]):
            rhs = vneg(p, cm.apply(s - 1, tg, res_quot.dvals[s][i]))
            if res_sub.free[s - 1].dim_at(tg) == 0:
                assert is_vzero(p, rhs)
                vals.append(vzero(p, 0))
            else:
                vals.append(res_sub.solve_d(s - 1, tg, rhs))
        values[s] = vals
    return cm


def _pairing_matrix(chain, s, t):
    """delta entries: row j (target-chart generator of chain.src at level
    s + chain.k)  x  column m (chain.tgt generator at level s): the unit
    coefficient of m in the chain value on j."""
    src, tgt = chain.src, chain.tgt
    p = src.profile.p
    unit = tgt.profile.unit_mono()
    rows_pos = src.gen_positions(s + chain.k, t)
    cols_pos = tgt.gen_positions(s, t)
    rows = []
    for j in rows_pos:
        v = chain.values[s + chain.k][j]
        rows.append([vget(p, v, tgt.free[s].index_of(t, m, unit))
                     for m in cols_pos])
    if not rows:
        return FpMatrix.zero(p, 0, len(cols_pos))
    return FpMatrix.from_dense(p, rows)


# ---------------------------------------------------------------------------
# connecting data

class ConnectingData:
    """Per-bidegree boundary matrices delta: Ext^{s,t}(sub) -> Ext^{s+1,t}(quot)."""

    def __init__(self, ses, res_sub, res_quot, chain, route):
        self.ses = ses
        self.res_sub = res_sub
        self.res_quot = res_quot
        self.chain = chain
        self.route = route
        self.s_max = min(res_sub.s_max, res_quot.s_max - 1,
                         max(chain.values) - 1)
        self.t_max = min(res_sub.t_max, res_quot.t_max)
        self._delta = {}

    def delta(self, s, t):
        if not (0 <= s <= self.s_max and 0 <= t <= self.t_max):
            raise WiringError(f"delta({s},{t}) outside window "
                              f"({self.s_max},{self.t_max})")
        key = (s, t)
        hit = self._delta.get(key)
        if hit is None:
            hit = _pairing_matrix(self.chain, s, t)
            self._delta[key] = hit
        return hit

    def rank(self, s, t):
        return rank(self.delta(s, t))

    def kernel_dim(self, s, t):
        """dim ker(delta) at the sub-chart bidegree (s,t)."""
        m = self.delta(s, t)
        return m.ncols - rank(m)

    def cokernel_dim(self, s, t):
        """dim coker(delta) at the quot-chart bidegree (s,t): chart dimension
        there minus the rank of the boundary arriving from (s-1,t)."""
        n = self.res_quot.ext_dim(s, t)
        if s == 0:
            return n
        return n - self.rank(s - 1, t)


def _prep(ses, smax, tmax, res_sub, res_quot):
    if res_sub is None:
        res_sub = minimal_resolution(ses.sub, smax, tmax)
    if res_quot is None:
        res_quot = minimal_resolution(ses.quot, smax + 1, tmax)
    if not modules_match(res_sub.module, ses.sub, min(tmax, res_sub.t_max)):
        raise WiringError("sub resolution does not resolve the sequence's sub")
    if not modules_match(res_quot.module, ses.quot, min(tmax, res_quot.t_max)):
        raise WiringError("quot resolution does not resolve the sequence's quot")
    return res_sub, res_quot


def connecting_hom(ses, smax, tmax, res_sub=None, res_quot=None):
    """Snake route: horseshoe column block, extracted boundary."""
    res_sub, res_quot = _prep(ses, smax, tmax, res_sub, res_quot)
    s_top = min(smax + 1, res_quot.s_max, res_sub.s_max + 1)
    chain = _connecting_chain(ses, res_sub, res_quot, s_top, base_sign=-1)
    return ConnectingData(ses, res_sub, res_quot, chain, route="snake")


def connecting_hom_yoneda(ses, smax, tmax, res_sub=None, res_quot=None,
                          ecls=None):
    """Yoneda route: precomposition with the extension class's chain
    representative."""
    res_sub, res_quot = _prep(ses, smax, tmax, res_sub, res_quot)
    if ecls is None:
        ecls = extension_class(ses, smax, tmax, res_sub=res_sub,
                               res_quot=res_quot)
    return ConnectingData(ses, res_sub, res_quot, ecls.chain, route="yoneda")


def routes_agree(a, b):
    """(ok, sign): the two deltas are equal entrywise up to one global unit
    on every shared bidegree.  sign is the unit (1 at p=2)."""
    p = a.res_sub.profile.p
    s_hi = min(a.s_max, b.s_max)
    t_hi = min(a.t_max, b.t_max)
    sign = None
    for s in range(s_hi + 1):
        for t in range(t_hi + 1):
            m1, m2 = a.delta(s, t), b.delta(s, t)
            if m1.nrows == 0 or m1.ncols == 0:
                if not (m2.nrows == m1.nrows and m2.ncols == m1.ncols):
                    return False, None
                continue
            for i in range(m1.nrows):
                for j in range(m1.ncols):
                    x, y = m1.get(i, j), m2.get(i, j)
                    if x == 0 and y == 0:
                        continue
                    if (x == 0) != (y == 0):
                        return False, None
                    c = (x * pow(y, p - 2, p)) % p if p != 2 else 1
                    if sign is None:
                        sign = c
                    elif c != sign:
                        return False, None
    return True, 1 if sign is None else sign


# ---------------------------------------------------------------------------
# extension classes

class ExtensionClass:
    """The class of the sequence in first-Ext of (quot, sub): a module-valued
    cocycle on level-1 quotient generators plus a lifted chain representative."""

    def __init__(self, ses, res_sub, res_quot, cocycle, chain):
        self.ses = ses
        self.res_sub = res_sub
        self.res_quot = res_quot
        self.cocycle = cocycle
        self.chain = chain

    def is_zero(self):
        """True iff the cocycle is a coboundary, i.e. the sequence splits:
        some module map phi: F_0(quot) -> sub has phi(d e_i) = u_i."""
        ses = self.ses
        rq = self.res_quot
        p = ses.sub.profile.p
        unknowns = []  # (gen index h, sub-degree basis position)
        for h, th in enumerate(rq.gens[0]):
            for w in range(ses.sub.dim_at(th)):
                unknowns.append((h, w))
        rhs_blocks, row_dims = [], []
        for i, tg in enumerate(rq.gens[1]):
            rhs_blocks.append(self.cocycle[i])
            row_dims.append(ses.sub.dim_at(tg))
        cols = []
        for (h, w) in unknowns:
            th = rq.gens[0][h]
            base = vunit(p, ses.sub.dim_at(th), w)
            col_parts = []
            for i, tg in enumerate(rq.gens[1]):
                part = vzero(p, ses.sub.dim_at(tg))
                dv = rq.dvals[1][i]
                for cidx, (g0, mono) in enumerate(rq.free[0].labels(tg)):
                    if g0 != h:
                        continue
                    c = vget(p, dv, cidx)
                    if c:
                        part = vadd(p, part, vscale(
                            p, c, ses.sub.action(mono, th).matvec(base)))
                col_parts.append(part)
            cols.append(_concat(p, col_parts, row_dims))
        target = _concat(p, rhs_blocks, row_dims)
        mat = FpMatrix.from_cols(p, sum(row_dims), cols)
        ech = rref(mat, transform=True)
        return ech.in_span(target)


def _concat(p, blocks, dims):
    out = vzero(p, sum(dims))
    off = 0
    for b, n in zip(blocks, dims):
        for r in range(n):
            c = vget(p, b, r)
            if c:
                out = vset(p, out, off + r, c)
        off += n
    return out


def extension_class(ses, smax, tmax, res_sub=None, res_quot=None):
    """Chain representative of the sequence's class, alternating convention,
    base sign +1."""
    res_sub, res_quot = _prep(ses, smax, tmax, res_sub, res_quot)
    s_top = min(smax + 1, res_quot.s_max, res_sub.s_max + 1)
    cocycle = _level1_cocycle(ses, res_quot)
    chain = _connecting_chain(ses, res_sub, res_quot, s_top, base_sign=1)
    return ExtensionClass(ses, res_sub, res_quot, cocycle, chain)


# ---------------------------------------------------------------------------
# composites of two sequences

class ComposedConnecting:
    """delta_outer o delta_inner: Ext^{s,t}(inner sub) -> Ext^{s+2,t}(outer quot)."""

    def __init__(self, inner, outer, res_first, res_mid, res_last):
        self.inner = inner
        self.outer = outer
        self.res_first = res_first   # resolves inner.sub
        self.res_mid = res_mid       # resolves the shared module
        self.res_last = res_last     # resolves outer.quot
        self.s_max = min(inner.s_max, outer.s_max - 1)
        self.t_max = min(inner.t_max, outer.t_max)
        self._delta = {}

    def delta(self, s, t):
        key = (s, t)
        hit = self._delta.get(key)
        if hit is None:
            hit = self.outer.delta(s + 1, t).matmul(self.inner.delta(s, t))
            self._delta[key] = hit
        return hit

    def rank(self, s, t):
        return rank(self.delta(s, t))

    def kernel_dim(self, s, t):
        m = self.delta(s, t)
        return m.ncols - rank(m)

    def cokernel_dim(self, s, t):
        n = self.res_last.ext_dim(s, t)
        if s < 2:
            return n
        return n - self.rank(s - 2, t)


def compose_connecting(inner, outer, smax, tmax,
                       res_first=None, res_mid=None, res_last=None):
    """Boundary of the spliced pair: build each sequence's delta through a
    shared resolution of the linking module (inner.quot = outer.sub) and
    multiply per bidegree."""
    if not modules_match(inner.quot, outer.sub, tmax):
        raise WiringError(
            "inner quotient and outer sub are not the same module")
    if res_first is None:
        res_first = minimal_resolution(inner.sub, smax, tmax)
    if res_mid is None:
        res_mid = minimal_resolution(outer.sub, smax + 1, tmax)
    if res_last is None:
        res_last = minimal_resolution(outer.quot, smax + 2, tmax)
    d_in = connecting_hom(inner, smax, tmax, res_sub=res_first,
                          res_quot=res_mid)
    d_out = connecting_hom(outer, smax + 1, tmax, res_sub=res_mid,
                           res_quot=res_last)
    return ComposedConnecting(d_in, d_out, res_first, res_mid, res_last)


def splice_matrices(comp, smax, tmax):
    """Independent route for the composite: Yoneda with the two-step class,
    i.e. the composition of the two extension-class chain representatives.
    Returns {(s,t): matrix} on the window where both chains exist."""
    e_in = extension_class(comp.inner.ses, comp.inner.s_max, comp.inner.t_max,
                           res_sub=comp.res_first, res_quot=comp.res_mid)
    e_out = extension_class(comp.outer.ses, comp.outer.s_max, comp.outer.t_max,
                            res_sub=comp.res_mid, res_quot=comp.res_last)
    spliced = compose_chain_maps(e_in.chain, e_out.chain)
    out = {}
    for s in range(min(smax, comp.s_max) + 1):
        for t in range(min(tmax, comp.t_max) + 1):
            if s + 2 in spliced.values:
                out[(s, t)] = _pairing_matrix(spliced, s, t)
    return out


def composite_routes_agree(comp, smax, tmax):
    """(ok, sign) comparing matrix products against the spliced route."""
    spl = splice_matrices(comp, smax, tmax)
    p = comp.res_first.profile.p
    sign = None
    for (s, t), m2 in sorted(spl.items()):
        m1 = comp.delta(s, t)
        if m1.nrows != m2.nrows or m1.ncols != m2.ncols:
            return False, None
        for i in range(m1.nrows):
            for j in range(m1.ncols):
                x, y = m1.get(i, j), m2.get(i, j)
                if x == 0 and y == 0:
                    continue
                if (x == 0) != (y == 0):
                    return False, None
                c = (x * pow(y, p - 2, p)) % p if p != 2 else 1
                if sign is None:
                    sign = c
                elif c != sign:
                    return False, None
    return True, 1 if sign is None else sign


# ---------------------------------------------------------------------------
# long exact sequence assembly

class LESReport:
    def __init__(self, ses, conn, istar, qstar, res_mid, s_max, t_max):
        self.ses = ses
        self.conn = conn
        self._istar_fn = istar
        self._qstar_fn = qstar
        self.res_mid = res_mid
        self.s_max = s_max
        self.t_max = t_max
        self.failures = []
        self._scan()

    def istar(self, s, t):
        """Matrix Ext^{s,t}(mid) -> Ext^{s,t}(sub) in chart coordinates."""
        return self._istar_fn(s, t)

    def qstar(self, s, t):
        """Matrix Ext^{s,t}(quot) -> Ext^{s,t}(mid)."""
        return self._qstar_fn(s, t)

    def _scan(self):
        conn = self.conn
        for t in range(self.t_max + 1):
            for s in range(self.s_max + 1):
                qm = self.qstar(s, t)
                im = self.istar(s, t)
                dim_mid = im.ncols
                dim_sub = im.nrows
                dim_quot = qm.ncols
                if not im.matmul(qm).is_zero():
                    self.failures.append((s, t, "i* o q* != 0"))
                if rank(qm) + rank(im) != dim_mid:
                    self.failures.append((s, t, "not exact at mid"))
                if s <= conn.s_max:
                    dm = conn.delta(s, t)
                    if not dm.matmul(im).is_zero():
                        self.failures.append((s, t, "delta o i* != 0"))
                    if rank(im) + rank(dm) != dim_sub:
                        self.failures.append((s, t, "not exact at sub"))
                    if s + 1 <= self.s_max:
                        qn = self.qstar(s + 1, t)
                        if not qn.matmul(dm).is_zero():
                            self.failures.append((s, t, "q* o delta != 0"))
                        if rank(dm) + rank(qn) != qn.ncols:
                            self.failures.append((s, t, "not exact at quot"))
                if s == 0 and rank(qm) != dim_quot:
                    self.failures.append((s, t, "q* not injective at s=0"))
        self.ok = not self.failures

    def chart_dims(self, which):
        from .resolve import ext_dims
        res = {"sub": self.conn.res_sub, "quot": self.conn.res_quot,
               "mid": self.res_mid}[which]
        return ext_dims(res)


def les_assemble(ses, smax, tmax, res_sub=None, res_mid=None, res_quot=None):
    """Exactness verdicts for ... -> Ext^s(quot) -> Ext^s(mid) -> Ext^s(sub)
    -> Ext^{s+1}(quot) -> ... plus the boundary data."""
    if res_mid is None:
        res_mid = minimal_resolution(ses.mid, smax, tmax)
    conn = connecting_hom(ses, smax, tmax, res_sub=res_sub, res_quot=res_quot)
    res_sub, res_quot = conn.res_sub, conn.res_quot
    fi = lift_chain_map(res_sub, res_mid, ses.inj)
    fq = lift_chain_map(res_mid, res_quot, ses.surj)
    icache, qcache = {}, {}

    def istar(s, t):
        if (s, t) not in icache:
            icache[(s, t)] = induced_chart_matrix(fi, s, t)
        return icache[(s, t)]

    def qstar(s, t):
        if (s, t) not in qcache:
            qcache[(s, t)] = induced_chart_matrix(fq, s, t)
        return qcache[(s, t)]

    s_hi = min(smax, res_mid.s_max, res_sub.s_max, res_quot.s_max)
    return LESReport(ses, conn, istar, qstar, res_mid, s_hi,
                     min(tmax, conn.t_max))

"""Minimal free resolutions over a profiled subalgebra, Ext charts, chain
maps, and Yoneda products.

The resolution is minimal by construction: at each level, ascending through
internal degrees, the kernel of the previous differential is compared with
the span of everything already hit by positive-degree multiples of the
generators chosen so far (which equals the augmentation-ideal multiples of
the kernel), and the leftover kernel vectors become new generators.  Every
choice goes through fplin's fixed elimination order, so generator lists and
differentials are reproducible.

Because the resolution is minimal, level-s generators in internal degree t
are a basis of Ext^{s,t}(M, F_p), and chain-level functionals on them need
no cocycle conditions.

Chain maps satisfy f d = d f exactly (no alternating twist); nothing
downstream asserts a global sign, only ranks and values up to units.
"""

from __future__ import annotations

import numpy as np

from .fplin import (
    FpMatrix, QuotientBasis, is_vzero, kernel_basis, rref, vadd, vget,
    vscale, vunit, vzero,
)
from .fpmod import FreeBasis, ModuleMap


class CapError(Exception):
    """Requested data outside the computed (s_max, t_max) window."""


class NamingError(Exception):
    """A name cannot be attached to a chart class."""


class AmbiguousName(NamingError):
    """Bidegree has dimension > 1 and no disambiguating index was given."""


class _Eliminator:
    """Incremental forward elimination with a fixed leading-index rule."""

    def __init__(self, p):
        self.p = p
        self.pivs = {}

    def _reduce(self, v):
        p = self.p
        if p == 2:
            while v:
                c = (v & -v).bit_length() - 1
                row = self.pivs.get(c)
                if row is None:
                    return v, c
                v ^= row
            return 0, -1
        v = v % p
        while True:
            nz = np.nonzero(v)[0]
            if nz.size == 0:
                return v, -1
            c = int(nz[0])
            row = self.pivs.get(c)
            if row is None:
                inv = pow(int(v[c]), p - 2, p)
                return (v * inv) % p, c
            v = (v - int(v[c]) * row) % p

    def add(self, v):
        """Reduce v; install as a new pivot if independent.  Returns the
        reduced vector (leading coefficient 1) or None if dependent."""
        v, c = self._reduce(v)
        if c < 0:
            return None
        self.pivs[c] = v
        return v


class Resolution:
    """Minimal free resolution of a GradedModule in a (s_max, t_max) window."""

    def __init__(self, module, s_max, t_max):
        if t_max < 0 or s_max < 0:
            raise CapError("caps must be nonnegative")
        if not module.complete and module.t_max < t_max:
            raise CapError(
                f"module realized to t={module.t_max} < requested {t_max}")
        self.module = module
        self.profile = module.profile
        self.s_max = s_max
        self.t_max = t_max
        self.gens = []    # gens[s] = [t_0, t_1, ...] in creation order
        self.dvals = []   # dvals[s][i]: d(e_i) in level s-1 (s=0: in M)
        self.free = []    # FreeBasis per level
        self._dmat = {}
        self._ech = {}
        self._positions = {}
        self._build()

    # -- construction -----------------------------------------------------

    def _build(self):
        M = self.module
        p = self.profile.p
        basis = self.profile.basis

        # level 0: minimal generators of M = basis of M / (positive action)
        gens0, vals0 = [], []
        for t in range(self.t_max + 1):
            n = M.dim_at(t)
            if n == 0:
                continue
            rows = []
            for d in range(t):
                nd = M.dim_at(d)
                if nd == 0:
                    continue
                for theta in basis(t - d):
                    act = M.action(theta, d)
                    rows.extend(act.col(j) for j in range(nd))
            qb = QuotientBasis(FpMatrix.from_rows(p, n, rows))
            for c in qb.coords:
                gens0.append(t)
                vals0.append(vunit(p, n, c))
        self.gens.append(gens0)
        self.dvals.append(vals0)
        self.free.append(FreeBasis(self.profile, [(i, t) for i, t in enumerate(gens0)]))

        for s in range(1, self.s_max + 1):
            prev_free = self.free[s - 1]
            gens_s, vals_s = [], []
            for t in range(self.t_max + 1):
                nc = prev_free.dim_at(t)
                if nc == 0:
                    continue
                ker = kernel_basis(self._matrix_at(s - 1, t))
                if ker.nrows == 0:
                    continue
                elim = _Eliminator(p)
                for i, tg in enumerate(gens_s):
                    if tg >= t:
                        continue
                    for theta in basis(t - tg):
                        elim.add(prev_free.apply(theta, tg, vals_s[i]))
                for i in range(ker.nrows):
                    v = elim.add(ker.row(i))
                    if v is not None:
                        gens_s.append(t)
                        vals_s.append(v)
            self.gens.append(gens_s)
            self.dvals.append(vals_s)
            self.free.append(FreeBasis(self.profile, [(i, t) for i, t in enumerate(gens_s)]))

    # -- matrices and solving ----------------------------------------------

    def _matrix_at(self, s, t):
        """Augmentation matrix (s=0) or d_s at degree t, cached."""
        key = (s, t)
        hit = self._dmat.get(key)
        if hit is not None:
            return hit
        p = self.profile.p
        if s == 0:
            nrows = self.module.dim_at(t)
            cols = []
            for (i, mono) in self.free[0].labels(t):
                tg = self.gens[0][i]
                cols.append(self.module.action(mono, tg).matvec(self.dvals[0][i]))
            mat = FpMatrix.from_cols(p, nrows, cols)
        else:
            prev = self.free[s - 1]
            nrows = prev.dim_at(t)
            cols = []
            for (i, mono) in self.free[s].labels(t):
                tg = self.gens[s][i]
                cols.append(prev.apply(mono, tg, self.dvals[s][i]))
            mat = FpMatrix.from_cols(p, nrows, cols)
        self._dmat[key] = mat
        return mat

    def aug_matrix(self, t):
        """F_0 at degree t -> M_t."""
        self._check_window(0, t)
        return self._matrix_at(0, t)

    def d_matrix(self, s, t):
        """d_s: (F_s)_t -> (F_{s-1})_t, s >= 1."""
        self._check_window(s, t)
        return self._matrix_at(s, t)

    def _echelon(self, s, t):
        key = (s, t)
        hit = self._ech.get(key)
        if hit is None:
            hit = rref(self._matrix_at(s, t), transform=True)
            self._ech[key] = hit
        return hit

    def solve_aug(self, t, b):
        """One preimage under the augmentation (surjective by construction)."""
        self._check_window(0, t)
        return self._echelon(0, t).solve(b)

    def solve_d(self, s, t, b):
        """One preimage under d_s at degree t; b must be in the image."""
        self._check_window(s, t)
        return self._echelon(s, t).solve(b)

    def _check_window(self, s, t):
        if not (0 <= s <= self.s_max and 0 <= t <= self.t_max):
            raise CapError(f"(s,t)=({s},{t}) outside window "
                           f"({self.s_max},{self.t_max})")

    # -- Ext chart data ----------------------------------------------------

    def gen_positions(self, s, t):
        """Indices (creation order) of level-s generators in degree t."""
        self._check_window(s, t)
        key = (s, t)
        if key not in self._positions:
            self._positions[key] = [i for i, tg in enumerate(self.gens[s])
                                    if tg == t]
        return self._positions[key]

    def ext_dim(self, s, t):
        return len(self.gen_positions(s, t))

    def cls(self, s, t, coeffs=None, index=None):
        """An ExtClass at (s,t); coeffs over the degree-t generators, or a
        single generator by index."""
        n = self.ext_dim(s, t)
        p = self.profile.p
        if index is not None:
            if not 0 <= index < n:
                raise CapError(f"no generator {index} at ({s},{t})")
            coeffs = vunit(p, n, index)
        elif coeffs is None:
            raise ValueError("need coeffs or index")
        return ExtClass(self, s, t, coeffs)


def minimal_resolution(module, s_max, t_max):
    return Resolution(module, s_max, t_max)


def ext_dims(res):
    """{(s,t): dim Ext^{s,t}} read off the generator lists."""
    out = {}
    for s in range(res.s_max + 1):
        for t in res.gens[s]:
            out[(s, t)] = out.get((s, t), 0) + 1
    return out


class ExtClass:
    """A coefficient vector over the level-s, degree-t generators."""

    __slots__ = ("res", "s", "t", "vec")

    def __init__(self, res, s, t, vec):
        self.res = res
        self.s = s
        self.t = t
        self.vec = vec

    def is_zero(self):
        return is_vzero(self.res.profile.p, self.vec)

    def __eq__(self, other):
        from .fplin import veq
        return (isinstance(other, ExtClass) and self.res is other.res
                and (self.s, self.t) == (other.s, other.t)
                and veq(self.res.profile.p, self.vec, other.vec))

    def __repr__(self):
        from .fplin import vto_list
        n = self.res.ext_dim(self.s, self.t)
        return f"<ExtClass ({self.s},{self.t}) {vto_list(self.res.profile.p, self.vec, n)}>"


# ---------------------------------------------------------------------------
# Chain maps.

class ChainMap:
    """f: F_s(src) -> F_{s-k}(tgt) shifting internal degree by tdeg,
    commuting with the differentials: f d = d f."""

    def __init__(self, src, tgt, k, tdeg, values, name=""):
        self.src = src
        self.tgt = tgt
        self.k = k
        self.tdeg = tdeg
        self.values = values  # {s: [vector per level-s src generator]}
        self.name = name

    def levels(self):
        return sorted(self.values)

    def apply(self, s, t, vec):
        """Image of a degree-t vector of F_s(src): lands in degree t+tdeg of
        F_{s-k}(tgt)."""
        src_free = self.src.free[s]
        tgt_free = self.tgt.free[s - self.k]
        p = self.src.profile.p
        out = vzero(p, tgt_free.dim_at(t + self.tdeg))
        vals = self.values[s]
        for col, (i, mono) in enumerate(src_free.labels(t)):
            c = vget(p, vec, col)
            if not c:
                continue
            tg = self.src.gens[s][i]
            w = tgt_free.apply(mono, tg + self.tdeg, vals[i])
            out = vadd(p, out, vscale(p, c, w))
        return out

    def matrix(self, s, t):
        """Matrix of f on degree-t chains of level s."""
        p = self.src.profile.p
        src_free = self.src.free[s]
        tgt_free = self.tgt.free[s - self.k]
        cols = [self.apply(s, t, vunit(p, src_free.dim_at(t), j))
                for j in range(src_free.dim_at(t))]
        return FpMatrix.from_cols(p, tgt_free.dim_at(t + self.tdeg), cols)

    def commutes(self, s, t):
        """Check f d = d f from level s, degree t chains (for tests)."""
        lhs = self.matrix(s - 1, t).matmul(self.src.d_matrix(s, t))
        rhs = self.tgt.d_matrix(s - self.k, t + self.tdeg).matmul(self.matrix(s, t))
        return lhs == rhs


def _is_ground(res):
    m = res.module
    return m.dim_at(0) == 1 and all(m.dim_at(t) == 0
                                    for t in range(1, m.t_max + 1))


def lift_chain_map(src_res, tgt_res, seed, s_hi=None, name=""):
    """Lift a seed to a chain map, degreewise by deterministic solve.

    seed forms:
      * a ModuleMap src_res.module -> tgt_res.module: level shift k=0,
        internal shift = the map's degree shift;
      * an ExtClass of src_res (tgt_res must resolve the trivial module):
        level shift k = s of the class, internal shift = -t; seed values
        send the (s,t) generators to their coefficients times the ground
        generator.
    """
    p = src_res.profile.p
    if isinstance(seed, ModuleMap):
        k, tdeg = 0, seed.shift
        values = {0: []}
        for i, tg in enumerate(src_res.gens[0]):
            b = seed.apply(tg, src_res.dvals[0][i])
            values[0].append(tgt_res.solve_aug(tg + tdeg, b))
        s_lo = 1
    elif isinstance(seed, ExtClass):
        if seed.res is not src_res:
            raise ValueError("seed class must belong to the source resolution")
        if not _is_ground(tgt_res):
            raise ValueError("class seeds lift to a ground resolution")
        k, tdeg = seed.s, -seed.t
        pos = src_res.gen_positions(seed.s, seed.t)
        values = {k: []}
        for i, tg in enumerate(src_res.gens[k]):
            n = tgt_res.free[0].dim_at(tg + tdeg)
            v = vzero(p, n)
            if tg == seed.t:
                c = vget(p, seed.vec, pos.index(i))
                if c:
                    v = vscale(p, c, vunit(p, n, 0))
            values[k].append(v)
        s_lo = k + 1
    else:
        raise TypeError(f"cannot seed a chain map from {type(seed).__name__}")

    cm = ChainMap(src_res, tgt_res, k, tdeg, values, name=name)
    if s_hi is None:
        s_hi = min(src_res.s_max, tgt_res.s_max + k)
    for s in range(s_lo, s_hi + 1):
        vals = []
        for i, tg in enumerate(src_res.gens[s]):
            u = tg + tdeg
            nsol = tgt_res.free[s - k].dim_at(u) if u >= 0 else 0
            rhs = cm.apply(s - 1, tg, src_res.dvals[s][i])
            if nsol == 0:
                # nowhere to land; the chain condition forces zero
                assert is_vzero(p, rhs)
                vals.append(vzero(p, 0))
                continue
            vals.append(tgt_res.solve_d(s - k, u, rhs))
        values[s] = vals
    return cm


def compose_chain_maps(g, f):
    """g o f for chain maps f: A -> B, g: B -> C (f.tgt is g.src); defined on
    the levels where both factors are."""
    if f.tgt is not g.src:
        raise ValueError("chain maps do not compose: middle resolutions differ")
    values = {}
    for s, vals in f.values.items():
        if s - f.k not in g.values:
            continue
        values[s] = [g.apply(s - f.k, tg + f.tdeg, vals[i])
                     for i, tg in enumerate(f.src.gens[s])]
    return ChainMap(f.src, g.tgt, f.k + g.k, f.tdeg + g.tdeg, values,
                    name=f"{g.name}o{f.name}" if f.name or g.name else "")


def induced_chart_matrix(cm, s, t):
    """Chart-level matrix of a level-preserving chain map cm: Res(A) -> Res(B):
    sends Ext^{s,t+tdeg}(B)-coefficient vectors to Ext^{s,t}(A) ones.

    Row i (source generator), column m (target generator) = the unit-monomial
    coefficient of target generator m in cm's value on source generator i."""
    if cm.k != 0:
        raise ValueError("chart-level induced map needs a level-preserving chain map")
    p = cm.src.profile.p
    src_pos = cm.src.gen_positions(s, t)
    tgt_pos = cm.tgt.gen_positions(s, t + cm.tdeg)
    unit = cm.tgt.profile.unit_mono()
    rows = []
    for i in src_pos:
        v = cm.values[s][i]
        rows.append([vget(p, v, cm.tgt.free[s].index_of(t + cm.tdeg, m, unit))
                     for m in tgt_pos])
    if not rows:
        return FpMatrix.zero(p, 0, len(tgt_pos))
    return FpMatrix.from_dense(p, rows)


# ---------------------------------------------------------------------------
# Yoneda products.

def pair_with_ground(xhat, g, s, t):
    """Coefficients of the product g . x on the (s,t) generators of x's
    resolution, where xhat is x lifted toward g's (ground) resolution and
    the answer lands at (s + g.s, t + g.t) of the source chart.

    Entry for source generator e: <g, xhat(e)> = sum over the ground (g.s,
    g.t) generators of g's coefficient times the unit-monomial coefficient
    of that generator in xhat(e).
    """
    res = xhat.src
    ground = xhat.tgt
    p = res.profile.p
    unit = ground.profile.unit_mono()
    pos = ground.gen_positions(g.s, g.t)
    out = []
    for i in res.gen_positions(s + g.s, t + g.t):
        v = xhat.values[s + g.s][i]  # lives in level g.s of ground, degree g.t
        acc = 0
        for r, gi in enumerate(pos):
            col = ground.free[g.s].index_of(g.t, gi, unit)
            acc = (acc + vget(p, g.vec, r) * vget(p, v, col)) % p
        out.append(acc)
    from .fplin import vfrom_list
    return vfrom_list(p, out) if out else vzero(p, 0)


def yoneda_action(g, x, s_hi=None):
    """Product g . x: g an ExtClass on a ground chart, x any ExtClass over
    the same profile.  Returns an ExtClass at (x.s + g.s, x.t + g.t)."""
    res = x.res
    if x.t + g.t > res.t_max or x.s + g.s > res.s_max:
        raise CapError("product bidegree outside the resolution window")
    xhat = lift_chain_map(res, g.res, x, s_hi=x.s + g.s if s_hi is None else s_hi)
    vec = pair_with_ground(xhat, g, x.s, x.t)
    return ExtClass(res, x.s + g.s, x.t + g.t, vec)


def ground_product_matrix(res, ghat, s, t):
    """Matrix of multiplication by a ground class on its own chart.

    ghat is the class's self-lift on res (a ground resolution).  The matrix
    maps coefficient vectors at (s,t) to coefficient vectors at
    (s + ghat.k, t - ghat.tdeg): entry [m][j] is the coefficient of
    (generator j, unit monomial) in ghat's value on generator m, i.e.
    <g . dual(gen j), gen m> = <dual(gen j), ghat(gen m)>."""
    p = res.profile.p
    k, u = ghat.k, -ghat.tdeg
    src_pos = res.gen_positions(s, t)
    tgt_pos = res.gen_positions(s + k, t + u)
    unit = res.profile.unit_mono()
    rows = []
    for m in tgt_pos:
        v = ghat.values[s + k][m]
        rows.append([vget(p, v, res.free[s].index_of(t, gj, unit))
                     for gj in src_pos])
    return FpMatrix.from_dense(p, rows) if rows else \
        FpMatrix.zero(p, 0, len(src_pos))


# ---------------------------------------------------------------------------
# Named charts.

class NamedChart:
    """A resolution's Ext table with a registry of named classes."""

    def __init__(self, res, names):
        self.res = res
        self.names = names  # {name: ExtClass}
        self.products = {}  # {(ground name, (s,t,i)): ExtClass}, filled by users

    def dims(self):
        return ext_dims(self.res)

    def __getitem__(self, name):
        return self.names[name]


def name_generators(res, registry):
    """Attach names: registry maps name -> (s, t) (bidegree must have
    dimension exactly 1) or (s, t, index) to pick one generator."""
    names = {}
    for name, spec in registry.items():
        if len(spec) == 2:
            s, t = spec
            n = res.ext_dim(s, t)
            if n == 0:
                raise NamingError(f"{name}: bidegree ({s},{t}) is empty")
            if n > 1:
                raise AmbiguousName(
                    f"{name}: dim {n} at ({s},{t}); give an index")
            names[name] = res.cls(s, t, index=0)
        else:
            s, t, i = spec
            if res.ext_dim(s, t) == 0:
                raise NamingError(f"{name}: bidegree ({s},{t}) is empty")
            names[name] = res.cls(s, t, index=i)
    return NamedChart(res, names)

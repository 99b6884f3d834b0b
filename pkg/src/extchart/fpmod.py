"""Finitely presented graded modules over a profiled Steenrod subalgebra.

A presentation (generators with degrees, relations in the free module) is
realized degree by degree: the relation span in each degree is the left
multiple of the relation vectors by every algebra basis element of
complementary degree — no Groebner machinery, correct because profiles are
finite dimensional.  The module basis in each degree is the set of non-pivot
free-module monomials under fplin's fixed elimination order, so bases are
reproducible.

All modules here are finite dimensional (finite profile, finitely many
generators), so realization runs to the top degree the free module can reach
and the result is complete: dimensions are zero beyond t_max.  An explicit
smaller t_max gives a truncation, and asking such a module for data beyond
its cap raises ActionEscapesCap rather than silently returning zeros.
"""

from __future__ import annotations

import os

from .fplin import (
    FpMatrix, QuotientBasis, is_vzero, kernel_basis, rref, vadd, vscale,
    vzero,
)
from .steenrod import ParseError, mono_degree, named_profile, parse_expr


class IllDefined(Exception):
    """A generator assignment does not kill the relations (or mismatches degrees)."""


class ActionEscapesCap(Exception):
    """Module data requested beyond the realized degree cap."""


# ---------------------------------------------------------------------------
# Free modules over the profile.

class FreeBasis:
    """Basis bookkeeping for a free module on graded generators.

    Degree-t basis: for each generator g (in order), a contiguous block of
    pairs (g, theta) over the algebra basis in degree t - deg(g).
    """

    def __init__(self, profile, gens):
        self.profile = profile
        self.gens = list(gens)  # [(name, degree)]

    def block_offsets(self, t):
        """[(gen_index, offset, block_dim)] for degree t."""
        out = []
        off = 0
        for i, (_, d) in enumerate(self.gens):
            n = self.profile.dim_at(t - d) if t >= d else 0
            out.append((i, off, n))
            off += n
        return out

    def dim_at(self, t):
        return sum(n for _, _, n in self.block_offsets(t))

    def labels(self, t):
        out = []
        for i, off, n in self.block_offsets(t):
            name = self.gens[i][0]
            for m in self.profile.basis(t - self.gens[i][1]):
                out.append((name, m))
        return out

    def index_of(self, t, gen_index, mono):
        for i, off, n in self.block_offsets(t):
            if i == gen_index:
                return off + self.profile.index_of(mono)
        raise KeyError(gen_index)

    def top_degree(self):
        return max((d for _, d in self.gens), default=0) + self.profile.top_degree()

    def apply(self, mono, t, vec):
        """theta . vec for a basis monomial theta: degree t -> t + |theta|."""
        p = self.profile.p
        dt = mono_degree(p, mono)
        out = vzero(p, self.dim_at(t + dt))
        tgt_offsets = {i: off for i, off, _ in self.block_offsets(t + dt)}
        for i, off, n in self.block_offsets(t):
            if n == 0:
                continue
            d = t - self.gens[i][1]
            mat = self.profile.lmul_matrix(mono, d)
            if p == 2:
                block = (vec >> off) & ((1 << n) - 1)
                if block:
                    out |= mat.matvec(block) << tgt_offsets[i]
            else:
                block = vec[off:off + n]
                if block.any():
                    toff = tgt_offsets[i]
                    out[toff:toff + mat.nrows] = (out[toff:toff + mat.nrows]
                                                  + mat.matvec(block)) % p
        return out

    def apply_element(self, el, t, vec):
        """el . vec for a homogeneous MilnorElement el."""
        p = self.profile.p
        d = el.degree()
        if d is None:
            return vzero(p, self.dim_at(t))  # zero element: degree unknowable
        out = vzero(p, self.dim_at(t + d))
        for m, c in el.terms.items():
            out = vadd(p, out, vscale(p, c, self.apply(m, t, vec)))
        return out

    def vector_of_pairs(self, pairs):
        """Free-module vector of sum of (MilnorElement, gen_index) terms.

        Returns (degree, vector); all terms must land in one degree.
        """
        p = self.profile.p
        degs = set()
        for el, gi in pairs:
            d = el.degree()
            if d is not None:
                degs.add(d + self.gens[gi][1])
        if len(degs) > 1:
            raise IllDefined(f"mixed degrees {sorted(degs)} in one element")
        if not degs:
            return None, None  # zero element
        t = degs.pop()
        vec = vzero(p, self.dim_at(t))
        for el, gi in pairs:
            base = vzero(p, self.dim_at(self.gens[gi][1]))
            unit_col = self.index_of(self.gens[gi][1], gi, self.profile.unit_mono())
            if p == 2:
                base |= 1 << unit_col
            else:
                base[unit_col] = 1
            vec = vadd(p, vec, self.apply_element(el, self.gens[gi][1], base))
        return t, vec


# ---------------------------------------------------------------------------
# Graded modules.

class GradedModule:
    """Degreewise F_p vector spaces with a Steenrod action, through t_max.

    complete=True means dimensions are genuinely zero beyond t_max (the
    normal case here: every module is finite).  Otherwise data beyond the
    cap raises ActionEscapesCap.
    """

    def __init__(self, profile, t_max, complete, dims, labels_fn, action_fn, name=""):
        self.profile = profile
        self.t_max = t_max
        self.complete = complete
        self._dims = dims
        self._labels_fn = labels_fn
        self._action_fn = action_fn
        self._action_cache = {}
        self.name = name

    def _check(self, t):
        if t > self.t_max and not self.complete:
            raise ActionEscapesCap(
                f"{self.name or 'module'}: degree {t} beyond cap {self.t_max}")

    def dim_at(self, t):
        if t < 0 or t > self.t_max:
            self._check(t)
            return 0
        return self._dims.get(t, 0)

    def labels(self, t):
        if t < 0 or t > self.t_max:
            self._check(t)
            return []
        return self._labels_fn(t)

    def top_nonzero(self):
        return max((t for t, n in self._dims.items() if n), default=-1)

    def total_dim(self, t_hi=None):
        t_hi = self.t_max if t_hi is None else t_hi
        return sum(self.dim_at(t) for t in range(t_hi + 1))

    def action(self, mono, t):
        """Matrix of theta: M_t -> M_{t+|theta|} for a basis monomial theta."""
        p = self.profile.p
        dt = mono_degree(p, mono)
        self._check(t + dt)
        key = (mono, t)
        hit = self._action_cache.get(key)
        if hit is None:
            if self.dim_at(t) == 0 or self.dim_at(t + dt) == 0:
                hit = FpMatrix.zero(p, self.dim_at(t + dt), self.dim_at(t))
            else:
                hit = self._action_fn(mono, t)
            self._action_cache[key] = hit
        return hit

    def act_element(self, el, t, vec):
        """el . vec for a homogeneous MilnorElement."""
        p = self.profile.p
        d = el.degree()
        if d is None:
            raise ValueError("cannot grade the zero element; use act_element_at")
        out = vzero(p, self.dim_at(t + d))
        for m, c in el.terms.items():
            out = vadd(p, out, vscale(p, c, self.action(m, t).matvec(vec)))
        return out

    def dims_table(self, t_hi=None):
        t_hi = self.t_max if t_hi is None else t_hi
        return {t: self.dim_at(t) for t in range(t_hi + 1) if self.dim_at(t)}

    def __repr__(self):
        return f"<GradedModule {self.name or ''} over {self.profile.name}, t<={self.t_max}>"


class RealizedModule(GradedModule):
    """A GradedModule realized from a Presentation, remembering the free cover."""

    def __init__(self, pres, t_max=None):
        profile = pres.profile
        free = FreeBasis(profile, pres.gens)
        top = free.top_degree()
        complete = t_max is None or t_max >= top
        bound = top if t_max is None else min(t_max, top)

        # relation vectors in the free module
        rel_vecs = []
        for rel in pres.rels:
            t, vec = free.vector_of_pairs(
                [(el, pres.gen_index[g]) for el, g in rel])
            if t is not None:
                rel_vecs.append((t, vec))

        quots = {}
        p = profile.p
        for t in range(bound + 1):
            rows = []
            for d, vec in rel_vecs:
                if d > t:
                    continue
                for theta in profile.basis(t - d):
                    rows.append(free.apply(theta, d, vec))
            quots[t] = QuotientBasis(FpMatrix.from_rows(p, free.dim_at(t), rows))

        dims = {t: q.dim for t, q in quots.items() if q.dim}
        self.pres = pres
        self.free = free
        self.quot = quots

        def labels_fn(t, _self=None):
            lab = free.labels(t)
            return [lab[c] for c in quots[t].coords]

        def action_fn(mono, t):
            q = quots[t]
            qt = quots[t + mono_degree(p, mono)]
            cols = [qt.project(free.apply(mono, t, q.lift(w)))
                    for w in _unit_vectors(p, q.dim)]
            return FpMatrix.from_cols(p, qt.dim, cols)

        super().__init__(profile, bound, complete, dims, labels_fn, action_fn,
                         name=pres.name)

    def vector_of_pairs(self, pairs):
        """Module coordinates of sum of (MilnorElement, gen name) terms."""
        t, vec = self.free.vector_of_pairs(
            [(el, self.pres.gen_index[g]) for el, g in pairs])
        if t is None:
            return None, None
        if t > self.t_max:
            if self.complete:
                return t, vzero(self.profile.p, 0)
            raise ActionEscapesCap(f"element degree {t} beyond cap {self.t_max}")
        return t, self.quot[t].project(vec)

    def element_of(self, text):
        """Parse 'expr gen [+ expr gen]*' into (degree, coordinates)."""
        return self.vector_of_pairs(parse_module_element(text, self.pres))


def _unit_vectors(p, n):
    from .fplin import vunit
    return [vunit(p, n, i) for i in range(n)]


def suspend(module, k, name=None):
    """Degree shift by k (a view, not a copy)."""
    dims = {t + k: n for t, n in module._dims.items()}
    return GradedModule(
        module.profile, module.t_max + k, module.complete, dims,
        lambda t: module.labels(t - k),
        lambda mono, t: module.action(mono, t - k),
        name=name or f"S^{k}({module.name})")


# ---------------------------------------------------------------------------
# Presentations and the .mod format.

class Presentation:
    """Generators (name, degree) and relations (lists of (element, gen))."""

    def __init__(self, profile, gens, rels, name=""):
        self.profile = profile
        self.gens = [(str(n), int(d)) for n, d in gens]
        names = [n for n, _ in self.gens]
        if len(set(names)) != len(names):
            raise IllDefined(f"duplicate generator names in {name or 'presentation'}")
        self.gen_index = {n: i for i, (n, _) in enumerate(self.gens)}
        self.rels = []
        for rel in rels:
            parsed = []
            for el, g in rel:
                if isinstance(el, str):
                    el = parse_expr(el, profile)
                if g not in self.gen_index:
                    raise IllDefined(f"unknown generator {g!r} in relation")
                parsed.append((el, g))
            degs = {el.degree() + self.gens[self.gen_index[g]][1]
                    for el, g in parsed if el.degree() is not None}
            if len(degs) > 1:
                raise IllDefined(f"relation mixes degrees {sorted(degs)}")
            self.rels.append(parsed)
        self.name = name

    def realize(self, t_max=None):
        return RealizedModule(self, t_max)


def parse_module_element(text, pres):
    """Parse 'expr gen [+ expr gen]*' / bare 'gen' / '0' into (element, gen) pairs.

    A '+' or '-' directly after a generator token separates summands; inside
    an expression they are part of the expression ('Sq4 Sq6 + Sq6 Sq4 g7').
    """
    toks = text.split()
    if toks == ["0"]:
        return []
    out = []
    cur = []
    sign = 1
    last_gen = False
    for tok in toks:
        if last_gen and tok in ("+", "-"):
            sign = 1 if tok == "+" else -1
            last_gen = False
            continue
        last_gen = False
        if tok in pres.gen_index:
            el = parse_expr(" ".join(cur) if cur else "1", pres.profile)
            out.append((el.scale(sign), tok))
            cur = []
            sign = 1
            last_gen = True
        else:
            cur.append(tok)
    if cur:
        raise ParseError(f"dangling tokens {' '.join(cur)!r} (no generator)", 0)
    if not out:
        raise ParseError("no generator in module element", 0)
    return out


def parse_mod(text, name=""):
    """Parse the .mod format:

        p <prime>
        algebra <ProfileName>
        gen <name> <degree>
        rel <expr> <gen> [+ <expr> <gen>]*
    """
    p = None
    algebra = None
    gens = []
    rel_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "p":
            p = int(rest)
        elif head == "algebra":
            algebra = rest
        elif head == "gen":
            bits = rest.split()
            if len(bits) != 2:
                raise ParseError(f"line {lineno}: gen wants '<name> <degree>'", 0)
            gens.append((bits[0], int(bits[1])))
        elif head == "rel":
            rel_lines.append((lineno, rest))
        else:
            raise ParseError(f"line {lineno}: unknown directive {head!r}", 0)
    if p is None or algebra is None:
        raise ParseError("missing 'p' or 'algebra' line", 0)
    profile = named_profile(algebra, p)
    pres = Presentation(profile, gens, [], name=name)
    for lineno, rest in rel_lines:
        pres.rels.append(parse_module_element(rest, pres))
    # re-validate relation degrees
    return Presentation(profile, gens,
                        [[(el, g) for el, g in r] for r in pres.rels], name=name)


def load_mod(path):
    with open(path) as fh:
        return parse_mod(fh.read(), name=os.path.splitext(os.path.basename(path))[0])


# ---------------------------------------------------------------------------
# Module maps.

class ModuleMap:
    """Graded map f: M_t -> N_{t+shift} commuting with the action."""

    def __init__(self, src, tgt, shift, matrix_fn, name=""):
        self.src = src
        self.tgt = tgt
        self.shift = shift
        self._matrix_fn = matrix_fn
        self._cache = {}
        self.name = name

    def matrix(self, t):
        hit = self._cache.get(t)
        if hit is None:
            p = self.src.profile.p
            nr, nc = self.tgt.dim_at(t + self.shift), self.src.dim_at(t)
            hit = (FpMatrix.zero(p, nr, nc) if nr == 0 or nc == 0
                   else self._matrix_fn(t))
            self._cache[t] = hit
        return hit

    def apply(self, t, vec):
        return self.matrix(t).matvec(vec)

    def t_range(self):
        hi = self.src.t_max
        if not self.tgt.complete:
            hi = min(hi, self.tgt.t_max - self.shift)
        return hi

    def check_linearity(self, monos, ts):
        """f(theta x) = theta f(x) on basis vectors, for test spot checks."""
        p = self.src.profile.p
        for mono in monos:
            dt = mono_degree(p, mono)
            for t in ts:
                lhs = self.matrix(t + dt).matmul(self.src.action(mono, t))
                rhs = self.tgt.action(mono, t + self.shift).matmul(self.matrix(t))
                if lhs != rhs:
                    return False
        return True

    def __repr__(self):
        return f"<ModuleMap {self.name or ''} shift={self.shift}>"


def identity_map(m):
    p = m.profile.p
    return ModuleMap(m, m, 0, lambda t: FpMatrix.identity(p, m.dim_at(t)), name="id")


def zero_map(src, tgt, shift=0):
    p = src.profile.p
    return ModuleMap(src, tgt, shift,
                     lambda t: FpMatrix.zero(p, tgt.dim_at(t + shift), src.dim_at(t)),
                     name="0")


def compose(g, f):
    """g o f (apply f first)."""
    assert f.tgt is g.src or (f.tgt.profile == g.src.profile)
    return ModuleMap(f.src, g.tgt, f.shift + g.shift,
                     lambda t: g.matrix(t + f.shift).matmul(f.matrix(t)),
                     name=f"{g.name}o{f.name}")


def map_from_images(src, tgt, images, shift=0, name=""):
    """The module map extending a generator assignment, if well defined.

    src must be a RealizedModule.  images: {gen name: value}, value either a
    coordinate vector in tgt at degree deg(gen)+shift, a parseable element
    string (tgt realized), or a list of (MilnorElement, gen name) pairs.
    """
    if not isinstance(src, RealizedModule):
        raise IllDefined("source must be a realized presentation")
    p = src.profile.p
    img = {}
    for gname, gdeg in src.pres.gens:
        if gname not in images:
            raise IllDefined(f"no image given for generator {gname}")
        val = images[gname]
        want = gdeg + shift
        if isinstance(val, str):
            val = parse_module_element(val, tgt.pres)
        if isinstance(val, list):
            t, vec = tgt.vector_of_pairs(val)
            if t is None:
                t, vec = want, vzero(p, tgt.dim_at(want))
            if t != want:
                raise IllDefined(
                    f"image of {gname} lives in degree {t}, wanted {want}")
            val = vec
        img[gname] = val

    # relations must die: f(sum a_k g_k) = sum a_k . f(g_k) = 0
    for rel in src.pres.rels:
        total = None
        tdeg = None
        for el, g in rel:
            d = el.degree()
            if d is None:
                continue
            gdeg = src.pres.gens[src.pres.gen_index[g]][1]
            w = tgt.act_element(el, gdeg + shift, img[g])
            tdeg = d + gdeg + shift
            total = w if total is None else vadd(p, total, w)
        if total is not None and not is_vzero(p, total):
            rel_str = " + ".join(f"({el}) {g}" for el, g in rel)
            raise IllDefined(f"relation {rel_str} maps to a nonzero element")

    def matrix_fn(t):
        cols = []
        for (gname, mono) in src.labels(t):
            gdeg = src.pres.gens[src.pres.gen_index[gname]][1]
            cols.append(tgt.action(mono, gdeg + shift).matvec(img[gname]))
        return FpMatrix.from_cols(p, tgt.dim_at(t + shift), cols)

    return ModuleMap(src, tgt, shift, matrix_fn, name=name)


# ---------------------------------------------------------------------------
# Kernels, images, cokernels.

def _derived_bound(src, tgt, shift):
    if src.complete and tgt.complete:
        return src.t_max, True
    return min(src.t_max, tgt.t_max - shift), False


def kernel_module(f, name=""):
    """(kernel as a GradedModule graded by source degree, inclusion map)."""
    src, tgt = f.src, f.tgt
    p = src.profile.p
    bound, complete = _derived_bound(src, tgt, f.shift)
    incl = {}
    ech = {}
    for t in range(bound + 1):
        k = kernel_basis(f.matrix(t))
        incl[t] = FpMatrix.from_cols(p, src.dim_at(t), k.row_list())
        ech[t] = rref(incl[t], transform=True)
    dims = {t: m.ncols for t, m in incl.items() if m.ncols}
    mod = GradedModule(
        src.profile, bound, complete, dims,
        lambda t: [("k", t, i) for i in range(incl[t].ncols)],
        lambda mono, t: _submodule_action(src, incl, ech, mono, t),
        name=name or f"ker({f.name})")
    inclusion = ModuleMap(mod, src, 0, lambda t: incl[t], name=f"ker({f.name})->")
    return mod, inclusion


def _submodule_action(parent, incl, ech, mono, t):
    p = parent.profile.p
    dt = mono_degree(p, mono)
    act = parent.action(mono, t)
    cols = []
    for j in range(incl[t].ncols):
        w = act.matvec(incl[t].col(j))
        cols.append(ech[t + dt].solve(w))  # a submodule: always solvable
    return FpMatrix.from_cols(p, incl[t + dt].ncols, cols)


def image_module(f, name=""):
    """(image graded by target degree, (surjection from source, inclusion))."""
    src, tgt = f.src, f.tgt
    p = src.profile.p
    bound, complete = _derived_bound(src, tgt, f.shift)
    tbound = bound + f.shift
    incl = {}
    ech = {}
    for u in range(tbound + 1):
        # canonical basis of the column space: row space of the transpose
        e = rref(f.matrix(u - f.shift).transpose()) if u >= f.shift else None
        basis = [e.matrix.row(i) for i in range(e.rank)] if e else []
        incl[u] = FpMatrix.from_cols(p, tgt.dim_at(u), basis)
        ech[u] = rref(incl[u], transform=True)
    dims = {u: m.ncols for u, m in incl.items() if m.ncols}
    mod = GradedModule(
        tgt.profile, tbound, complete, dims,
        lambda u: [("im", u, i) for i in range(incl[u].ncols)],
        lambda mono, u: _submodule_action(tgt, incl, ech, mono, u),
        name=name or f"im({f.name})")
    inclusion = ModuleMap(mod, tgt, 0, lambda u: incl[u], name=f"im({f.name})->")

    def surj_fn(t):
        cols = [ech[t + f.shift].solve(f.matrix(t).col(j))
                for j in range(src.dim_at(t))]
        return FpMatrix.from_cols(p, incl[t + f.shift].ncols, cols)

    surj = ModuleMap(src, mod, f.shift, surj_fn, name=f"->im({f.name})")
    return mod, (surj, inclusion)


def cokernel_module(f, name=""):
    """(cokernel graded by target degree, projection map)."""
    src, tgt = f.src, f.tgt
    p = src.profile.p
    bound, complete = _derived_bound(src, tgt, f.shift)
    tbound = bound + f.shift
    quots = {}
    for u in range(tbound + 1):
        if u >= f.shift:
            span = f.matrix(u - f.shift).transpose()
        else:
            span = FpMatrix.zero(p, 0, tgt.dim_at(u))
        quots[u] = QuotientBasis(span)
    dims = {u: q.dim for u, q in quots.items() if q.dim}

    def labels_fn(u):
        lab = tgt.labels(u)
        return [lab[c] for c in quots[u].coords]

    def action_fn(mono, u):
        q = quots[u]
        qt = quots[u + mono_degree(p, mono)]
        act = tgt.action(mono, u)
        cols = [qt.project(act.matvec(q.lift(w)))
                for w in _unit_vectors(p, q.dim)]
        return FpMatrix.from_cols(p, qt.dim, cols)

    mod = GradedModule(tgt.profile, tbound, complete, dims, labels_fn, action_fn,
                       name=name or f"cok({f.name})")

    def proj_fn(u):
        cols = [quots[u].project(w) for w in _unit_vectors(p, tgt.dim_at(u))]
        return FpMatrix.from_cols(p, quots[u].dim, cols)

    proj = ModuleMap(tgt, mod, 0, proj_fn, name=f"->cok({f.name})")
    return mod, proj


# ---------------------------------------------------------------------------
# Short exact sequences and the .ses format.

class SES:
    """0 -> sub -> mid -> quot -> 0 with the two structure maps."""

    def __init__(self, sub, mid, quot, inj, surj, name=""):
        self.sub = sub
        self.mid = mid
        self.quot = quot
        self.inj = inj
        self.surj = surj
        self.name = name

    def __repr__(self):
        return f"<SES {self.name or ''}: {self.sub.name} -> {self.mid.name} -> {self.quot.name}>"


class SESReport:
    def __init__(self, ok, t_max, failures):
        self.ok = ok
        self.t_max = t_max
        self.failures = failures  # [(t, reason)]

    def __repr__(self):
        if self.ok:
            return f"<SES exact through t={self.t_max}>"
        return f"<SES FAILS: {self.failures[:4]}{'...' if len(self.failures) > 4 else ''}>"


def verify_ses(ses, t_max=None):
    """Degreewise exactness: injectivity, composite zero, surjectivity,
    additive dimensions."""
    if t_max is None:
        t_max = min(ses.sub.t_max, ses.mid.t_max, ses.quot.t_max)
    failures = []
    for t in range(t_max + 1):
        ds, dm, dq = ses.sub.dim_at(t), ses.mid.dim_at(t), ses.quot.dim_at(t)
        mi, ms = ses.inj.matrix(t), ses.surj.matrix(t)
        if rref(mi).rank != ds:
            failures.append((t, "inj not injective"))
        if rref(ms).rank != dq:
            failures.append((t, "surj not surjective"))
        if not ms.matmul(mi).is_zero():
            failures.append((t, "surj o inj nonzero"))
        if dm != ds + dq:
            failures.append((t, f"dims {ds}+{dq} != {dm}"))
    return SESReport(not failures, t_max, failures)


def load_ses(path, t_max=None):
    """Load a .ses file:

        sub <file.mod> / mid <file.mod> / quot <file.mod>
        inj <gen> = <element in mid>     (one line per sub generator)
        surj <gen> = <element in quot>   (one line per mid generator)
    """
    base = os.path.dirname(os.path.abspath(path))
    files = {}
    inj_lines = {}
    surj_lines = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            rest = rest.strip()
            if head in ("sub", "mid", "quot"):
                files[head] = os.path.join(base, rest)
            elif head in ("inj", "surj"):
                gen, eq, expr = rest.partition("=")
                if not eq:
                    raise ParseError(f"line {lineno}: missing '='", 0)
                (inj_lines if head == "inj" else surj_lines)[gen.strip()] = expr.strip()
            else:
                raise ParseError(f"line {lineno}: unknown directive {head!r}", 0)
    for k in ("sub", "mid", "quot"):
        if k not in files:
            raise ParseError(f"missing '{k}' line", 0)
    sub = load_mod(files["sub"]).realize(t_max)
    mid = load_mod(files["mid"]).realize(t_max)
    quot = load_mod(files["quot"]).realize(t_max)
    inj = map_from_images(sub, mid, inj_lines, name="inj")
    surj = map_from_images(mid, quot, surj_lines, name="surj")
    name = os.path.splitext(os.path.basename(path))[0]
    return SES(sub, mid, quot, inj, surj, name=name)

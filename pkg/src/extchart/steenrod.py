"""Milnor-basis arithmetic in finite subalgebras of the mod-p Steenrod algebra.

Monomials:
  p = 2:  a tuple (r1, r2, ...) for Sq(r1, r2, ...), trailing zeros stripped;
          the unit is ().  deg = sum r_i (2^i - 1).
  odd p:  a pair (E, R): E an ascending tuple of Q-indices, R as above for
          P(r1, ...).  deg Q_i = 2 p^i - 1, deg P(R) = sum r_i 2(p^i - 1).

Products use the Milnor matrix rule; at odd p the exterior part is collected
with Koszul signs and the commutation rule

    P(R) Q_k = sum_{i >= 0} Q_{k+i} P(R - p^k e_i)      (e_0 = 0),

terms present only when r_i >= p^k.  One sign convention is fixed here (this
Koszul order plus multinomial coefficients mod p); nothing downstream asserts
a global sign against external tables, only ranks and up-to-unit values.

Admissible Sq-words exist only in the parser and in adem_normalize, which is
an independent oracle used by the tests to cross-check the Milnor product.
"""

from __future__ import annotations

import math
import re
from itertools import combinations, product as iproduct

from .fplin import FpMatrix

MAX_PROFILE_DIM = 1024


class ProfileError(Exception):
    """Profile invalid, too large, or an element escapes it."""


class ParseError(Exception):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


class DegreeCapError(Exception):
    """Requested degree exceeds the configured cap."""


# ---------------------------------------------------------------------------
# Monomial helpers.

def _strip(r):
    r = list(r)
    while r and r[-1] == 0:
        r.pop()
    return tuple(r)


def mono_unit(p):
    return () if p == 2 else ((), ())


def mono_degree(p, mono):
    if p == 2:
        return sum(r * ((1 << (i + 1)) - 1) for i, r in enumerate(mono))
    e, r = mono
    return (sum(2 * p**i - 1 for i in e)
            + sum(ri * 2 * (p**(i + 1) - 1) for i, ri in enumerate(r)))


def mono_str(p, mono):
    if p == 2:
        return "Sq(" + ",".join(map(str, mono)) + ")" if mono else "1"
    e, r = mono
    parts = [f"Q{i}" for i in e]
    if r:
        parts.append("P(" + ",".join(map(str, r)) + ")")
    return " ".join(parts) if parts else "1"


def _multinomial_mod(parts, p):
    total, c = 0, 1
    for a in parts:
        total += a
        c = c * math.comb(total, a) % p
        if not c:
            return 0
    return c


def _ppart_product(p, r, s):
    """Milnor matrix product of P(r), P(s) (Sq(r), Sq(s) at p=2): {T: coeff}."""
    m, n = len(r), len(s)
    out = {}
    x = [[0] * (n + 1) for _ in range(m + 1)]
    colrem = [0] + list(s)

    def emit():
        coeff = 1
        t = []
        for k in range(1, m + n + 1):
            diag = [x[i][k - i] for i in range(max(0, k - n), min(m, k) + 1)]
            coeff = coeff * _multinomial_mod(diag, p) % p
            if not coeff:
                return
            t.append(sum(diag))
        tt = _strip(t)
        out[tt] = (out.get(tt, 0) + coeff) % p

    def fill_row(i):
        if i > m:
            for j in range(1, n + 1):
                x[0][j] = colrem[j]
            emit()
            return

        def fill_col(j, rem):
            if j > n:
                x[i][0] = rem
                fill_row(i + 1)
                return
            pj = p**j
            top = min(rem // pj, colrem[j])
            for v in range(top + 1):
                x[i][j] = v
                colrem[j] -= v
                fill_col(j + 1, rem - v * pj)
                colrem[j] += v
            x[i][j] = 0

        fill_col(1, r[i - 1])

    fill_row(1)
    return {t: c for t, c in out.items() if c}


def multiply_mono(p, a, b):
    """Product of two Milnor monomials in the full algebra: {monomial: coeff}."""
    key = (p, a, b)
    hit = _MONO_CACHE.get(key)
    if hit is not None:
        return hit
    res = _multiply_mono_raw(p, a, b)
    if len(_MONO_CACHE) < 200000:
        _MONO_CACHE[key] = res
    return res


_MONO_CACHE = {}


def _multiply_mono_raw(p, a, b):
    if p == 2:
        return _ppart_product(2, a, b)
    (e, r), (f, s) = a, b
    # walk P(r) across each Q_k of f, collecting Q's on the left with signs
    terms = {(e, r): 1}
    for k in f:
        new = {}
        for (g, rp), c in terms.items():
            moves = [(k, rp)]
            pk = p**k
            for i in range(1, len(rp) + 1):
                if rp[i - 1] >= pk:
                    r2 = list(rp)
                    r2[i - 1] -= pk
                    moves.append((k + i, _strip(r2)))
            for q, r2 in moves:
                if q in g:
                    continue
                sign = -1 if sum(1 for gg in g if gg > q) & 1 else 1
                key = (tuple(sorted(g + (q,))), r2)
                new[key] = (new.get(key, 0) + sign * c) % p
        terms = {key: c for key, c in new.items() if c}
    out = {}
    for (g, rp), c in terms.items():
        for t, ct in _ppart_product(p, rp, s).items():
            mono = (g, t)
            out[mono] = (out.get(mono, 0) + c * ct) % p
    return {m: c for m, c in out.items() if c}


# ---------------------------------------------------------------------------
# Profiles.

class Profile:
    """A finite Milnor-diagonal subalgebra: xi_i-exponents below p^{ks[i-1]},
    and at odd p an allowed tau/Q index set.

    The named ones (A(n), E(1), P(0)) are sub-Hopf-algebras, hence closed
    under product; closure of custom profiles is checked at multiply time.
    """

    def __init__(self, p, ks, taus=(), name=None):
        if p < 2 or any(p % d == 0 for d in range(2, p)):
            raise ProfileError(f"p = {p} is not prime")
        ks = tuple(ks)
        taus = tuple(sorted(taus))
        if any(k < 1 for k in ks):
            raise ProfileError("profile exponents must be positive")
        if p == 2 and taus:
            raise ProfileError("tau-support only exists at odd p")
        self.p = p
        self.ks = ks
        self.taus = taus
        self.name = name or f"profile(p={p}, ks={ks}, taus={taus})"
        dim = p ** sum(ks) << len(taus)
        if dim > MAX_PROFILE_DIM:
            raise ProfileError(
                f"{self.name} has dimension {dim} > {MAX_PROFILE_DIM}; "
                "A(3) at p=2 is the largest supported profile")
        self.dim = dim
        self._by_degree = None
        self._index = {}
        self._lmul = {}

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return (isinstance(other, Profile)
                and (self.p, self.ks, self.taus) == (other.p, other.ks, other.taus))

    def __hash__(self):
        return hash((self.p, self.ks, self.taus))

    def unit_mono(self):
        return mono_unit(self.p)

    def contains_mono(self, mono):
        p = self.p
        r = mono if p == 2 else mono[1]
        if p != 2 and any(i not in self.taus for i in mono[0]):
            return False
        if len(r) > len(self.ks):
            return False
        return all(ri < p**k for ri, k in zip(r, self.ks))

    def top_degree(self):
        p = self.p
        if p == 2:
            return sum((2**k - 1) * (2**(i + 1) - 1) for i, k in enumerate(self.ks))
        return (sum((p**k - 1) * 2 * (p**(i + 1) - 1) for i, k in enumerate(self.ks))
                + sum(2 * p**i - 1 for i in self.taus))

    def _fill(self):
        if self._by_degree is not None:
            return
        p = self.p
        rs = [_strip(r) for r in iproduct(*(range(p**k) for k in self.ks))]
        monos = rs if p == 2 else [
            (tuple(e), r)
            for k in range(len(self.taus) + 1)
            for e in combinations(self.taus, k)
            for r in rs
        ]
        table = {}
        for m in monos:
            table.setdefault(mono_degree(p, m), []).append(m)
        self._by_degree = {d: sorted(v) for d, v in table.items()}
        for d, v in self._by_degree.items():
            for i, m in enumerate(v):
                self._index[m] = i

    def basis(self, degree):
        """Profile monomials of one degree, in a fixed lexicographic order."""
        self._fill()
        return self._by_degree.get(degree, [])

    def dim_at(self, degree):
        return len(self.basis(degree))

    def index_of(self, mono):
        """Position of mono within basis(degree of mono)."""
        self._fill()
        return self._index[mono]

    def lmul_matrix(self, mono, degree):
        """Left multiplication by mono: component of degree `degree` to
        degree + |mono|, as a matrix in the fixed bases.  Memoized."""
        key = (mono, degree)
        hit = self._lmul.get(key)
        if hit is not None:
            return hit
        p = self.p
        dtop = degree + mono_degree(p, mono)
        target = self.basis(dtop)
        cols = []
        for m in self.basis(degree):
            prod = _multiply_mono_raw(p, mono, m)
            col = [0] * len(target)
            for t, c in prod.items():
                if not self.contains_mono(t):
                    raise ProfileError(
                        f"product {mono_str(p, mono)} * {mono_str(p, m)} escapes "
                        f"{self.name}; profile is not closed")
                col[self._index[t]] = c
            cols.append(col)
        mat = FpMatrix.from_dense(p, cols).transpose() if cols else FpMatrix.zero(p, len(target), 0)
        self._lmul[key] = mat
        return mat


_NAMED_PROFILES = {}


def named_profile(name, p=2):
    """Predefined profiles: A(1), A(2), A(3), E(1) = E[b, Q1], P(0) = <P^1>.

    Memoized per (name, p) so every user of one algebra shares its
    multiplication-table cache.
    """
    key = (name, p)
    if key not in _NAMED_PROFILES:
        _NAMED_PROFILES[key] = _build_named_profile(name, p)
    return _NAMED_PROFILES[key]


def _build_named_profile(name, p):
    m = re.fullmatch(r"A\((\d)\)", name)
    if m:
        n = int(m.group(1))
        if p == 2:
            return Profile(2, tuple(range(n + 1, 0, -1)), name=f"A({n}) at p=2")
        return Profile(p, tuple(range(n, 0, -1)), tuple(range(n + 1)),
                       name=f"A({n}) at p={p}")
    if name == "E(1)":
        if p == 2:
            return Profile(2, (1, 1), name="E(1) at p=2")
        return Profile(p, (), (0, 1), name=f"E(1) at p={p}")
    if name == "P(0)":
        return Profile(p, (1,), name=f"P(0) at p={p}")
    raise ProfileError(f"unknown profile name {name!r}")


def enumerate_basis(profile, degree):
    """All profile monomials of the given degree, fixed order."""
    if degree < 0:
        return []
    return list(profile.basis(degree))


# ---------------------------------------------------------------------------
# Elements.

class MilnorElement:
    """F_p-linear combination of Milnor monomials inside one profile."""

    __slots__ = ("profile", "terms")

    def __init__(self, profile, terms=None):
        self.profile = profile
        self.terms = {}
        if terms:
            p = profile.p
            for m, c in terms.items():
                c %= p
                if c:
                    if not profile.contains_mono(m):
                        raise ProfileError(
                            f"{mono_str(p, m)} lies outside {profile.name}")
                    self.terms[m] = c

    @classmethod
    def zero(cls, profile):
        return cls(profile)

    @classmethod
    def unit(cls, profile, c=1):
        return cls(profile, {mono_unit(profile.p): c})

    @classmethod
    def monomial(cls, profile, mono, c=1):
        return cls(profile, {mono: c})

    @property
    def p(self):
        return self.profile.p

    def is_zero(self):
        return not self.terms

    def degree(self):
        """Degree of a homogeneous element; None for 0."""
        degs = {mono_degree(self.p, m) for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("element is not homogeneous")
        return degs.pop()

    def __add__(self, other):
        assert self.profile == other.profile
        out = dict(self.terms)
        p = self.p
        for m, c in other.terms.items():
            c2 = (out.get(m, 0) + c) % p
            if c2:
                out[m] = c2
            else:
                out.pop(m, None)
        el = MilnorElement(self.profile)
        el.terms = out
        return el

    def __neg__(self):
        p = self.p
        el = MilnorElement(self.profile)
        el.terms = {m: (-c) % p for m, c in self.terms.items()}
        return el

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c %= self.p
        el = MilnorElement(self.profile)
        if c:
            el.terms = {m: (c * cm) % self.p for m, cm in self.terms.items()}
        return el

    def __mul__(self, other):
        assert self.profile == other.profile
        p = self.p
        prof = self.profile
        out = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                for m, c in multiply_mono(p, ma, mb).items():
                    if not prof.contains_mono(m):
                        raise ProfileError(
                            f"product escapes {prof.name} at {mono_str(p, m)}; "
                            "profile is not closed under multiplication")
                    c2 = (out.get(m, 0) + ca * cb * c) % p
                    if c2:
                        out[m] = c2
                    else:
                        out.pop(m, None)
        el = MilnorElement(prof)
        el.terms = out
        return el

    def __eq__(self, other):
        return (isinstance(other, MilnorElement)
                and self.profile == other.profile and self.terms == other.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        p = self.p
        bits = []
        for m in sorted(self.terms, key=lambda m: (mono_degree(p, m), m)):
            c = self.terms[m]
            s = mono_str(p, m)
            if c != 1:
                s = f"{c} {s}" if s != "1" else str(c)
            bits.append(s)
        return " + ".join(bits)

    def __repr__(self):
        return f"<{self} in {self.profile.name}>"


def multiply(a, b):
    return a * b


# ---------------------------------------------------------------------------
# Parser for admissible-word expressions (plus the printer's Milnor forms).
#
#   expr  := term (('+'|'-') term)*
#   term  := [int] word            (a bare int is also accepted, for "1")
#   word  := token+
#   token := 'Sq'INT | 'P'INT | 'Q'INT | 'b' | 'Sq(r1,...)' | 'P(r1,...)'
#
# At p = 2 only the Sq forms are legal; at odd p only P/Q/b forms.

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<plus>\+)"
    r"|(?P<minus>-)"
    r"|(?P<sqm>Sq\(\s*(?P<sqargs>\d+(?:\s*,\s*\d+)*)?\s*\))"
    r"|(?P<pmm>P\(\s*(?P<pargs>\d+(?:\s*,\s*\d+)*)?\s*\))"
    r"|(?P<sq>Sq(?P<sqk>\d+))"
    r"|(?P<pp>P(?P<pk>\d+))"
    r"|(?P<q>Q(?P<qk>\d+))"
    r"|(?P<b>b)"
    r"|(?P<int>\d+)"
)


def _parse_tuple(text):
    return _strip(int(x) for x in text.split(",")) if text else ()


_TOKEN_KINDS = ("ws", "plus", "minus", "sqm", "pmm", "sq", "pp", "q", "b", "int")


def _kind(m):
    for k in _TOKEN_KINDS:
        if m.group(k) is not None:
            return k
    raise AssertionError


def parse_expr(text, profile):
    """Evaluate an expression string to a MilnorElement of the profile."""
    p = profile.p
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if _kind(m) != "ws":
            tokens.append((m, pos))
        pos = m.end()
    if not tokens:
        raise ParseError("empty expression", 0)

    def token_element(m, at):
        kind = _kind(m)
        if p == 2 and kind in ("pmm", "pp", "q", "b"):
            raise ParseError("only Sq tokens are legal at p=2", at)
        if p != 2 and kind in ("sqm", "sq"):
            raise ParseError(f"Sq tokens are illegal at p={p}", at)
        if kind == "sq":
            mono = _strip((int(m.group("sqk")),))
        elif kind == "sqm":
            mono = _parse_tuple(m.group("sqargs"))
        elif kind == "pp":
            mono = ((), _strip((int(m.group("pk")),)))
        elif kind == "pmm":
            mono = ((), _parse_tuple(m.group("pargs")))
        elif kind == "q":
            mono = ((int(m.group("qk")),), ())
        else:  # b
            mono = ((0,), ())
        if not profile.contains_mono(mono):
            raise ProfileError(
                f"token {m.group(0)!r} at position {at} lies outside {profile.name}")
        return MilnorElement.monomial(profile, mono)

    def parse_term(i):
        m, at = tokens[i]
        coeff = None
        if _kind(m) == "int":
            coeff = int(m.group("int"))
            i += 1
        value = MilnorElement.unit(profile, 1 if coeff is None else coeff)
        nwords = 0
        while i < len(tokens) and _kind(tokens[i][0]) not in ("plus", "minus", "int"):
            value = value * token_element(*tokens[i])
            nwords += 1
            i += 1
        if nwords == 0 and coeff is None:
            raise ParseError("expected a term", at)
        return value, i

    i = 0
    sign = 1
    if _kind(tokens[0][0]) == "minus":
        sign, i = -1, 1
    elif _kind(tokens[0][0]) == "plus":
        raise ParseError("unexpected '+'", tokens[0][1])
    if i == len(tokens):
        raise ParseError("dangling sign", len(text))
    el, i = parse_term(i)
    total = el.scale(sign)
    while i < len(tokens):
        m, at = tokens[i]
        if _kind(m) == "plus":
            sign = 1
        elif _kind(m) == "minus":
            sign = -1
        else:
            raise ParseError(f"expected '+' or '-' before {m.group(0)!r}", at)
        i += 1
        if i == len(tokens):
            raise ParseError("dangling sign", len(text))
        el, i = parse_term(i)
        total = total + el.scale(sign)
    return total


def format_element(el):
    return str(el)


# ---------------------------------------------------------------------------
# Adem-relation oracle (p=2), used by tests to cross-check the Milnor product.

def adem_normalize(word, cap=512):
    """Fully Adem-reduce an Sq-word at p=2.

    word: iterable of nonnegative Sq exponents.  Returns {admissible tuple: 1}
    over F_2; the empty tuple is the unit.  Leftmost inadmissible pair is
    rewritten first, so the reduction path is deterministic.
    """
    w0 = tuple(k for k in word if k)
    if any(k < 0 for k in w0):
        raise ValueError("negative Sq exponent")
    if sum(w0) > cap:
        raise DegreeCapError(f"degree {sum(w0)} exceeds cap {cap}")
    acc = {}
    stack = [w0]
    while stack:
        w = stack.pop()
        for idx in range(len(w) - 1):
            a, b = w[idx], w[idx + 1]
            if a < 2 * b:
                pre, post = w[:idx], w[idx + 2:]
                for c in range(a // 2 + 1):
                    if math.comb(b - c - 1, a - 2 * c) & 1:
                        mid = (a + b - c,) + ((c,) if c else ())
                        stack.append(pre + mid + post)
                break
        else:
            acc[w] = acc.get(w, 0) ^ 1
    return {w: 1 for w, c in acc.items() if c}


def admissible_words(degree):
    """All admissible Sq-words (a1 >= 2 a2 >= ...) of a given total degree."""
    out = []

    def grow(prefix, rem, cap):
        if rem == 0:
            out.append(tuple(prefix))
            return
        for a in range(min(rem, cap), 0, -1):
            grow(prefix + [a], rem - a, a // 2)

    grow([], degree, degree)
    return out


def milnor_word(p, exps):
    """Expand a product of single Steenrod powers into Milnor monomials.

    exps: Sq exponents at p=2.  Returns {monomial: coeff} in the full algebra.
    """
    acc = {mono_unit(p): 1}
    for k in exps:
        mono = _strip((k,)) if p == 2 else ((), _strip((k,)))
        new = {}
        for m, c in acc.items():
            for m2, c2 in multiply_mono(p, m, mono).items():
                v = (new.get(m2, 0) + c * c2) % p
                if v:
                    new[m2] = v
                else:
                    new.pop(m2, None)
        acc = new
    return acc

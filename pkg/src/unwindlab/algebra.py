"""Finitely presented graded commutative algebras with monomial normal forms.

A polynomial is a dict ``{exponent tuple: coefficient}`` with no zero
coefficients.  Degrees are :class:`fractions.Fraction`; internally every
presentation works with integer degrees at a fixed scale ``L`` (the lcm of
all denominators), so ``deg < bound`` becomes ``ideg < ibound``.

Monomials are ordered by ``(ideg, exps)``: degree first, then lexicographic
on exponents with the first generator most significant.  Each relation has a
pure-power leading monomial ``g^e`` with unit coefficient; the remaining unit
terms are strictly smaller.  Terms whose coefficient lies in the socle of the
base (e.g. multiples of eps) may be arbitrary, because they only need the
residual relations to be reduced.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from math import comb

from . import linalg
from .expr import evaluate, parse_expr
from .rings import ZMod

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class TruncationError(ValueError):
    pass


class PresentationError(ValueError):
    pass


def binomial(m: int, k: int) -> int:
    if m < 0 or k < 0:
        raise ValueError("binomial arguments must be nonnegative")
    return comb(m, k)


def as_degree(d) -> Fraction:
    if isinstance(d, Fraction):
        return d
    if isinstance(d, str):
        return Fraction(d.strip())
    return Fraction(d)


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0 and n > 1:
        n //= p
    return n == 1


class Relation:
    __slots__ = ("gen", "exp", "small", "socle", "poly", "ideg")

    def __init__(self, gen, exp, small, socle, poly, ideg):
        self.gen = gen
        self.exp = exp
        self.small = small  # [(exps, coeff)] strictly below the lead
        self.socle = socle  # [(exps, coeff)] socle coefficients, any monomial
        self.poly = poly  # monic relation polynomial, lead coefficient one
        self.ideg = ideg


class Presentation:
    """``base[g_1, ..., g_n] / (relations)`` truncated in degrees ``>= bound``."""

    def __init__(self, base, gens, relations=(), bound=None, name: str = ""):
        if bound is None:
            raise PresentationError("a degree bound is required")
        self.base = base
        self.name = name
        self.names = [str(g[0]) for g in gens]
        self.degrees = [as_degree(g[1]) for g in gens]
        if len(set(self.names)) != len(self.names):
            raise PresentationError("generator names must be distinct")
        self.bound = as_degree(bound)
        p = base.p
        dens = [d.denominator for d in self.degrees] + [self.bound.denominator]
        for d in self.degrees:
            if d <= 0:
                raise PresentationError(f"generator degrees must be positive, got {d}")
            if not _is_p_power(d.denominator, p):
                raise PresentationError(f"degree {d} has a denominator that is not a power of {p}")
        self.L = math.lcm(*dens) if dens else 1
        self.ideg = [int(d * self.L) for d in self.degrees]
        self.ibound = math.ceil(self.bound * self.L)
        self.ngens = len(self.names)
        self.index = {n: i for i, n in enumerate(self.names)}
        self._memo: dict = {}
        self._residual = None
        self._basis_cache: dict = {}
        self.relations: list[Relation] = []
        self._rel_of: list = [None] * self.ngens
        for k, r in enumerate(relations):
            if isinstance(r, str):
                r = self.parse(r)
            rel = self._make_relation(r, k)
            if rel is None:
                continue
            if self._rel_of[rel.gen] is not None:
                raise PresentationError(
                    f"two relations lead with powers of {self.names[rel.gen]}; merge them first")
            self._rel_of[rel.gen] = rel
            self.relations.append(rel)

    # ------------------------------------------------------------------ setup
    def _make_relation(self, poly, k):
        R = self.base
        poly = {m: c for m, c in poly.items() if not R.is_zero(c)}
        if not poly:
            return None
        degs = {self.mono_ideg(m) for m in poly}
        if len(degs) != 1:
            raise PresentationError(f"relation {k + 1} '{self.fmt(poly)}' is not homogeneous")
        (ideg,) = degs
        units = [m for m, c in poly.items() if R.is_unit(c)]
        if not units:
            raise PresentationError(f"relation {k + 1} '{self.fmt(poly)}' has no unit term")
        lead = max(units)
        nz = [i for i, e in enumerate(lead) if e]
        if len(nz) != 1:
            raise PresentationError(
                f"relation {k + 1} '{self.fmt(poly)}' has leading monomial that is not a pure power")
        inv = R.inv(poly[lead])
        monic = {m: R.mul(inv, c) for m, c in poly.items()}
        small, socle = [], []
        for m, c in monic.items():
            if m == lead:
                continue
            t = R.neg(c)
            if m < lead:
                small.append((m, t))
            elif R.in_socle(c):
                socle.append((m, t))
            else:
                raise PresentationError(
                    f"relation {k + 1} '{self.fmt(poly)}' has a term above its leading monomial")
        small.sort(reverse=True)
        socle.sort(reverse=True)
        return Relation(nz[0], lead[nz[0]], small, socle, monic, ideg)

    def residual(self) -> "Presentation":
        """Same generators, relations reduced to their residue-field shape."""
        if self._residual is None:
            R = self.base
            rels = []
            for rel in self.relations:
                q = {}
                for m, c in rel.poly.items():
                    r = R.residue(c)
                    if r:
                        q[m] = R.lift(r)
                rels.append(q)
            self._residual = Presentation(R, list(zip(self.names, self.degrees)), rels, self.bound)
        return self._residual

    def relation_for(self, gen: int):
        return self._rel_of[gen]

    # --------------------------------------------------------------- elements
    def zero(self):
        return {}

    def one(self):
        return self.const(self.base.one)

    def const(self, c):
        if self.base.is_zero(c) or self.ibound <= 0:
            return {}
        return {(0,) * self.ngens: c}

    def gen(self, g):
        i = self.index[g] if isinstance(g, str) else g
        m = [0] * self.ngens
        m[i] = 1
        return self.nf({tuple(m): self.base.one})

    def monomial(self, exps, coeff=None):
        coeff = self.base.one if coeff is None else coeff
        return self.nf({tuple(exps): coeff})

    def mono_ideg(self, m) -> int:
        return sum(e * d for e, d in zip(m, self.ideg))

    def mono_degree(self, m) -> Fraction:
        return Fraction(self.mono_ideg(m), self.L)

    def to_ideg(self, d) -> int:
        v = as_degree(d) * self.L
        if v.denominator != 1:
            raise PresentationError(f"degree {d} is not a multiple of 1/{self.L}")
        return int(v)

    def add(self, f, g):
        R = self.base
        if not g:
            return f
        h = dict(f)
        for m, c in g.items():
            if m in h:
                v = R.add(h[m], c)
                if R.is_zero(v):
                    del h[m]
                else:
                    h[m] = v
            else:
                h[m] = c
        return h

    def neg(self, f):
        R = self.base
        return {m: R.neg(c) for m, c in f.items()}

    def sub(self, f, g):
        return self.add(f, self.neg(g))

    def scale(self, c, f):
        R = self.base
        out = {}
        for m, v in f.items():
            w = R.mul(c, v)
            if not R.is_zero(w):
                out[m] = w
        return out

    def sum(self, items):
        acc = {}
        for f in items:
            acc = self.add(acc, f)
        return acc

    def _acc(self, out, m_poly, c):
        R = self.base
        for k, v in m_poly.items():
            w = R.mul(c, v)
            if R.is_zero(w):
                continue
            if k in out:
                s = R.add(out[k], w)
                if R.is_zero(s):
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = w

    def nf_mono(self, m):
        r = self._memo.get(m)
        if r is not None:
            return r
        if self.mono_ideg(m) >= self.ibound:
            self._memo[m] = {}
            return self._memo[m]
        hit = None
        for i, e in enumerate(m):
            rel = self._rel_of[i]
            if rel is not None and e >= rel.exp:
                hit = (i, rel)
                break
        if hit is None:
            res = {m: self.base.one}
        else:
            i, rel = hit
            rest = list(m)
            rest[i] -= rel.exp
            res = {}
            for t, c in rel.small:
                mm = tuple(a + b for a, b in zip(t, rest))
                self._acc(res, self.nf_mono(mm), c)
            if rel.socle:
                resid = self.residual()
                for t, c in rel.socle:
                    mm = tuple(a + b for a, b in zip(t, rest))
                    self._acc(res, resid.nf_mono(mm), c)
        self._memo[m] = res
        return res

    def nf(self, f):
        """Reduce, silently dropping everything of degree >= bound."""
        out = {}
        R = self.base
        for m, c in f.items():
            if R.is_zero(c):
                continue
            self._acc(out, self.nf_mono(m), c)
        return out

    def normal_form(self, f):
        """Public reduction: ``f`` must be homogeneous of degree < bound."""
        d = self.homogeneous_ideg(f)
        if d is not None and d >= self.ibound:
            raise TruncationError(
                f"degree {Fraction(d, self.L)} is not below the bound {self.bound}")
        return self.nf(f)

    def homogeneous_ideg(self, f):
        degs = {self.mono_ideg(m) for m, c in f.items() if not self.base.is_zero(c)}
        if not degs:
            return None
        if len(degs) > 1:
            raise PresentationError(f"'{self.fmt(f)}' is not homogeneous")
        return degs.pop()

    def mul(self, f, g):
        if not f or not g:
            return {}
        R = self.base
        ib = self.ibound
        fd = [(m, c, self.mono_ideg(m)) for m, c in f.items()]
        gd = [(m, c, self.mono_ideg(m)) for m, c in g.items()]
        out = {}
        for m1, c1, d1 in fd:
            for m2, c2, d2 in gd:
                if d1 + d2 >= ib:
                    continue
                c = R.mul(c1, c2)
                if R.is_zero(c):
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                self._acc(out, self.nf_mono(m), c)
        return out

    def pow(self, f, n: int):
        result = self.one()
        base = f
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def is_zero(self, f) -> bool:
        return not self.nf(f)

    def equal(self, f, g) -> bool:
        return not self.nf(self.sub(f, g))

    # ------------------------------------------------------------------ bases
    def max_exp(self, i):
        rel = self._rel_of[i]
        return None if rel is None else rel.exp - 1

    def basis_ideg(self, D: int):
        """Normal-form monomials of integer degree ``D`` (at scale L)."""
        if D in self._basis_cache:
            return self._basis_cache[D]
        out = []
        if 0 <= D < self.ibound:
            n = self.ngens
            cur = [0] * n

            def rec(i, rem):
                if i == n:
                    if rem == 0:
                        out.append(tuple(cur))
                    return
                d = self.ideg[i]
                cap = rem // d
                me = self.max_exp(i)
                if me is not None:
                    cap = min(cap, me)
                for e in range(cap + 1):
                    cur[i] = e
                    rec(i + 1, rem - e * d)
                cur[i] = 0

            rec(0, D)
            out.sort()
        self._basis_cache[D] = out
        return out

    def graded_basis(self, d):
        return self.basis_ideg(self.to_ideg(d))

    def dim(self, d) -> int:
        return len(self.graded_basis(d))

    def degrees_present(self):
        """Integer degrees D < ibound with a nonzero graded piece."""
        return [D for D in range(self.ibound) if self.basis_ideg(D)]

    def all_basis(self):
        out = []
        for D in range(self.ibound):
            out.extend(self.basis_ideg(D))
        return out

    def hilbert(self) -> dict:
        return {Fraction(D, self.L): len(b) for D in range(self.ibound)
                if (b := self.basis_ideg(D))}

    def coords(self, f, D: int):
        """Coordinate vector (list) of ``f`` in the basis of degree ``D``."""
        basis = self.basis_ideg(D)
        idx = {m: i for i, m in enumerate(basis)}
        g = self.nf(f)
        vec = [self.base.zero] * len(basis)
        for m, c in g.items():
            if m not in idx:
                raise PresentationError(f"'{self.fmt(g)}' is not homogeneous of degree {Fraction(D, self.L)}")
            vec[idx[m]] = c
        return vec

    def from_coords(self, vec, D: int):
        basis = self.basis_ideg(D)
        return {m: c for m, c in zip(basis, vec) if not self.base.is_zero(c)}

    # ------------------------------------------------------------ derivatives
    def partial(self, f, i: int):
        """Formal partial derivative in the free polynomial ring."""
        R = self.base
        out = {}
        for m, c in f.items():
            e = m[i]
            if e == 0:
                continue
            w = R.mul(R.from_int(e), c)
            if R.is_zero(w):
                continue
            mm = list(m)
            mm[i] -= 1
            out[tuple(mm)] = R.add(out.get(tuple(mm), R.zero), w)
        return {m: c for m, c in out.items() if not R.is_zero(c)}

    def derivation(self, f, images):
        """D(f) = sum_i (df/dg_i) * images[i], reduced (images[i] may be None)."""
        acc = {}
        for i, img in enumerate(images):
            if not img:
                continue
            d = self.partial(f, i)
            if d:
                acc = self.add(acc, self.mul(d, img))
        return self.nf(acc)

    # ---------------------------------------------------------- constructions
    def with_bound(self, bound) -> "Presentation":
        return Presentation(self.base, list(zip(self.names, self.degrees)),
                            [r.poly for r in self.relations], bound, self.name)

    def change_base(self, ring, cmap) -> "Presentation":
        rels = [{m: cmap(c) for m, c in r.poly.items()} for r in self.relations]
        return Presentation(ring, list(zip(self.names, self.degrees)), rels, self.bound, self.name)

    def map_coeffs(self, f, cmap, ring):
        return {m: v for m, c in f.items() if not ring.is_zero(v := cmap(c))}

    def renamed(self, names) -> "Presentation":
        return Presentation(self.base, list(zip(names, self.degrees)),
                            [r.poly for r in self.relations], self.bound, self.name)

    # ----------------------------------------------------------------- format
    def fmt_mono(self, m) -> str:
        parts = []
        for n, e in zip(self.names, m):
            if e == 1:
                parts.append(n)
            elif e > 1:
                parts.append(f"{n}^{e}")
        return "*".join(parts) if parts else "1"

    def fmt(self, f) -> str:
        if not f:
            return "0"
        R = self.base
        terms = []
        for m in sorted(f, key=lambda m: (self.mono_ideg(m), m), reverse=True):
            c = f[m]
            cs = R.fmt(c) if hasattr(R, "fmt") else str(c)
            ms = self.fmt_mono(m)
            if ms == "1":
                terms.append(cs)
            elif cs == "1":
                terms.append(ms)
            else:
                terms.append(f"{cs}*{ms}")
        return " + ".join(terms)

    def parse(self, text: str, line: int = 1, col0: int = 1):
        return evaluate(parse_expr(text, line, col0), _PolyOps(self), line)

    def __repr__(self):
        gens = ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees))
        rels = ", ".join(self.fmt(r.poly) for r in self.relations)
        return f"Presentation({self.base}; {gens}; {rels}; bound {self.bound})"


class _PolyOps:
    """Evaluation callbacks turning an expression AST into a polynomial."""

    def __init__(self, pres: Presentation):
        self.P = pres

    def const(self, v):
        return self.P.const(self.P.base.from_int(v))

    def name(self, s):
        P = self.P
        if s == "eps" and hasattr(P.base, "eps"):
            return P.const(P.base.eps)
        if s not in P.index:
            raise ValueError(f"unknown generator '{s}'")
        m = [0] * P.ngens
        m[P.index[s]] = 1
        return {tuple(m): P.base.one}

    def add(self, a, b):
        return self.P.add(a, b)

    def neg(self, a):
        return self.P.neg(a)

    def mul(self, a, b):
        return _raw_mul(self.P, a, b)

    def pow(self, a, e):
        acc = {(0,) * self.P.ngens: self.P.base.one}
        for _ in range(e):
            acc = _raw_mul(self.P, acc, a)
        return acc

    def tensor(self, parts):
        raise ValueError("tensor '(x)' is not allowed here")


def _raw_mul(P, f, g):
    """Product in the free polynomial ring (no reduction, no truncation)."""
    R = P.base
    out = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            c = R.mul(c1, c2)
            if R.is_zero(c):
                continue
            m = tuple(a + b for a, b in zip(m1, m2))
            v = R.add(out.get(m, R.zero), c)
            if R.is_zero(v):
                out.pop(m, None)
            else:
                out[m] = v
    return out


class TensorPresentation(Presentation):
    """Tensor product of presentations over a common base."""

    def __init__(self, factors, names=None):
        base = factors[0].base
        for f in factors[1:]:
            if f.base != base:
                raise PresentationError(f"base mismatch: {f.base} vs {base}")
        self.factors = list(factors)
        self.offsets = []
        gens, rels = [], []
        off = 0
        n_total = sum(f.ngens for f in factors)
        used = set()
        for j, f in enumerate(factors):
            self.offsets.append(off)
            for k, (n, d) in enumerate(zip(f.names, f.degrees)):
                nm = n if names is None else names[j][k]
                while nm in used:
                    nm = nm + "'"
                used.add(nm)
                gens.append((nm, d))
            for r in f.relations:
                rels.append({self._shift(m, off, n_total): c for m, c in r.poly.items()})
            off += f.ngens
        bound = min(f.bound for f in factors)
        super().__init__(base, gens, rels, bound)

    @staticmethod
    def _shift(m, off, n):
        out = [0] * n
        out[off:off + len(m)] = m
        return tuple(out)

    def embed(self, j: int, f):
        """Image of ``f`` from factor ``j`` (all other factors get 1)."""
        off = self.offsets[j]
        return self.nf({self._shift(m, off, self.ngens): c for m, c in f.items()})

    def pure(self, parts):
        """Product of embedded factors; ``parts`` is a list of polynomials."""
        acc = self.one()
        for j, f in enumerate(parts):
            acc = self.mul(acc, self.embed(j, f))
        return acc

    def split(self, m):
        """Split a tensor monomial into its per-factor monomials."""
        return tuple(tuple(m[o:o + f.ngens]) for o, f in zip(self.offsets, self.factors))


def tensor_presentation(a: Presentation, b: Presentation) -> TensorPresentation:
    return TensorPresentation([a, b])


def tensor_power(a: Presentation, r: int) -> TensorPresentation:
    names = [[f"{n}_{j + 1}" for n in a.names] for j in range(r)] if r > 1 else None
    return TensorPresentation([a] * r, names)


def apply_hom(f, images, target: Presentation, cmap=None):
    """Evaluate ``f`` with generator ``i`` sent to ``images[i]`` in ``target``."""
    R = target.base
    cache: dict = {}

    def power(i, e):
        key = (i, e)
        if key not in cache:
            if e == 1:
                cache[key] = images[i]
            elif e == 0:
                cache[key] = target.one()
            else:
                h = e // 2
                sq = target.mul(power(i, h), power(i, h))
                cache[key] = target.mul(sq, images[i]) if e % 2 else sq
        return cache[key]

    out = {}
    for m, c in f.items():
        cc = cmap(c) if cmap else c
        if R.is_zero(cc):
            continue
        term = target.const(cc)
        for i, e in enumerate(m):
            if e:
                term = target.mul(term, power(i, e))
                if not term:
                    break
        out = target.add(out, term)
    return out


class HomCache:
    """Repeated evaluation of a fixed algebra map with memoized powers."""

    def __init__(self, images, target: Presentation, cmap=None):
        self.images = images
        self.target = target
        self.cmap = cmap
        self._pow: dict = {}
        self._mono: dict = {}

    def power(self, i, e):
        key = (i, e)
        r = self._pow.get(key)
        if r is None:
            T = self.target
            if e == 0:
                r = T.one()
            elif e == 1:
                r = self.images[i]
            else:
                h = self.power(i, e // 2)
                r = T.mul(h, h)
                if e % 2:
                    r = T.mul(r, self.images[i])
            self._pow[key] = r
        return r

    def mono(self, m):
        r = self._mono.get(m)
        if r is None:
            T = self.target
            r = T.one()
            for i, e in enumerate(m):
                if e:
                    r = T.mul(r, self.power(i, e))
                    if not r:
                        break
            self._mono[m] = r
        return r

    def __call__(self, f):
        T = self.target
        R = T.base
        out = {}
        for m, c in f.items():
            cc = self.cmap(c) if self.cmap else c
            if R.is_zero(cc):
                continue
            T._acc(out, self.mono(m), cc)
        return out


# ---------------------------------------------------------------- subspaces
class Subspace:
    """F_p-span of polynomials of one degree in a presentation over a field."""

    def __init__(self, pres: Presentation, D: int):
        if not (isinstance(pres.base, ZMod) and pres.base.n == 1):
            raise PresentationError("subspace computations need a prime-field base")
        self.P = pres
        self.D = D
        self.basis = pres.basis_ideg(D)
        self.idx = {m: i for i, m in enumerate(self.basis)}
        self.ech = linalg.Echelon(pres.base.p)

    def vec(self, f):
        g = self.P.nf(f)
        v = {}
        for m, c in g.items():
            if m not in self.idx:
                raise PresentationError("element of the wrong degree")
            v[self.idx[m]] = c
        return v

    def add(self, f) -> bool:
        return self.ech.add(self.vec(f)) == "new"

    def contains(self, f) -> bool:
        return self.ech.contains(self.vec(f))

    @property
    def dim(self):
        return len(self.ech)

    def vectors(self):
        return [row for _, (row, _, _) in sorted(self.ech.rows.items())]

    def spanning_polys(self):
        return [{self.basis[i]: c for i, c in row.items()} for row in self.vectors()]


def ideal_span(pres: Presentation, gens, D: int) -> Subspace:
    """Degree-``D`` part of the ideal generated by homogeneous ``gens``."""
    S = Subspace(pres, D)
    for g in gens:
        dg = pres.homogeneous_ideg(g)
        if dg is None or dg > D:
            continue
        for m in pres.basis_ideg(D - dg):
            S.add(pres.mul({m: pres.base.one}, g))
    return S


def quotient_dims(pres: Presentation, gens) -> dict:
    """Graded dimensions of ``pres / (gens)`` in every degree below the bound."""
    out = {}
    for D in range(pres.ibound):
        b = pres.basis_ideg(D)
        if not b:
            continue
        q = len(b) - ideal_span(pres, gens, D).dim
        if q:
            out[Fraction(D, pres.L)] = q
    return out


def trivial_algebra(base, bound=1) -> Presentation:
    return Presentation(base, [], [], bound)


class AlgebraRing:
    """A presentation viewed as a coefficient ring (elements are polynomials)."""

    def __init__(self, pres: Presentation):
        self.P = pres
        self.p = pres.base.p
        self.zero = {}
        self.one = pres.one()
        self.char_p = getattr(pres.base, "char_p", False)

    def __repr__(self):
        return f"{self.P.base}[{','.join(self.P.names)}]/({', '.join(self.P.fmt(r.poly) for r in self.P.relations)})"

    def __eq__(self, other):
        return isinstance(other, AlgebraRing) and other.P is self.P

    def __hash__(self):
        return id(self.P)

    def add(self, a, b):
        return self.P.add(a, b)

    def sub(self, a, b):
        return self.P.sub(a, b)

    def neg(self, a):
        return self.P.neg(a)

    def mul(self, a, b):
        return self.P.mul(a, b)

    def from_int(self, k):
        return self.P.const(self.P.base.from_int(k))

    def is_zero(self, a):
        return not self.P.nf(a)

    def _const(self, a):
        return a.get((0,) * self.P.ngens, self.P.base.zero)

    def is_unit(self, a):
        return self.P.base.is_unit(self._const(a))

    def residue(self, a):
        return self.P.base.residue(self._const(a))

    def lift(self, r):
        return self.P.const(self.P.base.lift(r))

    def random(self, rng):
        P = self.P
        out = {m: P.base.random(rng) for m in P.all_basis()}
        return {m: c for m, c in out.items() if not P.base.is_zero(c)}

    def fmt(self, a):
        return self.P.fmt(a)

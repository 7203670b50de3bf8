"""Divided-power algebras Gamma_B(M) and envelopes D_B(I).

Brackets at p-power weights are generators: ``y_i = x^{[p^i]}`` with
``y_i^p = ((p^{i+1})! / ((p^i)!)^p) * y_{i+1}``, and a general bracket is

    x^{[m]} = u_m^{-1} * prod_i y_i^{m_i},   u_m = m! / prod_i ((p^i)!)^{m_i},

where ``m = sum m_i p^i`` in base p; ``u_m`` is a p-adic unit.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from .algebra import Presentation, PresentationError, Subspace, quotient_dims
from .hopf import UnsupportedError


class NotRegularError(ValueError):
    pass


def digits(m: int, p: int) -> list[int]:
    out = []
    while m:
        out.append(m % p)
        m //= p
    return out


def bracket_unit(m: int, p: int) -> int:
    """u_m = m! / prod ((p^i)!)^{m_i}; an integer prime to p."""
    den = 1
    for i, d in enumerate(digits(m, p)):
        den *= factorial(p**i) ** d
    u, r = divmod(factorial(m), den)
    if r or u % p == 0:
        raise ArithmeticError(f"u_{m} is not a p-adic unit")
    return u


def pd_relation_coeff(i: int, p: int) -> int:
    return factorial(p ** (i + 1)) // factorial(p**i) ** p


class PDAlgebra:
    """A presentation together with bracket maps for each PD generator.

    ``brackets[j](m)`` returns ``f_j^{[m]}`` as an element of ``pres``;
    ``weights[j]`` is the degree of ``f_j``.
    """

    def __init__(self, B, pres, bracket_fns, weights, N, kind):
        self.B = B
        self.pres = pres
        self.bracket_fns = bracket_fns
        self.weights = weights
        self.N = N
        self.kind = kind

    @property
    def rank(self):
        return len(self.bracket_fns)

    def bracket(self, j: int, m: int):
        return self.bracket_fns[j](m)

    def monomial(self, ms):
        P = self.pres
        acc = P.one()
        for j, m in enumerate(ms):
            if m:
                acc = P.mul(acc, self.bracket(j, m))
        return acc

    def __repr__(self):
        return f"PDAlgebra({self.kind}, {self.pres!r})"


def _gen_names(prefix, p, N, deg):
    out = []
    i = 0
    while p**i * deg < N:
        out.append((f"{prefix}_{p ** i}", p**i * deg))
        i += 1
    return out


def gamma_free(B: Presentation, r: int, N) -> PDAlgebra:
    """Free PD algebra on r degree-1 generators over B, truncated at weight N."""
    if r < 1:
        raise ValueError("rank must be at least 1")
    p = B.base.p
    R = B.base
    N = Fraction(N)
    gens = list(zip(B.names, B.degrees))
    blocks = []
    for j in range(r):
        var = "x" if r == 1 else f"x{j + 1}"
        block = _gen_names(var, p, N, 1)
        blocks.append(len(block))
        gens += block
    pres0 = Presentation(R, gens, [], N)
    rels = [{m: c for m, c in rel.poly.items()} for rel in B.relations]
    rels = [{m + (0,) * (pres0.ngens - B.ngens): c for m, c in r_.items()} for r_ in rels]
    off = B.ngens
    starts = []
    for j, nb in enumerate(blocks):
        starts.append(off)
        for i in range(nb):
            lead = [0] * pres0.ngens
            lead[off + i] = p
            rel = {tuple(lead): R.one}
            if i + 1 < nb:
                nxt = [0] * pres0.ngens
                nxt[off + i + 1] = 1
                c = R.from_int(-pd_relation_coeff(i, p))
                if not R.is_zero(c):
                    rel[tuple(nxt)] = c
            rels.append(rel)
        off += nb
    pres = Presentation(R, gens, rels, pres0.bound, name=f"Gamma(rank {r})")
    fns = [_bracket_fn(pres, starts[j], blocks[j], p, None) for j in range(r)]
    pd = PDAlgebra(B, pres, fns, [1] * r, N, "free")
    pd.table = GammaTable(B, r, N)
    return pd


def _bracket_fn(pres, start, nblock, p, base_gen):
    """Bracket map; ``base_gen`` is (index, exponent) when y_0 lies in B."""
    R = pres.base

    def fn(m):
        if m == 0:
            return pres.one()
        ds = digits(m, p)
        if len(ds) > nblock + (1 if base_gen else 0) and any(ds[nblock + (1 if base_gen else 0):]):
            return {}
        exps = [0] * pres.ngens
        if base_gen:
            gi, e = base_gen
            exps[gi] += e * ds[0]
            rest = ds[1:]
        else:
            rest = ds
        for i, d in enumerate(rest):
            if d:
                if i >= nblock:
                    return {}
                exps[start + i] += d
        c = R.inv(R.from_int(bracket_unit(m, p)))
        return pres.nf({tuple(exps): c})

    return fn


class GammaTable:
    """Gamma_B on r generators by the binomial multiplication rule.

    Elements are dicts ``{weights: B-polynomial}``; this is the independent
    route used to cross-check the presentation form.
    """

    def __init__(self, B: Presentation, r: int, N):
        self.B = B
        self.r = r
        self.N = Fraction(N)

    def one(self):
        return {(0,) * self.r: self.B.one()}

    def bracket(self, j, m):
        w = [0] * self.r
        w[j] = m
        return {tuple(w): self.B.one()} if m < self.N else {}

    def mul(self, u, v):
        B = self.B
        R = B.base
        out = {}
        for w1, f in u.items():
            for w2, g in v.items():
                w = tuple(a + b for a, b in zip(w1, w2))
                if sum(w) >= self.N:
                    continue
                c = 1
                for a, b in zip(w1, w2):
                    c *= _binom(a + b, a)
                h = B.scale(R.from_int(c), B.mul(f, g))
                if h:
                    acc = B.add(out.get(w, {}), h)
                    if acc:
                        out[w] = acc
                    else:
                        out.pop(w, None)
        return out

    def basis(self):
        return [w for w in itertools.product(range(int(self.N) + 1), repeat=self.r) if sum(w) < self.N]


def _binom(n, k):
    from math import comb

    return comb(n, k)


def _pure_power(B: Presentation, f):
    """(generator index, exponent) if ``f`` is a unit times a pure power."""
    if isinstance(f, str):
        f = B.parse(f)
    f = B.nf(f)
    if len(f) != 1:
        raise UnsupportedError(f"ideal generator '{B.fmt(f)}' is not a monomial")
    (m, c), = f.items()
    nz = [i for i, e in enumerate(m) if e]
    if len(nz) != 1 or not B.base.is_unit(c):
        raise UnsupportedError(f"ideal generator '{B.fmt(f)}' is not a pure power of a generator")
    return nz[0], m[nz[0]]


def koszul_prediction(B: Presentation, degrees) -> dict:
    """Hilbert function of B / (regular sequence of the given degrees)."""
    ideg = [B.to_ideg(d) for d in degrees]
    h = [len(B.basis_ideg(D)) for D in range(B.ibound)]
    for d in ideg:
        h = [h[D] - (h[D - d] if D >= d else 0) for D in range(B.ibound)]
    return {Fraction(D, B.L): v for D, v in enumerate(h) if v}


def check_regular(B: Presentation, ideal) -> None:
    """Compare B/I with the Koszul prediction below the first monomial relation.

    Monomial relations are read as truncations, so regularity is a statement
    about the untruncated ring and is only testable beneath them.
    """
    polys = [B.nf(B.parse(f) if isinstance(f, str) else f) for f in ideal]
    degs = [Fraction(B.homogeneous_ideg(f), B.L) for f in polys]
    upto = min([r.ideg for r in B.relations if len(r.poly) == 1] + [B.ibound])
    cut = Fraction(upto, B.L)
    want = {d: v for d, v in koszul_prediction(B, degs).items() if d < cut}
    got = {d: v for d, v in quotient_dims(B, polys).items() if d < cut}
    if want != got:
        bad = sorted(set(want) | set(got), key=lambda d: (want.get(d) == got.get(d), d))[0]
        raise NotRegularError(
            f"ideal is not regular: dim (B/I) in degree {bad} is {got.get(bad, 0)}, "
            f"Koszul predicts {want.get(bad, 0)}")


def merged_monomial_relations(B: Presentation, extra: dict):
    """B's relations with ``g^e = 0`` added for each ``extra[g] = e`` (min exponent wins)."""
    rels = []
    done = set()
    for rel in B.relations:
        g = rel.gen
        if g in extra:
            if len(rel.poly) != 1:
                raise UnsupportedError(
                    f"cannot merge {B.names[g]}^{extra[g]} = 0 with the relation {B.fmt(rel.poly)}")
            e = min(rel.exp, extra[g])
            m = [0] * B.ngens
            m[g] = e
            rels.append({tuple(m): B.base.one})
            done.add(g)
        else:
            rels.append(dict(rel.poly))
    for g, e in extra.items():
        if g not in done:
            m = [0] * B.ngens
            m[g] = e
            rels.append({tuple(m): B.base.one})
    return rels


def pd_envelope(B: Presentation, ideal, N=None, check: bool = True) -> PDAlgebra:
    """D_B(I) for an ideal generated by pure powers of distinct B generators."""
    if not getattr(B.base, "char_p", False):
        raise UnsupportedError("PD envelopes are implemented over F_p-algebras only")
    p = B.base.p
    N = B.bound if N is None else Fraction(N)
    if not ideal:
        return PDAlgebra(B, B.with_bound(min(B.bound, N)), [], [], N, "envelope")
    if check:
        check_regular(B, ideal)
    pp = [_pure_power(B, f) for f in ideal]
    if len({g for g, _ in pp}) != len(pp):
        raise UnsupportedError("ideal generators must involve distinct generators")
    weights = [B.degrees[g] * e for g, e in pp]
    extra = {g: e * p for g, e in pp}
    gens = list(zip(B.names, B.degrees))
    blocks = []
    for (g, e), w in zip(pp, weights):
        block = []
        i = 1
        while p**i * w < N:
            block.append((f"{B.names[g]}_pd{p ** i}", p**i * w))
            i += 1
        blocks.append(block)
    pad = sum(len(b) for b in blocks)
    rels = [{m + (0,) * pad: c for m, c in r.items()} for r in merged_monomial_relations(B, extra)]
    n = B.ngens + pad
    starts = []
    off = B.ngens
    for block in blocks:
        starts.append(off)
        for i in range(len(block)):
            m = [0] * n
            m[off + i] = p
            rels.append({tuple(m): B.base.one})
        gens += block
        off += len(block)
    pres = Presentation(B.base, gens, rels, min(N, B.bound), name="D_B(I)")
    fns = [_bracket_fn(pres, starts[j], len(blocks[j]), p, pp[j]) for j in range(len(pp))]
    return PDAlgebra(B, pres, fns, weights, N, "envelope")


def _weight_vectors(D: PDAlgebra, n: int, maxdeg: int):
    """Bracket weight vectors with total weight >= n and degree <= maxdeg."""
    P = D.pres
    w = [P.to_ideg(x) for x in D.weights]
    caps = [maxdeg // x for x in w]
    for ms in itertools.product(*[range(c + 1) for c in caps]):
        if sum(ms) >= n and sum(a * b for a, b in zip(ms, w)) <= maxdeg:
            yield ms


def pd_filtration(D: PDAlgebra, n: int) -> dict:
    """Fil^n by degree: ``{integer degree: Subspace}`` (Fil^0 is everything)."""
    P = D.pres
    out = {}
    gens = [(D.monomial(ms), ms) for ms in _weight_vectors(D, n, P.ibound - 1)]
    gens = [(g, ms) for g, ms in gens if g]
    for Dg in range(P.ibound):
        S = Subspace(P, Dg)
        if n == 0:
            for m in P.basis_ideg(Dg):
                S.add({m: P.base.one})
        else:
            for g, _ in gens:
                dg = P.homogeneous_ideg(g)
                if dg is None or dg > Dg:
                    continue
                for m in P.basis_ideg(Dg - dg):
                    S.add(P.mul({m: P.base.one}, g))
        if S.dim:
            out[Dg] = S
    return out


def filtration_dims(fil: dict) -> dict:
    return {D: S.dim for D, S in fil.items() if S.dim}


def gr_dims(D: PDAlgebra, n: int) -> dict:
    """dim Fil^n / Fil^{n+1} by degree."""
    a = pd_filtration(D, n)
    b = pd_filtration(D, n + 1)
    out = {}
    for Dg in a:
        v = a[Dg].dim - (b[Dg].dim if Dg in b else 0)
        if v:
            out[Fraction(Dg, D.pres.L)] = v
    return out


__all__ = ["PDAlgebra", "GammaTable", "gamma_free", "pd_envelope", "pd_filtration", "filtration_dims", "gr_dims", "bracket_unit",
           "NotRegularError", "check_regular", "koszul_prediction", "PresentationError"]

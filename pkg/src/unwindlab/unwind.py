"""Unwinding Env_X(B, I) of a pointed module along a regular ideal.

Env is computed through the Koszul factorization: one copy of the Hopf
algebra per ideal generator f_j, with the point family sent to the roots
f_j^{1/p^m}.  Point generators are eliminated by substitution, so the result
is again a presentation with pure-power leading terms.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .algebra import (HomCache, Presentation, PresentationError, Subspace, quotient_dims,
                      tensor_presentation)
from .divided_powers import _pure_power, check_regular, merged_monomial_relations
from .hopf import PointedHopf, UnsupportedError, check_hopf, find_iso, tensor_square, to_sc
from .report import Report, failed, passed


def perfect_presentation(p, variables=("x",), k=1, N=4, base=None):
    """base[x_i^{1/p^k}] with x_i^N = 0 for every variable (a box truncation).

    The degree bound is ``len(variables) * N``, so the box relations are the
    only truncation in play.
    """
    from .rings import ZMod

    base = base or ZMod(p)
    names = [v if k == 0 else f"{v}_r{p ** k}" for v in variables]
    gens = [(n, Fraction(1, p**k)) for n in names]
    r = len(names)
    rels = []
    for i in range(r):
        m = [0] * r
        m[i] = N * p**k
        rels.append({tuple(m): base.one})
    return Presentation(base, gens, rels, r * N, name=f"perfect(k={k}, N={N})")


def variable_power(B: Presentation, i: int, d):
    """x_i^d as a monomial of B, where generator i has degree 1/p^k."""
    e = Fraction(d) / B.degrees[i]
    if e.denominator != 1:
        raise UnsupportedError(f"{B.names[i]}^{e} is not a monomial of B")
    m = [0] * B.ngens
    m[i] = int(e)
    return {tuple(m): B.base.one}


class EnvelopeAlgebra:
    """Env_X(B, I) with its bracket maps.

    ``subst[j]`` sends an element of X's algebra to its bracket image
    ``[f_j]^{(.)}`` in ``pres``.
    """

    def __init__(self, X, B, ideal, pres, subst, copies):
        self.X = X
        self.B = B
        self.ideal = ideal
        self.pres = pres
        self.subst = subst
        self.copies = copies
        self.b_offset = pres.ngens - B.ngens

    @property
    def bound(self):
        return self.pres.bound

    def bracket(self, j: int, m):
        return self.subst[j](m)

    def from_b(self, f):
        return self.pres.nf({(0,) * self.b_offset + m: c for m, c in f.items()})

    def __repr__(self):
        return f"EnvelopeAlgebra({self.X.name}, {self.pres!r})"


def _fresh(name, taken):
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _point_images(X: PointedHopf, B: Presentation, gi: int, e: int):
    """Map {H generator: B element} and the B-relations forced by zero points."""
    H = X.algebra
    f_deg = B.degrees[gi] * e
    if f_deg != 1:
        raise UnsupportedError(f"ideal generator {B.names[gi]}^{e} has degree {f_deg}, not 1")
    sub = {}
    zeros = []
    for m, P in enumerate(X.points):
        root = variable_power(B, gi, Fraction(f_deg, X.p**m))
        P = H.nf(P)
        if not P:
            zeros.append(root)
            continue
        if len(P) != 1:
            raise UnsupportedError(f"point P_{m} = {H.fmt(P)} is not a generator")
        (mono, c), = P.items()
        nz = [i for i, a in enumerate(mono) if a]
        if len(nz) != 1 or mono[nz[0]] != 1 or c != H.base.one:
            raise UnsupportedError(f"point P_{m} = {H.fmt(P)} is not a generator")
        sub[nz[0]] = root
    return sub, zeros


def _unwind(X: PointedHopf, B: Presentation, ideal, bound=None, check=True) -> EnvelopeAlgebra:
    H = X.algebra
    if H.base != B.base:
        raise PresentationError("X and B must share the coefficient ring")
    if check and ideal and getattr(B.base, "char_p", False):
        check_regular(B, ideal)
    pp = [_pure_power(B, f) for f in ideal]
    bound = min(Fraction(bound) if bound is not None else B.bound, H.bound, B.bound)
    R = B.base
    taken = set(B.names)
    gens = []
    copies = []
    plans = []
    for j, (gi, e) in enumerate(pp):
        sub, zeros = _point_images(X, B, gi, e)
        idx = {}
        for i, (nm, dg) in enumerate(zip(H.names, H.degrees)):
            if i in sub:
                continue
            idx[i] = len(gens)
            gens.append((_fresh(nm if len(pp) == 1 else f"{nm}_{j + 1}", taken), dg))
        copies.append(idx)
        plans.append((sub, zeros))
    off = len(gens)
    gens += list(zip(B.names, B.degrees))
    n = len(gens)
    raw = Presentation(R, gens, [], bound)

    def lift_b(f):
        return {(0,) * off + m: c for m, c in f.items()}

    maps = []
    for j, (sub, _) in enumerate(plans):
        imgs = []
        for i in range(H.ngens):
            if i in sub:
                imgs.append(lift_b(sub[i]))
            else:
                m = [0] * n
                m[copies[j][i]] = 1
                imgs.append({tuple(m): R.one})
        maps.append(imgs)
    rels = []
    extra: dict = {}

    def b_only(f, why):
        g = {m[off:]: c for m, c in f.items()}
        if not g:
            return
        if len(g) != 1:
            raise UnsupportedError(f"{why} forces the non-monomial relation {B.fmt(g)} in B")
        (m, c), = g.items()
        nz = [i for i, a in enumerate(m) if a]
        if len(nz) != 1 or not R.is_unit(c):
            raise UnsupportedError(f"{why} forces {B.fmt(g)} = 0, which is not a pure power")
        extra[nz[0]] = min(extra.get(nz[0], m[nz[0]]), m[nz[0]])

    for j, (sub, zeros) in enumerate(plans):
        for z in zeros:
            b_only(lift_b(z), "a zero point")
        hm = HomCache(maps[j], raw)
        for rel in H.relations:
            img = hm(rel.poly)
            if not img:
                continue
            if any(any(m[:off]) for m in img):
                rels.append(img)
            else:
                b_only(img, f"relation {H.fmt(rel.poly)}")
    rels += [lift_b(r) for r in merged_monomial_relations(B, extra)]
    try:
        pres = Presentation(R, gens, rels, bound, name=f"Env_{X.name}")
    except PresentationError as exc:
        raise UnsupportedError(f"Env_{X.name}: {exc}") from None
    subst = [HomCache(maps[j], pres) for j in range(len(pp))]
    return EnvelopeAlgebra(X, B, list(ideal), pres, subst, copies)


def env(X: PointedHopf, B: Presentation, ideal, bound=None, check=True) -> EnvelopeAlgebra:
    """Env_X(B, I) for a pointed G_a-module and a regular ideal of degree-1 pure powers."""
    if X.flavor != "Ga":
        raise ValueError("env expects a pointed G_a-module; use env_perf for G_a^perf-modules")
    return _unwind(X, B, ideal, bound, check)


def env_perf(X: PointedHopf, B: Presentation, ideal, bound=None, check=True) -> EnvelopeAlgebra:
    """Env_X(B, I) for a pointed G_a^perf-module over W_A(B).

    ``B`` must already be over X's base (see ``tilt.w_A``); the point family
    x^{1/p^m} is matched with f_j^{1/p^m}.
    """
    if X.flavor != "GaPerf":
        raise ValueError("env_perf expects a pointed G_a^perf-module")
    return _unwind(X, B, ideal, bound, check)


def tensor_module(X: PointedHopf, B: Presentation, r: int) -> Presentation:
    """T_X(B^r) = B (x) H^{(x) r}."""
    if r < 0:
        raise ValueError("rank must be nonnegative")
    H = X.algebra
    if H.base != B.base:
        raise PresentationError("X and B must share the coefficient ring")
    out = B
    for j in range(r):
        out = tensor_presentation(out, H.renamed([f"{nm}_{j + 1}" if r > 1 else nm for nm in H.names]))
    return out


# --------------------------------------------------------------- Hodge


def _integral_monomials(e: EnvelopeAlgebra, j: int):
    """(bracket image, degree) for X basis monomials of integral degree."""
    H = e.X.algebra
    out = []
    for D in range(0, H.ibound, H.L):
        for m in H.basis_ideg(D):
            img = e.bracket(j, {m: H.base.one})
            if img:
                out.append((img, Fraction(D, H.L)))
    return out


def hodge_generators(e: EnvelopeAlgebra, n: int):
    """Bracket monomials [f_1]^{m_1}...[f_r]^{m_r} with sum deg m_u >= n."""
    P = e.pres
    lists = [_integral_monomials(e, j) for j in range(len(e.ideal))]
    gens = []
    for combo in itertools.product(*lists):
        if sum(d for _, d in combo) < n:
            continue
        g = P.one()
        for img, _ in combo:
            g = P.mul(g, img)
            if not g:
                break
        if g:
            gens.append(g)
    return gens


def hodge_fil(e: EnvelopeAlgebra, n: int) -> dict:
    """Fil^n by integer degree (scale ``pres.L``): ``{D: Subspace}``."""
    P = e.pres
    gens = hodge_generators(e, n) if n > 0 else [P.one()]
    out = {}
    for D in range(P.ibound):
        S = Subspace(P, D)
        for g in gens:
            dg = P.homogeneous_ideg(g)
            if dg is None or dg > D:
                continue
            for m in P.basis_ideg(D - dg):
                S.add(P.mul({m: P.base.one}, g))
        if S.dim:
            out[D] = S
    return out


def hodge_gr0(e: EnvelopeAlgebra) -> dict:
    """Graded dimensions of Env / Fil^1."""
    P = e.pres
    fil = hodge_fil(e, 1)
    out = {}
    for D in range(P.ibound):
        q = len(P.basis_ideg(D)) - (fil[D].dim if D in fil else 0)
        if q:
            out[Fraction(D, P.L)] = q
    return out


def check_gr0(e: EnvelopeAlgebra) -> Report:
    """B -> Env -> Env/Fil^1 is onto with kernel exactly I, degreewise."""
    name = f"gr0 of Env_{e.X.name} is B/I"
    P, B = e.pres, e.B
    fil = hodge_fil(e, 1)
    ideal = [B.nf(B.parse(f) if isinstance(f, str) else f) for f in e.ideal]
    if e.pres.L % B.L:
        return failed(name, "incompatible degree scales")
    scale = P.L // B.L
    want = {d: v for d, v in quotient_dims(B.with_bound(P.bound), ideal).items()}
    for D in range(P.ibound):
        if D % scale:
            if len(P.basis_ideg(D)) != (fil[D].dim if D in fil else 0):
                return failed(name, f"degree {Fraction(D, P.L)} has gr0 outside B")
            continue
        S = Subspace(P, D)
        if D in fil:
            for v in fil[D].spanning_polys():
                S.add(v)
        base_dim = S.dim
        for m in B.basis_ideg(D // scale):
            S.add(e.from_b({m: B.base.one}))
        if S.dim != len(P.basis_ideg(D)):
            return failed(name, f"B does not surject onto gr0 in degree {Fraction(D, P.L)}")
        q = S.dim - base_dim
        d = Fraction(D, P.L)
        if q != want.get(d, 0):
            return failed(name, f"degree {d}: dim gr0 = {q}, dim B/I = {want.get(d, 0)}")
    return passed(name, dims=want)


# ------------------------------------------------------------- coproduct


def syzygy_residuals(X: PointedHopf, e: EnvelopeAlgebra):
    """The Koszul syzygy y.[x] + (-x).[y] = 0 evaluated on every generator of X.

    For ideal (x, y) the element sum y^{deg m'} (-x)^{deg m''} [x]^{m'} [y]^{m''}
    over the coproduct of each generator m must vanish in Env.
    """
    if len(e.ideal) != 2:
        raise ValueError("syzygy check needs a two-generator ideal")
    H = X.algebra
    T = tensor_square(H)
    P = e.pres
    R = P.base
    for i, c in enumerate(X.comul):
        if c is None:
            continue
        total = {}
        for m, coeff in c.items():
            a, b = T.split(m)
            wa = _ideal_power(e, 1, Fraction(H.mono_ideg(a), H.L))
            wb = _ideal_power(e, 0, Fraction(H.mono_ideg(b), H.L), negate=True)
            term = P.mul(P.mul(wa, wb), P.mul(e.bracket(0, {a: R.one}), e.bracket(1, {b: R.one})))
            total = P.add(total, P.scale(coeff, term))
        yield H.names[i], total


def _ideal_power(e, j, d, negate=False):
    """f_j^d, or (-f_j)^d; in characteristic p, (-1)^{a/p^m} = (-1)^a."""
    gi, _ = _pure_power(e.B, e.ideal[j])
    f = e.from_b(variable_power(e.B, gi, d))
    if negate and e.pres.base.p != 2 and d.numerator % 2:
        return e.pres.neg(f)
    return f


def check_coproduct(X: PointedHopf, B: Presentation, xname="x", yname="y", bound=6) -> Report:
    """Env_X(B[x,y],(x,y)) agrees with Env_X(B[x],x) (x)_B Env_X(B[y],y).

    ``B`` is the two-variable ring; the one-variable envelopes use its
    single-variable subrings.
    """
    name = f"coproduct law for {X.name}"
    ix, iy = B.index[xname], B.index[yname]
    if B.ngens != 2:
        raise ValueError("expected a two-variable ring")

    def sub(i):
        rel = [r.poly for r in B.relations if r.gen == i]
        rel = [{(m[i],): c for m, c in r.items()} for r in rel]
        return Presentation(B.base, [(B.names[i], B.degrees[i])], rel, bound)

    fx = variable_power(B, ix, 1)
    fy = variable_power(B, iy, 1)
    both = _unwind(X, B.with_bound(bound), [fx, fy], bound)
    ex = _unwind(X, sub(ix), [variable_power(sub(ix), 0, 1)], bound)
    ey = _unwind(X, sub(iy), [variable_power(sub(iy), 0, 1)], bound)
    tens = tensor_presentation(ex.pres, ey.pres.renamed([nm + "#" for nm in ey.pres.names]))
    for label, res in syzygy_residuals(X, both):
        if both.pres.nf(res):
            return failed(name, f"syzygy on {label}: {both.pres.fmt(res)} != 0")
    # explicit map: copy generators to copy generators, B variables to B variables
    target = both.pres
    imgs = []
    for e_one, j, bi in ((ex, 0, ix), (ey, 1, iy)):
        for nm in e_one.pres.names:
            if nm == B.names[bi]:
                imgs.append(both.from_b(B.gen(bi)))
                continue
            hi = e_one.X.algebra.index[nm]
            m = [0] * target.ngens
            m[both.copies[j][hi]] = 1
            imgs.append({tuple(m): target.base.one})
    hm = HomCache(imgs, target)
    for rel in tens.relations:
        if target.nf(hm(rel.poly)):
            return failed(name, f"relation {tens.fmt(rel.poly)} does not hold in Env(B[x,y])")
    for D in range(min(tens.ibound, target.ibound)):
        src = tens.basis_ideg(D)
        S = Subspace(target, D)
        for m in src:
            S.add(hm({m: tens.base.one}))
        if S.dim != len(src) or S.dim != len(target.basis_ideg(D)):
            return failed(name, f"degree {Fraction(D, target.L)}: map is not bijective "
                                f"({len(src)} -> {len(target.basis_ideg(D))}, rank {S.dim})")
    return passed(name, bound=bound)


# ------------------------------------------------------------- round trip


def roundtrip_r(X: PointedHopf, bound=None) -> PointedHopf:
    """Re-extract a pointed module from Env_X at the free one-variable pair."""
    p = X.p
    R = X.base
    bound = X.algebra.bound if bound is None else bound
    if X.flavor == "Ga":
        B = Presentation(R, [("x", 1)], [], bound)
    else:
        B = Presentation(R, [(f"x_r{p ** X.scale}", Fraction(1, p**X.scale))], [], bound)
    e = _unwind(X, B, [variable_power(B, 0, 1)], bound, check=False)
    P = e.pres
    T = tensor_square(P)
    H = X.algebra
    HT = X.tensor
    two = HomCache([T.embed(0, g) for g in e.subst[0].images] + [T.embed(1, g) for g in e.subst[0].images], T)
    comul = [None] * P.ngens
    for i, j in e.copies[0].items():
        comul[j] = two(X.comul[i]) if X.comul[i] is not None else None
    for i in range(B.ngens):
        g = P.gen(e.b_offset + i)
        comul[e.b_offset + i] = T.add(T.embed(0, g), T.embed(1, g))
    s = P.gen(e.b_offset)
    points = [P.pow(s, p ** (X.scale - m)) for m in range(X.scale + 1)]
    del H, HT
    return PointedHopf(P, comul, points, X.flavor, X.scale, name=f"r(Env_{X.name})")


def check_roundtrip(X: PointedHopf, bound=None) -> Report:
    name = f"round trip of {X.name}"
    Y = roundtrip_r(X, bound)
    rep = check_hopf(Y)
    if not rep:
        return failed(name, rep.witness)
    Xb = X if bound is None else _rebound(X, bound)
    iso = find_iso(Y, to_sc(Xb))
    if iso is None:
        return failed(name, "no isomorphism with the original object")
    return passed(name)


def _rebound(X, bound):
    from .hopf import rebound

    return rebound(X, bound)


__all__ = ["EnvelopeAlgebra", "env", "env_perf", "tensor_module", "hodge_fil", "hodge_gr0", "check_gr0",
           "hodge_generators", "check_coproduct", "syzygy_residuals", "roundtrip_r", "check_roundtrip",
           "perfect_presentation", "variable_power"]

"""Tilts of truncated semiperfect rings, W_A base change, and dR of QRSP quotients.

A truncated perfect ring is F_p[x_i^{1/p^k}] with x_i^N = 0; a QRSP instance
is such a ring together with a subset of its variables generating the ideal.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AlgebraRing, HomCache, Presentation, Subspace, quotient_dims
from .divided_powers import PDAlgebra, merged_monomial_relations, pd_envelope, pd_filtration
from .hopf import UnsupportedError, build_wk_f, u_star
from .report import Report, failed, passed
from .rings import DualNumbers, ZMod
from .unwind import env_perf, hodge_fil, perfect_presentation, variable_power
from .witt import witt_from_int, witt_teichmuller


@dataclass
class TruncatedPerfect:
    p: int
    variables: tuple = ("x",)
    k: int = 1
    N: int = 4
    base: object = None
    pres: Presentation = field(init=False, repr=False)

    def __post_init__(self):
        self.variables = tuple(self.variables)
        self.base = self.base or ZMod(self.p)
        self.pres = perfect_presentation(self.p, self.variables, self.k, self.N, self.base)

    def var(self, name):
        """The degree-1 element x_i."""
        i = self.variables.index(name)
        return variable_power(self.pres, i, 1)


@dataclass
class QRSPInstance:
    """S = perfect / (listed variables), modeled below the truncation."""

    perfect: TruncatedPerfect
    ideal: tuple = ()

    def __post_init__(self):
        self.ideal = tuple(self.ideal)
        for v in self.ideal:
            if v not in self.perfect.variables:
                raise ValueError(f"ideal generator {v} is not a variable")

    @property
    def p(self):
        return self.perfect.p

    def ideal_polys(self):
        return [self.perfect.var(v) for v in self.ideal]

    def quotient(self) -> Presentation:
        B = self.perfect.pres
        extra = {self.perfect.variables.index(v): self.perfect.p**self.perfect.k for v in self.ideal}
        rels = merged_monomial_relations(B, extra)
        return Presentation(B.base, list(zip(B.names, B.degrees)), rels, B.bound, name="S")


def qrsp(p, variables=("x",), ideal=None, k=1, N=4) -> QRSPInstance:
    ideal = tuple(variables) if ideal is None else tuple(ideal)
    return QRSPInstance(TruncatedPerfect(p, variables, k, N), ideal)


def tilt(q: QRSPInstance, k=None, N=None):
    """The I-adic completion of the perfect ring, truncated at (root level k, x_i^N).

    Returns ``(TruncatedPerfect, ideal variables)``; for the zero ideal the
    perfect ring itself.
    """
    T = q.perfect
    if not q.ideal:
        return T, ()
    k = T.k if k is None else k
    N = T.N if N is None else N
    return TruncatedPerfect(T.p, T.variables, k, N, T.base), q.ideal


def _is_p_power(n, p):
    L = 0
    while n > 1 and n % p == 0:
        n //= p
        L += 1
    return (L if n == 1 else None)


def verify_tilt(q: QRSPInstance, k: int, N: int, samples: int = 20, seed: int = 0):
    """Compare tilt(q) with lim(S <- S <- ...) along Frobenius, truncated.

    Component j of b in B = F_p[x^{1/p^k}]/(x^N) is b^{1/p^j} mod I, read in
    S_K = F_p[x^{1/p^K}]/(x), K = k + L, p^L = N.
    """
    name = f"tilt at (k, N) = ({k}, {N})"
    p = q.p
    L = _is_p_power(N, p)
    if L is None:
        raise UnsupportedError(f"truncation N = {N} must be a power of p")
    Tq, ideal = tilt(q, k, N)
    B = Tq.pres
    K = k + L
    r = len(Tq.variables)
    if set(ideal) != set(Tq.variables):
        raise UnsupportedError("the tilt oracle needs every variable in the ideal")
    gens = [(f"s{i}", Fraction(1, p**K)) for i in range(r)]
    rels = []
    for i in range(r):
        m = [0] * r
        m[i] = p**K
        rels.append({tuple(m): Tq.base.one})
    S = Presentation(Tq.base, gens, rels, r, name="S_K")
    comps = []
    for j in range(L + 1):
        imgs = []
        for i in range(r):
            m = [0] * r
            m[i] = p ** (L - j)
            imgs.append({tuple(m): Tq.base.one})
        comps.append(HomCache(imgs, S))
    rng = random.Random(seed)
    Rb = AlgebraRing(B)
    top_ok = all(B.nf(rel.poly) == {} for rel in B.relations)
    if not top_ok:
        return failed(name, "truncated perfect ring is inconsistent")
    for _ in range(samples):
        b = Rb.random(rng)
        seq = [comps[L](b)]
        for j in range(L - 1, -1, -1):
            seq.append(S.pow(seq[-1], p))
        seq.reverse()
        for j in range(L + 1):
            if not S.equal(seq[j], comps[j](b)):
                return failed(name, f"component {j} of {B.fmt(b)} is not the {p}^{L - j}-th power of the last")
        c = Rb.random(rng)
        if not S.equal(comps[L](B.mul(b, c)), S.mul(comps[L](b), comps[L](c))):
            return failed(name, "last component is not multiplicative")
    # the last component is injective and the truncated limit has |S_K| points
    dimB = len(B.all_basis())
    imgs = Subspace_all(S, [comps[L]({m: Tq.base.one}) for m in B.all_basis()])
    if imgs != dimB:
        return failed(name, f"B -> lim has rank {imgs}, dim B = {dimB}")
    dimS = p ** (K * r)
    if dimB != dimS:
        return failed(name, f"dim B = {dimB} but the truncated limit has dimension {dimS}")
    # kernel of component 0 is the ideal generated by the killed variables
    ker = 0
    for D in range(B.ibound):
        basis = B.basis_ideg(D)
        rank = Subspace_all(S, [comps[0]({m: Tq.base.one}) for m in basis])
        ker += len(basis) - rank
    idl = [Tq.var(v) for v in ideal]
    idim = sum(len(B.basis_ideg(D)) for D in range(B.ibound)) - sum(quotient_dims(B, idl).values())
    if ker != idim:
        return failed(name, f"kernel of B -> S has dimension {ker}, ideal has {idim}")
    return passed(name, k=k, N=N, dim=dimB)


def Subspace_all(P: Presentation, polys) -> int:
    """Rank of a list of (possibly inhomogeneous) polynomials."""
    from .linalg import rank

    idx = {}
    rows = []
    for f in polys:
        row = {}
        for m, c in P.nf(f).items():
            row[idx.setdefault(m, len(idx))] = c
        rows.append(row)
    return rank(rows, P.base.p)


# ----------------------------------------------------------- finite rings


class FiniteRing:
    """A finite commutative ring by explicit tables over hashable labels."""

    def __init__(self, elements, add, mul, zero, one, p, name=""):
        self.elements_ = list(elements)
        self.add_t = add
        self.mul_t = mul
        self.zero = zero
        self.one = one
        self.p = p
        self.name = name

    def elements(self):
        return list(self.elements_)

    def add(self, a, b):
        return self.add_t[a, b]

    def mul(self, a, b):
        return self.mul_t[a, b]

    def __len__(self):
        return len(self.elements_)

    def __repr__(self):
        return self.name or f"FiniteRing({len(self)})"

    @classmethod
    def from_ring(cls, ring, p=None):
        els = ring.elements()
        key = _key
        labels = [key(e) for e in els]
        back = dict(zip(labels, els))
        add = {}
        mul = {}
        for a in labels:
            for b in labels:
                add[a, b] = key(ring.add(back[a], back[b]))
                mul[a, b] = key(ring.mul(back[a], back[b]))
        p = p or ring.p
        return cls(labels, add, mul, key(ring.zero), key(ring.one), p, name=repr(ring))


def _key(e):
    if isinstance(e, dict):
        return tuple(sorted(e.items()))
    return e


def algebra_elements(P: Presentation):
    """All elements of a finite presentation (prime-field coefficients)."""
    import itertools

    basis = P.all_basis()
    R = P.base
    for cs in itertools.product(R.elements(), repeat=len(basis)):
        yield {m: c for m, c in zip(basis, cs) if not R.is_zero(c)}


def as_finite_ring(ring, limit=10**4) -> FiniteRing:
    if isinstance(ring, FiniteRing):
        return ring
    if isinstance(ring, Presentation):
        size = len(ring.base.elements()) ** len(ring.all_basis())
        if size > limit:
            raise UnsupportedError(f"ring has {size} elements, more than {limit}")
        A = AlgebraRing(ring)
        A.elements = lambda: list(algebra_elements(ring))
        return FiniteRing.from_ring(A, ring.base.p)
    if len(ring.elements()) > limit:
        raise UnsupportedError("ring is too large to enumerate")
    return FiniteRing.from_ring(ring)


def tilt_finite(ring, p=None) -> FiniteRing:
    """lim along x -> x^p of a finite ring, by enumeration.

    Compatible sequences are determined by their first entry, which ranges
    over the stable image of Frobenius.  Addition is
    a (+) b = lim_n (a^{1/p^n} + b^{1/p^n})^{p^n}.
    """
    R = as_finite_ring(ring)
    p = p or R.p
    els = R.elements()

    def frob(a):
        r = R.one
        for _ in range(p):
            r = R.mul(r, a)
        return r

    image = set(els)
    for _ in range(len(els) + 1):
        nxt = {frob(a) for a in image}
        if nxt == image:
            break
        image = nxt
    stable = sorted(image, key=lambda e: els.index(e))
    root = {}
    for a in stable:
        root[frob(a)] = a
    if len(root) != len(stable):
        raise AssertionError("Frobenius is not bijective on its stable image")
    steps = len(els) + 1

    def tadd(a, b):
        ra, rb = a, b
        for _ in range(steps):
            ra, rb = root[ra], root[rb]
        s = R.add(ra, rb)
        for _ in range(steps):
            s = frob(s)
        return s

    add = {(a, b): tadd(a, b) for a in stable for b in stable}
    mul = {(a, b): R.mul(a, b) for a in stable for b in stable}
    one = R.one if R.one in image else None
    return FiniteRing(stable, add, mul, tadd(R.zero, R.zero) if R.zero in image else stable[0],
                      one, p, name=f"tilt({R.name})")


def is_prime_field(R: FiniteRing) -> bool:
    """True iff R is isomorphic to F_p (via the unique map 1 -> 1)."""
    if len(R) != R.p or R.one is None:
        return False
    k = R.zero
    seen = []
    for _ in range(R.p):
        seen.append(k)
        k = R.add(k, R.one)
    if k != R.zero or len(set(seen)) != R.p:
        return False
    idx = {e: i for i, e in enumerate(seen)}
    return all(idx[R.mul(a, b)] == (idx[a] * idx[b]) % R.p and idx[R.add(a, b)] == (idx[a] + idx[b]) % R.p
               for a in seen for b in seen)


def same_tables(A: FiniteRing, B: FiniteRing) -> bool:
    return (set(A.elements()) == set(B.elements()) and A.add_t == B.add_t and A.mul_t == B.mul_t)


# ------------------------------------------------------------ W_A base change


def w_A(B: Presentation, A) -> Presentation:
    """W_A(B) = A (x)_{Z_p} W(B) for a perfect presentation B over F_p.

    The generators become Teichmueller lifts [s_i]; for perfect B the
    monomial relations lift unchanged.
    """
    if not (isinstance(B.base, ZMod) and B.base.n == 1):
        raise UnsupportedError("w_A expects a ring over F_p")
    p = B.base.p
    for rel in B.relations:
        if len(rel.poly) != 1:
            raise UnsupportedError("w_A needs monomial relations (a truncated perfect ring)")
    if isinstance(A, ZMod) and A.p == p:
        if A.n == 1:
            return B
        return B.change_base(A, A.from_int)
    if isinstance(A, DualNumbers) and A.p == p:
        return B.change_base(A, lambda c: (c, 0))
    raise UnsupportedError(f"W_A is not implemented for A = {A}")


def teichmuller_map(B: Presentation, n: int):
    """theta: W_{Z/p^n}(B) -> W_n(B), sum c_e s^e -> sum c_e [s^e]."""
    p = B.base.p
    R = AlgebraRing(B)
    A = ZMod(p, n)
    WA = w_A(B, A)
    ints = {}

    def lift(c):
        if c not in ints:
            ints[c] = witt_from_int(c, p, n, R)
        return ints[c]

    def theta(f):
        acc = witt_from_int(0, p, n, R)
        for m, c in WA.nf(f).items():
            acc = acc + lift(c) * witt_teichmuller({m: B.base.one}, n, p, R)
        return acc

    return WA, theta


def check_w_A(B: Presentation, n: int, samples: int = 30, seed: int = 0):
    """theta is a ring map, injective where the truncation cannot interfere.

    For a truncated perfect B, theta(p^i s^e) = V^i [s^{e p^i}], so theta is
    injective on monomials of degree d with d p^{n-1} below the bound and
    bijective when B has no generators.
    """
    name = f"W_(Z/{B.base.p}^{n})({B.name or 'B'}) = W_{n}(B)"
    p = B.base.p
    WA, theta = teichmuller_map(B, n)
    rng = random.Random(seed)
    RA = AlgebraRing(WA)
    for _ in range(samples):
        a, b = RA.random(rng), RA.random(rng)
        if theta(WA.mul(a, b)) != theta(a) * theta(b):
            return failed(name, f"theta is not multiplicative on {WA.fmt(a)}, {WA.fmt(b)}")
        if theta(WA.add(a, b)) != theta(a) + theta(b):
            return failed(name, "theta is not additive")
    low = [m for m in WA.all_basis() if WA.mono_degree(m) * p ** (n - 1) < WA.bound]
    if (p**n) ** len(low) <= 4096:
        import itertools

        seen = set()
        for cs in itertools.product(range(p**n), repeat=len(low)):
            w = theta({m: c for m, c in zip(low, cs) if c})
            seen.add(tuple(_key(e) for e in w.entries))
        if len(seen) != (p**n) ** len(low):
            return failed(name, f"theta is not injective below the bound ({len(seen)} images)")
    if not B.ngens:
        w_size = len(list(algebra_elements(B))) ** n
        if (p**n) ** len(WA.all_basis()) != w_size:
            return failed(name, "sizes differ")
    return passed(name)


# ----------------------------------------------------------------- dR


def dr(q: QRSPInstance, bound=None) -> PDAlgebra:
    """dR(S) = D_{S^flat}(I), with the PD filtration as Hodge filtration."""
    T, ideal = tilt(q)
    B = T.pres if bound is None else T.pres.with_bound(bound)
    polys = [variable_power(B, T.variables.index(v), 1) for v in ideal]
    return pd_envelope(B, polys)


def u_star_wf(p, k, bound):
    """u*W_K[F] at scale k with p^K >= bound, so no bracket is truncated away."""
    K = 1
    while p**K < bound:
        K += 1
    return u_star(build_wk_f(p, K, bound=bound), k)


def pd_to_env_map(D: PDAlgebra, E, ideal_vars, variables):
    """D -> Env sending B to B and the bracket generator x_{p^i} to the copy of t_i."""
    P = D.pres
    tgt = E.pres
    H = E.X.algebra
    imgs = []
    for nm in P.names:
        if nm in E.B.index:
            imgs.append(E.from_b(E.B.gen(E.B.index[nm])))
            continue
        var, w = nm.rsplit("_pd", 1)
        i = _is_p_power(int(w), E.X.p)
        root = var
        j = [E.B.names[variables.index(v)] for v in ideal_vars].index(root)
        m = [0] * tgt.ngens
        m[E.copies[j][H.index[f"t{i}"]]] = 1
        imgs.append({tuple(m): tgt.base.one})
    return HomCache(imgs, tgt)


def compare_filtered(D: PDAlgebra, E, phi, levels) -> tuple[bool, str | None]:
    """phi is a degreewise isomorphism carrying PD Fil^n onto Hodge Fil^n."""
    P, T = D.pres, E.pres
    for i, img in enumerate(phi.images):
        if img and T.homogeneous_ideg(img) != P.ideg[i]:
            return False, f"image of {P.names[i]} is not homogeneous of degree {P.degrees[i]}"
    for rel in P.relations:
        if T.nf(phi(rel.poly)):
            return False, f"relation {P.fmt(rel.poly)} is not sent to 0"
    if P.L != T.L:
        return False, "incompatible degree scales"
    for Dg in range(min(P.ibound, T.ibound)):
        S = Subspace(T, Dg)
        for m in P.basis_ideg(Dg):
            S.add(phi({m: P.base.one}))
        if S.dim != len(P.basis_ideg(Dg)) or S.dim != len(T.basis_ideg(Dg)):
            return False, f"degree {Fraction(Dg, P.L)}: not bijective"
    if P.ibound != T.ibound:
        return False, f"bounds differ: {P.bound} vs {T.bound}"
    for n in levels:
        pf = pd_filtration(D, n)
        hf = hodge_fil(E, n)
        for Dg in set(pf) | set(hf):
            a = pf[Dg].dim if Dg in pf else 0
            b = hf[Dg].dim if Dg in hf else 0
            if a != b:
                return False, f"Fil^{n} in degree {Fraction(Dg, P.L)}: PD {a}, Hodge {b}"
            if a:
                for v in pf[Dg].spanning_polys():
                    if not hf[Dg].contains(phi(v)):
                        return False, f"Fil^{n}: image of {P.fmt(v)} is not in the Hodge filtration"
    return True, None


def check_nw2(q: QRSPInstance, bound=None, levels=None) -> Report:
    """dR(S) against Env_{u*W[F]}(S^flat, I) as filtered algebras."""
    T, ideal = tilt(q)
    bound = T.pres.bound if bound is None else Fraction(bound)
    name = f"dR = Env_u*W[F] for {'/'.join(ideal) or 'zero ideal'} (k={T.k}, N={T.N}, bound {bound})"
    D = dr(q, bound)
    B = T.pres.with_bound(bound)
    X = u_star_wf(q.p, T.k, bound)
    E = env_perf(X, B, [variable_power(B, T.variables.index(v), 1) for v in ideal], bound)
    phi = pd_to_env_map(D, E, ideal, T.variables)
    levels = range(int(bound) + 1) if levels is None else levels
    ok, why = compare_filtered(D, E, phi, levels)
    return passed(name) if ok else failed(name, why)


def check_dr_gr0(q: QRSPInstance, bound=None):
    """gr^0 of the PD filtration on dR(S) is S."""
    D = dr(q, bound)
    S = q.quotient().with_bound(D.pres.bound)
    want = S.hilbert()
    fil = pd_filtration(D, 1)
    got = {}
    for Dg in range(D.pres.ibound):
        v = len(D.pres.basis_ideg(Dg)) - (fil[Dg].dim if Dg in fil else 0)
        if v:
            got[Fraction(Dg, D.pres.L)] = v
    name = "gr0 of dR(S) is S"
    return passed(name) if got == want else failed(name, f"gr0 dims {got} != {want}")


__all__ = ["TruncatedPerfect", "QRSPInstance", "qrsp", "tilt", "verify_tilt", "FiniteRing", "tilt_finite",
           "is_prime_field", "same_tables", "w_A", "teichmuller_map", "check_w_A", "dr", "check_nw2",
           "check_dr_gr0", "u_star_wf", "as_finite_ring"]

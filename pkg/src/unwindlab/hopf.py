"""Pointed graded Hopf algebras, quasi-ideals, Cartier duality and builders.

A :class:`PointedHopf` is a presentation ``H`` with a comultiplication given
on generators (elements of ``H (x) H``), a counit, and a point family
``P_0, ..., P_k``: ``P_0`` is the image of ``x`` (degree 1) and, for the
perfect flavor, ``P_m`` is the image of ``x^{1/p^m}``.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import linalg
from .algebra import HomCache, Presentation, PresentationError, TensorPresentation, apply_hom
from .report import Report, failed, passed
from .rings import ZMod
from .witt import structure_polys


class UnsupportedError(ValueError):
    pass


def tensor_square(P: Presentation) -> TensorPresentation:
    T = getattr(P, "_tensor2", None)
    if T is None:
        T = TensorPresentation([P, P], [[f"{n}_1" for n in P.names], [f"{n}_2" for n in P.names]])
        P._tensor2 = T
    return T


def tensor_cube(P: Presentation) -> TensorPresentation:
    T = getattr(P, "_tensor3", None)
    if T is None:
        T = TensorPresentation([P, P, P], [[f"{n}_{j}" for n in P.names] for j in (1, 2, 3)])
        P._tensor3 = T
    return T


def root_name(var: str, p: int, m: int) -> str:
    return f"{var}_r{p ** m}"


class PointedHopf:
    def __init__(self, algebra: Presentation, comul, points, flavor: str = "Ga", scale: int = 0,
                 counit=None, name: str = ""):
        if flavor not in ("Ga", "GaPerf"):
            raise ValueError(f"unknown flavor {flavor}")
        if flavor == "Ga" and scale:
            raise ValueError("the Ga flavor has scale 0")
        self.algebra = algebra
        self.comul = list(comul)
        if len(self.comul) != algebra.ngens:
            raise ValueError("one comultiplication per generator is required")
        self.points = list(points)
        if len(self.points) != scale + 1:
            raise ValueError(f"expected {scale + 1} point elements, got {len(self.points)}")
        self.flavor = flavor
        self.scale = scale
        self.counit = list(counit) if counit is not None else [algebra.base.zero] * algebra.ngens
        self.name = name

    @property
    def base(self):
        return self.algebra.base

    @property
    def p(self):
        return self.algebra.base.p

    @property
    def tensor(self) -> TensorPresentation:
        return tensor_square(self.algebra)

    @property
    def tensor3(self) -> TensorPresentation:
        return tensor_cube(self.algebra)

    def delta_map(self) -> HomCache:
        dm = getattr(self, "_delta", None)
        if dm is None:
            T = self.tensor
            imgs = [c if c is not None else None for c in self.comul]
            dm = HomCache(imgs, T)
            self._delta = dm
        return dm

    def delta(self, f):
        return self.delta_map()(f)

    def point(self, m: int = 0):
        return self.points[m]

    def top_point(self):
        return self.points[-1]

    def x_power(self, d: Fraction):
        """Image of ``x^d`` under the point (``d`` a multiple of 1/p^scale)."""
        a = d * self.p**self.scale
        if a.denominator != 1:
            raise PresentationError(f"degree {d} is finer than the point scale")
        return self.algebra.pow(self.top_point(), int(a))

    def __repr__(self):
        return f"PointedHopf({self.name or self.algebra!r}, {self.flavor}, scale {self.scale})"


# -------------------------------------------------------------- residuals


def _missing(h, f):
    """Generators with unknown comultiplication occurring in ``f``."""
    bad = [i for i, c in enumerate(h.comul) if c is None]
    return any(m[i] for m in f for i in bad)


def tensor_shift(f, src: TensorPresentation, dst: TensorPresentation, start: int):
    """Place the factors of a tensor element at factors ``start..`` of ``dst``."""
    out = {}
    n = dst.ngens
    for m, c in f.items():
        parts = src.split(m)
        mm = [0] * n
        for j, part in enumerate(parts):
            off = dst.offsets[start + j]
            mm[off:off + len(part)] = part
        out[tuple(mm)] = c
    return dst.nf(out)


def hopf_residuals(h: PointedHopf, points: bool = True, cocommutative: bool = True):
    """Yield ``(criterion, label, presentation, element)`` for every identity.

    Each element must vanish for ``h`` to satisfy the axioms below its bound.
    The same code runs over any coefficient ring, which is how the
    deformation solver linearizes the axioms.
    """
    H = h.algebra
    T = h.tensor
    R = H.base
    delta = h.delta_map()
    for i, c in enumerate(h.comul):
        if c is None:
            continue
        if any(T.mono_ideg(m) != H.ideg[i] for m, v in c.items() if not R.is_zero(v)):
            yield ("homogeneity", H.names[i], T, c)
    for k, rel in enumerate(H.relations):
        if rel.ideg >= H.ibound or _missing(h, rel.poly):
            continue
        yield ("relation", H.fmt(rel.poly), T, delta(rel.poly))
    T3 = h.tensor3
    left = [tensor_shift(c, T, T3, 0) if c is not None else None for c in h.comul]
    right = [tensor_shift(c, T, T3, 1) if c is not None else None for c in h.comul]
    g3 = [T3.embed(j, H.gen(i)) for j in range(3) for i in range(H.ngens)]
    n = H.ngens
    d_id = HomCache(left + g3[2 * n:3 * n], T3)
    id_d = HomCache(g3[0:n] + right, T3)
    e_id = HomCache([H.const(e) for e in h.counit] + [H.gen(i) for i in range(n)], H)
    id_e = HomCache([H.gen(i) for i in range(n)] + [H.const(e) for e in h.counit], H)
    for i, c in enumerate(h.comul):
        if c is None or _missing(h, c):
            continue
        name = H.names[i]
        yield ("coassociativity", name, T3, T3.sub(d_id(c), id_d(c)))
        yield ("counit", name, H, H.sub(e_id(c), H.gen(i)))
        yield ("counit", name, H, H.sub(id_e(c), H.gen(i)))
        if cocommutative:
            yield ("cocommutativity", name, T, T.sub(swap(c, T), c))
    if points:
        for m, P in enumerate(h.points):
            if _missing(h, P):
                continue
            want = Fraction(1, h.p**m)
            if any(H.mono_degree(mm) != want for mm, v in P.items() if not R.is_zero(v)):
                yield ("point degree", f"P_{m}", H, P)
                continue
            want_d = T.add(T.embed(0, P), T.embed(1, P))
            if h.flavor == "GaPerf" and not getattr(R, "char_p", False):
                # the point is a map to G_a^perf, whose roots are not primitive over Z/p^2
                if m == h.scale:
                    continue
                Q = h.points[m + 1]
                want_d = T.pow(T.add(T.embed(0, Q), T.embed(1, Q)), h.p)
            yield ("point primitivity", f"P_{m}", T, T.sub(delta(P), want_d))
        for m in range(h.scale):
            yield ("point powers", f"P_{m + 1}^p = P_{m}", H,
                   H.sub(H.pow(h.points[m + 1], h.p), h.points[m]))


def swap(f, T: TensorPresentation):
    out = {}
    for m, c in f.items():
        a, b = T.split(m)
        out[b + a] = c
    return out


def check_hopf(h: PointedHopf) -> Report:
    name = f"hopf axioms of {h.name or 'object'}"
    for crit, label, P, elt in hopf_residuals(h):
        if crit == "homogeneity":
            return failed(name, f"{crit} {label}: {P.fmt(elt)} does not have the generator degree")
        if P.nf(elt):
            return failed(name, f"{crit} {label}: {P.fmt(P.nf(elt))} != 0")
    if h.algebra.basis_ideg(0) != [(0,) * h.algebra.ngens]:
        return failed(name, "degree-0 piece is not spanned by 1")
    return passed(name)


def check_quasi_ideal(h: PointedHopf):
    """Return ``(ok, witness)``: b (x) t^deg b == t^deg b (x) b on a basis."""
    if not h.points or h.flavor == "Ga" and h.points[0] is None:
        raise ValueError("object has no point")
    H = h.algebra
    for D in range(1, H.ibound):
        d = Fraction(D, H.L)
        basis = H.basis_ideg(D)
        if not basis:
            continue
        try:
            t = h.x_power(d)
        except PresentationError:
            return False, f"degree {d} is not reachable by powers of the point"
        for b in basis:
            lhs = _pure({b: H.base.one}, t, H.base)
            rhs = _pure(t, {b: H.base.one}, H.base)
            if lhs != rhs:
                return False, f"{H.fmt_mono(b)} (x) t^{d} != t^{d} (x) {H.fmt_mono(b)}"
    return True, None


def _pure(a, b, R):
    """The pure tensor a (x) b as a monomial dict on concatenated exponents."""
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            c = R.mul(c1, c2)
            if not R.is_zero(c):
                out[m1 + m2] = c
    return out


def check_full(h: PointedHopf) -> bool:
    H = h.algebra
    if H.ibound <= H.L:
        raise ValueError("bound must exceed 1 to see the degree-1 piece")
    one = H.basis_ideg(H.L)
    if not one:
        return True
    if len(one) > 1:
        return False
    return bool(H.nf(h.points[0]))


# ------------------------------------------------------------------ builders


def _require_char_p(base, what):
    if not getattr(base, "char_p", False):
        raise UnsupportedError(f"{what} needs a base of characteristic p, got {base}")


def _eval_int_poly(f, images, target, base):
    return apply_hom(f, images, target, cmap=base.from_int)


def build_ga(p: int, base=None, bound=8) -> PointedHopf:
    base = base or ZMod(p)
    H = Presentation(base, [("x", 1)], [], bound, name="G_a")
    T = tensor_square(H)
    x = H.gen(0)
    return PointedHopf(H, [T.add(T.embed(0, x), T.embed(1, x))], [x], name="G_a")


def build_alpha_pk(p: int, k: int, base=None, point: str = "x", bound=None) -> PointedHopf:
    base = base or ZMod(p)
    _require_char_p(base, "alpha_{p^k}")
    bound = p**k + 1 if bound is None else bound
    H = Presentation(base, [("x", 1)], [f"x^{p ** k}"], bound, name=f"alpha_{p}^{k}")
    T = tensor_square(H)
    x = H.gen(0)
    P = x if point == "x" else {}
    return PointedHopf(H, [T.add(T.embed(0, x), T.embed(1, x))], [P], name=f"alpha_{{{p}^{k}}}")


def wk_f_presentation(p: int, k: int, base, bound=None, names=None) -> Presentation:
    names = names or [f"t{i}" for i in range(k)]
    bound = p**k if bound is None else bound
    gens = [(names[i], p**i) for i in range(k)]
    if getattr(base, "char_p", False):
        rels = [{tuple(p if j == i else 0 for j in range(k)): base.one} for i in range(k)]
    else:
        # kernel of the universal Frobenius, truncated below degree p^k
        rels = []
        if k >= 2:
            F = structure_polys(p, k, "F")
            for f in F:
                rels.append({m: base.from_int(c) for m, c in f.items() if not base.is_zero(base.from_int(c))})
    try:
        return Presentation(base, gens, rels, bound, name=f"W_{k}[F]")
    except PresentationError as exc:
        raise UnsupportedError(f"W_{k}[F] over {base}: {exc}") from None


def build_wk_f(p: int, k: int, base=None, bound=None) -> PointedHopf:
    base = base or ZMod(p)
    H = wk_f_presentation(p, k, base, bound)
    T = tensor_square(H)
    S = structure_polys(p, k, "S")
    imgs = [T.embed(0, H.gen(i)) for i in range(k)] + [T.embed(1, H.gen(i)) for i in range(k)]
    comul = [_eval_int_poly(S[i], imgs, T, base) for i in range(k)]
    return PointedHopf(H, comul, [H.gen(0)], name=f"W_{k}[F]")


def build_alpha_natural(p: int, k: int, base=None, bound=2, var: str = "x") -> PointedHopf:
    base = base or ZMod(p)
    _require_char_p(base, "alpha natural")
    if k < 1:
        raise ValueError("scale must be at least 1")
    gens = [(root_name(var, p, m), Fraction(1, p**m)) for m in range(k, 0, -1)]
    H = Presentation(base, gens, [], bound)
    rels = _root_relations(H, k, p, point_poly={})
    H = Presentation(base, gens, rels, bound, name="alpha_natural")
    T = tensor_square(H)
    comul = [T.add(T.embed(0, H.gen(i)), T.embed(1, H.gen(i))) for i in range(k)]
    points = [{}] + [H.gen(k - m) for m in range(1, k + 1)]
    return PointedHopf(H, comul, points, "GaPerf", k, name=f"alpha_natural(k={k})")


def _root_relations(H, k, p, point_poly):
    """g_m^p - g_{m-1} for the root generators at indices 0..k-1 (finest first)."""
    rels = []
    R = H.base
    for j in range(k):
        m = k - j  # generator j is x^{1/p^m}
        lead = [0] * H.ngens
        lead[j] = p
        rel = {tuple(lead): R.one}
        if m >= 2:
            nxt = [0] * H.ngens
            nxt[j + 1] = 1
            rel[tuple(nxt)] = R.neg(R.one)
        else:
            for mm, c in point_poly.items():
                rel[mm] = R.add(rel.get(mm, R.zero), R.neg(c))
        rels.append({a: b for a, b in rel.items() if not R.is_zero(b)})
    return rels


def build_ga_perf(p: int, k: int, base=None, bound=4, var: str = "x") -> PointedHopf:
    """Truncation of A[x^{1/p^infty}] at root level k.

    Over F_p all roots are primitive.  Over Z/p^2 the comultiplication of a
    root is the p-th power of that of the next finer root; the finest root
    has no closed form at this level and is left unspecified.
    """
    base = base or ZMod(p)
    if not getattr(base, "char_p", False) and not (isinstance(base, ZMod) and base.n == 2):
        raise UnsupportedError(f"G_a^perf over {base} is only implemented for F_p-algebras and Z/p^2")
    gens = [(root_name(var, p, m), Fraction(1, p**m)) for m in range(k, 0, -1)] + [(var, 1)]
    H0 = Presentation(base, gens, [], bound)
    x = [0] * (k + 1)
    x[k] = 1
    rels = _root_relations(H0, k, p, point_poly={tuple(x): base.one})
    H = Presentation(base, gens, rels, bound, name="G_a^perf")
    T = tensor_square(H)
    prim = [T.add(T.embed(0, H.gen(i)), T.embed(1, H.gen(i))) for i in range(k + 1)]
    if getattr(base, "char_p", False):
        comul = prim
    else:
        comul = [None] + [T.pow(prim[i - 1], p) for i in range(1, k + 1)]
    points = [H.gen(k)] + [H.gen(k - m) for m in range(1, k + 1)]
    return PointedHopf(H, comul, points, "GaPerf", k, name=f"G_a^perf(k={k})")


def build_cart_x(p: int, k: int, n: int, base=None) -> PointedHopf:
    base = base or ZMod(p)
    _require_char_p(base, "the duality example")
    gens = [("x0", 1)] + [(f"x{i}", p ** (k + i)) for i in range(1, n + 1)]
    rels = [f"x0^{p ** (k + 1)}"] + [f"x{i}^{p}" for i in range(1, n + 1)]
    H = Presentation(base, gens, rels, p ** (k + n + 1), name=f"X({p},{k},{n})")
    T = tensor_square(H)
    S = structure_polys(p, n + 1, "S")
    t = [H.pow(H.gen(0), p**k)] + [H.gen(i) for i in range(1, n + 1)]
    imgs = [T.embed(0, v) for v in t] + [T.embed(1, v) for v in t]
    comul = [T.add(T.embed(0, H.gen(0)), T.embed(1, H.gen(0)))]
    comul += [_eval_int_poly(S[i], imgs, T, base) for i in range(1, n + 1)]
    return PointedHopf(H, comul, [H.gen(0)], name=f"X({p},{k},{n})")


def build_cart_y(p: int, k: int, n: int, base=None) -> PointedHopf:
    base = base or ZMod(p)
    _require_char_p(base, "the duality example")
    gens = [(f"y{i}", p**i) for i in range(k + 1)]
    rels = [f"y{i}^{p}" for i in range(k)] + [f"y{k}^{p ** (n + 1)}"]
    H = Presentation(base, gens, rels, p ** (k + n + 1), name=f"Y({p},{k},{n})")
    T = tensor_square(H)
    S = structure_polys(p, k + 1, "S")
    imgs = [T.embed(0, H.gen(i)) for i in range(k + 1)] + [T.embed(1, H.gen(i)) for i in range(k + 1)]
    comul = [_eval_int_poly(S[i], imgs, T, base) for i in range(k + 1)]
    return PointedHopf(H, comul, [H.gen(0)], name=f"Y({p},{k},{n})")


def build_zero(p: int, base=None, bound=2) -> PointedHopf:
    """The zero module Spec A with the zero point."""
    base = base or ZMod(p)
    H = Presentation(base, [], [], bound, name="0")
    return PointedHopf(H, [], [{}], name="Spec A")


def u_star(h: PointedHopf, k: int, var: str = "x") -> PointedHopf:
    """Pullback along G_a^perf -> G_a: adjoin p-power roots of the point."""
    if h.flavor != "Ga":
        raise ValueError("u_star expects a pointed G_a-module")
    _require_char_p(h.base, "u_star")
    X = h.algebra
    base = X.base
    names = set(X.names)
    gens = []
    for m in range(k, 0, -1):
        nm = root_name(var, h.p, m)
        while nm in names:
            nm += "'"
        gens.append((nm, Fraction(1, h.p**m)))
    gens += list(zip(X.names, X.degrees))

    def shift(f):
        return {(0,) * k + m: c for m, c in f.items()}

    H0 = Presentation(base, gens, [], X.bound)
    rels = _root_relations(H0, k, h.p, point_poly=shift(h.points[0]))
    rels += [shift(r.poly) for r in X.relations]
    H = Presentation(base, gens, rels, X.bound, name=f"u*{h.name}")
    T = tensor_square(H)
    comul = [T.add(T.embed(0, H.gen(i)), T.embed(1, H.gen(i))) for i in range(k)]
    for c in h.comul:
        comul.append(_reembed_tensor(c, h.tensor, T, k))
    points = [H.nf(shift(h.points[0]))] + [H.gen(k - m) for m in range(1, k + 1)]
    return PointedHopf(H, comul, points, "GaPerf", k, name=f"u*{h.name}")


def _reembed_tensor(f, src: TensorPresentation, dst: TensorPresentation, pad: int):
    out = {}
    for m, c in f.items():
        a, b = src.split(m)
        out[(0,) * pad + a + (0,) * pad + b] = c
    return dst.nf(out)


def integral_part(h: PointedHopf) -> dict:
    """Graded dimensions of the integral-degree part, by integer degree."""
    H = h.algebra
    return {D // H.L: len(H.basis_ideg(D)) for D in range(0, H.ibound, H.L) if H.basis_ideg(D)}


# ------------------------------------------------------------ duality


class SCHopf:
    """Graded Hopf algebra by structure constants on per-degree bases."""

    def __init__(self, p, labels, degs, L, ibound, mult, comul, unit, points, name=""):
        self.p = p
        self.labels = labels
        self.degs = degs  # integer degree (scale L) per basis index
        self.L = L
        self.ibound = ibound
        self.mult = mult  # (i, j) -> {k: c}
        self.comul = comul  # k -> {(i, j): c}
        self.unit = unit
        self.points = points  # list of {index: c}
        self.name = name
        self.by_deg: dict = {}
        for i, d in enumerate(degs):
            self.by_deg.setdefault(d, []).append(i)

    def dims(self):
        return {Fraction(d, self.L): len(v) for d, v in sorted(self.by_deg.items())}

    def vmul(self, u, v):
        p = self.p
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mult.get((i, j), {}).items():
                    w = (out.get(k, 0) + a * b * c) % p
                    if w:
                        out[k] = w
                    else:
                        out.pop(k, None)
        return out

    def vpow(self, u, e):
        r = {self.unit: 1}
        b = u
        while e:
            if e & 1:
                r = self.vmul(r, b)
            e >>= 1
            if e:
                b = self.vmul(b, b)
        return r

    def vcomul(self, u):
        p = self.p
        out = {}
        for k, a in u.items():
            for ij, c in self.comul.get(k, {}).items():
                w = (out.get(ij, 0) + a * c) % p
                if w:
                    out[ij] = w
                else:
                    out.pop(ij, None)
        return out

    def tables(self):
        """Label-keyed structure constants for exact comparison."""
        lab = self.labels
        mult = {(lab[i], lab[j]): {lab[k]: c for k, c in v.items()} for (i, j), v in self.mult.items() if v}
        com = {lab[k]: {(lab[i], lab[j]): c for (i, j), c in v.items()} for k, v in self.comul.items() if v}
        return mult, com


def to_sc(h: PointedHopf) -> SCHopf:
    H = h.algebra
    if not (isinstance(H.base, ZMod) and H.base.n == 1):
        raise UnsupportedError("structure constants need a prime-field base")
    p = H.base.p
    basis = H.all_basis()
    idx = {m: i for i, m in enumerate(basis)}
    degs = [H.mono_ideg(m) for m in basis]
    mult = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            if degs[i] + degs[j] >= H.ibound:
                continue
            prod = H.mul({a: 1}, {b: 1})
            if prod:
                mult[(i, j)] = {idx[m]: c for m, c in prod.items()}
    T = h.tensor
    delta = h.delta_map()
    comul = {}
    for k, b in enumerate(basis):
        d = delta({b: 1})
        comul[k] = {(idx[x], idx[y]): c for m, c in d.items() for x, y in [T.split(m)]}
    points = [{idx[m]: c for m, c in H.nf(P).items()} for P in h.points]
    return SCHopf(p, [H.fmt_mono(m) for m in basis], degs, H.L, H.ibound, mult, comul,
                  idx[(0,) * H.ngens], points, name=h.name)


def dual_sc(sc: SCHopf) -> SCHopf:
    if sc.L != 1:
        raise UnsupportedError("Cartier duality is only implemented for integral gradings")
    p = sc.p
    mult = {}
    for k, v in sc.comul.items():
        for (i, j), c in v.items():
            mult.setdefault((i, j), {})[k] = c
    comul = {k: {} for k in range(len(sc.labels))}
    for (i, j), v in sc.mult.items():
        for k, c in v.items():
            comul[k][(i, j)] = c
    deg1 = sc.by_deg.get(sc.L, [])
    if len(deg1) != 1:
        raise UnsupportedError("the degree-1 piece must have rank 1")
    e = deg1[0]
    c = sc.points[0].get(e, 0)
    if c == 0:
        raise UnsupportedError("the point must be a basis of the degree-1 piece")
    point = {e: pow(c, -1, p)}
    return SCHopf(p, [("*", l) for l in sc.labels], list(sc.degs), sc.L, sc.ibound, mult, comul,
                  sc.unit, [point], name=f"dual({sc.name})")


def cartier_dual(h, bound=None) -> SCHopf:
    """Cartier dual of a pointed G_a-module of free finite type over F_p."""
    if isinstance(h, SCHopf):
        return dual_sc(h)
    if h.flavor != "Ga":
        raise UnsupportedError("duality is not available for fractional gradings")
    if bound is not None:
        h = rebound(h, bound)
    return dual_sc(to_sc(h))


def rebound(h: PointedHopf, bound) -> PointedHopf:
    """The same object truncated at a different degree bound."""
    H = h.algebra.with_bound(bound)
    T = tensor_square(H)
    comul = [T.nf(c) if c is not None else None for c in h.comul]
    return PointedHopf(H, comul, [H.nf(P) for P in h.points], h.flavor, h.scale, h.counit, h.name)


def strip_double_dual(sc: SCHopf):
    """Labels of a double dual with the ('*', ('*', l)) wrapping removed."""
    def unwrap(l):
        if isinstance(l, tuple) and l[0] == "*" and isinstance(l[1], tuple) and l[1][0] == "*":
            return l[1][1]
        raise ValueError(f"label {l!r} is not a double-dual label")
    return [unwrap(l) for l in sc.labels]


def double_dual_equal(sc: SCHopf) -> bool:
    dd = dual_sc(dual_sc(sc))
    labels = strip_double_dual(dd)
    if labels != sc.labels or dd.degs != sc.degs:
        return False
    a_m, a_c = sc.tables()
    relabel = SCHopf(dd.p, labels, dd.degs, dd.L, dd.ibound, dd.mult, dd.comul, dd.unit, dd.points)
    b_m, b_c = relabel.tables()
    return a_m == b_m and a_c == b_c and dd.points == sc.points


# ----------------------------------------------------------- iso search


class NonLinearError(UnsupportedError):
    pass


def _sc_eval_mono(sc, images, m):
    acc = {sc.unit: 1}
    for i, e in enumerate(m):
        if e:
            acc = sc.vmul(acc, sc.vpow(images[i], e))
            if not acc:
                return {}
    return acc


def _sc_eval(sc, images, f):
    p = sc.p
    out = {}
    for m, c in f.items():
        for k, v in _sc_eval_mono(sc, images, m).items():
            w = (out.get(k, 0) + c * v) % p
            if w:
                out[k] = w
            else:
                out.pop(k, None)
    return out


def _sc_tensor_eval(sc, images, f, T):
    p = sc.p
    out = {}
    for m, c in f.items():
        a, b = T.split(m)
        u = _sc_eval_mono(sc, images, a)
        v = _sc_eval_mono(sc, images, b)
        for i, x in u.items():
            for j, y in v.items():
                w = (out.get((i, j), 0) + c * x * y) % p
                if w:
                    out[(i, j)] = w
                else:
                    out.pop((i, j), None)
    return out


def find_iso(h: PointedHopf, target: SCHopf, max_branch: int = 64, seed: int = 0):
    """Search a pointed graded Hopf isomorphism ``h -> target``.

    Generators are processed in increasing degree.  For a fixed choice of
    the lower generators every constraint on a degree group is affine over
    F_p (Frobenius is additive), which is verified on random points before
    the system is solved.  Returns ``{generator name: target vector}`` or None.
    """
    H = h.algebra
    if target.L % H.L:
        return None
    scale = target.L // H.L
    p = target.p
    rng = random.Random(seed)
    T = h.tensor
    ib = min(H.ibound * scale, target.ibound)
    groups = {}
    for i, d in enumerate(H.ideg):
        groups.setdefault(d * scale, []).append(i)
    order = sorted(groups)
    rel_group = {}
    for rel in H.relations:
        if rel.ideg * scale >= ib:
            continue
        gi = max((i for m in rel.poly for i, e in enumerate(m) if e), key=lambda i: H.ideg[i])
        rel_group.setdefault(H.ideg[gi] * scale, []).append(rel)
    point_group = {}
    for m, P in enumerate(h.points):
        if m >= len(target.points):
            break
        if P:
            gi = max((i for mm in P for i, e in enumerate(mm) if e), key=lambda i: H.ideg[i])
            point_group.setdefault(H.ideg[gi] * scale, []).append(m)
        elif target.points[m]:
            return None

    def residual(images, D):
        out = []
        for rel in rel_group.get(D, []):
            out.append(_sc_eval(target, images, rel.poly))
        for g in groups[D]:
            c = h.comul[g]
            lhs = target.vcomul(images[g])
            rhs = _sc_tensor_eval(target, images, c, T)
            diff = dict(lhs)
            for k, v in rhs.items():
                w = (diff.get(k, 0) - v) % p
                if w:
                    diff[k] = w
                else:
                    diff.pop(k, None)
            out.append(diff)
        for m in point_group.get(D, []):
            got = _sc_eval(target, images, h.points[m])
            want = target.points[m]
            out.append({k: (got.get(k, 0) - want.get(k, 0)) % p for k in set(got) | set(want)
                        if (got.get(k, 0) - want.get(k, 0)) % p})
        return out

    def flat(res):
        return {(r, k): v for r, d in enumerate(res) for k, v in d.items()}

    def assign(images, gens, cols, vec):
        for g in gens:
            images[g] = {}
        for (g, k), v in zip(cols, vec):
            if v % p:
                images[g][k] = v % p

    def dfs(level, images):
        if level == len(order):
            return list(images) if _bijective(h, target, images, scale) else None
        D = order[level]
        if D >= ib:
            for g in groups[D]:
                images[g] = {}
            return dfs(level + 1, images)
        gens = groups[D]
        cols = [(g, k) for g in gens for k in target.by_deg.get(D, [])]
        n = len(cols)
        assign(images, gens, cols, [0] * n)
        f0 = flat(residual(images, D))
        columns = []
        for c in range(n):
            vec = [0] * n
            vec[c] = 1
            assign(images, gens, cols, vec)
            fc = flat(residual(images, D))
            columns.append({k: (fc.get(k, 0) - f0.get(k, 0)) % p for k in set(fc) | set(f0)})
        for _ in range(3):
            vec = [rng.randrange(p) for _ in range(n)]
            assign(images, gens, cols, vec)
            got = flat(residual(images, D))
            pred = dict(f0)
            for c, a in enumerate(vec):
                for k, v in columns[c].items():
                    pred[k] = (pred.get(k, 0) + a * v) % p
            keys = set(got) | set(pred)
            if any((got.get(k, 0) - pred.get(k, 0)) % p for k in keys):
                raise NonLinearError(f"constraints in degree {Fraction(D, target.L)} are not affine")
        keys = sorted(set(f0) | {k for col in columns for k in col}, key=repr)
        eqs = []
        for key in keys:
            row = {c: columns[c].get(key, 0) for c in range(n) if columns[c].get(key, 0) % p}
            eqs.append((row, (-f0.get(key, 0)) % p))
        try:
            part, kernel = linalg.solve_affine(eqs, range(n), p)
        except linalg.Inconsistent:
            return None
        base_vec = [part.get(c, 0) for c in range(n)]
        if p ** len(kernel) <= max_branch:
            combos = itertools.product(range(p), repeat=len(kernel))
        else:
            combos = [tuple(0 for _ in kernel)] + [tuple(rng.randrange(p) for _ in kernel)
                                                   for _ in range(max_branch)]
        for coeffs in combos:
            vec = list(base_vec)
            for a, kv in zip(coeffs, kernel):
                for c, v in kv.items():
                    vec[c] = (vec[c] + a * v) % p
            assign(images, gens, cols, vec)
            r = dfs(level + 1, images)
            if r is not None:
                return r
        return None

    images = [None] * H.ngens
    found = dfs(0, images)
    if found is None:
        return None
    return {H.names[g]: images[g] for g in range(H.ngens)}


def _bijective(h, target, images, scale):
    H = h.algebra
    p = target.p
    degs = set(D * scale for D in range(H.ibound) if H.basis_ideg(D)) | set(target.by_deg)
    for D in degs:
        if D >= min(H.ibound * scale, target.ibound):
            continue
        src = H.basis_ideg(D // scale) if D % scale == 0 else []
        tgt = target.by_deg.get(D, [])
        if len(src) != len(tgt):
            return False
        e = linalg.Echelon(p)
        for m in src:
            e.add(_sc_eval_mono(target, images, m))
        if len(e) != len(tgt):
            return False
    return True


def is_isomorphic(h: PointedHopf, target) -> bool:
    if isinstance(target, PointedHopf):
        target = to_sc(target)
    return find_iso(h, target) is not None

"""First-order deformations of pointed graded Hopf algebras over F_p[eps]/eps^2.

Unknowns are eps-perturbations of the relations, of the comultiplication on
generators and (in free-point mode) of the point family.  The Hopf axioms are
evaluated with coefficients in :class:`FirstOrder`, whose eps-part is linear
in the unknowns, so every axiom yields linear equations over F_p.  An
isomorphism ``g -> g + eps*psi(g)`` reducing to the identity acts by
coboundaries; the report gives cocycles modulo coboundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import HomCache, Presentation
from .hopf import PointedHopf, UnsupportedError, build_alpha_natural, check_hopf, hopf_residuals, tensor_square
from .linalg import Echelon, Inconsistent, solve_affine
from .report import Report, failed, passed
from .rings import DualNumbers, FirstOrder, ZMod, to_first_order


class ResourceError(RuntimeError):
    pass


@dataclass
class Perturbation:
    """eps-parts: ``c[relation index]`` in H, ``delta[generator]`` in H(x)H, ``pi[m]`` in H."""

    c: dict = field(default_factory=dict)
    delta: dict = field(default_factory=dict)
    pi: dict = field(default_factory=dict)

    def is_zero(self):
        return not any(self.c.values()) and not any(self.delta.values()) and not any(self.pi.values())


@dataclass
class DeformationProblem:
    h: PointedHopf
    mode: str = "fixed-point"
    bound: Fraction | None = None
    cocommutative: bool = True
    cap: int = 20000

    def __post_init__(self):
        if self.mode not in ("fixed-point", "free-point"):
            raise ValueError(f"unknown mode {self.mode}")
        if not (isinstance(self.h.base, ZMod) and self.h.base.n == 1):
            raise UnsupportedError("deformations are computed for objects over F_p")
        if self.bound is not None:
            from .hopf import rebound

            self.h = rebound(self.h, self.bound)
        self.bound = self.h.algebra.bound


@dataclass
class DeformationReport:
    cocycle_dim: int
    coboundary_dim: int
    quotient_dim: int
    representatives: list
    n_unknowns: int
    bound: Fraction
    mode: str
    name: str = ""

    def line(self) -> str:
        return (f"{self.name}: cocycles {self.cocycle_dim}, coboundaries {self.coboundary_dim}, "
                f"quotient {self.quotient_dim} (bound {self.bound}, {self.mode})")


# ------------------------------------------------------------ unknowns


class _Layout:
    """Index of every unknown, with its meaning."""

    def __init__(self):
        self.items = []
        self.index = {}

    def new(self, key):
        self.index[key] = len(self.items)
        self.items.append(key)
        return self.index[key]

    def __len__(self):
        return len(self.items)


def _layout(h: PointedHopf, mode: str, with_comul=True):
    H = h.algebra
    T = h.tensor
    lay = _Layout()
    for ri, rel in enumerate(H.relations):
        if rel.ideg >= H.ibound:
            continue
        for m in H.basis_ideg(rel.ideg):
            lay.new(("c", ri, m))
    if with_comul:
        for g in range(H.ngens):
            if H.ideg[g] >= H.ibound:
                continue
            for m in T.basis_ideg(H.ideg[g]):
                lay.new(("d", g, m))
    if mode == "free-point":
        for mi, P in enumerate(h.points):
            D = H.to_ideg(Fraction(1, h.p**mi))
            for m in H.basis_ideg(D):
                lay.new(("pi", mi, m))
    return lay


def _first_order_hopf(h: PointedHopf, lay: _Layout, values=None):
    """The deformed object over FirstOrder; ``values`` fixes the unknowns to constants."""
    H = h.algebra
    p = h.p
    FO = FirstOrder(p)

    def unk(key):
        k = lay.index[key]
        if values is None:
            return (0, {k: 1})
        v = values.get(k, 0) % p
        return (0, {None: v}) if v else FO.zero

    def lift(f):
        return {m: (c, {}) for m, c in f.items()}

    rels = []
    for ri, rel in enumerate(H.relations):
        poly = lift(rel.poly)
        if rel.ideg < H.ibound:
            for m in H.basis_ideg(rel.ideg):
                poly[m] = FO.add(poly.get(m, FO.zero), unk(("c", ri, m)))
        rels.append({m: c for m, c in poly.items() if not FO.is_zero(c)})
    Hf = Presentation(FO, list(zip(H.names, H.degrees)), rels, H.bound, name=H.name)
    Tf = tensor_square(Hf)
    T = h.tensor
    comul = []
    for g, c in enumerate(h.comul):
        f = lift(c)
        if H.ideg[g] < H.ibound:
            for m in T.basis_ideg(H.ideg[g]):
                key = ("d", g, m)
                if key in lay.index:
                    f[m] = FO.add(f.get(m, FO.zero), unk(key))
        comul.append({m: v for m, v in f.items() if not FO.is_zero(v)})
    points = []
    for mi, P in enumerate(h.points):
        f = lift(P)
        D = H.to_ideg(Fraction(1, p**mi))
        for m in H.basis_ideg(D):
            key = ("pi", mi, m)
            if key in lay.index:
                f[m] = FO.add(f.get(m, FO.zero), unk(key))
        points.append({m: v for m, v in f.items() if not FO.is_zero(v)})
    del Tf
    return PointedHopf(Hf, comul, points, h.flavor, h.scale, [FO.zero] * H.ngens, name=h.name)


def _equations(hf: PointedHopf, cocommutative=True, points=True):
    """Linear equations (vec, rhs) from every axiom residual of a FirstOrder object."""
    eqs = []
    for crit, label, P, elt in hopf_residuals(hf, points=points, cocommutative=cocommutative):
        if crit == "homogeneity":
            raise ValueError(f"perturbation of {label} is not homogeneous")
        for m, (a, lin) in P.nf(elt).items():
            if a:
                raise ValueError(f"special fiber fails {crit} at {label}")
            vec = {k: v for k, v in lin.items() if k is not None}
            rhs = (-lin.get(None, 0)) % hf.p
            if vec or rhs:
                eqs.append((vec, rhs, (crit, label)))
    return eqs


# ------------------------------------------------------------ coboundaries


def _psi_basis(h: PointedHopf):
    H = h.algebra
    out = []
    for g in range(H.ngens):
        if H.ideg[g] >= H.ibound:
            continue
        for b in H.basis_ideg(H.ideg[g]):
            out.append((g, b))
    return out


def _coboundary(h: PointedHopf, lay: _Layout, g: int, b, with_comul=True):
    """Action of psi = (g -> b) on (c, delta, pi), in unknown coordinates."""
    H = h.algebra
    T = h.tensor
    p = h.p
    vec = {}

    def put(key, c):
        k = lay.index.get(key)
        if k is None:
            if c % p:
                raise AssertionError(f"coboundary leaves the unknown space at {key}")
            return
        v = (vec.get(k, 0) + c) % p
        if v:
            vec[k] = v
        else:
            vec.pop(k, None)

    bb = {b: H.base.one}
    for ri, rel in enumerate(H.relations):
        if rel.ideg >= H.ibound:
            continue
        d = H.nf(H.mul(H.partial(rel.poly, g), bb))
        for m, c in d.items():
            put(("c", ri, m), c)
    if with_comul:
        imgs = [None] * T.ngens
        imgs[g] = T.embed(0, bb)
        imgs[H.ngens + g] = T.embed(1, bb)
        for g2, c in enumerate(h.comul):
            if H.ideg[g2] >= H.ibound:
                continue
            d = T.derivation(c, imgs)
            if g2 == g:
                d = T.sub(d, h.delta(bb))
            for m, v in T.nf(d).items():
                put(("d", g2, m), v)
    pts = []
    himgs = [None] * H.ngens
    himgs[g] = bb
    for mi, P in enumerate(h.points):
        pts.append(H.derivation(P, himgs))
    return vec, pts


def coboundary_vectors(h: PointedHopf, lay: _Layout, mode: str, with_comul=True):
    """Spanning vectors of the coboundary space (point-fixing psi in fixed mode)."""
    p = h.p
    basis = _psi_basis(h)
    raw = [_coboundary(h, lay, g, b, with_comul) for g, b in basis]
    H = h.algebra
    if mode == "free-point":
        out = []
        for vec, pts in raw:
            v = dict(vec)
            for mi, d in enumerate(pts):
                for m, c in d.items():
                    k = lay.index[("pi", mi, m)]
                    v[k] = (v.get(k, 0) + c) % p
            out.append({k: c for k, c in v.items() if c})
        return out
    # psi must fix the points: solve for combinations with D_psi(P_m) = 0
    cols = {}
    rows = []
    for vec, pts in raw:
        r = {}
        for mi, d in enumerate(pts):
            for m, c in d.items():
                r[cols.setdefault((mi, m), len(cols))] = c
        rows.append(r)
    # kernel of psi |-> D_psi(P): transpose system
    eqs = {}
    for j, r in enumerate(rows):
        for col, c in r.items():
            eqs.setdefault(col, {})[j] = c
    e = Echelon(p)
    for col in eqs.values():
        e.add(col)
    out = []
    for combo in e.kernel(range(len(raw))):
        v = {}
        for j, a in combo.items():
            for k, c in raw[j][0].items():
                v[k] = (v.get(k, 0) + a * c) % p
        out.append({k: c for k, c in v.items() if c})
    del H
    return out


# ------------------------------------------------------------ solver


def _vector_to_perturbation(h: PointedHopf, lay: _Layout, vec: dict) -> Perturbation:
    H = h.algebra
    pert = Perturbation()
    for k, c in vec.items():
        kind, a, m = lay.items[k]
        target = {"c": pert.c, "d": pert.delta, "pi": pert.pi}[kind]
        target.setdefault(a, {})[m] = c % h.p
    del H
    return pert


def _perturbation_to_vector(h: PointedHopf, lay: _Layout, pert: Perturbation) -> dict:
    vec = {}
    for kind, table in (("c", pert.c), ("d", pert.delta), ("pi", pert.pi)):
        for a, f in table.items():
            for m, c in f.items():
                key = (kind, a, m)
                if key not in lay.index:
                    raise ValueError(f"perturbation term {key} is outside the unknown space")
                if c % h.p:
                    vec[lay.index[key]] = c % h.p
    return vec


def deformation_space(prob: DeformationProblem) -> DeformationReport:
    h = prob.h
    rep = check_hopf(h)
    if not rep:
        raise ValueError(f"special fiber is not a pointed Hopf algebra: {rep.witness}")
    lay = _layout(h, prob.mode)
    if len(lay) > prob.cap:
        raise ResourceError(f"{len(lay)} unknowns exceed the cap {prob.cap}")
    hf = _first_order_hopf(h, lay)
    eqs = _equations(hf, prob.cocommutative)
    cols = range(len(lay))
    try:
        _, kernel = solve_affine([(v, r) for v, r, _ in eqs], cols, h.p)
    except Inconsistent:
        raise AssertionError("homogeneous system reported inconsistent")
    Z = Echelon(h.p)
    for v in kernel:
        Z.add(v)
    cob = coboundary_vectors(h, lay, prob.mode)
    Bech = Echelon(h.p)
    for v in cob:
        if not Z.contains(v):
            raise AssertionError("a coboundary fails the cocycle equations")
        Bech.add(v)
    reps = []
    Q = Echelon(h.p)
    for v in cob:
        Q.add(v)
    for v in kernel:
        if Q.add(v) == "new":
            reps.append(_vector_to_perturbation(h, lay, v))
    return DeformationReport(len(Z), len(Bech), len(Z) - len(Bech), reps, len(lay), h.algebra.bound,
                             prob.mode, name=h.name)


def is_coboundary(h: PointedHopf, pert: Perturbation, mode="fixed-point") -> bool:
    lay = _layout(h, mode)
    vec = _perturbation_to_vector(h, lay, pert)
    e = Echelon(h.p)
    for v in coboundary_vectors(h, lay, mode):
        e.add(v)
    return e.contains(vec)


# ------------------------------------------------------------ explicit objects


def deformed(h: PointedHopf, pert: Perturbation) -> PointedHopf:
    """The deformation over F_p[eps] with the given eps-parts."""
    H = h.algebra
    p = h.p
    E = DualNumbers(p)

    def lift(f, extra=None):
        out = {m: (c % p, 0) for m, c in f.items()}
        for m, c in (extra or {}).items():
            a, b = out.get(m, (0, 0))
            out[m] = (a, (b + c) % p)
        return {m: v for m, v in out.items() if v != (0, 0)}

    rels = [lift(r.poly, pert.c.get(ri)) for ri, r in enumerate(H.relations)]
    He = Presentation(E, list(zip(H.names, H.degrees)), rels, H.bound, name=f"{H.name}[eps]")
    tensor_square(He)
    comul = [lift(c, pert.delta.get(g)) for g, c in enumerate(h.comul)]
    points = [lift(P, pert.pi.get(mi)) for mi, P in enumerate(h.points)]
    return PointedHopf(He, comul, points, h.flavor, h.scale, [E.zero] * H.ngens, name=f"{h.name}[eps]")


def verify_cocycle(h: PointedHopf, pert: Perturbation, mode="fixed-point"):
    """Exact check over F_p[eps] plus the linearized check; returns (ok, witness)."""
    H = h.algebra
    T = h.tensor
    for g, f in pert.delta.items():
        for m in f:
            if T.mono_ideg(m) != H.ideg[g]:
                return False, f"delta({H.names[g]}) is not homogeneous of degree {H.degrees[g]}"
    for ri, f in pert.c.items():
        for m in f:
            if H.mono_ideg(m) != H.relations[ri].ideg:
                return False, f"perturbation of relation {ri + 1} is not homogeneous"
    if mode == "fixed-point" and any(any(f.values()) for f in pert.pi.values()):
        return False, "fixed-point mode does not allow point perturbations"
    he = deformed(h, pert)
    rep = check_hopf(he)
    if not rep:
        return False, rep.witness
    # flatness: the eps-fiber has the special fiber's normal-form basis
    for D in range(H.ibound):
        if he.algebra.basis_ideg(D) != H.basis_ideg(D):
            return False, f"normal-form basis changes in degree {Fraction(D, H.L)}"
    lay = _layout(h, "free-point" if pert.pi else mode)
    try:
        vec = _perturbation_to_vector(h, lay, pert)
    except ValueError as exc:
        return False, str(exc)
    hf = _first_order_hopf(h, lay, values=vec)
    for v, r, (crit, label) in _equations(hf):
        if r:
            return False, f"linearized {crit} at {label}"
    return True, None


# ------------------------------------------------------------ algebra only


def graded_algebra_deformations(pres: Presentation, bound=None) -> Report:
    """Graded deformations of the algebra alone, modulo g -> g + eps*psi(g)."""
    H = pres if bound is None else pres.with_bound(bound)
    name = f"graded deformations of {H.name or 'algebra'}"
    h = PointedHopf(H, [{}] * H.ngens, [{}], name=H.name)
    lay = _layout(h, "fixed-point", with_comul=False)
    cob = Echelon(H.base.p)
    for g, b in _psi_basis(h):
        vec, _ = _coboundary(h, lay, g, b, with_comul=False)
        cob.add(vec)
    q = len(lay) - len(cob)
    rep = passed(name) if q == 0 else failed(name, f"{q} nontrivial first-order deformation(s)")
    rep.details.update(unknowns=len(lay), coboundaries=len(cob), quotient=q, bound=H.bound)
    return rep


# ------------------------------------------------------------ Hodge map


@dataclass
class HodgeMapResult:
    exists: bool
    unique: bool
    images: dict | None
    certificate: list | None

    def line(self) -> str:
        if not self.exists:
            return "no map: " + "; ".join(self.certificate or [])
        return "unique map" if self.unique else "map exists, not unique"


def _special_from_dual(he: PointedHopf) -> PointedHopf:
    H = he.algebra
    p = H.base.p
    F = ZMod(p)
    rels = [{m: c[0] for m, c in r.poly.items() if c[0]} for r in H.relations]
    Hs = Presentation(F, list(zip(H.names, H.degrees)), rels, H.bound, name=H.name)
    T = tensor_square(Hs)
    comul = [{m: c[0] for m, c in f.items() if c[0]} for f in he.comul]
    points = [{m: c[0] for m, c in f.items() if c[0]} for f in he.points]
    del T
    return PointedHopf(Hs, comul, points, he.flavor, he.scale, name=he.name)


def find_hodge_map(he: PointedHopf, k: int | None = None) -> HodgeMapResult:
    """Solve for a graded pointed Hopf map he -> alpha_natural[eps] deforming gr^0.

    gr^0 sends the roots P_m (m >= 1) to x^{1/p^m} and every generator of
    integral degree to 0.  The unknowns are the eps-parts psi(g) in the
    degree of g.
    """
    if he.flavor != "GaPerf":
        raise ValueError("find_hodge_map expects a pointed G_a^perf-module")
    k = he.scale if k is None else k
    if k != he.scale:
        raise ValueError("scale must match the object")
    H = he.algebra
    p = H.base.p
    if isinstance(H.base, ZMod):
        he = deformed(he, Perturbation())
        H = he.algebra
    if not isinstance(H.base, DualNumbers):
        raise UnsupportedError("expected an object over F_p[eps]")
    special = _special_from_dual(he)
    S = special.algebra
    A = build_alpha_natural(p, k, base=ZMod(p), bound=2).algebra
    FO = FirstOrder(p)
    Af = Presentation(FO, list(zip(A.names, A.degrees)),
                      [{m: (c, {}) for m, c in r.poly.items()} for r in A.relations], A.bound)
    Tf = tensor_square(Af)
    # gr^0 on generators
    roots = {}
    for mi in range(1, k + 1):
        P = S.nf(special.points[mi])
        if len(P) != 1 or list(P.values())[0] != 1 or sum(next(iter(P))) != 1:
            raise ValueError(f"P_{mi} is not a generator, so gr^0 is not defined generator-wise")
        roots[next(iter(P)).index(1)] = Af.gen(k - mi)
    lay = _Layout()
    imgs = []
    for g in range(S.ngens):
        base_img = roots.get(g, {}) if S.degrees[g] < 1 else {}
        img = dict(base_img)
        D = Af.to_ideg(S.degrees[g]) if S.degrees[g] < Af.bound else None
        if D is not None:
            for m in Af.basis_ideg(D):
                kk = lay.new(("psi", g, m))
                img[m] = FO.add(img.get(m, FO.zero), (0, {kk: 1}))
        imgs.append({m: c for m, c in img.items() if not FO.is_zero(c)})
    phi = HomCache(imgs, Af, cmap=lambda c: to_first_order(H.base, c))
    Te = he.tensor
    phi2 = HomCache([Tf.embed(0, f) for f in imgs] + [Tf.embed(1, f) for f in imgs], Tf,
                    cmap=lambda c: to_first_order(H.base, c))
    eqs = []
    labels = []

    def collect(P, elt, label):
        for m, (a, lin) in P.nf(elt).items():
            if a:
                raise ValueError(f"gr^0 is not a map on the special fiber ({label})")
            vec = {kk: v for kk, v in lin.items() if kk is not None}
            rhs = (-lin.get(None, 0)) % p
            if vec or rhs:
                eqs.append((vec, rhs))
                labels.append(label)

    for r in H.relations:
        collect(Af, phi(r.poly), f"relation {H.fmt(r.poly)}")
    dA = HomCache([Tf.add(Tf.embed(0, Af.gen(i)), Tf.embed(1, Af.gen(i))) for i in range(Af.ngens)], Tf)
    for g, c in enumerate(he.comul):
        lhs = dA(imgs[g])
        collect(Tf, Tf.sub(lhs, phi2(c)), f"comultiplication of {H.names[g]}")
    for mi in range(k + 1):
        want = Af.gen(k - mi) if mi else {}
        collect(Af, Af.sub(phi(he.points[mi]), want), f"point P_{mi}")
    del Te
    try:
        part, kernel = solve_affine(eqs, range(len(lay)), p)
    except Inconsistent as exc:
        return HodgeMapResult(False, False, None, sorted({labels[i] for i in exc.certificate}))
    out = {}
    for g in range(S.ngens):
        img = {}
        for m, c in imgs[g].items():
            a, lin = c
            b = sum(v * part.get(kk, 0) for kk, v in lin.items() if kk is not None) % p
            if a or b:
                img[m] = (a, b)
        out[S.names[g]] = img
    return HodgeMapResult(True, not kernel, out, None)


# ------------------------------------------------------------ named objects


def unstable_base(p: int, bound=2) -> PointedHopf:
    """F_p[s, t]/(s^p, t^p), deg s = 1/p, deg t = 1, P_0 = 0, P_1 = s, all primitive."""
    from .hopf import build_alpha_pk, rebound, u_star

    base = build_alpha_pk(p, 1, point="0", bound=bound)
    return rebound(u_star(base, 1), bound)


def unstable_cocycle(h: PointedHopf, coeff: int = 1) -> Perturbation:
    """delta(t) = coeff * sum_{0<i<p} (1/p) C(p, i) s^i (x) s^{p-i}."""
    from math import comb

    H = h.algebra
    T = h.tensor
    p = h.p
    s = H.index[[n for n in H.names if n.endswith(f"_r{p}")][0]]
    t = [i for i in range(H.ngens) if H.degrees[i] == 1][0]
    f = {}
    for i in range(1, p):
        a = [0] * H.ngens
        a[s] = i
        b = [0] * H.ngens
        b[s] = p - i
        c = (coeff * comb(p, i) // p) % p
        if c:
            f[tuple(a) + tuple(b)] = c
    del T
    return Perturbation(delta={t: f})


__all__ = ["DeformationProblem", "DeformationReport", "Perturbation", "ResourceError", "deformation_space",
           "verify_cocycle", "is_coboundary", "deformed", "graded_algebra_deformations", "find_hodge_map",
           "HodgeMapResult", "unstable_base", "unstable_cocycle"]

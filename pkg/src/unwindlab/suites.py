"""Acceptance criteria as named, timed checks shared by the CLI and the tests."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

from . import deform as dfm
from . import hopf as hp
from . import tilt as tl
from . import unwind as uw
from .algebra import AlgebraRing, Presentation
from .divided_powers import gamma_free, pd_envelope
from .report import Report, failed, passed
from .rings import DualNumbers, ZMod
from .witt import (random_vector, witt_frobenius, witt_teichmuller, witt_verschiebung,
                   witt_from_int, witt_zero)

SAMPLES = 200


@dataclass(frozen=True)
class Criterion:
    number: int
    title: str
    limit: float
    run: object


def _all(name, reports) -> Report:
    bad = [r for r in reports if not r.ok]
    if bad:
        return failed(name, bad[0].line(), checks=len(reports))
    return passed(name, checks=len(reports))


# ---------------------------------------------------------------- witt


def _coefficient_rings(p):
    t3 = Presentation(ZMod(p), [("t", 1)], ["t^3"], 3, name=f"F_{p}[t]/t^3")
    return [ZMod(p), ZMod(p, 3), AlgebraRing(t3)]


def _witt_identities(p, n, R, samples, seed):
    rng = random.Random(seed)
    name = f"W_{n}({R}) identities"
    zero = witt_zero(p, n, R)
    one = witt_from_int(1, p, n, R)
    for _ in range(samples):
        x, y, z = (random_vector(p, n, R, rng) for _ in range(3))
        checks = [
            ("x+(y+z) = (x+y)+z", x + (y + z), (x + y) + z),
            ("x+y = y+x", x + y, y + x),
            ("x(yz) = (xy)z", x * (y * z), (x * y) * z),
            ("xy = yx", x * y, y * x),
            ("x(y+z) = xy+xz", x * (y + z), x * y + x * z),
            ("x+0 = x", x + zero, x),
            ("x*1 = x", x * one, x),
            ("x-x = 0", x - x, zero),
        ]
        a, b = R.random(rng), R.random(rng)
        checks.append(("[a][b] = [ab]", witt_teichmuller(a, n, p, R) * witt_teichmuller(b, n, p, R),
                       witt_teichmuller(R.mul(a, b), n, p, R)))
        if n >= 2:
            u = random_vector(p, n - 1, R, rng)
            pu = witt_from_int(p, p, n - 1, R) * u
            checks.append(("F(V(u)) = p*u", witt_frobenius(witt_verschiebung(u, n), universal=True), pu))
            lhs = witt_verschiebung(u, n) * y
            rhs = witt_verschiebung(u * witt_frobenius(y), n)
            checks.append(("V(u)*y = V(u*F(y))", lhs, rhs))
        for label, lhs, rhs in checks:
            if lhs != rhs:
                return failed(name, f"{label} fails at x={x}, y={y}, z={z}")
    return passed(name)


def criterion_witt_identities():
    out = []
    for p in (2, 3):
        for n in (1, 2, 3):
            for k, R in enumerate(_coefficient_rings(p)):
                out.append(_witt_identities(p, n, R, SAMPLES, seed=100 * p + 10 * n + k))
    return out


def criterion_witt_order():
    out = []
    for p in (2, 3, 5):
        for n in (1, 2, 3):
            R = ZMod(p)
            e = witt_teichmuller(R.one, n, p, R)
            zero = witt_zero(p, n, R)
            acc, order = e, 1
            while acc != zero:
                acc = acc + e
                order += 1
            name = f"additive order of 1 in W_{n}(F_{p})"
            out.append(passed(name) if order == p**n else failed(name, f"order {order}, expected {p ** n}"))
    return out


# ---------------------------------------------------------------- hopf


def _iso(name, h, target):
    return passed(name) if hp.find_iso(h, target) is not None else failed(name, "no isomorphism found")


def criterion_cartier():
    out = []
    for p in (2, 3):
        for k in (1, 2):
            a = hp.build_alpha_pk(p, k)
            w = hp.build_wk_f(p, k, bound=a.algebra.bound)
            out.append(_iso(f"dual(alpha_{p}^{k}) = W_{k}[F]", w, hp.cartier_dual(a)))
            out.append(_iso(f"dual(W_{k}[F]) = alpha_{p}^{k} at p={p}", a, hp.cartier_dual(w)))
            for h in (a, w):
                name = f"double dual of {h.name} at p={p}"
                ok = hp.double_dual_equal(hp.to_sc(h))
                out.append(passed(name) if ok else failed(name, "tables differ"))
        x, y = hp.build_cart_x(p, 1, 1), hp.build_cart_y(p, 1, 1)
        out.append(_iso(f"dual(X) = Y at (p,k,n)=({p},1,1)", y, hp.cartier_dual(x)))
        out.append(_iso(f"dual(Y) = X at (p,k,n)=({p},1,1)", x, hp.cartier_dual(y)))
        for h in (x, y):
            name = f"double dual of {h.name} at p={p}"
            ok = hp.double_dual_equal(hp.to_sc(h))
            out.append(passed(name) if ok else failed(name, "tables differ"))
    return out


def _quasi_ideal_objects(p):
    return [hp.build_wk_f(p, 1, bound=6), hp.build_wk_f(p, 2, bound=6), hp.build_alpha_natural(p, 2, bound=6),
            hp.build_ga(p, bound=6), hp.build_ga_perf(p, 2, bound=6)]


def criterion_quasi_ideal_coproduct():
    out = []
    for p in (2, 3):
        Fp = ZMod(p)
        B = Presentation(Fp, [("x", 1), ("y", 1)], [], 6)
        r = Fraction(1, p * p)
        Bp = Presentation(Fp, [(hp.root_name("x", p, 2), r), (hp.root_name("y", p, 2), r)], [], 6)
        for h in _quasi_ideal_objects(p):
            name = f"{h.name} is a quasi-ideal at p={p}"
            ok, why = hp.check_quasi_ideal(h)
            out.append(passed(name) if ok else failed(name, why))
            base = Bp if h.flavor == "GaPerf" else B
            out.append(uw.check_coproduct(h, base, base.names[0], base.names[1], 6))
    return out


# ---------------------------------------------------------------- pd / unwind


def criterion_env_pd():
    out = []
    for p in (2, 3):
        B = Presentation(ZMod(p), [("x", 1)], [], 9)
        K = 1
        while p**K < 9:
            K += 1
        E = uw.env(hp.build_wk_f(p, K, bound=9), B, [B.gen(0)])
        D = pd_envelope(B, [B.gen(0)])
        G = gamma_free(Presentation(ZMod(p), [], [], 9), 1, 9)
        name = f"Env_W[F](F_{p}[x],(x)) = D(x) to weight 8"
        if G.pres.hilbert() != D.pres.hilbert():
            out.append(failed(name, "PD envelope and free PD algebra have different dimensions"))
            continue
        ok, why = tl.compare_filtered(D, E, tl.pd_to_env_map(D, E, ["x"], ["x"]), range(9))
        out.append(passed(name) if ok else failed(name, why))
    out.append(tl.check_nw2(tl.qrsp(2, ("x",), k=2, N=8), 6))
    out.append(tl.check_nw2(tl.qrsp(2, ("x", "y"), k=1, N=3), 6))
    return out


def _gr0_pairs():
    F2 = ZMod(2)
    B1 = Presentation(F2, [("x", 1)], [], 6)
    B2 = Presentation(F2, [("x", 1), ("y", 1)], [], 6)
    P1 = uw.perfect_presentation(2, ("x",), 2, 6)
    P2 = uw.perfect_presentation(2, ("x", "y"), 1, 3)
    return [
        (hp.build_ga(2, bound=6), B1, [B1.gen(0)], uw.env),
        (hp.build_wk_f(2, 3, bound=6), B2, [B2.gen(0), B2.gen(1)], uw.env),
        (hp.build_zero(2, bound=6), B2, [B2.gen(0)], uw.env),
        (hp.build_ga_perf(2, 2, bound=6), P1, [uw.variable_power(P1, 0, 1)], uw.env_perf),
        (hp.build_alpha_natural(2, 2, bound=6), P1, [uw.variable_power(P1, 0, 1)], uw.env_perf),
        (tl.u_star_wf(2, 1, 6), P2, [uw.variable_power(P2, 0, 1)], uw.env_perf),
    ]


def criterion_hodge():
    out = []
    for X, B, ideal, fn in _gr0_pairs():
        r = uw.check_gr0(fn(X, B, ideal))
        out.append(Report(r.ok, f"gr0 Env_{X.name} = B/I", r.witness))
    out.append(tl.check_nw2(tl.qrsp(2, ("x",), k=2, N=8), 8, levels=range(7)))
    return out


# ---------------------------------------------------------------- tilt


def criterion_tilt():
    out = [tl.verify_tilt(tl.qrsp(2, ("x",), k=2, N=8), 2, 8)]
    for R in (DualNumbers(2), ZMod(2, 2)):
        T = tl.tilt_finite(R)
        name = f"tilt of {R} is F_2"
        ok = len(T) == 2 and tl.is_prime_field(T)
        out.append(passed(name) if ok else failed(name, f"tilt has {len(T)} elements"))
    return out


# ---------------------------------------------------------------- deform


def _rigid(h, label):
    r = dfm.deformation_space(dfm.DeformationProblem(h))
    name = f"{label} is rigid (bound {h.algebra.bound})"
    return passed(name) if r.quotient_dim == 0 else failed(name, r.line())


def criterion_rigidity():
    out = []
    for p in (2, 3):
        out.append(_rigid(hp.build_wk_f(p, 1, bound=p + 1), f"W_1[F] at p={p}"))
        out.append(_rigid(hp.build_wk_f(p, 2, bound=p * p), f"W_2[F] at p={p}"))
    out.append(_rigid(hp.build_cart_x(2, 1, 1), "F_2[x0,x1]/(x0^4,x1^2)"))
    for p in (2, 3):
        out.append(_rigid(hp.u_star(hp.build_wk_f(p, 2, bound=p * p), 2), f"u*W_2[F] at p={p}, scale 2"))
    return out


def criterion_unstable():
    out = []
    for p in (2, 3):
        h = dfm.unstable_base(p, 2)
        pert = dfm.unstable_cocycle(h)
        name = f"unstable cocycle at p={p}"
        ok, why = dfm.verify_cocycle(h, pert)
        if not ok:
            out.append(failed(name, f"not a cocycle: {why}"))
            continue
        if dfm.is_coboundary(h, pert):
            out.append(failed(name, "is a coboundary"))
            continue
        res = dfm.find_hodge_map(dfm.deformed(h, pert))
        if res.exists:
            out.append(failed(name, "a map to alpha_natural[eps] exists"))
        else:
            out.append(passed(name, certificate=res.certificate))
    for p in (2, 3):
        name = f"trivial deformation of u*W_2[F] at p={p} maps uniquely"
        res = dfm.find_hodge_map(hp.u_star(hp.build_wk_f(p, 2, bound=p * p), 2))
        out.append(passed(name) if res.exists and res.unique else failed(name, res.line()))
    return out


CRITERIA = [
    Criterion(1, "Witt identities", 10, criterion_witt_identities),
    Criterion(2, "additive order of W_n(F_p)", 1, criterion_witt_order),
    Criterion(3, "Cartier duality", 30, criterion_cartier),
    Criterion(4, "envelope and PD agreement", 60, criterion_env_pd),
    Criterion(5, "Hodge filtration", 30, criterion_hodge),
    Criterion(6, "tilting", 10, criterion_tilt),
    Criterion(7, "rigidity", 120, criterion_rigidity),
    Criterion(8, "non-rigidity witness", 30, criterion_unstable),
    Criterion(9, "quasi-ideal and coproduct law", 30, criterion_quasi_ideal_coproduct),
]

SUITES = {
    "witt": [1, 2],
    "hopf": [3, 9],
    "pd": [4],
    "unwind": [5, 9],
    "tilt": [6],
    "deform": [7, 8],
    "all": [c.number for c in CRITERIA],
}


def run_criterion(c: Criterion) -> Report:
    name = f"{c.number} {c.title}"
    t0 = time.perf_counter()
    try:
        subs = c.run()
    except Exception as exc:  # report, do not crash the suite
        return failed(name, f"{type(exc).__name__}: {exc}", elapsed=time.perf_counter() - t0)
    elapsed = time.perf_counter() - t0
    r = _all(name, subs)
    r.details.update(elapsed=elapsed, limit=c.limit, subchecks=subs)
    if r.ok and elapsed >= c.limit:
        return failed(name, f"took {elapsed:.1f} s, limit {c.limit} s", **r.details)
    return r


def run_suite(name: str) -> list[Report]:
    if name not in SUITES:
        raise KeyError(name)
    by_num = {c.number: c for c in CRITERIA}
    return [run_criterion(by_num[n]) for n in SUITES[name]]

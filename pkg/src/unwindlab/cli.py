"""Command-line front end.

``unwindlab <witt|hopf|pd|unwind|tilt|dr|deform|verify> <subcommand> [flags] [files]``

Exit codes: 0 success, 1 a mathematical check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import deform as dfm
from . import hopf as hp
from . import tilt as tl
from . import unwind as uw
from . import witt
from .divided_powers import gamma_free, pd_envelope, pd_filtration
from .gapfile import load_gap, print_gap
from .hopf import PointedHopf
from .report import Report, failed, passed
from .rings import ZMod, parse_base


class UsageError(ValueError):
    pass


def cache_dir(flag: str | None) -> str:
    if flag:
        return flag
    env = os.environ.get("UNWINDLAB_CACHE")
    if env:
        return env
    root = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return os.path.join(root, "unwindlab")


class Output:
    """Collects text lines and reports; renders them as text or JSON."""

    def __init__(self, as_json: bool, err=None):
        self.as_json = as_json
        self.err = err or sys.stderr
        self.reports: list[Report] = []
        self.text: list[str] = []

    def say(self, s: str):
        self.text.append(s)

    def report(self, r: Report):
        self.reports.append(r)

    def value(self, criterion: str, text: str):
        self.text.append(text)
        self.reports.append(passed(criterion, value=text))

    def render(self, stream):
        if self.as_json:
            rows = []
            for r in self.reports:
                d = r.as_json()
                if "value" in r.details:
                    d["value"] = r.details["value"]
                rows.append(d)
            json.dump(rows, stream, indent=1, sort_keys=True)
            stream.write("\n")
            return
        for s in self.text:
            stream.write(s + ("" if s.endswith("\n") else "\n"))
        for r in self.reports:
            if "value" not in r.details:
                stream.write(r.line() + "\n")

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)


# ------------------------------------------------------------------ helpers


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


def _files(args, count):
    if len(args.files) != count:
        raise UsageError(f"expected {count} file argument(s), got {len(args.files)}")
    return [load_gap(f) for f in args.files]


def _hopf_file(args, count=1) -> PointedHopf:
    h = _files(args, count)[0]
    if not isinstance(h, PointedHopf):
        raise UsageError(f"{args.files[0]} describes a presentation, not a Hopf algebra")
    if args.bound is not None:
        h = hp.rebound(h, args.bound)
    return h


def _pres_file(args, index=0):
    obj = load_gap(args.files[index])
    if isinstance(obj, PointedHopf):
        obj = obj.algebra
    if args.bound is not None:
        obj = obj.with_bound(args.bound)
    return obj


def _ideal(B, args):
    if not args.ideal:
        raise UsageError("--ideal is required")
    return [B.parse(t.strip()) for t in args.ideal.split(",")]


def _variables(args):
    return tuple(args.files) or ("x",)


# ------------------------------------------------------------------ witt


def _vector(text, p, n, R):
    parts = [s.strip() for s in text.split(",")]
    if len(parts) != n:
        raise UsageError(f"vector '{text}' does not have length {n}")
    try:
        return witt.WittVector(p, R, [R.from_int(int(s)) for s in parts])
    except ValueError:
        raise UsageError(f"vector '{text}' has a non-integer entry") from None


def _fmt_vector(v):
    return ",".join(v.ring.fmt(a) for a in v.entries)


def cmd_witt(args, out):
    _need(args, "p", "len")
    p, n = args.p, args.len
    R = parse_base(args.base) if args.base else ZMod(p)
    if R.p != p:
        raise UsageError(f"base {R} does not have residue characteristic {p}")
    sub = args.sub
    arity = {"add": 2, "mul": 2, "sub": 2, "neg": 1, "frob": 1, "ver": 1, "teich": 1, "polys": 0}
    if sub not in arity:
        raise UsageError(f"unknown witt subcommand '{sub}'")
    if sub == "teich":
        if len(args.files) != 1:
            raise UsageError("teich takes one base element")
        v = witt.witt_teichmuller(R.from_int(int(args.files[0])), n, p, R)
        out.value("witt teich", _fmt_vector(v))
        return
    vs = [_vector(t, p, n, R) for t in args.files]
    if len(vs) != arity[sub]:
        raise UsageError(f"witt {sub} takes {arity[sub]} vector(s)")
    if sub == "polys":
        sp = witt.witt_struct_polys(p, n)
        for op in ("S", "P", "N"):
            for i in range(n):
                out.say(f"{op}{i} = {sp.fmt(op, i)}")
        out.report(passed(f"structure polynomials p={p} n={n}"))
        return
    x = vs[0]
    if sub == "add":
        r = vs[0] + vs[1]
    elif sub == "sub":
        r = vs[0] - vs[1]
    elif sub == "mul":
        r = vs[0] * vs[1]
    elif sub == "neg":
        r = -x
    elif sub == "frob":
        r = witt.witt_frobenius(x)
    else:
        r = witt.witt_verschiebung(x)
    out.value(f"witt {sub}", _fmt_vector(r))


# ------------------------------------------------------------------ hopf

BUILDERS = {
    "ga": lambda a: hp.build_ga(a.p, bound=a.bound or 8),
    "wkf": lambda a: hp.build_wk_f(a.p, a.len or 1, bound=a.bound),
    "alpha": lambda a: hp.build_alpha_pk(a.p, a.len or 1, bound=a.bound),
    "alpha0": lambda a: hp.build_alpha_pk(a.p, a.len or 1, point="0", bound=a.bound),
    "alpha-natural": lambda a: hp.build_alpha_natural(a.p, a.scale or 1, bound=a.bound or 2),
    "ga-perf": lambda a: hp.build_ga_perf(a.p, a.scale or 1, bound=a.bound or 4),
    "cart-x": lambda a: hp.build_cart_x(a.p, 1, 1),
    "cart-y": lambda a: hp.build_cart_y(a.p, 1, 1),
    "zero": lambda a: hp.build_zero(a.p, bound=a.bound or 2),
    "unstable": lambda a: dfm.unstable_base(a.p, a.bound or 2),
}


def _label(l):
    if isinstance(l, tuple) and len(l) == 2 and l[0] == "*":
        return f"dual({_label(l[1])})"
    return str(l)


def _sc_lines(sc):
    lines = [f"# structure constants, p={sc.p}"]
    for l, d in zip(sc.labels, sc.degs):
        lines.append(f"basis {_label(l)} deg {Fraction(d, sc.L)}")
    return lines


def cmd_hopf(args, out):
    sub = args.sub
    if sub == "build":
        _need(args, "p")
        if len(args.files) != 1 or args.files[0] not in BUILDERS:
            raise UsageError(f"hopf build takes one of: {', '.join(BUILDERS)}")
        h = BUILDERS[args.files[0]](args)
        if args.scale and h.flavor == "Ga" and args.files[0] not in ("alpha-natural", "ga-perf"):
            h = hp.u_star(h, args.scale)
        out.say(print_gap(h).rstrip("\n"))
        return
    if sub == "show":
        (obj,) = _files(args, 1)
        out.say(print_gap(obj).rstrip("\n"))
        return
    h = _hopf_file(args, 2 if sub in ("iso", "dual-iso") else 1)
    if sub == "check":
        out.report(hp.check_hopf(h))
    elif sub == "quasi":
        ok, why = hp.check_quasi_ideal(h)
        out.report(passed("quasi-ideal") if ok else failed("quasi-ideal", why))
    elif sub == "full":
        ok = hp.check_full(h)
        out.report(passed("full") if ok else failed("full", "point does not span degree 1"))
    elif sub == "dual":
        sc = hp.cartier_dual(h)
        for s in _sc_lines(sc):
            out.say(s)
        ok = hp.double_dual_equal(hp.to_sc(h))
        out.report(passed("double dual") if ok else failed("double dual", "tables differ"))
    elif sub == "iso":
        g = load_gap(args.files[1])
        if not isinstance(g, PointedHopf):
            raise UsageError(f"{args.files[1]} is not a Hopf algebra")
        ok = hp.find_iso(h, hp.to_sc(g)) is not None
        out.report(passed("isomorphic") if ok else failed("isomorphic", "no isomorphism found"))
    elif sub == "dual-iso":
        g = load_gap(args.files[1])
        if not isinstance(g, PointedHopf):
            raise UsageError(f"{args.files[1]} is not a Hopf algebra")
        ok = hp.find_iso(g, hp.cartier_dual(h)) is not None
        out.report(passed("dual isomorphic") if ok else failed("dual isomorphic", "no isomorphism found"))
    else:
        raise UsageError(f"unknown hopf subcommand '{sub}'")


# ------------------------------------------------------------------ pd


def _fil_lines(fil, L, n):
    dims = {Fraction(D, L): S.dim for D, S in sorted(fil.items()) if S.dim}
    return f"Fil^{n}: " + (", ".join(f"deg {d}: {v}" for d, v in dims.items()) or "0")


def cmd_pd(args, out):
    sub = args.sub
    if sub == "gamma":
        _need(args, "p", "bound")
        from .algebra import trivial_algebra

        D = gamma_free(trivial_algebra(ZMod(args.p), args.bound), args.len or 1, args.bound)
        out.say(print_gap(D.pres).rstrip("\n"))
        return
    if len(args.files) != 1:
        raise UsageError(f"pd {sub} takes one presentation file")
    B = _pres_file(args)
    D = pd_envelope(B, _ideal(B, args))
    if sub == "envelope":
        out.say(print_gap(D.pres).rstrip("\n"))
    elif sub == "filtration":
        for n in range(args.level + 1):
            out.say(_fil_lines(pd_filtration(D, n), D.pres.L, n))
    else:
        raise UsageError(f"unknown pd subcommand '{sub}'")


# ------------------------------------------------------------------ unwind


def cmd_unwind(args, out):
    sub = args.sub
    if sub in ("coproduct", "roundtrip"):
        if len(args.files) != 1:
            raise UsageError(f"unwind {sub} takes one Hopf file")
        (X,) = _files(args, 1)
        if not isinstance(X, PointedHopf):
            raise UsageError("expected a Hopf algebra")
        if sub == "roundtrip":
            out.report(uw.check_roundtrip(X, args.bound))
            return
        bound = args.bound or 6
        from .algebra import Presentation

        d = Fraction(1, X.p**X.scale)
        names = [hp.root_name(v, X.p, X.scale) if X.scale else v for v in ("x", "y")]
        B = Presentation(X.base, [(n, d) for n in names], [], bound)
        out.report(uw.check_coproduct(X, B, names[0], names[1], bound))
        return
    if len(args.files) != 2:
        raise UsageError(f"unwind {sub} takes a Hopf file and a presentation file")
    X = load_gap(args.files[0])
    if not isinstance(X, PointedHopf):
        raise UsageError(f"{args.files[0]} is not a Hopf algebra")
    B = _pres_file(args, 1)
    fn = uw.env_perf if X.flavor == "GaPerf" else uw.env
    e = fn(X, B, _ideal(B, args), args.bound)
    if sub == "env":
        out.say(print_gap(e.pres).rstrip("\n"))
    elif sub == "gr0":
        out.report(uw.check_gr0(e))
    elif sub == "hodge":
        for n in range(args.level + 1):
            out.say(_fil_lines(uw.hodge_fil(e, n), e.pres.L, n))
    else:
        raise UsageError(f"unknown unwind subcommand '{sub}'")


# ------------------------------------------------------------------ tilt / dr


def _qrsp(args):
    _need(args, "p")
    k = args.scale or 1
    N = int(args.bound) if args.bound is not None else 4
    return tl.qrsp(args.p, _variables(args), k=k, N=N), k, N


def cmd_tilt(args, out):
    sub = args.sub
    if sub == "finite":
        R = parse_base(args.base) if args.base else None
        if R is None:
            if len(args.files) != 1:
                raise UsageError("tilt finite takes --base or one presentation file")
            R = _pres_file(args)
        T = tl.tilt_finite(R)
        out.value("tilt finite", f"{len(T)} elements" + (", prime field" if tl.is_prime_field(T) else ""))
        return
    q, k, N = _qrsp(args)
    if sub == "show":
        T, ideal = tl.tilt(q, k, N)
        out.say(print_gap(T.pres).rstrip("\n"))
        out.say("# ideal " + ",".join(ideal))
    elif sub == "verify":
        out.report(tl.verify_tilt(q, k, N))
    else:
        raise UsageError(f"unknown tilt subcommand '{sub}'")


def cmd_dr(args, out):
    sub = args.sub
    q, k, N = _qrsp(args)
    if sub == "show":
        out.say(print_gap(tl.dr(q).pres).rstrip("\n"))
    elif sub == "nw2":
        out.report(tl.check_nw2(q))
    elif sub == "gr0":
        out.report(tl.check_dr_gr0(q))
    else:
        raise UsageError(f"unknown dr subcommand '{sub}'")


# ------------------------------------------------------------------ deform


def cmd_deform(args, out):
    sub = args.sub
    if sub == "algebra":
        B = _pres_file(args)
        out.report(dfm.graded_algebra_deformations(B))
        return
    h = _hopf_file(args)
    if sub == "space":
        r = dfm.deformation_space(dfm.DeformationProblem(h, mode=args.mode))
        out.say(r.line())
        name = f"rigidity of {h.name or args.files[0]}"
        out.report(passed(name) if r.quotient_dim == 0 else
                   failed(name, f"quotient dimension {r.quotient_dim}"))
    elif sub == "hodge":
        res = dfm.find_hodge_map(h)
        name = "map to alpha_natural[eps]"
        out.report(passed(name) if res.exists else failed(name, res.line()))
        if res.exists:
            out.say(res.line())
    elif sub == "unstable":
        pert = dfm.unstable_cocycle(h)
        out.say(print_gap(dfm.deformed(h, pert)).rstrip("\n"))
    else:
        raise UsageError(f"unknown deform subcommand '{sub}'")


# ------------------------------------------------------------------ verify


def cmd_verify(args, out):
    from . import suites

    if args.sub not in suites.SUITES:
        raise UsageError(f"unknown suite '{args.sub}'; choose from {', '.join(suites.SUITES)}")
    for r in suites.run_suite(args.sub):
        out.report(r)
        if args.timings:
            print(f"{r.criterion}: {r.details.get('elapsed', 0):.2f} s", file=out.err)


COMMANDS = {"witt": cmd_witt, "hopf": cmd_hopf, "pd": cmd_pd, "unwind": cmd_unwind, "tilt": cmd_tilt,
            "dr": cmd_dr, "deform": cmd_deform, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    ap = _Parser(prog="unwindlab")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("sub")
    ap.add_argument("files", nargs="*")
    ap.add_argument("--p", type=int)
    ap.add_argument("--len", type=int)
    ap.add_argument("--bound", type=Fraction)
    ap.add_argument("--scale", type=int)
    ap.add_argument("--mode", choices=["fixed-point", "free-point"], default="fixed-point")
    ap.add_argument("--base", help="coefficient ring, e.g. 'Zmod 9' or 'Fp 2 eps'")
    ap.add_argument("--ideal", help="comma-separated generators of the ideal, e.g. 'x' or 'x_r4^4'")
    ap.add_argument("--level", type=int, default=3)
    ap.add_argument("--cache-dir")
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--timings", action="store_true", help="print criterion timings to stderr")
    return ap


def run_command(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_intermixed_args(argv)
    except UsageError as exc:
        print(f"unwindlab: {exc}", file=stderr)
        return 2
    witt.set_cache_dir(cache_dir(args.cache_dir))
    out = Output(args.json, stderr)
    try:
        COMMANDS[args.command](args, out)
    except (ValueError, OSError) as exc:  # input errors, including GapError and UnsupportedError
        print(f"unwindlab: {exc}", file=stderr)
        return 2
    out.render(stdout)
    return 0 if out.ok else 1


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())

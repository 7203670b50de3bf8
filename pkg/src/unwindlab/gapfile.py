"""Line-oriented text format for graded presentations and pointed Hopf algebras.

::

    # W_2[F] at p = 2
    base Fp 2
    bound 4
    gen t0 deg 1
    gen t1 deg 2
    rel t0^2
    rel t1^2
    comul t0 = t0 (x) 1 + 1 (x) t0
    comul t1 = t1 (x) 1 + 1 (x) t1 + t0 (x) t0
    point t0

A document without ``comul`` lines describes a bare presentation.  With
``scale k`` (k >= 1) the object has the GaPerf flavor and takes ``k + 1``
point lines, ordered t, t^{1/p}, ..., t^{1/p^k}.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .algebra import Presentation, PresentationError, _raw_mul
from .expr import ParseError, evaluate, parse_expr
from .hopf import PointedHopf, tensor_square
from .rings import base_spec, parse_base


class GapError(ValueError):
    """Input error with a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, col: int = 1):
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)
        self.message = message
        self.line = line
        self.col = col


def _fraction(text, line, col):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise GapError(f"'{text}' is not a rational number", line, col) from None


class _TensorOps:
    """Evaluate comultiplication terms: values are ('H', poly) or ('T', poly)."""

    def __init__(self, H: Presentation, T):
        self.H = H
        self.T = T

    def _t(self, v):
        kind, f = v
        if kind == "T":
            return f
        if f:
            raise ValueError("every term of a comultiplication must contain '(x)'")
        return {}

    def const(self, v):
        return ("H", self.H.const(self.H.base.from_int(v)))

    def name(self, s):
        H = self.H
        if s == "eps" and hasattr(H.base, "eps"):
            return ("H", H.const(H.base.eps))
        if s not in H.index:
            raise ValueError(f"unknown generator '{s}'")
        return ("H", H.gen(H.index[s]))

    def add(self, a, b):
        if a[0] == b[0] == "H":
            return ("H", self.H.add(a[1], b[1]))
        return ("T", self.T.add(self._t(a), self._t(b)))

    def neg(self, a):
        P = self.H if a[0] == "H" else self.T
        return (a[0], P.neg(a[1]))

    def mul(self, a, b):
        if a[0] == b[0] == "H":
            return ("H", _raw_mul(self.H, a[1], b[1]))
        T = self.T
        emb = [v[1] if v[0] == "T" else _scalar(self.H, v[1], T) for v in (a, b)]
        return ("T", T.mul(*emb))

    def pow(self, a, e):
        P = self.H if a[0] == "H" else self.T
        acc = P.one()
        for _ in range(e):
            acc = _raw_mul(P, acc, a[1]) if a[0] == "H" else P.mul(acc, a[1])
        return (a[0], acc)

    def tensor(self, parts):
        if len(parts) != 2:
            raise ValueError("comultiplication terms have exactly two tensor factors")
        if any(k != "H" for k, _ in parts):
            raise ValueError("nested '(x)'")
        return ("T", self.T.pure([f for _, f in parts]))


def _scalar(H, f, T):
    if any(any(m) for m in f):
        raise ValueError("only constants may multiply a tensor")
    c = f.get((0,) * H.ngens, H.base.zero)
    return T.const(c)


def _expr(P, text, line, col):
    try:
        return P.parse(text, line, col)
    except ParseError as exc:
        raise GapError(exc.message, line, exc.col) from None


def parse_gap(text: str):
    """Parse a document into a ``Presentation`` or a ``PointedHopf``."""
    base = None
    scale = 0
    bound = None
    gens = []
    rels, comuls, points = [], [], []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip())
        key, _, rest = line.strip().partition(" ")
        rest = rest.strip()
        col = indent + len(key) + 2
        if key == "base":
            if base is not None:
                raise GapError("duplicate base declaration", ln, indent + 1)
            try:
                base = parse_base(rest)
            except ValueError as exc:
                raise GapError(str(exc), ln, col) from None
        elif key == "scale":
            if not rest.isdigit():
                raise GapError("scale must be a nonnegative integer", ln, col)
            scale = int(rest)
        elif key == "bound":
            bound = _fraction(rest, ln, col)
        elif key == "gen":
            parts = rest.split()
            if len(parts) != 3 or parts[1] != "deg":
                raise GapError("expected 'gen <name> deg <degree>'", ln, col)
            gens.append((parts[0], _fraction(parts[2], ln, col), ln))
        elif key == "rel":
            rels.append((rest, ln, col))
        elif key == "comul":
            name, eq, rhs = rest.partition("=")
            if not eq:
                raise GapError("expected 'comul <gen> = <tensor>'", ln, col)
            comuls.append((name.strip(), rhs, ln, col + len(name) + 1))
        elif key == "point":
            points.append((rest, ln, col))
        else:
            raise GapError(f"unknown keyword '{key}'", ln, indent + 1)
    if base is None:
        raise GapError("no base declaration")
    if bound is None:
        raise GapError("no bound declaration")
    try:
        free = Presentation(base, [(n, d) for n, d, _ in gens], [], bound)
    except PresentationError as exc:
        raise GapError(str(exc), gens[-1][2] if gens else 0) from None
    polys = []
    for k, (src, ln, col) in enumerate(rels):
        f = {m: c for m, c in _expr(free, src, ln, col).items() if not base.is_zero(c)}
        if len({free.mono_ideg(m) for m in f}) > 1:
            raise GapError(f"relation {k + 1} '{src.strip()}' is not homogeneous", ln, col)
        polys.append((f, ln))
    try:
        H = Presentation(base, [(n, d) for n, d, _ in gens], [f for f, _ in polys], bound)
    except PresentationError as exc:
        raise GapError(str(exc), polys[-1][1] if polys else 0) from None
    if not comuls and not points:
        if scale:
            raise GapError("scale given without a Hopf structure")
        return H
    T = tensor_square(H)
    ops = _TensorOps(H, T)
    images = [None] * H.ngens
    for name, src, ln, col in comuls:
        if name not in H.index:
            raise GapError(f"unknown generator '{name}'", ln, col - len(name) - 1)
        if images[H.index[name]] is not None:
            raise GapError(f"duplicate comultiplication for '{name}'", ln, col)
        try:
            v = evaluate(parse_expr(src, ln, col + 1), ops, ln)
        except ParseError as exc:
            raise GapError(exc.message, ln, exc.col) from None
        try:
            images[H.index[name]] = T.nf(ops._t(v))
        except ValueError as exc:
            raise GapError(str(exc), ln, col + 1) from None
    if len(points) != scale + 1:
        raise GapError(f"expected {scale + 1} point line(s), found {len(points)}")
    pts = [H.nf(_expr(H, src, ln, col)) for src, ln, col in points]
    flavor = "GaPerf" if scale else "Ga"
    return PointedHopf(H, images, pts, flavor, scale)


def _fmt_tensor(T, f) -> str:
    if not f:
        return "0"
    A = T.factors[0]
    R = T.base
    terms = []
    for m in sorted(f, key=lambda m: (T.mono_ideg(m), m), reverse=True):
        a, b = T.split(m)
        c = R.fmt(f[m])
        body = f"{A.fmt_mono(a)} (x) {A.fmt_mono(b)}"
        terms.append(body if c == "1" else f"{c}*{body}")
    return " + ".join(terms)


def print_gap(obj) -> str:
    """Canonical document for a ``Presentation`` or ``PointedHopf``."""
    h = obj if isinstance(obj, PointedHopf) else None
    H = h.algebra if h else obj
    lines = [f"base {base_spec(H.base)}"]
    if h and h.flavor == "GaPerf":
        lines.append(f"scale {h.scale}")
    lines.append(f"bound {H.bound}")
    lines += [f"gen {n} deg {d}" for n, d in zip(H.names, H.degrees)]
    lines += [f"rel {H.fmt(r.poly)}" for r in H.relations]
    if h:
        T = h.tensor
        for n, c in zip(H.names, h.comul):
            if c is not None:
                lines.append(f"comul {n} = {_fmt_tensor(T, c)}")
        lines += [f"point {H.fmt(P)}" for P in h.points]
    return "\n".join(lines) + "\n"


def load_gap(path: str):
    with open(path, encoding="utf-8") as fh:
        obj = parse_gap(fh.read())
    stem = os.path.splitext(os.path.basename(path))[0]
    obj.name = stem
    if isinstance(obj, PointedHopf):
        obj.algebra.name = stem
    return obj

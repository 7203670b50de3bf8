"""Truncated p-typical Witt vectors.

The universal addition, multiplication, negation and Frobenius polynomials
are solved over Z from the ghost components and cached in memory and
optionally on disk.  Arithmetic over a coefficient ring evaluates them.
"""

from __future__ import annotations

import itertools
import os
import random
import tempfile
from dataclasses import dataclass
from functools import lru_cache

from .report import Report, failed, passed

MAX_LEN = 6
OPS = ("S", "P", "N", "F")

# ------------------------------------------------------------ integer polys


def _padd(f, g, s=1):
    h = dict(f)
    for m, c in g.items():
        v = h.get(m, 0) + s * c
        if v:
            h[m] = v
        else:
            h.pop(m, None)
    return h


def _pmul(f, g):
    h = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            v = h.get(m, 0) + c1 * c2
            if v:
                h[m] = v
            else:
                h.pop(m, None)
    return h


def _ppow(f, e, nvars):
    r = {(0,) * nvars: 1}
    b = f
    while e:
        if e & 1:
            r = _pmul(r, b)
        e >>= 1
        if e:
            b = _pmul(b, b)
    return r


def _var(i, nvars):
    m = [0] * nvars
    m[i] = 1
    return {tuple(m): 1}


def ghost(p, i, offset, nvars):
    """w_i of the variables starting at ``offset``."""
    out = {}
    for j in range(i + 1):
        out = _padd(out, {m: c * p**j for m, c in _ppow(_var(offset + j, nvars), p ** (i - j), nvars).items()})
    return out


class WittInvariantError(RuntimeError):
    pass


def _solve(p, n_out, targets, nvars):
    """out_i = (target_i - sum_{j<i} p^j out_j^{p^{i-j}}) / p^i, exactly."""
    out = []
    for i in range(n_out):
        acc = dict(targets[i])
        for j in range(i):
            acc = _padd(acc, {m: c * p**j for m, c in _ppow(out[j], p ** (i - j), nvars).items()}, -1)
        q = p**i
        res = {}
        for m, c in acc.items():
            if c % q:
                raise WittInvariantError(f"non-exact division by {q} in index {i}")
            res[m] = c // q
        out.append(res)
    return out


def _compute(p, n, op):
    if op in ("S", "P"):
        nv = 2 * n
        if op == "S":
            targets = [_padd(ghost(p, i, 0, nv), ghost(p, i, n, nv)) for i in range(n)]
        else:
            targets = [_pmul(ghost(p, i, 0, nv), ghost(p, i, n, nv)) for i in range(n)]
        return _solve(p, n, targets, nv)
    if op == "N":
        targets = [{m: -c for m, c in ghost(p, i, 0, n).items()} for i in range(n)]
        return _solve(p, n, targets, n)
    if op == "F":
        targets = [ghost(p, i + 1, 0, n) for i in range(n - 1)]
        return _solve(p, n - 1, targets, n)
    raise ValueError(f"unknown operation {op}")


# -------------------------------------------------------------- disk cache

_cache_dir: str | None = None


def set_cache_dir(path: str | None) -> None:
    global _cache_dir
    _cache_dir = path


def _weight(m, p, n):
    return sum(e * p ** (k % n) for k, e in enumerate(m))


def serialize(p, n, op, polys) -> str:
    lines = []
    for i, f in enumerate(polys):
        lines.append(f"{p} {n} {op} {i}")
        terms = sorted(f.items(), key=lambda t: (_weight(t[0], p, n), t[0]))
        lines.append("".join(f"{c}:{','.join(map(str, m))};" for m, c in terms))
    return "\n".join(lines) + "\n"


def deserialize(text: str, p, n, op):
    lines = text.splitlines()
    if len(lines) % 2:
        raise ValueError("truncated cache file")
    polys = []
    for k in range(0, len(lines), 2):
        hp, hn, hop, hi = lines[k].split()
        if (int(hp), int(hn), hop, int(hi)) != (p, n, op, k // 2):
            raise ValueError(f"unexpected header '{lines[k]}'")
        f = {}
        for term in lines[k + 1].split(";"):
            if not term:
                continue
            c, e = term.split(":")
            f[tuple(int(x) for x in e.split(","))] = int(c)
        polys.append(f)
    return polys


def cache_path(directory, p, n, op):
    return os.path.join(directory, f"witt_p{p}_n{n}_{op}.txt")


def _load_or_compute(p, n, op, directory):
    if directory:
        path = cache_path(directory, p, n, op)
        if os.path.exists(path):
            try:
                with open(path) as fh:
                    return deserialize(fh.read(), p, n, op)
            except (OSError, ValueError):
                pass
    polys = _compute(p, n, op)
    if directory:
        write_cache_file(directory, p, n, op, polys)
    return polys


def write_cache_file(directory, p, n, op, polys) -> str:
    os.makedirs(directory, exist_ok=True)
    path = cache_path(directory, p, n, op)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".witt-")
    with os.fdopen(fd, "w") as fh:
        fh.write(serialize(p, n, op, polys))
    os.replace(tmp, path)
    return path


@lru_cache(maxsize=None)
def _polys_mem(p, n, op, directory):
    return tuple(_load_or_compute(p, n, op, directory))


def structure_polys(p, n, op, cache_dir=None):
    _check(p, n)
    if op == "F" and n < 2:
        raise ValueError("Frobenius needs length at least 2")
    return _polys_mem(p, n, op, cache_dir if cache_dir is not None else _cache_dir)


@dataclass(frozen=True)
class WittStructPolys:
    p: int
    n: int
    S: tuple
    P: tuple
    N: tuple

    def fmt(self, op, i) -> str:
        names = [f"x{j}" for j in range(self.n)] + [f"y{j}" for j in range(self.n)]
        f = getattr(self, op)[i]
        return format_intpoly(f, names, self.p, self.n)


def witt_struct_polys(p, n, cache_dir=None) -> WittStructPolys:
    return WittStructPolys(p, n, structure_polys(p, n, "S", cache_dir),
                           structure_polys(p, n, "P", cache_dir), structure_polys(p, n, "N", cache_dir))


def format_intpoly(f, names, p=2, n=1) -> str:
    if not f:
        return "0"
    terms = sorted(f.items(), key=lambda t: (_weight(t[0], p, n), t[0]), reverse=True)
    out = []
    for m, c in terms:
        mono = "*".join(nm if e == 1 else f"{nm}^{e}" for nm, e in zip(names, m) if e)
        if not mono:
            s = str(abs(c))
        elif abs(c) == 1:
            s = mono
        else:
            s = f"{abs(c)}*{mono}"
        out.append(("-" if c < 0 else "+", s))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, s in out[1:]:
        text += f" {sign} {s}"
    return text


def _check(p, n):
    from .rings import is_prime

    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not 1 <= n <= MAX_LEN:
        raise ValueError(f"length must be in 1..{MAX_LEN}, got {n}")


# ---------------------------------------------------------------- evaluation


def evaluate(poly, values, ring):
    """Evaluate an integer polynomial at ring elements."""
    if hasattr(ring, "m") and isinstance(values[0], int):
        m = ring.m
        tot = 0
        for mono, c in poly.items():
            t = c
            for v, e in zip(values, mono):
                if e:
                    t = t * pow(v, e, m) % m
            tot += t
        return tot % m
    powers = {}

    def pw(i, e):
        key = (i, e)
        if key not in powers:
            if e == 1:
                powers[key] = values[i]
            else:
                h = pw(i, e // 2)
                r = ring.mul(h, h)
                powers[key] = ring.mul(r, values[i]) if e % 2 else r
        return powers[key]

    acc = ring.zero
    for mono, c in poly.items():
        t = ring.from_int(c)
        for i, e in enumerate(mono):
            if e and not ring.is_zero(t):
                t = ring.mul(t, pw(i, e))
        acc = ring.add(acc, t)
    return acc


class WittVector:
    __slots__ = ("p", "ring", "entries")

    def __init__(self, p, ring, entries):
        self.p = p
        self.ring = ring
        self.entries = tuple(entries)

    @property
    def n(self):
        return len(self.entries)

    def __repr__(self):
        return "W(" + ",".join(self.ring.fmt(e) if hasattr(self.ring, "fmt") else str(e)
                               for e in self.entries) + ")"

    def _same(self, other):
        if not isinstance(other, WittVector) or other.p != self.p or other.n != self.n \
                or other.ring != self.ring:
            raise ValueError("Witt vectors have mismatched (p, n, base)")

    def __eq__(self, other):
        self._same(other)
        R = self.ring
        return all(R.is_zero(R.sub(a, b)) for a, b in zip(self.entries, other.entries))

    def __hash__(self):
        return hash(self.entries) if isinstance(self.entries[0], (int, tuple)) else 0

    def __add__(self, other):
        return witt_add(self, other)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __neg__(self):
        return witt_neg(self)

    def __sub__(self, other):
        return witt_add(self, witt_neg(other))

    def is_zero(self):
        return all(self.ring.is_zero(e) for e in self.entries)


def _binary(op, x, y):
    x._same(y)
    polys = structure_polys(x.p, x.n, op)
    vals = list(x.entries) + list(y.entries)
    return WittVector(x.p, x.ring, [evaluate(f, vals, x.ring) for f in polys])


def witt_add(x, y):
    return _binary("S", x, y)


def witt_mul(x, y):
    return _binary("P", x, y)


def witt_neg(x):
    if x.p != 2:
        return WittVector(x.p, x.ring, [x.ring.neg(a) for a in x.entries])
    polys = structure_polys(x.p, x.n, "N")
    return WittVector(x.p, x.ring, [evaluate(f, list(x.entries), x.ring) for f in polys])


def witt_zero(p, n, ring):
    return WittVector(p, ring, [ring.zero] * n)


def witt_one(p, n, ring):
    return witt_teichmuller(ring.one, n, p, ring)


def witt_teichmuller(b, n, p, ring):
    return WittVector(p, ring, [b] + [ring.zero] * (n - 1))


def witt_from_int(k, p, n, ring):
    """Image of the integer k under Z -> W_n(ring)."""
    neg = k < 0
    k = abs(k)
    acc = witt_zero(p, n, ring)
    b = witt_one(p, n, ring)
    while k:
        if k & 1:
            acc = acc + b
        k >>= 1
        if k:
            b = b + b
    return -acc if neg else acc


def witt_frobenius(x, universal: bool = False):
    """F: W_n -> W_{n-1}."""
    if x.n < 2:
        raise ValueError("Frobenius of a length-1 vector has length 0")
    R = x.ring
    if getattr(R, "char_p", False) and not universal:
        return WittVector(x.p, R, [_rpow(R, a, x.p) for a in x.entries[:-1]])
    polys = structure_polys(x.p, x.n, "F")
    return WittVector(x.p, R, [evaluate(f, list(x.entries), R) for f in polys])


def _rpow(R, a, e):
    r = R.one
    b = a
    while e:
        if e & 1:
            r = R.mul(r, b)
        e >>= 1
        if e:
            b = R.mul(b, b)
    return r


def witt_verschiebung(x, length=None):
    """V: W_n -> W_{n+1}, truncated to ``length`` (default n+1, capped)."""
    length = min(x.n + 1, MAX_LEN) if length is None else length
    ent = ([x.ring.zero] + list(x.entries))[:length]
    ent += [x.ring.zero] * (length - len(ent))
    return WittVector(x.p, x.ring, ent)


def truncate(x, n):
    return WittVector(x.p, x.ring, x.entries[:n])


def random_vector(p, n, ring, rng):
    return WittVector(p, ring, [ring.random(rng) for _ in range(n)])


# ------------------------------------------------------------ quotient check


def witt_quotient_check(base, n, p=None, samples=300, seed=0) -> Report:
    """W_n(base) -> base, x -> x_0, is onto with kernel V W_{n-1}(base)."""
    name = f"W_{n}({base})/V = base"
    if hasattr(base, "ngens"):
        from .algebra import AlgebraRing

        base = AlgebraRing(base)
    p = base.p if p is None else p
    if n == 1:
        return passed(name, note="vacuous")
    R = base
    polysS = structure_polys(p, n, "S")
    polysP = structure_polys(p, n, "P")
    nv = 2 * n
    x0 = _var(0, nv)
    y0 = _var(n, nv)
    if polysS[0] != _padd(x0, y0) or polysP[0] != _pmul(x0, y0):
        return failed(name, "zeroth structure polynomials are not x0+y0 and x0*y0")
    finite = hasattr(R, "elements")
    if finite and len(R.elements()) ** n <= 4096:
        elems = R.elements()
        vecs = [WittVector(p, R, e) for e in itertools.product(elems, repeat=n)]
        kernel = {v.entries for v in vecs if R.is_zero(v.entries[0])}
        image = {witt_verschiebung(WittVector(p, R, e), n).entries
                 for e in itertools.product(elems, repeat=n - 1)}
        if kernel != image:
            return failed(name, f"kernel has {len(kernel)} elements, V-image {len(image)}")
        hit = {v.entries[0] for v in vecs}
        if len(hit) != len(elems):
            return failed(name, "projection is not surjective")
        rng = random.Random(seed)
        pairs = [(rng.choice(vecs), rng.choice(vecs)) for _ in range(samples)]
    else:
        rng = random.Random(seed)
        pairs = [(random_vector(p, n, R, rng), random_vector(p, n, R, rng)) for _ in range(samples)]
        for x, _ in pairs[:50]:
            z = WittVector(p, R, (R.zero,) + x.entries[1:])
            v = witt_verschiebung(WittVector(p, R, x.entries[1:]), n)
            if not z == v:
                return failed(name, f"{z} is not in the image of V")
    for x, y in pairs:
        s = (x + y).entries[0]
        if not R.is_zero(R.sub(s, R.add(x.entries[0], y.entries[0]))):
            return failed(name, f"projection not additive on {x}, {y}")
        m = (x * y).entries[0]
        if not R.is_zero(R.sub(m, R.mul(x.entries[0], y.entries[0]))):
            return failed(name, f"projection not multiplicative on {x}, {y}")
    return passed(name)

"""Independent reference computations used to derive frozen test values.

Nothing here imports the package's arithmetic; each oracle recomputes its
answer from first principles with plain integers.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def pascal(m: int, k: int) -> int:
    """C(m, k) from Pascal's rule, no factorials."""
    if k < 0 or k > m:
        return 0
    row = [1]
    for _ in range(m):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row[k]


# ------------------------------------------------------------------ Witt


def ghost(p, xs):
    return [sum(p**j * xs[j] ** (p ** (i - j)) for j in range(i + 1)) for i in range(len(xs))]


def unghost(p, ws):
    """Integer Witt coordinates with the given ghost components."""
    xs = []
    for i, w in enumerate(ws):
        rest = w - sum(p**j * xs[j] ** (p ** (i - j)) for j in range(i))
        q, r = divmod(rest, p**i)
        assert r == 0, "ghost vector is not integral"
        xs.append(q)
    return xs


def witt_op(p, op, x, y, modulus):
    """Witt sum or product of integer lifts, reduced mod ``modulus``."""
    gx, gy = ghost(p, list(x)), ghost(p, list(y))
    if op == "add":
        g = [a + b for a, b in zip(gx, gy)]
    else:
        g = [a * b for a, b in zip(gx, gy)]
    return tuple(c % modulus for c in unghost(p, g))


# ------------------------------------------------------------------ linear algebra


def rank_mod_p(rows, p):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def monomial_dims(degrees, caps, bound):
    """Graded dimensions of base[g_i]/(g_i^{cap_i}) below ``bound``."""
    out = {}
    degrees = [Fraction(d) for d in degrees]
    ranges = [range(int(Fraction(bound) / d) + 1 if c is None else min(c, int(Fraction(bound) / d) + 1))
              for d, c in zip(degrees, caps)]
    for es in itertools.product(*ranges):
        d = sum(e * g for e, g in zip(es, degrees))
        if d < bound:
            out[d] = out.get(d, 0) + 1
    return out


# ------------------------------------------------------------------ tilt of Z/p^2[y^{1/p^K}]/(y^N)


class FracPolyRing:
    """(Z/p^2)[y^{1/p^K}]/(y^N) with elements {exponent (Fraction): coeff}."""

    def __init__(self, p, K, N, modulus):
        self.p, self.K, self.N, self.m = p, K, N, modulus

    def mul(self, a, b):
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = e1 + e2
                if e < self.N:
                    out[e] = (out.get(e, 0) + c1 * c2) % self.m
        return {e: c for e, c in out.items() if c}

    def add(self, *xs):
        out = {}
        for a in xs:
            for e, c in a.items():
                out[e] = (out.get(e, 0) + c) % self.m
        return {e: c for e, c in out.items() if c}

    def scale(self, k, a):
        return {e: c * k % self.m for e, c in a.items() if c * k % self.m}

    def pow(self, a, n):
        r = {Fraction(0): 1}
        for _ in range(n):
            r = self.mul(r, a)
        return r

    def reduce_p(self, a):
        return {e: c % self.p for e, c in a.items() if c % self.p}


def flat_sequence(R: FracPolyRing, top, depth):
    """(a_0, ..., a_depth) in the tilt of R from a residue ``top`` at level depth+1.

    abar_{depth+1} = top and abar_n = abar_{n+1}^p in R/p; a_n = lift(abar_{n+1})^p.
    """
    p = R.p
    bars = [None] * (depth + 2)
    bars[depth + 1] = R.reduce_p(top)
    for n in range(depth, -1, -1):
        bars[n] = R.reduce_p(R.pow(bars[n + 1], p))
    return [R.pow(bars[n + 1], p) for n in range(depth + 1)]


def flat_sum(R: FracPolyRing, a, b, n, steps):
    """(a + b)_n = lim_m (a_{n+m} + b_{n+m})^{p^m}, returned with the list of approximants."""
    vals = [R.pow(R.add(a[n + m], b[n + m]), R.p**m) for m in range(1, steps + 1)]
    return vals[-1], vals

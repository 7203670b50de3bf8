"""Coefficient rings with exact arithmetic.

Every ring exposes the same small interface so that polynomial code can be
written once: ``zero``, ``one``, ``add``, ``sub``, ``neg``, ``mul``,
``from_int``, ``is_zero``, ``is_unit``, ``inv``, ``residue`` (reduction to
F_p as an int), ``lift`` (F_p int back into the ring) and ``in_socle``
(the element kills the maximal ideal).
"""

from __future__ import annotations

import random


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def prime_power(m: int) -> tuple[int, int]:
    """Return (p, n) with m = p^n, or raise ValueError."""
    if m < 2:
        raise ValueError(f"{m} is not a prime power")
    p = 2
    while m % p:
        p += 1
    n, r = 0, m
    while r % p == 0:
        r //= p
        n += 1
    if r != 1:
        raise ValueError(f"{m} is not a prime power")
    return p, n


class ZMod:
    """Z/p^n with canonical representatives in [0, p^n)."""

    def __init__(self, p: int, n: int = 1):
        if not is_prime(p) or p > 97:
            raise ValueError(f"unsupported prime {p}")
        if not 1 <= n <= 8:
            raise ValueError(f"unsupported exponent {n}")
        self.p = p
        self.n = n
        self.m = p**n
        self.zero = 0
        self.one = 1 % self.m
        self.char_p = n == 1

    def __repr__(self):
        return f"F_{self.p}" if self.n == 1 else f"Z/{self.m}"

    def __eq__(self, other):
        return isinstance(other, ZMod) and other.m == self.m

    def __hash__(self):
        return hash(("ZMod", self.m))

    def add(self, a, b):
        return (a + b) % self.m

    def sub(self, a, b):
        return (a - b) % self.m

    def neg(self, a):
        return (-a) % self.m

    def mul(self, a, b):
        return (a * b) % self.m

    def from_int(self, k: int):
        return k % self.m

    def is_zero(self, a) -> bool:
        return a == 0

    def is_unit(self, a) -> bool:
        return a % self.p != 0

    def in_socle(self, a) -> bool:
        return a % (self.m // self.p) == 0

    def inv(self, a):
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit in {self}")
        return pow(a, -1, self.m)

    def residue(self, a) -> int:
        return a % self.p

    def lift(self, r: int):
        return r % self.p

    def elements(self):
        return list(range(self.m))

    def random(self, rng: random.Random):
        return rng.randrange(self.m)

    def fmt(self, a) -> str:
        return str(a)


class DualNumbers:
    """F_p[eps]/eps^2 with elements (a, b) meaning a + b*eps."""

    def __init__(self, p: int):
        if not is_prime(p) or p > 97:
            raise ValueError(f"unsupported prime {p}")
        self.p = p
        self.zero = (0, 0)
        self.one = (1, 0)
        self.eps = (0, 1)
        self.char_p = True

    def __repr__(self):
        return f"F_{self.p}[eps]"

    def __eq__(self, other):
        return isinstance(other, DualNumbers) and other.p == self.p

    def __hash__(self):
        return hash(("Dual", self.p))

    def add(self, x, y):
        p = self.p
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p)

    def sub(self, x, y):
        p = self.p
        return ((x[0] - y[0]) % p, (x[1] - y[1]) % p)

    def neg(self, x):
        p = self.p
        return ((-x[0]) % p, (-x[1]) % p)

    def mul(self, x, y):
        p = self.p
        return ((x[0] * y[0]) % p, (x[0] * y[1] + x[1] * y[0]) % p)

    def from_int(self, k):
        return (k % self.p, 0)

    def is_zero(self, x):
        return x[0] == 0 and x[1] == 0

    def is_unit(self, x):
        return x[0] != 0

    def in_socle(self, x):
        return x[0] == 0

    def inv(self, x):
        if x[0] == 0:
            raise ZeroDivisionError(f"{x} is not a unit")
        p = self.p
        a = pow(x[0], -1, p)
        return (a, (-x[1] * a * a) % p)

    def residue(self, x):
        return x[0]

    def lift(self, r):
        return (r % self.p, 0)

    def elements(self):
        return [(a, b) for a in range(self.p) for b in range(self.p)]

    def random(self, rng):
        return (rng.randrange(self.p), rng.randrange(self.p))

    def fmt(self, x) -> str:
        a, b = x
        if b == 0:
            return str(a)
        e = "eps" if b == 1 else f"{b}*eps"
        return e if a == 0 else f"({a}+{e})"


class FirstOrder:
    """F_p[eps]/eps^2 with the eps-part linear in a set of unknowns.

    An element is ``(a, lin)`` meaning ``a + eps * (lin[None] + sum lin[k] u_k)``.
    Products are exact because eps^2 = 0, so the constraints of a deformation
    problem come out as linear equations in the u_k.
    """

    def __init__(self, p: int):
        self.p = p
        self.zero = (0, {})
        self.one = (1, {})
        self.char_p = True

    def __repr__(self):
        return f"F_{self.p}[eps]<lin>"

    def __eq__(self, other):
        return isinstance(other, FirstOrder) and other.p == self.p

    def __hash__(self):
        return hash(("FirstOrder", self.p))

    def unknown(self, k, c: int = 1):
        return (0, {k: c % self.p})

    def add(self, x, y):
        p = self.p
        a = (x[0] + y[0]) % p
        if not y[1]:
            return (a, x[1])
        if not x[1]:
            return (a, y[1])
        lin = dict(x[1])
        for k, c in y[1].items():
            v = (lin.get(k, 0) + c) % p
            if v:
                lin[k] = v
            else:
                lin.pop(k, None)
        return (a, lin)

    def neg(self, x):
        p = self.p
        return ((-x[0]) % p, {k: (-c) % p for k, c in x[1].items()})

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def _scale_lin(self, c, lin):
        p = self.p
        c %= p
        if c == 0:
            return {}
        if c == 1:
            return lin
        return {k: (v * c) % p for k, v in lin.items()}

    def mul(self, x, y):
        p = self.p
        a = (x[0] * y[0]) % p
        if not x[1] and not y[1]:
            return (a, {})
        lin = self._scale_lin(y[0], x[1])
        if y[1] and x[0]:
            lin = self.add((0, lin), (0, self._scale_lin(x[0], y[1])))[1]
        return (a, lin)

    def from_int(self, k):
        return (k % self.p, {})

    def is_zero(self, x):
        return x[0] == 0 and not x[1]

    def is_unit(self, x):
        return x[0] != 0

    def in_socle(self, x):
        return x[0] == 0

    def inv(self, x):
        if x[0] == 0:
            raise ZeroDivisionError("not a unit")
        a = pow(x[0], -1, self.p)
        return (a, self._scale_lin(-a * a, x[1]))

    def residue(self, x):
        return x[0]

    def lift(self, r):
        return (r % self.p, {})

    def fmt(self, x) -> str:
        return repr(x)


def to_first_order(ring, c):
    """Embed an element of F_p or F_p[eps] into FirstOrder."""
    if isinstance(ring, DualNumbers):
        return (c[0], {None: c[1]} if c[1] else {})
    if isinstance(ring, ZMod) and ring.n == 1:
        return (c, {})
    if isinstance(ring, FirstOrder):
        return c
    raise ValueError(f"cannot embed {ring} into first-order coefficients")


def first_order_to_dual(x, p):
    """Inverse of :func:`to_first_order` for elements without unknowns."""
    lin = x[1]
    extra = set(lin) - {None}
    if extra:
        raise ValueError(f"element still depends on unknowns {sorted(map(str, extra))}")
    return (x[0] % p, lin.get(None, 0) % p)


def parse_base(spec: str):
    """Parse ``Fp 2``, ``Zmod 4`` or ``Fp 2 eps``."""
    parts = spec.split()
    if len(parts) == 2 and parts[0] == "Fp":
        return ZMod(int(parts[1]))
    if len(parts) == 3 and parts[0] == "Fp" and parts[2] == "eps":
        return DualNumbers(int(parts[1]))
    if len(parts) == 2 and parts[0] == "Zmod":
        p, n = prime_power(int(parts[1]))
        return ZMod(p, n)
    raise ValueError(f"unknown base '{spec}'")


def base_spec(ring) -> str:
    if isinstance(ring, DualNumbers):
        return f"Fp {ring.p} eps"
    if isinstance(ring, ZMod):
        return f"Fp {ring.p}" if ring.n == 1 else f"Zmod {ring.m}"
    raise ValueError(f"ring {ring} has no textual form")

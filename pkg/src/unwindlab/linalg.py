"""Sparse exact linear algebra over F_p.

Vectors are dicts ``{column: value}`` with integer columns and nonzero
values in [1, p).  :class:`Echelon` keeps a reduced row echelon form that can
be grown one row at a time, optionally tracking the combination of input
rows that produced each stored row (used for inconsistency certificates).
"""

from __future__ import annotations


def _axpy(y: dict, a: int, x: dict, p: int) -> None:
    """y += a*x in place."""
    for k, v in x.items():
        w = (y.get(k, 0) + a * v) % p
        if w:
            y[k] = w
        else:
            y.pop(k, None)


class Echelon:
    def __init__(self, p: int, track: bool = False):
        self.p = p
        self.track = track
        self.rows: dict[int, tuple[dict, int, dict]] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, vec: dict, rhs: int = 0, combo: dict | None = None):
        p = self.p
        v = {k: x % p for k, x in vec.items() if x % p}
        combo = dict(combo) if combo else {}
        for c in [c for c in v if c in self.rows]:
            a = v.get(c, 0)
            if not a:
                continue
            row, r, cmb = self.rows[c]
            _axpy(v, -a, row, p)
            rhs = (rhs - a * r) % p
            if self.track:
                _axpy(combo, -a, cmb, p)
        return v, rhs, combo

    def add(self, vec: dict, rhs: int = 0, tag=None) -> str:
        """Insert a row; return 'new', 'dependent' or 'inconsistent'."""
        p = self.p
        combo = {tag: 1} if (self.track and tag is not None) else {}
        v, r, combo = self.reduce(vec, rhs, combo)
        if not v:
            if r:
                self.certificate = combo
                return "inconsistent"
            return "dependent"
        c = min(v)
        inv = pow(v[c], -1, p)
        v = {k: (x * inv) % p for k, x in v.items()}
        r = (r * inv) % p
        if self.track:
            combo = {k: (x * inv) % p for k, x in combo.items() if (x * inv) % p}
        for c2, (row, r2, cmb2) in list(self.rows.items()):
            a = row.get(c, 0)
            if a:
                row = dict(row)
                _axpy(row, -a, v, p)
                r2 = (r2 - a * r) % p
                if self.track:
                    cmb2 = dict(cmb2)
                    _axpy(cmb2, -a, combo, p)
                self.rows[c2] = (row, r2, cmb2)
        self.rows[c] = (v, r, combo)
        return "new"

    def contains(self, vec: dict) -> bool:
        v, _, _ = self.reduce(vec)
        return not v

    def particular(self) -> dict:
        """A solution with all free variables set to zero."""
        return {c: r for c, (row, r, _) in self.rows.items() if r}

    def kernel(self, columns) -> list[dict]:
        """Basis of the solution space of the homogeneous system."""
        p = self.p
        pivots = self.rows
        basis = []
        for f in columns:
            if f in pivots:
                continue
            x = {f: 1}
            for c, (row, _, _) in pivots.items():
                a = row.get(f, 0)
                if a:
                    x[c] = (-a) % p
            basis.append(x)
        return basis


def rank(rows, p: int) -> int:
    e = Echelon(p)
    for r in rows:
        e.add(r)
    return len(e)


def nullspace(rows, columns, p: int) -> list[dict]:
    e = Echelon(p)
    for r in rows:
        e.add(r)
    return e.kernel(columns)


class Inconsistent(Exception):
    def __init__(self, certificate: dict):
        super().__init__("linear system is inconsistent")
        self.certificate = certificate


def solve_affine(equations, columns, p: int):
    """Solve ``sum vec[c] x_c = rhs`` for a list of ``(vec, rhs)`` pairs.

    Returns ``(particular, kernel_basis)``.  Raises :class:`Inconsistent`
    carrying the indices of equations whose combination reads ``0 = nonzero``.
    """
    e = Echelon(p, track=True)
    for i, (vec, rhs) in enumerate(equations):
        if e.add(vec, rhs, tag=i) == "inconsistent":
            raise Inconsistent(e.certificate)
    return e.particular(), e.kernel(columns)

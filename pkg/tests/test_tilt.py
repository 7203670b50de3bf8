import itertools
from fractions import Fraction

import pytest

from unwindlab import tilt as tl
from unwindlab.algebra import AlgebraRing, Presentation, quotient_dims
from unwindlab.hopf import UnsupportedError
from unwindlab.rings import DualNumbers, ZMod
from unwindlab.witt import WittVector, witt_from_int


# ------------------------------------------------------------ truncated tilts


@pytest.mark.parametrize("p,variables,k,N", [(2, ("x",), 1, 4), (3, ("x",), 1, 3), (2, ("x",), 2, 8),
                                             (2, ("x", "y"), 1, 2)])
def test_verify_tilt(p, variables, k, N):
    r = tl.verify_tilt(tl.qrsp(p, variables, k=k, N=N), k, N)
    assert r.ok, r.witness


def test_verify_tilt_needs_p_power_truncation():
    with pytest.raises(UnsupportedError):
        tl.verify_tilt(tl.qrsp(2, ("x",), k=1, N=3), 1, 3)


def test_verify_tilt_needs_full_ideal():
    with pytest.raises(UnsupportedError):
        tl.verify_tilt(tl.qrsp(2, ("x", "y"), ideal=("x",), k=1, N=2), 1, 2)


def test_tilt_of_zero_ideal_is_the_perfect_ring():
    q = tl.qrsp(2, ("x",), ideal=(), k=1, N=4)
    T, ideal = tl.tilt(q)
    assert ideal == () and T is q.perfect


def test_unknown_ideal_variable():
    with pytest.raises(ValueError):
        tl.qrsp(2, ("x",), ideal=("y",))


# ------------------------------------------------------------ finite tilts


@pytest.mark.parametrize("R", [DualNumbers(2), DualNumbers(3), ZMod(2, 2), ZMod(3, 2), ZMod(2, 3)])
def test_tilt_of_finite_local_rings_is_the_residue_field(R):
    T = tl.tilt_finite(R)
    assert len(T) == R.p and tl.is_prime_field(T)


def test_tilt_of_truncated_polynomials():
    P = Presentation(ZMod(2), [("t", 1)], ["t^3"], 3)
    T = tl.tilt_finite(P)
    assert len(T) == 2 and tl.is_prime_field(T)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_tilt_of_a_perfect_ring_is_itself(p):
    F = ZMod(p)
    assert tl.same_tables(tl.tilt_finite(F), tl.as_finite_ring(F))


def test_tilt_is_idempotent():
    T = tl.tilt_finite(DualNumbers(3))
    TT = tl.tilt_finite(T)
    assert len(TT) == len(T) and tl.is_prime_field(TT)


class _W2:
    """W_2(B) for a finite B, with hashable tuple labels."""

    def __init__(self, P):
        self.B = AlgebraRing(P)
        self.P = P
        self.p = P.base.p
        self.zero = self._label(witt_from_int(0, self.p, 2, self.B))
        self.one = self._label(witt_from_int(1, self.p, 2, self.B))

    def _label(self, w):
        return tuple(tuple(sorted(e.items())) for e in w.entries)

    def _vec(self, lab):
        return WittVector(self.p, self.B, [dict(e) for e in lab])

    def elements(self):
        els = list(tl.algebra_elements(self.P))
        return [self._label(WittVector(self.p, self.B, pair)) for pair in itertools.product(els, repeat=2)]

    def add(self, a, b):
        return self._label(self._vec(a) + self._vec(b))

    def mul(self, a, b):
        return self._label(self._vec(a) * self._vec(b))


def test_tilt_of_witt_vectors_equals_tilt_of_base():
    P = Presentation(ZMod(2), [("t", 1)], ["t^2"], 2)
    W = tl.as_finite_ring(_W2(P))
    assert len(W) == 16
    TW, TB = tl.tilt_finite(W), tl.tilt_finite(P)
    assert len(TW) == len(TB) == 2
    assert tl.is_prime_field(TW) and tl.is_prime_field(TB)


def test_enumeration_limit():
    P = Presentation(ZMod(3), [("t", 1)], ["t^9"], 9)
    with pytest.raises(UnsupportedError):
        tl.as_finite_ring(P)


# ------------------------------------------------------------ W_A


def test_w_a_over_prime_field_is_identity():
    B = tl.TruncatedPerfect(2, ("x",), 1, 2).pres
    assert tl.w_A(B, ZMod(2)) is B


@pytest.mark.parametrize("A", [ZMod(2, 2), ZMod(2, 3), DualNumbers(2)])
def test_w_a_keeps_the_monomial_basis(A):
    B = tl.TruncatedPerfect(2, ("x",), 1, 2).pres
    WA = tl.w_A(B, A)
    assert WA.base == A and WA.hilbert() == B.hilbert()


def test_w_a_rejects_a_mismatched_prime():
    B = tl.TruncatedPerfect(2, ("x",), 1, 2).pres
    with pytest.raises(UnsupportedError):
        tl.w_A(B, ZMod(3))


@pytest.mark.parametrize("B,n", [(Presentation(ZMod(2), [], [], 1), 2), (Presentation(ZMod(3), [], [], 1), 2),
                                 (tl.TruncatedPerfect(2, ("x",), 1, 2).pres, 2)])
def test_check_w_a(B, n):
    r = tl.check_w_A(B, n)
    assert r.ok, r.witness


# ------------------------------------------------------------ dR of QRSP quotients


@pytest.mark.parametrize("q,bound", [(tl.qrsp(2, ("x",), k=1, N=4), 4), (tl.qrsp(3, ("x",), k=1, N=3), 3),
                                     (tl.qrsp(2, ("x",), ideal=(), k=1, N=4), 4)])
def test_nw2(q, bound):
    r = tl.check_nw2(q, bound)
    assert r.ok, r.witness


@pytest.mark.parametrize("q", [tl.qrsp(2, ("x",), k=1, N=4), tl.qrsp(2, ("x", "y"), ideal=("x",), k=1, N=2),
                               tl.qrsp(3, ("x",), k=1, N=3)])
def test_dr_gr0_is_s(q):
    r = tl.check_dr_gr0(q)
    assert r.ok, r.witness


def test_quotient_matches_ideal_quotient():
    q = tl.qrsp(2, ("x", "y"), ideal=("y",), k=2, N=2)
    B = q.perfect.pres
    assert q.quotient().hilbert() == quotient_dims(B, q.ideal_polys())


def test_degree_of_the_perfect_variable():
    T = tl.TruncatedPerfect(3, ("x",), 2, 2)
    assert T.pres.degrees == [Fraction(1, 9)]
    assert T.pres.mono_degree(next(iter(T.var("x")))) == 1

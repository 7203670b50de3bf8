from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import monomial_dims, pascal
from unwindlab.algebra import (Presentation, PresentationError, TruncationError, binomial, quotient_dims,
                               tensor_presentation, trivial_algebra)
from unwindlab.hopf import build_cart_x, build_cart_y, build_wk_f
from unwindlab.rings import DualNumbers, FirstOrder, ZMod, parse_base, prime_power


# ------------------------------------------------------------ binomial


def test_binomial_frozen_values():
    # Pascal oracle: C(5,2) = 10, C(4,2) = 6 (even, so zero over F_2)
    assert binomial(5, 2) == pascal(5, 2) == 10
    assert binomial(4, 2) == pascal(4, 2) == 6
    assert binomial(4, 2) % 2 == 0


@given(st.integers(0, 60))
def test_binomial_empty_choice(n):
    assert binomial(n, 0) == 1


@given(st.integers(0, 40), st.integers(0, 40))
def test_binomial_matches_pascal(m, k):
    assert binomial(m, k) == pascal(m, k)


# ------------------------------------------------------------ coefficient rings


@pytest.mark.parametrize("text", ["Fp 2", "Fp 3", "Zmod 4", "Zmod 27", "Fp 5 eps"])
def test_reduction_to_residue_field_is_a_ring_map(text):
    R = parse_base(text)
    els = R.elements()
    for a in els:
        for b in els:
            assert R.residue(R.add(a, b)) == (R.residue(a) + R.residue(b)) % R.p
            assert R.residue(R.mul(a, b)) == R.residue(a) * R.residue(b) % R.p


def test_prime_power_parsing():
    assert prime_power(27) == (3, 3)
    with pytest.raises(ValueError):
        prime_power(12)


def test_first_order_ring_tracks_linear_terms():
    F = FirstOrder(2)
    a = F.add(F.from_int(1), F.unknown("c"))
    sq = F.mul(a, a)
    assert F.residue(sq) == 1 and F.is_zero(F.sub(sq, F.from_int(1)))


# ------------------------------------------------------------ normal forms


def test_relation_applied_once():
    P = Presentation(ZMod(2), [("x0", 1)], ["x0^2"], 4)
    assert P.normal_form(P.parse("x0^2")) == {}


def test_nilpotent_chain_over_dual_numbers():
    # x0^4 -> (eps x1)^2 -> eps^2 x1^2 -> 0
    P = Presentation(DualNumbers(2), [("x0", 1), ("x1", 2)], ["x0^2 + eps*x1", "x1^2"], 5)
    assert P.normal_form(P.parse("x0^4")) == {}
    assert P.normal_form(P.parse("x0^2")) == P.parse("eps*x1")


def test_commutative_sorting():
    P = Presentation(ZMod(3), [("x0", 1), ("x1", 1)], [], 4)
    assert P.parse("x1*x0") == P.parse("x0*x1")


def test_normal_form_truncation_error():
    P = Presentation(ZMod(2), [("x", 1)], [], 3)
    with pytest.raises(TruncationError):
        P.normal_form(P.parse("x^3"))


def test_relation_must_lead_with_a_pure_power():
    with pytest.raises(PresentationError):
        Presentation(ZMod(2), [("x", 1), ("y", 1)], ["x*y"], 4)


def test_inhomogeneous_relation_is_rejected():
    with pytest.raises(PresentationError, match="not homogeneous"):
        Presentation(ZMod(2), [("x", 1)], ["x^2 + x"], 4)


# ------------------------------------------------------------ graded bases


def test_graded_basis_of_w2f():
    H = build_wk_f(2, 2).algebra
    assert [H.fmt_mono(m) for m in H.graded_basis(2)] == ["t1"]


def test_graded_basis_fractional():
    P = Presentation(ZMod(2), [("x_r2", Fraction(1, 2))], ["x_r2^2"], 2)
    assert [P.fmt_mono(m) for m in P.graded_basis(Fraction(1, 2))] == ["x_r2"]


@pytest.mark.parametrize("P", [build_wk_f(3, 2).algebra, build_cart_x(2, 1, 1).algebra,
                               Presentation(ZMod(2), [("x", Fraction(1, 4))], ["x^4"], 3)])
def test_connected_degree_zero(P):
    assert P.graded_basis(0) == [(0,) * P.ngens]


@pytest.mark.parametrize("h", [build_wk_f(2, 3, bound=9), build_cart_x(2, 1, 1), build_cart_y(3, 1, 1)])
def test_hilbert_matches_monomial_count(h):
    H = h.algebra
    caps = [r.exp for r in sorted(H.relations, key=lambda r: r.gen)]
    assert H.hilbert() == monomial_dims(H.degrees, caps, H.bound)


@given(st.permutations(range(3)))
def test_basis_sizes_invariant_under_renaming(perm):
    H = build_wk_f(2, 3, bound=9).algebra
    names = [H.names[i] + "z" for i in perm]
    assert H.renamed(names).hilbert() == H.hilbert()


# ------------------------------------------------------------ tensor products


def test_tensor_of_dual_numbers_algebras():
    A = Presentation(ZMod(2), [("x", 1)], ["x^2"], 4)
    B = Presentation(ZMod(2), [("y", 1)], ["y^2"], 4)
    T = tensor_presentation(A, B)
    assert [T.fmt_mono(m) for m in T.graded_basis(2)] == ["x*y"]


def test_tensor_with_trivial_algebra():
    A = build_wk_f(2, 2).algebra
    T = tensor_presentation(A, trivial_algebra(ZMod(2), A.bound))
    assert T.hilbert() == A.hilbert()


def test_tensor_base_mismatch():
    with pytest.raises(PresentationError):
        tensor_presentation(trivial_algebra(ZMod(2)), trivial_algebra(ZMod(3)))


@pytest.mark.parametrize("a,b", [(build_cart_x(2, 1, 1).algebra, build_cart_y(2, 1, 1).algebra),
                                 (build_wk_f(3, 2).algebra, build_wk_f(3, 1, bound=10).algebra)])
def test_tensor_dimension_convolution(a, b):
    T = tensor_presentation(a, b)
    da, db = a.hilbert(), b.hilbert()
    want = {}
    for d1, n1 in da.items():
        for d2, n2 in db.items():
            if d1 + d2 < T.bound:
                want[d1 + d2] = want.get(d1 + d2, 0) + n1 * n2
    assert T.hilbert() == want


# ------------------------------------------------------------ properties of nf


def _pres():
    return Presentation(ZMod(2, 2), [("a", 1), ("b", 2)], ["a^2 + 2*b", "b^2"], 7)


def _poly_strategy(P):
    monos = P.all_basis() + [(3, 0), (2, 1), (4, 1), (1, 2)]
    return st.dictionaries(st.sampled_from(monos), st.integers(1, 3), max_size=6)


P0 = _pres()


@given(_poly_strategy(P0), _poly_strategy(P0), st.integers(0, 3))
def test_nf_idempotent_additive_linear(f, g, c):
    P = P0
    nf = P.nf
    assert nf(nf(f)) == nf(f)
    assert nf(P.add(f, g)) == P.add(nf(f), nf(g))
    assert nf(P.scale(c, f)) == P.scale(c, nf(f))


@given(_poly_strategy(P0), _poly_strategy(P0))
def test_truncation_soundness(f, g):
    big = P0.with_bound(12)
    small = P0
    prod_small = small.mul(small.nf(f), small.nf(g))
    prod_big = big.nf(big.mul(big.nf(f), big.nf(g)))
    trunc = {m: c for m, c in prod_big.items() if small.mono_degree(m) < small.bound}
    assert prod_small == trunc


def test_quotient_dims_of_monomial_ideal():
    P = Presentation(ZMod(2), [("x", 1), ("y", 1)], [], 4)
    got = quotient_dims(P, [P.parse("x")])
    assert got == {Fraction(0): 1, Fraction(1): 1, Fraction(2): 1, Fraction(3): 1}

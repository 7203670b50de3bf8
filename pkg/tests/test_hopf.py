from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import FracPolyRing, flat_sequence, flat_sum
from unwindlab import hopf as hp
from unwindlab.algebra import Presentation
from unwindlab.deform import unstable_base
from unwindlab.gapfile import print_gap
from unwindlab.hopf import PointedHopf, tensor_square
from unwindlab.rings import ZMod


def _builders(p):
    return [hp.build_ga(p), hp.build_alpha_pk(p, 1), hp.build_alpha_pk(p, 2), hp.build_wk_f(p, 1),
            hp.build_wk_f(p, 2), hp.build_wk_f(p, 3, bound=p**2 + 1), hp.build_alpha_natural(p, 2, bound=3),
            hp.build_ga_perf(p, 2, bound=3), hp.build_cart_x(p, 1, 1), hp.build_cart_y(p, 1, 1),
            hp.build_zero(p), hp.u_star(hp.build_wk_f(p, 2), 2), unstable_base(p)]


@pytest.mark.parametrize("p", [2, 3])
def test_builders_satisfy_axioms(p):
    for h in _builders(p):
        r = hp.check_hopf(h)
        assert r.ok, (h.name, r.witness)


@pytest.mark.parametrize("p", [2, 3])
def test_builders_over_z_mod_p_squared(p):
    R = ZMod(p, 2)
    for h in (hp.build_ga(p, base=R), hp.build_wk_f(p, 2, base=R), hp.build_ga_perf(p, 2, base=R)):
        assert hp.check_hopf(h).ok, h.name


def test_inhomogeneous_comultiplication_fails():
    h = hp.build_wk_f(2, 2)
    T = h.tensor
    bad = list(h.comul)
    bad[1] = T.add(bad[1], T.embed(0, h.algebra.gen(0)))
    r = hp.check_hopf(PointedHopf(h.algebra, bad, h.points))
    assert not r.ok and "homogeneity" in r.witness


def _ga2(p):
    H = Presentation(ZMod(p), [("x", 1), ("y", 1)], [], 4)
    T = tensor_square(H)
    prim = [T.add(T.embed(0, H.gen(i)), T.embed(1, H.gen(i))) for i in range(2)]
    return H, T, prim


@given(st.sampled_from([2, 3]), st.integers(1, 2))
def test_mutated_comultiplication_breaks_counit(p, c):
    H, T, prim = _ga2(p)
    c = 1 + (c - 1) % (p - 1)
    mutated = T.add(prim[1], T.scale(c, T.embed(0, H.gen(0))))
    assert hp.check_hopf(PointedHopf(H, prim, [H.gen(0)])).ok
    r = hp.check_hopf(PointedHopf(H, [prim[0], mutated], [H.gen(0)]))
    assert not r.ok


# ------------------------------------------------------------ frozen structure


def test_w2f_comultiplication_p3():
    # Psi(t1) = t1 (x) 1 + 1 (x) t1 + 2 t0 (x) t0^2 + 2 t0^2 (x) t0 over F_3
    text = print_gap(hp.build_wk_f(3, 2))
    assert "comul t1 = 2*t0^2 (x) t0 + 2*t0 (x) t0^2 + t1 (x) 1 + 1 (x) t1" in text


def test_alpha_natural_basis():
    H = hp.build_alpha_natural(2, 2).algebra
    assert [H.fmt_mono(m) for m in H.all_basis()] == ["1", "x_r4", "x_r2", "x_r4*x_r2"]
    assert sorted(H.hilbert()) == [0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)]


def test_u_star_basis_below_one():
    U = hp.u_star(hp.build_wk_f(2, 2), 1).algebra
    assert [U.fmt_mono(m) for m in U.all_basis() if U.mono_degree(m) < 1] == ["1", "x_r2"]


@pytest.mark.parametrize("p,k", [(2, 1), (2, 2), (3, 1)])
def test_u_star_of_zero_is_alpha_natural(p, k):
    assert hp.is_isomorphic(hp.u_star(hp.build_zero(p), k), hp.build_alpha_natural(p, k))


@pytest.mark.parametrize("p,k", [(2, 2), (3, 2)])
def test_integral_part_recovers_the_module(p, k):
    h = hp.build_wk_f(p, 2)
    got = hp.integral_part(hp.u_star(h, k))
    assert got == {int(d): n for d, n in h.algebra.hilbert().items()}


def test_wmf_is_a_sub_hopf_algebra_of_wkf():
    for p in (2, 3):
        small = [l for l in print_gap(hp.build_wk_f(p, 2)).splitlines() if l.startswith("comul")]
        big = [l for l in print_gap(hp.build_wk_f(p, 3, bound=p**2 + 1)).splitlines() if l.startswith("comul")]
        assert big[:2] == small


def test_alpha_natural_needs_char_p():
    with pytest.raises(hp.UnsupportedError):
        hp.build_alpha_natural(2, 2, base=ZMod(2, 2))


# ------------------------------------------------------------ quasi-ideal, full


@pytest.mark.parametrize("p", [2, 3])
def test_quasi_ideal_on_builders(p):
    for h in (hp.build_ga(p), hp.build_wk_f(p, 2, bound=8), hp.build_alpha_natural(p, 2, bound=6),
              hp.build_ga_perf(p, 2, bound=6), unstable_base(p)):
        ok, why = hp.check_quasi_ideal(h)
        assert ok, (h.name, why)


def test_fullness():
    assert hp.check_full(hp.build_ga(2))
    assert hp.check_full(hp.build_wk_f(2, 2))
    assert not hp.check_full(hp.build_alpha_pk(2, 1, point="0"))
    assert not hp.check_full(unstable_base(2))


# ------------------------------------------------------------ Cartier duality


@pytest.mark.parametrize("h", [hp.build_alpha_pk(2, 2), hp.build_wk_f(3, 2), hp.build_cart_x(2, 1, 1)])
def test_dual_has_the_same_graded_dimensions(h):
    assert hp.cartier_dual(h).dims() == hp.to_sc(h).dims()


@pytest.mark.parametrize("h", [hp.build_alpha_pk(3, 1), hp.build_wk_f(2, 3), hp.build_cart_y(2, 1, 1)])
def test_double_dual(h):
    assert hp.double_dual_equal(hp.to_sc(h))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_alpha_p_is_self_dual(p):
    a = hp.build_alpha_pk(p, 1)
    assert hp.find_iso(a, hp.cartier_dual(a)) is not None


def test_alpha_p2_is_not_self_dual():
    a = hp.build_alpha_pk(2, 2)
    assert hp.find_iso(a, hp.cartier_dual(a)) is None


def test_duality_rejects_fractional_gradings():
    with pytest.raises(hp.UnsupportedError):
        hp.cartier_dual(hp.build_alpha_natural(2, 1))


# ------------------------------------------------------------ G_a^perf over Z/p^2


@pytest.mark.parametrize("p", [2, 3])
def test_ga_perf_comultiplication_matches_tilt_addition(p):
    """Delta evaluated at two flat sequences equals the limit formula for their sum."""
    k, depth = 2, 5
    R = FracPolyRing(p, depth + 1, 2, p * p)
    e = Fraction(1, p ** (depth + 1))
    a = flat_sequence(R, {e: 1, 2 * e: 1}, depth)
    b = flat_sequence(R, {3 * e: 1}, depth)
    h = hp.build_ga_perf(p, k, base=ZMod(p, 2))
    H, T = h.algebra, h.tensor
    level = [k - j for j in range(H.ngens)]
    for g, c in enumerate(h.comul):
        if c is None:
            continue
        got = {}
        for m, coeff in c.items():
            u, v = T.split(m)
            term = {Fraction(0): coeff}
            for j, ex in enumerate(u):
                term = R.mul(term, R.pow(a[level[j]], ex))
            for j, ex in enumerate(v):
                term = R.mul(term, R.pow(b[level[j]], ex))
            got = R.add(got, term)
        want, approx = flat_sum(R, a, b, level[g], 3)
        assert approx[0] == want
        assert got == want, H.names[g]


def test_ga_perf_finest_root_is_unspecified_over_z4():
    h = hp.build_ga_perf(2, 2, base=ZMod(2, 2))
    assert h.comul[0] is None and all(c is not None for c in h.comul[1:])

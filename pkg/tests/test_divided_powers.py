from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import pascal
from unwindlab.algebra import Presentation, Subspace
from unwindlab.divided_powers import (GammaTable, NotRegularError, bracket_unit, filtration_dims, gamma_free,
                                      gr_dims, pd_envelope, pd_filtration)
from unwindlab.rings import ZMod


def _point(p, N):
    return Presentation(ZMod(p), [], [], N)


def _line(p, N):
    return Presentation(ZMod(p), [("x", 1)], [], N)


def test_square_of_x_vanishes_over_f2():
    # x^[1] x^[1] = 2 x^[2]
    G = gamma_free(_point(2, 4), 1, 4)
    assert G.pres.mul(G.bracket(0, 1), G.bracket(0, 1)) == {}
    assert G.bracket(0, 2) != {}


def test_binomial_vanishing_over_f5():
    # x^[2] x^[3] = C(5,2) x^[5] = 10 x^[5]
    G = gamma_free(_point(5, 7), 1, 7)
    assert G.pres.mul(G.bracket(0, 2), G.bracket(0, 3)) == {}
    assert G.bracket(0, 5) != {}


@pytest.mark.parametrize("p,N", [(2, 9), (3, 10), (5, 8)])
def test_brackets_multiply_by_binomials(p, N):
    G = gamma_free(_point(p, N), 1, N)
    P = G.pres
    for a in range(N):
        for b in range(N - a):
            want = P.scale(P.base.from_int(pascal(a + b, a)), G.bracket(0, a + b))
            assert P.mul(G.bracket(0, a), G.bracket(0, b)) == want, (a, b)


@given(st.sampled_from([2, 3]), st.tuples(st.integers(0, 4), st.integers(0, 4)),
       st.tuples(st.integers(0, 4), st.integers(0, 4)))
def test_presentation_agrees_with_multiplication_table(p, w1, w2):
    N = 9
    G = gamma_free(_point(p, N), 2, N)
    table = GammaTable(_point(p, N), 2, N)
    P = G.pres
    if sum(w1) + sum(w2) >= N:
        return
    lhs = P.mul(G.monomial(w1), G.monomial(w2))
    got = table.mul({w1: table.B.one()}, {w2: table.B.one()})
    rhs = {}
    for w, f in got.items():
        c = f.get((), P.base.zero)
        rhs = P.add(rhs, P.scale(c, G.monomial(w)))
    assert lhs == rhs


@pytest.mark.parametrize("p", [2, 3, 5])
def test_bracket_units_are_units(p):
    for m in range(1, 60):
        assert bracket_unit(m, p) % p


def test_envelope_of_the_line_dims():
    B = _line(2, 4)
    D = pd_envelope(B, [B.gen(0)])
    assert D.pres.hilbert() == {Fraction(d): 1 for d in range(4)}


@pytest.mark.parametrize("p,N", [(2, 9), (3, 9)])
def test_envelope_matches_free_pd_dims(p, N):
    B = _line(p, N)
    assert pd_envelope(B, [B.gen(0)]).pres.hilbert() == gamma_free(_point(p, N), 1, N).pres.hilbert()


def test_zero_ideal_gives_b():
    B = Presentation(ZMod(3), [("x", 1), ("y", 2)], ["y^3"], 7)
    assert pd_envelope(B, []).pres.hilbert() == B.hilbert()


def test_non_regular_ideal_is_rejected():
    B = Presentation(ZMod(2), [("x", 1), ("y", 1)], ["x^2 + x*y"], 5)
    with pytest.raises(NotRegularError):
        pd_envelope(B, [B.gen(0)])
    pd_envelope(B, [B.gen(1)])


# ------------------------------------------------------------ PD filtration


def _envelope(p, N):
    B = Presentation(ZMod(p), [("x", 1), ("y", 1)], [], N)
    return pd_envelope(B, [B.gen(0)])


def test_gr0_and_gr1_of_the_line():
    B = _line(2, 4)
    D = pd_envelope(B, [B.gen(0)])
    assert gr_dims(D, 0) == {Fraction(0): 1}
    assert gr_dims(D, 1) == {Fraction(1): 1}
    assert filtration_dims(pd_filtration(D, 4)) == {}


@pytest.mark.parametrize("p", [2, 3])
def test_gr0_is_the_quotient(p):
    D = _envelope(p, 6)
    B = D.B
    from unwindlab.algebra import quotient_dims

    assert gr_dims(D, 0) == quotient_dims(B, [B.gen(0)])


@given(st.sampled_from([2, 3]), st.integers(0, 3), st.integers(0, 3))
def test_filtration_is_multiplicative(p, a, b):
    D = _envelope(p, 6)
    P = D.pres
    fa, fb, fab = pd_filtration(D, a), pd_filtration(D, b), pd_filtration(D, a + b)
    for da, Sa in fa.items():
        for db, Sb in fb.items():
            if da + db >= P.ibound:
                continue
            target = fab.get(da + db, Subspace(P, da + db))
            for u in Sa.spanning_polys():
                for v in Sb.spanning_polys():
                    w = P.mul(u, v)
                    assert not w or target.contains(w)


def test_filtration_is_decreasing():
    D = _envelope(3, 7)
    prev = filtration_dims(pd_filtration(D, 0))
    for n in range(1, 8):
        cur = filtration_dims(pd_filtration(D, n))
        assert all(cur.get(d, 0) <= v for d, v in prev.items())
        prev = cur

import itertools

import pytest

from unwindlab import deform as dfm
from unwindlab import hopf as hp
from unwindlab.algebra import Presentation
from unwindlab.hopf import PointedHopf, check_hopf, tensor_square
from unwindlab.rings import DualNumbers, ZMod


def _space(h, **kw):
    return dfm.deformation_space(dfm.DeformationProblem(h, **kw))


# ------------------------------------------------------------ brute-force oracle


def _slots(h):
    """Every eps-coefficient a fixed-point deformation may carry."""
    H, T = h.algebra, h.tensor
    out = []
    for ri, rel in enumerate(H.relations):
        if rel.ideg < H.ibound:
            out += [("c", ri, m) for m in H.basis_ideg(rel.ideg)]
    for g in range(H.ngens):
        if H.ideg[g] < H.ibound:
            out += [("d", g, m) for m in T.basis_ideg(H.ideg[g])]
    return out


def _lift(f, p, extra):
    out = {m: (c % p, 0) for m, c in f.items()}
    for m, c in extra.items():
        a, b = out.get(m, (0, 0))
        out[m] = (a, (b + c) % p)
    return {m: v for m, v in out.items() if v != (0, 0)}


def _brute_force_count(h):
    """Number of eps-parts giving a flat pointed Hopf algebra over F_p[eps]."""
    p = h.p
    H = h.algebra
    E = DualNumbers(p)
    slots = _slots(h)
    count = 0
    for vals in itertools.product(range(p), repeat=len(slots)):
        rel_extra = {ri: {} for ri in range(len(H.relations))}
        com_extra = {g: {} for g in range(H.ngens)}
        for (kind, a, m), v in zip(slots, vals):
            if v:
                (rel_extra if kind == "c" else com_extra)[a][m] = v
        rels = [_lift(r.poly, p, rel_extra[ri]) for ri, r in enumerate(H.relations)]
        He = Presentation(E, list(zip(H.names, H.degrees)), rels, H.bound)
        tensor_square(He)
        comul = [_lift(c, p, com_extra[g]) for g, c in enumerate(h.comul)]
        points = [_lift(P, p, {}) for P in h.points]
        he = PointedHopf(He, comul, points, h.flavor, h.scale, [E.zero] * H.ngens)
        if any(He.basis_ideg(D) != H.basis_ideg(D) for D in range(H.ibound)):
            continue
        if check_hopf(he).ok:
            count += 1
    return count, len(slots)


@pytest.mark.parametrize("h", [dfm.unstable_base(2), dfm.unstable_base(3), hp.build_wk_f(2, 1, bound=3),
                               hp.build_wk_f(2, 2, bound=5), hp.build_alpha_pk(3, 1, bound=3)])
def test_cocycle_count_matches_brute_force(h):
    count, n = _brute_force_count(h)
    rep = _space(h)
    assert rep.n_unknowns == n
    assert count == h.p**rep.cocycle_dim


# ------------------------------------------------------------ rigidity


@pytest.mark.parametrize("p", [2, 3])
def test_w1f_and_w2f_are_rigid(p):
    assert _space(hp.build_wk_f(p, 1, bound=p + 1)).quotient_dim == 0
    assert _space(hp.build_wk_f(p, 2, bound=p * p)).quotient_dim == 0


@pytest.mark.parametrize("p", [2, 3])
def test_unstable_base_is_not_rigid(p):
    rep = _space(dfm.unstable_base(p))
    assert rep.quotient_dim >= 1
    assert rep.coboundary_dim <= rep.cocycle_dim


@pytest.mark.parametrize("p", [2, 3])
def test_representatives_are_cocycles_and_not_coboundaries(p):
    h = dfm.unstable_base(p)
    rep = _space(h)
    for pert in rep.representatives:
        ok, why = dfm.verify_cocycle(h, pert)
        assert ok, why
        assert not dfm.is_coboundary(h, pert)


def test_free_point_mode_has_at_least_as_many_cocycles():
    h = dfm.unstable_base(2)
    fixed, free = _space(h), _space(h, mode="free-point")
    assert free.cocycle_dim >= fixed.cocycle_dim
    assert free.n_unknowns > fixed.n_unknowns


def test_problem_validation():
    with pytest.raises(ValueError):
        dfm.DeformationProblem(hp.build_ga(2), mode="sideways")
    with pytest.raises(hp.UnsupportedError):
        dfm.DeformationProblem(hp.build_ga(2, base=ZMod(2, 2)))
    with pytest.raises(dfm.ResourceError):
        _space(hp.build_wk_f(2, 2), cap=1)


# ------------------------------------------------------------ the unstable cocycle


@pytest.mark.parametrize("p,coeff", [(2, 1), (3, 1), (3, 2)])
def test_unstable_cocycle(p, coeff):
    h = dfm.unstable_base(p)
    pert = dfm.unstable_cocycle(h, coeff)
    ok, why = dfm.verify_cocycle(h, pert)
    assert ok, why
    assert not dfm.is_coboundary(h, pert)
    res = dfm.find_hodge_map(dfm.deformed(h, pert))
    assert not res.exists and res.certificate


def test_unstable_cocycle_p2_frozen():
    # delta(t) = s (x) s, the single term (1/2) C(2,1) s (x) s
    h = dfm.unstable_base(2)
    pert = dfm.unstable_cocycle(h)
    ((g, f),) = pert.delta.items()
    H, T = h.algebra, h.tensor
    assert H.names[g] == "x"
    assert [(H.fmt_mono(a), H.fmt_mono(b)) for a, b in map(T.split, f)] == [("x_r2", "x_r2")]


def test_non_cocycle_is_rejected():
    h = dfm.unstable_base(2)
    H, T = h.algebra, h.tensor
    s = H.index["x_r2"]
    m = [0] * H.ngens
    m[s] = 1
    pert = dfm.Perturbation(delta={s: {tuple(m) + (0,) * H.ngens: 1}})
    ok, _ = dfm.verify_cocycle(h, pert)
    assert not ok


def test_point_perturbation_needs_free_mode():
    h = dfm.unstable_base(2)
    pert = dfm.Perturbation(pi={1: {h.algebra.all_basis()[1]: 1}})
    ok, why = dfm.verify_cocycle(h, pert)
    assert not ok and "fixed-point" in why


@pytest.mark.parametrize("p", [2, 3])
def test_trivial_deformation_has_a_unique_hodge_map(p):
    res = dfm.find_hodge_map(hp.u_star(hp.build_wk_f(p, 2, bound=p * p), 2))
    assert res.exists and res.unique


def test_hodge_map_needs_perfect_flavor():
    with pytest.raises(ValueError):
        dfm.find_hodge_map(hp.build_ga(2))


# ------------------------------------------------------------ algebra-only deformations


def test_truncated_polynomial_algebra_is_rigid():
    P = Presentation(ZMod(3), [("x", 1)], ["x^3"], 4)
    assert dfm.graded_algebra_deformations(P).ok


def test_algebra_with_room_for_a_deformation():
    # x^2 = eps*y is not undone by any x -> x + eps*psi(x)
    P = Presentation(ZMod(2), [("x", 1), ("y", 2)], ["x^2"], 3)
    rep = dfm.graded_algebra_deformations(P)
    assert not rep.ok and rep.details["quotient"] == 1

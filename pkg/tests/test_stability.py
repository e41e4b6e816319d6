import random
from fractions import Fraction

import pytest

from toricstab.chow import TDivisor
from toricstab.errors import PreconditionError
from toricstab.fan import identity_morphism
from toricstab.fixtures import example_3_6, p2, p2_nonsaturated, picard_two, projective_space
from toricstab.klyachko import rank_one_sheaf, slope, tangent_sheaf
from toricstab.linalg import Subspace
from toricstab.polynomial import EpsPoly
from toricstab.pullback import blowup, blowup_chain, is_pullback_saturated
from toricstab.sampling import random_sheaf
from toricstab.stability import (
    Certainty,
    VerdictKind,
    adiabatic_slope_gap,
    adiabatic_verdict,
    audit_candidates,
    candidate_subspaces,
    curve_blowup_criterion,
    make_setup,
    restricted_slope,
    stability_verdict,
    wall_relation,
)

STABLE, SS, UNSTABLE = VerdictKind.STABLE, VerdictKind.STRICTLY_SEMISTABLE, VerdictKind.UNSTABLE


def test_weighted_surface_is_strictly_semistable():
    ws = example_3_6()
    v = stability_verdict(ws.sheaf, ws.polarisation)
    assert v.kind is SS and v.certainty is Certainty.CERTIFIED
    assert v.slope == 3
    assert [c.subspace for c, _ in v.witnesses] == [Subspace.span([(0, 1)])]


def test_tangent_sheaf_of_p2_is_stable():
    ws = p2()
    v = stability_verdict(ws.sheaf, ws.polarisation)
    assert v.kind is STABLE
    # the three coordinate lines have slope 1, half a unit below mu = 3/2
    rays = {Subspace.span([u]) for u in ws.fan.rays}
    assert {c.subspace for c, g in v.gaps if g == Fraction(1, 2)} >= rays


def test_split_sheaf_is_unstable():
    f = projective_space(2)
    from toricstab.klyachko import direct_sum
    s = direct_sum(rank_one_sheaf(f, [0, 0, 0]), rank_one_sheaf(f, [1, 0, 0]))
    v = stability_verdict(s, TDivisor.ray(f, 0))
    assert v.kind is UNSTABLE
    assert v.witnesses[0][0].subspace == Subspace.span([(1, 0)])


def test_rank_one_is_stable():
    f = projective_space(2)
    assert stability_verdict(rank_one_sheaf(f, [1, 2, 3]), TDivisor.ray(f, 0)).kind is STABLE


def test_polarisation_must_be_ample():
    ws = example_3_6()
    with pytest.raises(PreconditionError):
        stability_verdict(ws.sheaf, TDivisor.ray(ws.fan, 0))


def test_picard_two_surface_bundle_for_r2():
    nu0 = Fraction(1, 3)
    expected = {nu0 / 2: STABLE, nu0: SS, 2 * nu0: UNSTABLE}
    for nu, kind in expected.items():
        ws = picard_two(2, nu)
        v = stability_verdict(ws.sheaf, ws.polarisation)
        assert v.kind is kind, nu
        if kind is not STABLE:
            assert v.witnesses[0][0].subspace == ws.subspaces["F"]


def test_verdict_is_independent_of_thread_count():
    ws = picard_two(2)
    a = stability_verdict(ws.sheaf, ws.polarisation, threads=1)
    b = stability_verdict(ws.sheaf, ws.polarisation, threads=4)
    assert a == b


def test_candidates_include_filtration_steps_and_generic_dims():
    ws = picard_two(2)
    cs = candidate_subspaces(ws.sheaf)
    subs = set(cs.subspaces)
    assert set(ws.sheaf.filtration_subspaces()) <= subs
    assert {c.dim for c in cs.candidates} == {1, 2}
    assert cs.includes_generic_profiles


def test_extra_candidates_are_checked():
    ws = p2()
    with pytest.raises(PreconditionError):
        candidate_subspaces(ws.sheaf, extra=[Subspace.span([(1, 0, 0)])])
    cs = candidate_subspaces(ws.sheaf, extra=[Subspace.span([(3, 7)])])
    assert Subspace.span([(3, 7)]) in cs.subspaces


def test_audit_finds_no_better_lines_on_rank_two():
    rng = random.Random(41)
    f = projective_space(2)
    L = TDivisor.ray(f, 0)
    for _ in range(5):
        s = random_sheaf(rng, f, 2)
        v = stability_verdict(s, L)
        report = audit_candidates(s, L, v.gaps, 200, seed=1)
        assert report.violations == 0


# -- adiabatic ----------------------------------------------------------------


def weighted_setup(a, b):
    ws = example_3_6(a, b)
    Lp = TDivisor(ws.fan, tuple(ws.eps_divisor))
    return ws, make_setup([identity_morphism(ws.fan)], ws.sheaf, ws.polarisation, Lp)


def test_perturbed_slopes_of_weighted_surface():
    a, b = Fraction(1), Fraction(2)
    ws, setup = weighted_setup(a, b)
    eps = EpsPoly.eps()
    mu = slope(setup.pulled_back_sheaf(), setup.L_eps())
    assert mu == 3 + (b + a / 2) * eps
    gap = adiabatic_slope_gap(setup, ws.subspaces["F2"])
    assert mu - gap == 3 + (a + b / 2) * eps
    assert gap == (b - a) / 2 * eps


@pytest.mark.parametrize("a,b,kind", [(1, 2, STABLE), (2, 1, UNSTABLE), (1, 1, SS)])
def test_weighted_surface_perturbations(a, b, kind):
    _, setup = weighted_setup(a, b)
    v = adiabatic_verdict(setup)
    assert v.kind is kind
    assert v.epsilon_bound > 0


def test_identically_zero_shift_for_unperturbed_class():
    _, setup = weighted_setup(0, 0)
    v = adiabatic_verdict(setup)
    assert v.kind is SS and v.epsilon_unbounded


def test_stable_sheaf_stays_stable_after_blowup():
    ws = p2()
    for tau in ([0, 1], [1, 2]):
        setup = make_setup([blowup(ws.fan, tau)], ws.sheaf, ws.polarisation)
        assert adiabatic_verdict(setup).kind is STABLE


def test_unstable_witness_survives_blowup():
    ws = picard_two(2, Fraction(2, 3))
    base = stability_verdict(ws.sheaf, ws.polarisation)
    setup = make_setup(blowup_chain(ws.fan, [[0, 3, 4]]), ws.sheaf, ws.polarisation)
    v = adiabatic_verdict(setup)
    assert base.kind is UNSTABLE and v.kind is UNSTABLE
    witnesses = {c.subspace for c, _ in v.witnesses}
    assert base.witnesses[0][0].subspace in witnesses


def test_point_blowups_of_p2_keep_or_break_semistability():
    for centre, kind in (((0, 1), UNSTABLE), ((1, 2), SS)):
        ws = p2_nonsaturated(centre)
        assert stability_verdict(ws.sheaf, ws.polarisation).kind is SS
        b = blowup(ws.fan, centre)
        saturated = is_pullback_saturated(b, ws.sheaf, ws.subspaces["F"])
        assert saturated == (kind is SS)
        v = adiabatic_verdict(make_setup([b], ws.sheaf, ws.polarisation))
        assert v.kind is kind


def test_gap_signs_hold_below_the_bound():
    rng = random.Random(57)
    f = projective_space(2)
    L = TDivisor(f, (1, 1, 0))
    checked = 0
    while checked < 20:
        s = random_sheaf(rng, f, 2, (-2, 2))
        tau = rng.choice([[0, 1], [1, 2], [0, 2]])
        setup = make_setup([blowup(f, tau)], s, L)
        v = adiabatic_verdict(setup)
        eps = v.epsilon_bound * Fraction(rng.randint(1, 99), 100)
        for _, g in v.gaps:
            value = g(eps)
            assert (value > 0) - (value < 0) == g.germ_sign()
        checked += 1


# -- restricted slopes and curve blow-ups --------------------------------------


def test_restricted_slope_examples():
    f3 = projective_space(3)
    H = TDivisor.ray(f3, 0)
    assert restricted_slope(rank_one_sheaf(f3, [-1, 0, 0, 0]), [1, 2], H) == 1
    f2 = projective_space(2)
    assert restricted_slope(tangent_sheaf(f2), [0], TDivisor.ray(f2, 0)) == Fraction(3, 2)
    with pytest.raises(PreconditionError):
        restricted_slope(tangent_sheaf(f2), [0, 1], TDivisor.ray(f2, 0))


def test_wall_relation_of_bundle_fan():
    ws = picard_two(2)
    # the wall Cone(v1, v2) separates Cone(w0, v1, v2) and Cone(w1, v1, v2); u_w0 + u_w1 = u_v2
    assert wall_relation(ws.fan, [3, 4]) == {0: 1, 1: 1, 3: 0, 4: -1}
    with pytest.raises(PreconditionError):
        wall_relation(ws.fan, [0])


@pytest.mark.parametrize("r", [2, 3])
def test_curve_criteria(r):
    for centre, expected in (("stabilising", Fraction(1, r)), ("destabilising", Fraction(-1, r + 1))):
        ws = picard_two(r, centre=centre)
        b = blowup(ws.fan, ws.blowups[0])
        F = ws.subspaces["F"]
        assert curve_blowup_criterion(b, ws.sheaf, F) == expected
        assert curve_blowup_criterion(b, ws.sheaf, ws.sheaf.space) == 0
        # same number through the intersection engine
        tau = ws.blowups[0]
        from toricstab.klyachko import subsheaf_from_subspace
        diff = (restricted_slope(subsheaf_from_subspace(ws.sheaf, F), tau, ws.polarisation)
                - restricted_slope(ws.sheaf, tau, ws.polarisation))
        assert diff == expected


def test_curve_criterion_predicts_lowest_order_gap():
    ws = picard_two(2, centre="destabilising")
    b = blowup(ws.fan, ws.blowups[0])
    setup = make_setup([b], ws.sheaf, ws.polarisation)
    g = adiabatic_slope_gap(setup, ws.subspaces["F"])
    crit = curve_blowup_criterion(b, ws.sheaf, ws.subspaces["F"])
    assert g.germ_sign() == (1 if crit > 0 else -1)
    assert g == EpsPoly((0, 0, crit))

import random
from fractions import Fraction

import pytest

from toricstab.chow import TDivisor, degree, intersection_number
from toricstab.errors import PreconditionError
from toricstab.fixtures import (
    example_3_6,
    hirzebruch,
    projective_bundle_fan,
    projective_space,
    weighted_example_fan,
)
from toricstab.klyachko import (
    EquivariantSheaf,
    Filtration,
    characteristic_function,
    direct_sum,
    first_chern,
    is_saturated,
    is_subsheaf,
    rank_one_sheaf,
    slope,
    structure_sheaf,
    subsheaf_from_subspace,
    subspace_slope,
    tangent_sheaf,
)
from toricstab.linalg import Subspace
from toricstab.sampling import random_sheaf, random_subspace


def test_weighted_surface_slopes():
    ws = example_3_6()
    E, L = ws.sheaf, ws.polarisation
    assert slope(E, L) == 3
    expected = {"F1": 2, "F2": 3, "F3": 1, "F4": 3}
    for name, mu in expected.items():
        F = ws.subspaces[name]
        assert subspace_slope(E, F, L) == mu
        assert slope(subsheaf_from_subspace(E, F), L) == mu


def test_tangent_sheaf_has_anticanonical_first_chern_class():
    for f in (projective_space(2), weighted_example_fan(), projective_bundle_fan(2)):
        assert first_chern(tangent_sheaf(f)) == TDivisor.anticanonical(f)


def test_tangent_sheaf_of_p2_slope():
    f = projective_space(2)
    assert slope(tangent_sheaf(f), TDivisor.ray(f, 0)) == Fraction(3, 2)


def test_rank_one_slope_is_degree():
    f = hirzebruch(1)
    L = TDivisor(f, (1, 0, 0, 1))
    s = rank_one_sheaf(f, [-1, 2, 0, -3])
    assert slope(s, L) == degree(TDivisor(f, (1, -2, 0, 3)), L)
    assert slope(structure_sheaf(f), L) == 0


def test_direct_sum_slope_is_rank_weighted_average():
    f = projective_space(2)
    L = TDivisor.ray(f, 0)
    a, b = tangent_sheaf(f), rank_one_sheaf(f, [1, 0, 0])
    s = direct_sum(a, b)
    assert s.rank == 3
    assert slope(s, L) == (2 * slope(a, L) + slope(b, L)) / 3
    assert [flt.iota() for flt in s.filtrations] == [
        fa.iota() + fb.iota() for fa, fb in zip(a.filtrations, b.filtrations)]


def test_induced_subsheaf_is_saturated_subsheaf():
    f = projective_space(2)
    E = tangent_sheaf(f)
    F = Subspace.span([(1, 1)])
    sub = subsheaf_from_subspace(E, F)
    assert is_subsheaf(sub, E) and is_saturated(sub, E)
    # shifting the filtration of the subsheaf up keeps it inside but breaks saturation
    shifted = EquivariantSheaf(f, F, tuple(Filtration.trivial(F, 1) for _ in f.rays))
    assert is_subsheaf(shifted, E) and not is_saturated(shifted, E)
    lowered = EquivariantSheaf(f, F, tuple(Filtration.trivial(F, -5) for _ in f.rays))
    assert not is_subsheaf(lowered, E)


def test_subsheaf_needs_proper_subspace():
    E = tangent_sheaf(projective_space(2))
    with pytest.raises(PreconditionError):
        subsheaf_from_subspace(E, Subspace.full(2))
    with pytest.raises(PreconditionError):
        subsheaf_from_subspace(E, Subspace.zero(2))


def test_filtration_validation():
    top = Subspace.full(2)
    line = Subspace.span([(1, 0)])
    with pytest.raises(PreconditionError):
        Filtration(top, ((0, line),))                 # never reaches E
    with pytest.raises(PreconditionError):
        Filtration(top, ((1, line), (0, top)))        # positions decrease
    with pytest.raises(PreconditionError):
        Filtration(top, ((0, top), (1, top)))         # no strict growth
    flt = Filtration.build(top, [(3, top), (1, line), (2, line)])
    assert flt.jumps == ((1, line), (3, top))
    assert flt(0).is_zero() and flt(2) == line and flt(99) == top
    assert flt.iota() == 1 * 1 + 3 * 1


def test_characteristic_function_of_tangent_sheaf():
    f = projective_space(2)
    E = tangent_sheaf(f)
    assert characteristic_function(E, (0, 0)) == (2, 2, 2)
    # <m, u> = -1 on e1 and e2 cuts both lines out in the cone they span
    values = dict(zip(f.max_cones, characteristic_function(E, (-1, -1))))
    assert values[frozenset({0, 1})] == 0


def test_iota_of_matches_restriction():
    rng = random.Random(23)
    f = projective_space(3)
    for _ in range(30):
        s = random_sheaf(rng, f, 3, (-2, 2))
        F = random_subspace(rng, s.space, rng.randint(1, 2), 2)
        for flt in s.filtrations:
            assert flt.iota_of(F) == flt.restrict(F).iota()


def test_subsheaf_slope_uses_subsheaf_rank():
    f = projective_space(2)
    L = TDivisor.ray(f, 0)
    rng = random.Random(4)
    for _ in range(10):
        s = random_sheaf(rng, f, 3, (-2, 2))
        F = random_subspace(rng, s.space, 2, 3)
        sub = subsheaf_from_subspace(s, F)
        c1 = first_chern(sub)
        assert subspace_slope(s, F, L) == intersection_number([c1, L]) / 2

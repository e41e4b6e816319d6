"""Reflexive pullbacks of equivariant sheaves along fibrations and blow-ups."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence, Union

from .errors import PreconditionError, UnsupportedError
from .fan import Cone, Fan, ImageKind, ToricMorphism, cone, is_fibration, star_subdivision
from .klyachko import (
    EquivariantSheaf,
    Filtration,
    _check_proper,
    is_saturated,
    subsheaf_from_subspace,
)
from .linalg import Subspace


@dataclass(frozen=True)
class BlowupContext:
    """The blow-up of X_target along V(tau), realised as a star subdivision."""

    source: Fan
    target: Fan
    morphism: ToricMorphism
    tau: Cone
    new_ray: int

    @property
    def center_rays(self) -> tuple[int, ...]:
        return tuple(sorted(self.tau))

    @property
    def center_dim(self) -> int:
        """Dimension of the blown-up subvariety V(tau)."""
        return self.target.rank - len(self.tau)


def blowup(fan: Fan, tau: Iterable[int]) -> BlowupContext:
    t = cone(tau)
    src, morph, new = star_subdivision(fan, t)
    return BlowupContext(src, fan, morph, t, new)


def blowup_chain(fan: Fan, centers: Sequence[Iterable[int]]) -> list[BlowupContext]:
    """Successive blow-ups along pairwise disjoint invariant centres of ``fan``.

    Old ray indices survive each subdivision, so every centre is given in
    the indices of the original fan.  Point blow-ups are the case of
    maximal cones.
    """
    cs = [cone(c) for c in centers]
    for i, a in enumerate(cs):
        if a not in fan.cones:
            raise PreconditionError(f"{sorted(a)} is not a cone of the fan")
        for b in cs[i + 1:]:
            if a == b or (a | b) in fan.cones:
                raise PreconditionError(
                    f"centres {sorted(a)} and {sorted(b)} are not disjoint")
    out = []
    cur = fan
    for c in cs:
        ctx = blowup(cur, c)
        out.append(ctx)
        cur = ctx.source
    return out


Step = Union[ToricMorphism, BlowupContext]


def step_morphism(step: Step) -> ToricMorphism:
    return step.morphism if isinstance(step, BlowupContext) else step


# ---------------------------------------------------------------------------
# fibrations


def reflexive_pullback_fibration(m: ToricMorphism, s: EquivariantSheaf) -> EquivariantSheaf:
    """Pullback along a fibration whose rays all map to 0 or onto rays.

    A ray sent to 0 gets the filtration jumping from 0 to E at 0; a ray
    sent to b u_rho gets E^rho(floor(j / b)), i.e. every jump scaled by b.
    """
    if s.fan != m.target:
        raise PreconditionError("sheaf does not live on the target fan")
    if not is_fibration(m):
        raise PreconditionError("the lattice map is not surjective")
    if m.exceptional_rays:
        raise UnsupportedError(
            "no filtration formula for rays mapped into higher-dimensional cones "
            f"(source rays {m.exceptional_rays}); only blow-ups are supported there")
    flts = []
    for im in m.ray_images:
        if im.kind is ImageKind.ZERO:
            flts.append(Filtration.trivial(s.space, 0))
        else:
            src = s.filtrations[im.ray]
            flts.append(Filtration(s.space, tuple((im.b * j, v) for j, v in src.jumps)))
    return EquivariantSheaf(m.source, s.space, tuple(flts))


# ---------------------------------------------------------------------------
# blow-ups


def exceptional_filtration(s: EquivariantSheaf, rays: Sequence[int]) -> Filtration:
    """j -> sum over i_1 + ... + i_s <= j of E^{rho_1}(i_1) cap ... cap E^{rho_s}(i_s).

    Each factor is monotone in its index, so only tuples of jump positions
    matter; the sum over all tuples with total exactly j equals the sum over
    totals <= j.
    """
    grids = [s.filtrations[r].jumps for r in rays]
    terms: dict[int, Subspace] = {}
    for combo in product(*grids):
        total = sum(j for j, _ in combo)
        inter = s.space
        for _, v in combo:
            inter = inter & v
        if inter.is_zero():
            continue
        terms[total] = terms[total] + inter if total in terms else inter
    steps = []
    acc = Subspace.zero(s.ambient_dim)
    for j in sorted(terms):
        acc = acc + terms[j]
        steps.append((j, acc))
    return Filtration.build(s.space, steps)


def reflexive_pullback_blowup(b: BlowupContext, s: EquivariantSheaf) -> EquivariantSheaf:
    if s.fan != b.target:
        raise PreconditionError("sheaf does not live on the blown-up fan")
    flts = list(s.filtrations)
    exc = exceptional_filtration(s, b.center_rays)
    # the new ray is appended last by the star subdivision
    assert b.new_ray == len(flts)
    flts.append(exc)
    return EquivariantSheaf(b.source, s.space, tuple(flts))


def chern_shift(b: BlowupContext, s: EquivariantSheaf) -> int:
    """Coefficient k in c_1((pi^* E)^vv) = pi^* c_1(E) - k D_0.

    k = iota_{rho_0}(E') - sum_{rho in tau} iota_rho(E).  It vanishes when E
    is locally free along the centre (the filtrations on tau share an
    adapted basis) but not for every reflexive sheaf: three lines in general
    position at a fixed point of a threefold give k = 1.
    """
    exc = exceptional_filtration(s, b.center_rays)
    return exc.iota() - sum(s.filtrations[r].iota() for r in b.center_rays)


def reflexive_pullback(step: Step, s: EquivariantSheaf) -> EquivariantSheaf:
    if isinstance(step, BlowupContext):
        return reflexive_pullback_blowup(step, s)
    return reflexive_pullback_fibration(step, s)


def pullback_chain(steps: Sequence[Step], s: EquivariantSheaf) -> EquivariantSheaf:
    for st in steps:
        s = reflexive_pullback(st, s)
    return s


@dataclass(frozen=True)
class Defect:
    levels: tuple  # ((j, d_j), ...) for the j with d_j != 0
    total: int


def pullback_defect(b: BlowupContext, s: EquivariantSheaf, F: Subspace) -> Defect:
    """d_j(F) = dim(F cap E~(j)) - dim F~(j) on the exceptional ray."""
    _check_proper(s, F)
    big = exceptional_filtration(s, b.center_rays)
    small = exceptional_filtration(subsheaf_from_subspace(s, F), b.center_rays)
    lo = min(big.positions[0], small.positions[0])
    hi = max(big.positions[-1], small.positions[-1])
    levels = []
    for j in range(lo, hi + 1):
        d = (F & big(j)).dim - small(j).dim
        if d < 0:
            raise AssertionError("pulled-back subsheaf is not contained in the pullback")
        if d:
            levels.append((j, d))
    return Defect(tuple(levels), sum(d for _, d in levels))


def is_pullback_saturated(step: Step, s: EquivariantSheaf, F: Subspace) -> bool:
    """Whether (pi^* E_F)^vv is saturated in (pi^* E)^vv."""
    if isinstance(step, BlowupContext):
        return pullback_defect(step, s, F).total == 0
    _check_proper(s, F)
    big = reflexive_pullback_fibration(step, s)
    small = reflexive_pullback_fibration(step, subsheaf_from_subspace(s, F))
    return is_saturated(small, big)

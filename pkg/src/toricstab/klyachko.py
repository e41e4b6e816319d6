"""Equivariant reflexive sheaves as families of filtrations.

A sheaf is a vector space E (a subspace of some ambient Q^N, so that
subsheaves can share coordinates with the sheaf they sit in) together with
one increasing filtration E^rho(j) of E per ray of the fan.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .chow import TDivisor, _simplify, ray_degrees
from .errors import PreconditionError
from .fan import Fan, require_complete
from .linalg import Subspace, dot, meet_dim


@dataclass(frozen=True)
class Filtration:
    """Jumps (j, V_j): V_j is the value on [j, next jump); zero below the first jump."""

    top: Subspace
    jumps: tuple  # ((int, Subspace), ...)

    def __post_init__(self):
        if not self.jumps:
            raise PreconditionError("a filtration needs at least one jump")
        prev_j, prev_v = None, Subspace.zero(self.top.ambient_dim)
        for j, v in self.jumps:
            if not isinstance(j, int):
                raise PreconditionError(f"jump position {j!r} is not an integer")
            if prev_j is not None and j <= prev_j:
                raise PreconditionError("jump positions must strictly increase")
            if not (prev_v < v and v <= self.top):
                raise PreconditionError("filtration steps must strictly increase inside E")
            prev_j, prev_v = j, v
        if self.jumps[-1][1] != self.top:
            raise PreconditionError("the last step of a filtration must be all of E")

    @classmethod
    def build(cls, top: Subspace, steps: Iterable[tuple[int, Subspace]]) -> "Filtration":
        """Normalise (position, subspace) pairs: sort, drop repeats and zero steps."""
        items = sorted(((int(j), v) for j, v in steps), key=lambda t: t[0])
        out: list = []
        for j, v in items:
            if out and out[-1][0] == j:
                raise PreconditionError(f"jump position {j} given twice")
            if v.is_zero() or (out and out[-1][1] == v):
                continue
            out.append((j, v))
        return cls(top, tuple(out))

    @classmethod
    def trivial(cls, top: Subspace, at: int = 0) -> "Filtration":
        """Zero below ``at``, everything from ``at`` on."""
        return cls(top, ((int(at), top),))

    @property
    def positions(self) -> tuple[int, ...]:
        return tuple(j for j, _ in self.jumps)

    def __call__(self, i: int) -> Subspace:
        k = bisect_right(self.positions, i)
        return Subspace.zero(self.top.ambient_dim) if k == 0 else self.jumps[k - 1][1]

    def subspaces(self) -> list[Subspace]:
        return [v for _, v in self.jumps]

    def iota(self) -> int:
        """sum_j j (dim V(j) - dim V(j-1))."""
        total, prev = 0, 0
        for j, v in self.jumps:
            total += j * (v.dim - prev)
            prev = v.dim
        return total

    def iota_of(self, F: Subspace) -> int:
        """iota of the induced filtration F cap V(j), without building it."""
        total, prev = 0, 0
        for j, v in self.jumps:
            d = meet_dim(F, v)
            total += j * (d - prev)
            prev = d
        return total

    def restrict(self, F: Subspace) -> "Filtration":
        return Filtration.build(F, ((j, F & v) for j, v in self.jumps))

    def __repr__(self):
        return "Filtration(" + ", ".join(f"{j}: {v!r}" for j, v in self.jumps) + ")"


@dataclass(frozen=True)
class EquivariantSheaf:
    fan: Fan
    space: Subspace
    filtrations: tuple  # one Filtration per ray

    def __post_init__(self):
        if self.space.is_zero():
            raise PreconditionError("a sheaf needs positive rank")
        if len(self.filtrations) != self.fan.n_rays:
            raise PreconditionError(
                f"{len(self.filtrations)} filtrations given for {self.fan.n_rays} rays")
        for i, flt in enumerate(self.filtrations):
            if flt.top != self.space:
                raise PreconditionError(f"filtration on ray {i} does not end at E")

    @classmethod
    def from_steps(cls, fan: Fan, rank: int, steps: Sequence) -> "EquivariantSheaf":
        """Sheaf on E = Q^rank; ``steps[rho]`` is a list of (j, Subspace or vectors)."""
        top = Subspace.full(rank)
        flts = []
        for per_ray in steps:
            pairs = []
            for j, v in per_ray:
                if not isinstance(v, Subspace):
                    v = Subspace.span(v, rank)
                pairs.append((j, v))
            flts.append(Filtration.build(top, pairs))
        return cls(fan, top, tuple(flts))

    @property
    def rank(self) -> int:
        return self.space.dim

    @property
    def ambient_dim(self) -> int:
        return self.space.ambient_dim

    def filtration_subspaces(self) -> list[Subspace]:
        """Distinct proper nonzero steps over all rays, canonically ordered."""
        seen = {v for flt in self.filtrations for v in flt.subspaces() if not v.is_zero() and v != self.space}
        return sorted(seen, key=Subspace.sort_key)

    def __repr__(self):
        return f"EquivariantSheaf(rank={self.rank}, filtrations={list(self.filtrations)})"


def iota(s: EquivariantSheaf, rho: int) -> int:
    return s.filtrations[rho].iota()


def first_chern(s: EquivariantSheaf) -> TDivisor:
    """c_1 = -sum iota_rho D_rho."""
    return TDivisor(s.fan, tuple(-flt.iota() for flt in s.filtrations))


def _slope_from_iotas(iotas: Sequence[int], rank: int, L: TDivisor):
    degs = ray_degrees(L)
    total = Fraction(0)
    for i, d in zip(iotas, degs):
        if i:
            total = total + i * d
    return _simplify(-total / rank)


def slope(s: EquivariantSheaf, L: TDivisor):
    """mu_L(E) = -(1/rk) sum iota_rho deg_L(D_rho); a rational or EpsPoly."""
    if L.fan != s.fan:
        raise PreconditionError("polarisation lives on a different fan")
    require_complete(s.fan)
    return _slope_from_iotas([flt.iota() for flt in s.filtrations], s.rank, L)


def subspace_slope(s: EquivariantSheaf, F: Subspace, L: TDivisor):
    """mu_L(E_F) computed straight from the intersection profile of F."""
    require_complete(s.fan)
    return _slope_from_iotas([flt.iota_of(F) for flt in s.filtrations], F.dim, L)


def _check_proper(s: EquivariantSheaf, F: Subspace) -> None:
    if F.ambient_dim != s.ambient_dim or not F <= s.space:
        raise PreconditionError("F is not a subspace of E")
    if F.is_zero() or F == s.space:
        raise PreconditionError("F must be a proper nonzero subspace of E")


def subsheaf_from_subspace(s: EquivariantSheaf, F: Subspace) -> EquivariantSheaf:
    """The saturated subsheaf E_F with F^rho(j) = F cap E^rho(j)."""
    _check_proper(s, F)
    return EquivariantSheaf(s.fan, F, tuple(flt.restrict(F) for flt in s.filtrations))


def _merged_positions(a: Filtration, b: Filtration) -> list[int]:
    pts = sorted(set(a.positions) | set(b.positions))
    return [pts[0] - 1] + pts


def is_subsheaf(sub: EquivariantSheaf, amb: EquivariantSheaf) -> bool:
    if sub.fan != amb.fan or sub.ambient_dim != amb.ambient_dim or not sub.space <= amb.space:
        return False
    for fs, fa in zip(sub.filtrations, amb.filtrations):
        if any(not fs(i) <= fa(i) for i in _merged_positions(fs, fa)):
            return False
    return True


def is_saturated(sub: EquivariantSheaf, amb: EquivariantSheaf) -> bool:
    """Whether sub^rho(i) = F cap amb^rho(i) everywhere, F the generic fibre of sub."""
    if sub.rank >= amb.rank:
        raise PreconditionError("saturation test needs a subsheaf of smaller rank")
    if not is_subsheaf(sub, amb):
        raise PreconditionError("not a subsheaf")
    F = sub.space
    for fs, fa in zip(sub.filtrations, amb.filtrations):
        if any(fs(i) != (F & fa(i)) for i in _merged_positions(fs, fa)):
            return False
    return True


def tangent_sheaf(f: Fan) -> EquivariantSheaf:
    """E = N_Q with jumps (-1, Span(u_rho)) and (0, E) on every ray."""
    steps = [[(-1, [u]), (0, Subspace.full(f.rank))] for u in f.rays]
    return EquivariantSheaf.from_steps(f, f.rank, steps)


def rank_one_sheaf(f: Fan, positions: Sequence[int]) -> EquivariantSheaf:
    """Rank-1 sheaf with a single jump at ``positions[rho]`` (c_1 = -sum p_rho D_rho)."""
    top = Subspace.full(1)
    return EquivariantSheaf(f, top, tuple(Filtration.trivial(top, int(p)) for p in positions))


def structure_sheaf(f: Fan) -> EquivariantSheaf:
    return rank_one_sheaf(f, [0] * f.n_rays)


def characteristic_function(s: EquivariantSheaf, m: Sequence[int]) -> tuple[int, ...]:
    """dim of the intersection of E^rho(<m, u_rho>) over rho in sigma, per maximal cone."""
    out = []
    for sigma in s.fan.max_cones:
        v = s.space
        for r in sorted(sigma):
            v = v & s.filtrations[r](dot(m, s.fan.rays[r]))
        out.append(v.dim)
    return tuple(out)


def direct_sum(a: EquivariantSheaf, b: EquivariantSheaf) -> EquivariantSheaf:
    """Block sum in ambient Q^(N_a + N_b)."""
    if a.fan != b.fan:
        raise PreconditionError("direct sum of sheaves on different fans")
    na, nb = a.ambient_dim, b.ambient_dim
    n = na + nb

    def embed(v: Subspace, left: bool) -> list:
        pad = (Fraction(0),)
        return [tuple(x) + pad * nb if left else pad * na + tuple(x) for x in v.basis]

    def both(va: Subspace, vb: Subspace) -> Subspace:
        return Subspace.span(embed(va, True) + embed(vb, False), n)

    top = both(a.space, b.space)
    flts = []
    for fa, fb in zip(a.filtrations, b.filtrations):
        pts = sorted(set(fa.positions) | set(fb.positions))
        flts.append(Filtration.build(top, ((j, both(fa(j), fb(j))) for j in pts)))
    return EquivariantSheaf(a.fan, top, tuple(flts))

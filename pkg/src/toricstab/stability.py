"""Slope stability verdicts, for fixed and for adiabatic polarisations.

The slope of E_F only depends on the dimensions dim(F cap V) for the
filtration steps V, so stability is decided over a finite candidate set of
subspaces F (see :func:`candidate_subspaces`).
"""

from __future__ import annotations

import enum
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .chow import (
    CycleClass,
    TDivisor,
    _simplify,
    ample_threshold,
    intersection_number,
    is_ample,
    pullback_divisor,
    ray_degrees,
)
from .errors import PreconditionError
from .fan import ImageKind, cone, is_smooth, require_complete
from .klyachko import EquivariantSheaf, _slope_from_iotas, first_chern, slope
from .linalg import Subspace, meet_dim, nullspace
from .polynomial import EpsPoly, germ_sign, min_radius
from .pullback import BlowupContext, Step, pullback_chain, step_morphism
from .sampling import random_subspace, random_vector


class VerdictKind(enum.Enum):
    STABLE = "Stable"
    STRICTLY_SEMISTABLE = "StrictlySemistable"
    UNSTABLE = "Unstable"

    @property
    def exit_code(self) -> int:
        return {"Stable": 0, "StrictlySemistable": 1, "Unstable": 2}[self.value]


class Certainty(enum.Enum):
    CERTIFIED = "certified"
    RELATIVE = "relative-to-candidates"


@dataclass(frozen=True)
class Candidate:
    """A subspace F of E to test, or a virtual generic one known only by its profile."""

    dim: int
    subspace: Subspace | None = None
    origin: str = "filtration"
    profile: tuple | None = None  # per ray, dim(F cap V) at each jump; virtual only

    @property
    def virtual(self) -> bool:
        return self.subspace is None

    def iotas(self, s: EquivariantSheaf) -> list[int]:
        if self.subspace is not None:
            return [_iota_of(flt, self.subspace) for flt in s.filtrations]
        out = []
        for flt, dims in zip(s.filtrations, self.profile):
            total, prev = 0, 0
            for (j, _), d in zip(flt.jumps, dims):
                total += j * (d - prev)
                prev = d
            out.append(total)
        return out

    def sort_key(self):
        if self.subspace is None:
            return (1, self.dim, ())
        return (0,) + self.subspace.sort_key()

    def label(self) -> str:
        return repr(self.subspace) if self.subspace is not None else f"generic(dim {self.dim})"


def _iota_of(flt, F: Subspace) -> int:
    if F.dim == 1:
        # fast path for lines: F cap V is F or 0
        v = F.int_rows[0]
        for j, V in flt.jumps:
            if V.contains(v):
                return j
        raise AssertionError("filtration does not exhaust E")
    return flt.iota_of(F)


@dataclass(frozen=True)
class CandidateSet:
    candidates: tuple
    completeness: str  # "closed", "capped" or "skipped"
    includes_generic_profiles: bool

    @property
    def subspaces(self) -> list[Subspace]:
        return [c.subspace for c in self.candidates if not c.virtual]

    def __len__(self):
        return len(self.candidates)


def _closure(base: list[Subspace], ops: Sequence[Callable], bottom: Subspace, top: Subspace,
             max_rounds: int, max_size: int) -> tuple[set, bool]:
    """Closure of ``base`` under the binary ``ops``; (set, reached fixed point).

    Each round only combines pairs involving an element found in the
    previous round.
    """
    cur = set(base)
    fresh = list(cur)
    for _ in range(max_rounds):
        fresh_set = set(fresh)
        items = sorted(cur, key=Subspace.sort_key)
        pairs = ((a, b) for i, a in enumerate(items) for b in items[i + 1:]
                 if a in fresh_set or b in fresh_set)
        new = set()
        for a, b in pairs:
            for op in ops:
                c = op(a, b)
                if c != bottom and c != top and c not in cur and c not in new:
                    new.add(c)
                    if len(cur) + len(new) >= max_size:
                        return cur | new, False
        if not new:
            return cur, True
        cur |= new
        fresh = list(new)
    return cur, False


def _generic_profile(s: EquivariantSheaf, k: int) -> tuple:
    r = s.rank
    return tuple(tuple(max(0, k + v.dim - r) for _, v in flt.jumps) for flt in s.filtrations)


def _profile_of(s: EquivariantSheaf, F: Subspace) -> tuple:
    return tuple(tuple(meet_dim(F, v) for _, v in flt.jumps) for flt in s.filtrations)


def _generic_subspace(s: EquivariantSheaf, k: int, tries: int = 64) -> Subspace | None:
    """A concrete k-dimensional subspace with the generic intersection profile.

    Uses points on the moment curve t -> (1, t, t^2, ...) in coordinates of
    a basis of E; if nothing is found in ``tries`` shifts, returns None.
    """
    target = _generic_profile(s, k)
    basis = s.space.basis
    r, n = s.rank, s.ambient_dim
    for shift in range(tries):
        vecs = []
        for i in range(k):
            t = Fraction(shift * k + i + 2)
            coeffs = [t ** e for e in range(r)]
            vecs.append(tuple(sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(n)))
        F = Subspace.span(vecs, n)
        if F.dim == k and _profile_of(s, F) == target:
            return F
    return None


def _extend_to_hyperplane(c: Subspace, space: Subspace) -> Subspace:
    cur = c
    for v in space.basis:
        if cur.dim == space.dim - 1:
            break
        nxt = cur + Subspace.span([v], space.ambient_dim)
        if nxt.dim == cur.dim + 1 and nxt.dim <= space.dim - 1:
            cur = nxt
    return cur


def candidate_subspaces(s: EquivariantSheaf, max_rounds: int = 8, max_size: int = 4096,
                        extra: Iterable[Subspace] = (), mixed_closure: bool | None = None) -> CandidateSet:
    """Subspaces F of E whose slopes decide stability.

    Contains the filtration steps, their meet/join closure (capped), a line
    in every atom of the meet closure and a hyperplane over every co-atom of
    the join closure (these make dimension 1 and corank 1 exact), and a
    generic subspace of each intermediate dimension.  The mixed closure is
    skipped for rank <= 3 where atoms and co-atoms already cover every
    dimension; it can be forced with ``mixed_closure=True``.
    """
    r = s.rank
    if r < 2:
        return CandidateSet((), "closed", False)
    n = s.ambient_dim
    zero, top = Subspace.zero(n), s.space
    base = s.filtration_subspaces()
    found: dict[Subspace, str] = {v: "filtration" for v in base}

    if mixed_closure is None:
        mixed_closure = r > 3
    completeness = "skipped"
    if mixed_closure:
        closed, done = _closure(base, (Subspace.meet, Subspace.join), zero, top, max_rounds, max_size)
        completeness = "closed" if done else "capped"
        # lines and hyperplanes are dominated by atoms and co-atoms
        for v in closed:
            if 1 < v.dim < r - 1:
                found.setdefault(v, "closure")

    meets, _ = _closure(base, (Subspace.meet,), zero, top, max_rounds, max_size)
    joins, _ = _closure(base, (Subspace.join,), zero, top, max_rounds, max_size)
    meets = meets | {top}
    atoms = [a for a in meets if not any(b < a for b in meets)]
    for a in sorted(atoms, key=Subspace.sort_key):
        line = Subspace.span([a.basis[0]], n)
        found.setdefault(line, "atom")
    joins = joins | {zero}
    coatoms = [c for c in joins if not any(c < b for b in joins)]
    for c in sorted(coatoms, key=Subspace.sort_key):
        found.setdefault(_extend_to_hyperplane(c, top), "co-atom")

    for v in extra:
        if v.ambient_dim != n or not v <= top:
            raise PreconditionError(f"extra candidate {v!r} is not a subspace of E")
        if not v.is_zero() and v != top:
            found.setdefault(v, "extra")

    cands = [Candidate(v.dim, v, origin) for v, origin in found.items()]
    for k in range(1, r):
        F = _generic_subspace(s, k)
        if F is None:
            cands.append(Candidate(k, None, "generic", _generic_profile(s, k)))
        elif F not in found:
            cands.append(Candidate(k, F, "generic"))
    cands.sort(key=Candidate.sort_key)
    return CandidateSet(tuple(cands), completeness, True)


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class AuditReport:
    samples: int
    violations: int
    best_gap: object  # smallest gap seen among samples


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    witnesses: tuple  # ((Candidate, gap), ...)
    certainty: Certainty
    slope: object  # mu(E) (rational or EpsPoly)
    gaps: tuple  # ((Candidate, gap), ...) for every candidate, canonical order
    epsilon_bound: Fraction | None = None
    epsilon_unbounded: bool = False
    completeness: str = "closed"
    audit: AuditReport | None = None

    @property
    def exit_code(self) -> int:
        return self.kind.exit_code


def _parallel_map(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _decide(gaps: list, certain: bool) -> tuple[VerdictKind, tuple, Certainty]:
    negative = [(c, g) for c, g in gaps if germ_sign(g) < 0]
    if negative:
        # most destabilising first; for eps-polynomials compare the germs
        negative.sort(key=lambda t: (_germ_key(t[1]), t[0].sort_key()))
        real = any(not c.virtual for c, _ in negative)
        cert = Certainty.CERTIFIED if (certain or real) else Certainty.RELATIVE
        return VerdictKind.UNSTABLE, tuple(negative), cert
    equal = [(c, g) for c, g in gaps if g == 0]
    cert = Certainty.CERTIFIED if certain else Certainty.RELATIVE
    if equal:
        return VerdictKind.STRICTLY_SEMISTABLE, tuple(equal), cert
    return VerdictKind.STABLE, (), cert


def _germ_key(g):
    """Sort key making 'more negative for small eps' come first."""
    if isinstance(g, EpsPoly):
        k, a = g.leading_term()
        # a lower order term dominates, so a smaller k with a < 0 is more negative
        return (k, a)
    return (0, g)


def stability_verdict(s: EquivariantSheaf, L: TDivisor, cands: CandidateSet | None = None,
                      threads: int = 1, audit_samples: int = 0, seed: int = 0) -> Verdict:
    """Slope stability of E with respect to an ample L."""
    require_complete(s.fan)
    if not is_ample(L):
        raise PreconditionError("the polarisation is not ample")
    cands = candidate_subspaces(s) if cands is None else cands
    mu = slope(s, L)

    def gap(c: Candidate):
        return _simplify(mu - _slope_from_iotas(c.iotas(s), c.dim, L))

    gaps = list(zip(cands.candidates, _parallel_map(gap, list(cands.candidates), threads)))
    kind, witnesses, cert = _decide(gaps, s.rank <= 3)
    audit = None
    if audit_samples:
        audit = audit_candidates(s, L, gaps, audit_samples, seed)
    return Verdict(kind, witnesses, cert, mu, tuple(gaps), completeness=cands.completeness, audit=audit)


def audit_candidates(s: EquivariantSheaf, L: TDivisor, gaps: Sequence, samples: int, seed: int = 0,
                     dims: Sequence[int] | None = None) -> AuditReport:
    """Sample random subspaces per dimension and count those beating the candidates.

    A violation is a sampled F whose slope gap is smaller than every
    candidate gap of the same dimension.
    """
    rng = random.Random(seed)
    mu = slope(s, L)
    degs = ray_degrees(L)
    dims = list(range(1, s.rank)) if dims is None else list(dims)
    best_by_dim: dict[int, object] = {}
    for c, g in gaps:
        if c.dim not in best_by_dim or g < best_by_dim[c.dim]:
            best_by_dim[c.dim] = g
    basis = s.space.int_rows
    n = s.ambient_dim
    violations, best, total = 0, None, 0
    for k in dims:
        for _ in range(samples):
            if k == 1:
                c = random_vector(rng, s.rank)
                v = [sum(ci * b[j] for ci, b in zip(c, basis)) for j in range(n)]
                iotas = [next(j for j, V in flt.jumps if V.contains(v)) for flt in s.filtrations]
            else:
                F = random_subspace(rng, s.space, k)
                iotas = [flt.iota_of(F) for flt in s.filtrations]
            g = mu + Fraction(sum(i * d for i, d in zip(iotas, degs) if i), k)
            total += 1
            if best is None or g < best:
                best = g
            if k not in best_by_dim or g < best_by_dim[k]:
                violations += 1
    return AuditReport(total, violations, best)


# ---------------------------------------------------------------------------
# adiabatic polarisations


@dataclass(frozen=True)
class AdiabaticSetup:
    """pi: X' -> X as a chain of steps, E on X, L ample on X, L' on X'."""

    steps: tuple
    sheaf: EquivariantSheaf
    L: TDivisor
    Lp: TDivisor

    @property
    def source_fan(self):
        return step_morphism(self.steps[-1]).source if self.steps else self.sheaf.fan

    def pulled_back_polarisation(self) -> TDivisor:
        D = self.L
        for st in self.steps:
            D = pullback_divisor(step_morphism(st), D)
        return D

    def L_eps(self) -> TDivisor:
        return self.pulled_back_polarisation() + EpsPoly.eps() * self.Lp

    def pulled_back_sheaf(self) -> EquivariantSheaf:
        return pullback_chain(self.steps, self.sheaf)


def exceptional_divisor_sum(steps: Sequence[Step]) -> TDivisor | None:
    """Sum of the total transforms of the exceptional divisors of the blow-up steps."""
    total = None
    for i, st in enumerate(steps):
        if not isinstance(st, BlowupContext):
            continue
        D = TDivisor.ray(st.source, st.new_ray)
        for later in steps[i + 1:]:
            D = pullback_divisor(step_morphism(later), D)
        total = D if total is None else total + D
    return total


def make_setup(steps: Sequence[Step], sheaf: EquivariantSheaf, L: TDivisor,
               Lp: TDivisor | None = None) -> AdiabaticSetup:
    steps = tuple(steps)
    fan = sheaf.fan
    for st in steps:
        m = step_morphism(st)
        if m.target != fan:
            raise PreconditionError("steps do not form a chain over the sheaf's fan")
        fan = m.source
    if L.fan != sheaf.fan:
        raise PreconditionError("L does not live on the base fan")
    if Lp is None:
        exc = exceptional_divisor_sum(steps)
        if exc is None:
            raise PreconditionError("L' must be given when no blow-up is involved")
        Lp = -exc
    if Lp.fan != fan:
        raise PreconditionError("L' does not live on the source fan")
    return AdiabaticSetup(steps, sheaf, L, Lp)


def adiabatic_ampleness(setup: AdiabaticSetup) -> Fraction | None:
    """Radius of certified ampleness of L_eps (None: all eps > 0)."""
    if not is_ample(setup.L):
        raise PreconditionError("L is not ample")
    ok, radius = ample_threshold(setup.L_eps())
    if not ok:
        raise PreconditionError("L_eps is not ample for any small eps > 0")
    return radius


def adiabatic_slope_gap(setup: AdiabaticSetup, F: Subspace | Candidate):
    """mu_{L_eps}(E') - mu_{L_eps}(E'_F) as an exact polynomial in eps."""
    E1 = setup.pulled_back_sheaf()
    Le = setup.L_eps()
    c = F if isinstance(F, Candidate) else Candidate(F.dim, F, "given")
    if c.subspace is not None and (c.subspace.is_zero() or c.subspace == E1.space):
        raise PreconditionError("F must be a proper nonzero subspace of E")
    return EpsPoly.coerce(slope(E1, Le) - _slope_from_iotas(c.iotas(E1), c.dim, Le))


def adiabatic_verdict(setup: AdiabaticSetup, cands: CandidateSet | None = None,
                      threads: int = 1) -> Verdict:
    """Verdict valid for every eps in (0, epsilon_bound)."""
    require_complete(setup.source_fan)
    amp_radius = adiabatic_ampleness(setup)
    E1 = setup.pulled_back_sheaf()
    Le = setup.L_eps()
    cands = candidate_subspaces(E1) if cands is None else cands
    mu = EpsPoly.coerce(slope(E1, Le))

    def gap(c: Candidate):
        return EpsPoly.coerce(mu - _slope_from_iotas(c.iotas(E1), c.dim, Le))

    gaps = list(zip(cands.candidates, _parallel_map(gap, list(cands.candidates), threads)))
    kind, witnesses, cert = _decide(gaps, E1.rank <= 3)
    bound = min_radius([g.sign_radius() for _, g in gaps] + [amp_radius])
    unbounded = bound is None
    return Verdict(kind, witnesses, cert, mu, tuple(gaps),
                   epsilon_bound=Fraction(1) if unbounded else bound,
                   epsilon_unbounded=unbounded, completeness=cands.completeness)


# ---------------------------------------------------------------------------
# restricted slopes and the curve criterion


def restricted_slope(s: EquivariantSheaf, tau: Iterable[int], L: TDivisor):
    """(c_1(E) . L^{l-1} . V(tau)) / rk E with l = dim V(tau) >= 1."""
    fan = s.fan
    require_complete(fan)
    t = cone(tau)
    if t not in fan.cones:
        raise PreconditionError(f"{sorted(t)} is not a cone of the fan")
    ell = fan.rank - len(t)
    if ell < 1:
        raise PreconditionError("V(tau) must have positive dimension")
    num = intersection_number([first_chern(s)] + [L] * (ell - 1), CycleClass.orbit(fan, t))
    return _simplify(num / s.rank)


def wall_relation(fan, tau: Iterable[int]) -> dict[int, Fraction]:
    """alpha with sum alpha_rho u_rho = 0 over the two maximal cones at the wall tau,
    normalised to 1 on the two rays outside tau."""
    t = cone(tau)
    if len(t) != fan.rank - 1 or t not in fan.cones:
        raise PreconditionError(f"{sorted(t)} is not an (n-1)-dimensional cone")
    sides = fan.max_cones_containing(t)
    if len(sides) != 2:
        raise PreconditionError(f"{sorted(t)} is not a wall between two maximal cones")
    outer = sorted(next(iter(m - t)) for m in sides)
    rays = sorted(t) + outer
    mat = [[fan.rays[r][k] for r in rays] for k in range(fan.rank)]
    ker = nullspace(mat, len(rays))
    if len(ker) != 1:
        raise PreconditionError("degenerate wall")
    z = ker[0]
    a, b = z[-2], z[-1]
    if a == 0 or a != b:
        raise PreconditionError("wall relation is not balanced on the outer rays")
    return {r: x / a for r, x in zip(rays, z)}


def curve_blowup_criterion(b: BlowupContext, s: EquivariantSheaf, F: Subspace) -> Fraction:
    """sum over the wall rays of alpha_rho (iota_rho(E)/rk E - iota_rho(E_F)/rk F).

    Equal to c_1(E_F).V(tau)/rk F - c_1(E).V(tau)/rk E: positive values
    favour stability of the pullback, negative ones destabilise it.
    """
    fan = b.target
    if s.fan != fan:
        raise PreconditionError("sheaf does not live on the blown-up fan")
    if not is_smooth(fan):
        raise PreconditionError("the curve criterion needs a smooth toric variety")
    if F.ambient_dim != s.ambient_dim or not F <= s.space or F.is_zero():
        raise PreconditionError("F must be a nonzero subspace of E")
    alpha = wall_relation(fan, b.tau)
    out = Fraction(0)
    for r, a in alpha.items():
        flt = s.filtrations[r]
        out += a * (Fraction(flt.iota(), s.rank) - Fraction(flt.iota_of(F), F.dim))
    return out

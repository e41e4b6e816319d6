"""Simplicial fans, star subdivisions and toric morphisms."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import PreconditionError
from .linalg import (
    coordinates,
    dual_vectors,
    is_primitive,
    is_surjective_lattice_map,
    lattice_multiplicity,
    nullspace,
    rank,
)

Cone = frozenset  # frozenset of ray indices


def cone(indices: Iterable[int]) -> Cone:
    return frozenset(int(i) for i in indices)


def cone_key(c: Cone) -> tuple:
    """Canonical ordering of cones: by dimension, then by sorted indices."""
    return (len(c), tuple(sorted(c)))


class FanError(PreconditionError):
    def __init__(self, violations: list[str]):
        super().__init__("invalid fan: " + "; ".join(violations))
        self.violations = violations


class Fan:
    """A simplicial fan given by primitive rays and maximal cones.

    Rays are addressed by index; cones are frozensets of ray indices.
    Construction validates the fan unless ``check=False``.
    """

    def __init__(self, rank: int, rays: Sequence[Sequence[int]],
                 max_cones: Sequence[Iterable[int]], check: bool = True):
        self.rank = int(rank)
        self.rays: tuple[tuple[int, ...], ...] = tuple(tuple(int(x) for x in r) for r in rays)
        self.max_cones: tuple[Cone, ...] = tuple(cone(c) for c in max_cones)
        if check:
            problems = validate_fan(self)
            if problems:
                raise FanError(problems)

    # -- identity -------------------------------------------------------
    def _key(self):
        return (self.rank, self.rays, tuple(tuple(sorted(c)) for c in self.max_cones))

    def __eq__(self, other):
        return isinstance(other, Fan) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Fan(rank={self.rank}, rays={list(self.rays)}, max_cones={[sorted(c) for c in self.max_cones]})"

    def same_as(self, other: "Fan") -> bool:
        """Equality up to relabelling of the rays."""
        if self.rank != other.rank or set(self.rays) != set(other.rays):
            return False

        def vec_cones(f):
            return {frozenset(f.rays[i] for i in c) for c in f.max_cones}
        return vec_cones(self) == vec_cones(other)

    # -- combinatorics ---------------------------------------------------
    @cached_property
    def complete(self) -> bool:
        return _wall_criterion(self)

    @property
    def n_rays(self) -> int:
        return len(self.rays)

    @cached_property
    def cones(self) -> frozenset:
        out = set()
        for m in self.max_cones:
            items = sorted(m)
            for k in range(len(items) + 1):
                out.update(frozenset(c) for c in combinations(items, k))
        return frozenset(out)

    def cones_of_dim(self, k: int) -> list[Cone]:
        return sorted((c for c in self.cones if len(c) == k), key=cone_key)

    def is_cone(self, c: Iterable[int]) -> bool:
        return cone(c) in self.cones

    def generators(self, c: Iterable[int]) -> list[tuple[int, ...]]:
        return [self.rays[i] for i in sorted(c)]

    def mult(self, c: Cone) -> int:
        return self._mult_cache(c)

    @cached_property
    def _mults(self) -> dict:
        return {}

    def _mult_cache(self, c: Cone) -> int:
        m = self._mults.get(c)
        if m is None:
            m = lattice_multiplicity(self.generators(c))
            self._mults[c] = m
        return m

    @cached_property
    def _neighbours(self) -> dict:
        out: dict[Cone, list[int]] = {c: [] for c in self.cones}
        for c in self.cones:
            for m in self.max_cones:
                if c <= m:
                    for i in m - c:
                        if i not in out[c]:
                            out[c].append(i)
        return {c: sorted(v) for c, v in out.items()}

    def neighbours(self, c: Cone) -> list[int]:
        """Rays rho outside c such that c + rho is a cone of the fan."""
        return self._neighbours[c]

    def max_cones_containing(self, c: Cone) -> list[Cone]:
        return [m for m in self.max_cones if c <= m]

    def walls(self) -> list[Cone]:
        """(n-1)-dimensional cones lying in exactly two maximal cones."""
        return [t for t in self.cones_of_dim(self.rank - 1)
                if len(self.max_cones_containing(t)) == 2]

    @cached_property
    def _duals(self) -> dict:
        return {}

    def dual_basis(self, c: Cone) -> list[tuple[Fraction, ...]]:
        """Dual vectors p_i of the generators of c, ordered like sorted(c)."""
        d = self._duals.get(c)
        if d is None:
            d = dual_vectors(self.generators(c)) if c else []
            self._duals[c] = d
        return d

    def minimal_cone(self, v: Sequence) -> tuple[Cone, dict[int, Fraction]] | None:
        """Smallest cone containing v with the (positive) coordinates of v in it."""
        if all(x == 0 for x in v):
            return frozenset(), {}
        for m in self.max_cones:
            idx = sorted(m)
            lam = coordinates(tuple(Fraction(x) for x in v), self.generators(m), self.dual_basis(m))
            if lam is not None and all(x >= 0 for x in lam):
                coeffs = {i: x for i, x in zip(idx, lam) if x != 0}
                return frozenset(coeffs), coeffs
        return None


# ---------------------------------------------------------------------------
# validation


def _cones_meet_in_face(f: Fan, a: Cone, b: Cone) -> bool:
    """Whether Cone(a) ∩ Cone(b) equals the common face Cone(a ∩ b).

    Looks for an extreme ray of {(lam, mu) >= 0 : sum lam u = sum mu v}
    (a nonnegative circuit) that charges a ray outside the common face.
    """
    ga, gb = sorted(a), sorted(b)
    cols = [(f.rays[i], "a", i) for i in ga] + [(tuple(-x for x in f.rays[i]), "b", i) for i in gb]
    common = a & b
    m = len(cols)
    for size in range(2, min(m, f.rank + 1) + 1):
        for subset in combinations(range(m), size):
            if all(cols[s][2] in common for s in subset):
                continue
            mat = [[cols[s][0][r] for s in subset] for r in range(f.rank)]
            ker = nullspace(mat, size)
            if len(ker) != 1:
                continue
            z = ker[0]
            if any(x == 0 for x in z):
                continue
            if all(x > 0 for x in z) or all(x < 0 for x in z):
                if any(cols[s][2] not in common for s in subset):
                    return False
    return True


def validate_fan(f: Fan) -> list[str]:
    """All violated fan invariants, as human-readable messages."""
    out: list[str] = []
    if f.rank < 1:
        return [f"rank must be positive, got {f.rank}"]
    for i, r in enumerate(f.rays):
        if len(r) != f.rank:
            out.append(f"ray {i} has length {len(r)}, expected {f.rank}")
        elif all(x == 0 for x in r):
            out.append(f"ray {i} is zero")
        elif not is_primitive(r):
            out.append(f"ray {i} {list(r)} is not primitive")
    if len(set(f.rays)) != len(f.rays):
        out.append("rays are not distinct")
    if out:
        return out
    used = set()
    for c in f.max_cones:
        bad = [i for i in c if not 0 <= i < f.n_rays]
        if bad:
            out.append(f"cone {sorted(c)} references unknown rays {bad}")
            continue
        used |= c
        if c and rank(f.generators(c), f.rank) < len(c):
            out.append(f"cone {sorted(c)} is not simplicial")
    if out:
        return out
    for i in range(f.n_rays):
        if i not in used:
            out.append(f"ray {i} lies in no maximal cone")
    for a, b in combinations(f.max_cones, 2):
        if a <= b or b <= a:
            out.append(f"cones {sorted(a)} and {sorted(b)} are nested; list maximal cones only")
        elif not _cones_meet_in_face(f, a, b):
            out.append(f"cones {sorted(a)} and {sorted(b)} do not meet in a common face")
    return out


def is_complete(f: Fan) -> bool:
    """Wall criterion: pure of dimension n and every (n-1)-face in exactly two maximal cones."""
    return f.complete


def _wall_criterion(f: Fan) -> bool:
    if any(len(c) != f.rank for c in f.max_cones) or not f.max_cones:
        return False
    return all(len(f.max_cones_containing(t)) == 2 for t in f.cones_of_dim(f.rank - 1))


def is_smooth(f: Fan) -> bool:
    """Every maximal cone is full-dimensional with multiplicity 1."""
    return all(len(c) == f.rank and f.mult(c) == 1 for c in f.max_cones)


def is_simplicial(f: Fan) -> bool:
    return all(rank(f.generators(c), f.rank) == len(c) for c in f.max_cones if c)


def require_complete(f: Fan) -> None:
    if not is_complete(f):
        raise PreconditionError("operation requires a complete fan")


# ---------------------------------------------------------------------------
# morphisms


class ImageKind(enum.Enum):
    ZERO = "zero"
    RAY = "ray"
    HIGHER = "higher"


@dataclass(frozen=True)
class RayImage:
    """Where a source ray goes: to 0, onto a ray (with multiplicity b), or into a higher cone."""

    kind: ImageKind
    cone: Cone = frozenset()
    b: int | None = None
    coords: tuple = ()  # (ray index, coordinate) pairs of the image in `cone`

    @property
    def ray(self) -> int | None:
        return next(iter(self.cone)) if self.kind is ImageKind.RAY else None


class ToricMorphism:
    """An integer matrix N' -> N compatible with a source and a target fan.

    ``matrix`` has one row per target coordinate, acting on column vectors.
    """

    def __init__(self, matrix: Sequence[Sequence[int]], source: Fan, target: Fan):
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        self.source = source
        self.target = target
        if len(self.matrix) != target.rank or any(len(r) != source.rank for r in self.matrix):
            raise PreconditionError("matrix shape does not match the fans' ranks")
        self.ray_images = self._classify()
        for m in source.max_cones:
            union = frozenset().union(*(self.ray_images[i].cone for i in m)) if m else frozenset()
            if union not in target.cones:
                raise PreconditionError(
                    f"source cone {sorted(m)} is not mapped into a cone of the target fan")

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.matrix)

    def _classify(self) -> tuple[RayImage, ...]:
        out = []
        for i, u in enumerate(self.source.rays):
            v = self.apply(u)
            if all(x == 0 for x in v):
                out.append(RayImage(ImageKind.ZERO))
                continue
            found = self.target.minimal_cone(v)
            if found is None:
                raise PreconditionError(
                    f"image of source ray {i} lies in no cone of the target fan")
            c, coords = found
            items = tuple(sorted(coords.items()))
            if len(c) == 1:
                (j, b), = coords.items()
                out.append(RayImage(ImageKind.RAY, c, int(b), items))
            else:
                out.append(RayImage(ImageKind.HIGHER, c, None, items))
        return tuple(out)

    @property
    def exceptional_rays(self) -> list[int]:
        """Source rays whose image is not 0 or a ray (the contracted divisors)."""
        return [i for i, im in enumerate(self.ray_images) if im.kind is ImageKind.HIGHER]

    def __repr__(self):
        return f"ToricMorphism({[list(r) for r in self.matrix]})"


def classify_ray_images(m: ToricMorphism) -> tuple[RayImage, ...]:
    return m.ray_images


def identity_morphism(f: Fan) -> ToricMorphism:
    eye = [[int(i == j) for j in range(f.rank)] for i in range(f.rank)]
    return ToricMorphism(eye, f, f)


def compose(second: ToricMorphism, first: ToricMorphism) -> ToricMorphism:
    """``second ∘ first``."""
    if first.target != second.source:
        raise PreconditionError("morphisms are not composable")
    a, b = second.matrix, first.matrix
    prod = [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]
    return ToricMorphism(prod, first.source, second.target)


def is_fibration(m: ToricMorphism) -> bool:
    """Surjectivity of the lattice map; for complete fans this is the fibration condition."""
    return is_surjective_lattice_map(m.matrix)


# ---------------------------------------------------------------------------
# star subdivision


def star_subdivision(f: Fan, tau: Iterable[int]) -> tuple[Fan, ToricMorphism, int]:
    """Blow-up fan along V(tau); the new ray u_tau is appended last."""
    t = cone(tau)
    if t not in f.cones:
        raise PreconditionError(f"{sorted(t)} is not a cone of the fan")
    if len(t) < 2:
        raise PreconditionError("the centre must have dimension at least 2")
    containing = f.max_cones_containing(t)
    for m in containing:
        if f.mult(m) != 1:
            raise PreconditionError(f"maximal cone {sorted(m)} containing the centre is not smooth")
    u_tau = tuple(sum(f.rays[i][k] for i in t) for k in range(f.rank))
    new = f.n_rays
    cones = []
    for m in f.max_cones:
        if t <= m:
            for rho in sorted(t):
                cones.append((m - {rho}) | {new})
        else:
            cones.append(m)
    g = Fan(f.rank, f.rays + (u_tau,), cones, check=False)
    eye = [[int(i == j) for j in range(f.rank)] for i in range(f.rank)]
    return g, ToricMorphism(eye, g, f), new

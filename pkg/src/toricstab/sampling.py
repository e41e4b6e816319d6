"""Random subspaces and random equivariant sheaves for audits and property tests."""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from .fan import Fan
from .klyachko import EquivariantSheaf, Filtration
from .linalg import Subspace


def random_vector(rng: random.Random, n: int, bound: int = 3) -> tuple[int, ...]:
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(n))
        if any(v):
            return v


def random_subspace(rng: random.Random, space: Subspace, k: int, bound: int = 3) -> Subspace:
    """A random k-dimensional subspace of ``space`` with small integer coordinates."""
    if not 0 <= k <= space.dim:
        raise ValueError(f"cannot pick a {k}-dimensional subspace of a {space.dim}-dimensional space")
    basis = space.int_rows
    while True:
        vecs = []
        for _ in range(k):
            c = random_vector(rng, space.dim, bound)
            vecs.append(tuple(sum(ci * b[j] for ci, b in zip(c, basis)) for j in range(space.ambient_dim)))
        out = Subspace.span(vecs, space.ambient_dim)
        if out.dim == k:
            return out


def random_flag(rng: random.Random, space: Subspace, pool: Sequence[tuple] = (), bound: int = 2) -> list[Subspace]:
    """A random strictly increasing chain of subspaces ending at ``space``.

    Vectors are drawn from ``pool`` half of the time, so that different rays
    share special subspaces and the sheaf is not generic.
    """
    chain = []
    cur = Subspace.zero(space.ambient_dim)
    while cur != space:
        if pool and rng.random() < 0.5:
            v = rng.choice(list(pool))
        else:
            c = random_vector(rng, space.dim, bound)
            v = tuple(sum(ci * b[j] for ci, b in zip(c, space.basis)) for j in range(space.ambient_dim))
        nxt = cur + Subspace.span([v], space.ambient_dim)
        if nxt == cur:
            continue
        # sometimes jump by more than one dimension
        if nxt != space and rng.random() < 0.25:
            c2 = random_vector(rng, space.dim, bound)
            w = tuple(sum(ci * b[j] for ci, b in zip(c2, space.basis)) for j in range(space.ambient_dim))
            nxt = nxt + Subspace.span([w], space.ambient_dim)
        chain.append(nxt)
        cur = nxt
    return chain


def split_flag(rng: random.Random, basis: Sequence[tuple], ambient: int) -> list[Subspace]:
    """A random chain spanned by initial segments of a shuffled ``basis``."""
    order = list(basis)
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, len(order)), rng.randint(0, len(order) - 1))) + [len(order)]
    return [Subspace.span(order[:c], ambient) for c in cuts]


def random_sheaf(rng: random.Random, fan: Fan, rank: int, jump_range: tuple[int, int] = (-3, 3),
                 pool_size: int = 3, split_rays: Iterable[int] = ()) -> EquivariantSheaf:
    """Random family of filtrations of Q^rank on ``fan``.

    Rays in ``split_rays`` get flags adapted to one shared random basis, so
    the sheaf is locally free on every cone spanned by them.
    """
    top = Subspace.full(rank)
    pool = [random_vector(rng, rank, 2) for _ in range(pool_size)]
    split = set(split_rays)
    basis: list = []
    if split:
        # a random basis rather than an echelon one
        while True:
            basis = [random_vector(rng, rank, 2) for _ in range(rank)]
            if Subspace.span(basis, rank).dim == rank:
                break
    flts = []
    for r in range(fan.n_rays):
        chain = split_flag(rng, basis, rank) if r in split else random_flag(rng, top, pool)
        lo, hi = jump_range
        hi = max(hi, lo + len(chain) - 1)
        positions = sorted(rng.sample(range(lo, hi + 1), len(chain)))
        flts.append(Filtration(top, tuple(zip(positions, chain))))
    return EquivariantSheaf(fan, top, tuple(flts))

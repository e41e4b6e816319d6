"""Standard fans and the named fixtures shipped with the package."""

from __future__ import annotations

from fractions import Fraction

from .chow import TDivisor
from .errors import PreconditionError
from .fan import Fan
from .klyachko import EquivariantSheaf, tangent_sheaf
from .linalg import Subspace
from .serialization import Workspace


def _unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(int(k == i) for k in range(n))


def projective_space(n: int) -> Fan:
    """P^n: rays e_1..e_n, -(e_1+...+e_n) (last); cones omit one ray each."""
    rays = [_unit(n, i) for i in range(n)] + [tuple(-1 for _ in range(n))]
    cones = [[j for j in range(n + 1) if j != i] for i in range(n + 1)]
    return Fan(n, rays, cones)


def affine_plane() -> Fan:
    return Fan(2, [(1, 0), (0, 1)], [(0, 1)])


def hirzebruch(a: int) -> Fan:
    """F_a: rays (1,0), (0,1), (-1,a), (0,-1); a = 0 is P^1 x P^1."""
    return Fan(2, [(1, 0), (0, 1), (-1, a), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])


def weighted_example_fan() -> Fan:
    """The singular surface with rays e1, e2, e2 - 2 e1, -e2."""
    return Fan(2, [(1, 0), (0, 1), (-2, 1), (0, -1)], [(0, 1), (1, 2), (2, 3), (3, 0)])


def projective_bundle_fan(r: int) -> Fan:
    """P(O^r + O(1)) over P^1.

    Ray order w0, w1, v0, v1, ..., vr with (w1, v1, ..., vr) the standard
    basis, v0 = -(v1 + ... + vr) and w0 = vr - w1.  Maximal cones are
    Cone(w_j) + Cone(all v except v_i).
    """
    if r < 1:
        raise PreconditionError("r must be positive")
    n = r + 1
    w1 = _unit(n, 0)
    vs = [_unit(n, i) for i in range(1, n)]
    v0 = tuple(-sum(v[k] for v in vs) for k in range(n))
    w0 = tuple(vs[-1][k] - w1[k] for k in range(n))
    rays = [w0, w1, v0] + vs
    cones = []
    for j in (0, 1):
        for i in range(r + 1):
            cones.append([j] + [2 + k for k in range(r + 1) if k != i])
    return Fan(n, rays, cones)


# ---------------------------------------------------------------------------
# named workspaces


def example_3_6(a=1, b=2) -> Workspace:
    f = weighted_example_fan()
    E = tangent_sheaf(f)
    subs = {f"F{i + 1}": Subspace.span([u]) for i, u in enumerate(f.rays)}
    return Workspace(f, E, TDivisor.anticanonical(f), [0, 0, Fraction(a), Fraction(b)], [], subs,
                     description="tangent sheaf of a singular Fano surface, L = -K, L' = a D3 + b D4")


def example_4_4() -> Workspace:
    f = affine_plane()
    E = EquivariantSheaf.from_steps(f, 2, [
        [(1, [(1, 0)]), (3, Subspace.full(2))],
        [(1, [(0, 1)]), (2, Subspace.full(2))],
    ])
    return Workspace(f, E, None, None, [[0, 1]], {"F": Subspace.span([(1, 1)])},
                     description="rank 2 sheaf on the affine plane blown up at the origin")


def picard_two(r: int, nu=None, centre: str | None = None) -> Workspace:
    """Tangent sheaf of P(O^r + O(1)) with L = nu D_w0 + D_v0 (default nu = 1/(r+1))."""
    f = projective_bundle_fan(r)
    nu = Fraction(1, r + 1) if nu is None else Fraction(nu)
    L = TDivisor(f, tuple([nu, 0, 1] + [0] * r))
    F = Subspace.span([f.rays[2 + i] for i in range(r + 1)])
    centres = {
        None: [],
        "stabilising": [[0] + [2 + i for i in range(1, r)]],
        "destabilising": [[2 + i for i in range(r)]],
    }
    return Workspace(f, tangent_sheaf(f), L, None, centres[centre], {"F": F},
                     description=f"tangent sheaf of P(O^{r} + O(1)) over P^1")


def p2() -> Workspace:
    f = projective_space(2)
    return Workspace(f, tangent_sheaf(f), TDivisor.ray(f, 0), None, [], {},
                     description="tangent sheaf of P^2, L = H")


def p3() -> Workspace:
    f = projective_space(3)
    return Workspace(f, tangent_sheaf(f), TDivisor.ray(f, 0), None, [], {},
                     description="tangent sheaf of P^3, L = H")


def p2_nonsaturated(centre=(0, 1)) -> Workspace:
    """Strictly semistable rank 2 sheaf on P^2 with a single equal-slope line F.

    Blowing up the fixed point of Cone(e1, e2) breaks saturation of the
    pulled-back E_F; the point of Cone(e2, e0) does not.
    """
    f = projective_space(2)
    E = EquivariantSheaf.from_steps(f, 2, [
        [(1, [(1, 0)]), (3, Subspace.full(2))],
        [(1, [(0, 1)]), (2, Subspace.full(2))],
        [(0, [(1, 1)]), (3, Subspace.full(2))],
    ])
    return Workspace(f, E, TDivisor.ray(f, 0), None, [sorted(centre)], {"F": Subspace.span([(1, 1)])},
                     description="strictly semistable rank 2 sheaf on P^2")


FIXTURES = {
    "example-3-6": example_3_6,
    "example-4-4": example_4_4,
    "picard2-r2": lambda: picard_two(2),
    "picard2-r3": lambda: picard_two(3),
    "picard2-r2-stabilising": lambda: picard_two(2, centre="stabilising"),
    "picard2-r2-destabilising": lambda: picard_two(2, centre="destabilising"),
    "picard2-r3-stabilising": lambda: picard_two(3, centre="stabilising"),
    "picard2-r3-destabilising": lambda: picard_two(3, centre="destabilising"),
    "p2": p2,
    "p3": p3,
    "p2-nonsaturated": p2_nonsaturated,
}


def load_fixture(name: str) -> Workspace:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}") from None

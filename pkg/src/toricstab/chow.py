"""Intersection theory on complete simplicial fans.

Divisor coefficients may be rationals or :class:`EpsPoly`, so adiabatic
classes ``pi^* L + eps L'`` go through exactly the same code as plain ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import PreconditionError
from .fan import Cone, Fan, ImageKind, ToricMorphism, cone, cone_key, require_complete
from .linalg import dot, solve_integer, to_fraction
from .polynomial import EpsPoly, min_radius


def _scalar(x):
    return x if isinstance(x, EpsPoly) else to_fraction(x)


def _simplify(x):
    """Constant EpsPolys collapse back to Fractions."""
    if isinstance(x, EpsPoly) and x.degree <= 0:
        return x.coefficient(0)
    return x


@dataclass(frozen=True)
class TDivisor:
    """A torus-invariant divisor sum a_rho D_rho on a fixed fan."""

    fan: Fan
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.fan.n_rays:
            raise PreconditionError(
                f"divisor has {len(self.coeffs)} coefficients, fan has {self.fan.n_rays} rays")
        object.__setattr__(self, "coeffs", tuple(_simplify(_scalar(c)) for c in self.coeffs))

    @classmethod
    def of(cls, fan: Fan, coeffs: Iterable) -> "TDivisor":
        return cls(fan, tuple(coeffs))

    @classmethod
    def ray(cls, fan: Fan, i: int, coeff=1) -> "TDivisor":
        return cls(fan, tuple(coeff if j == i else 0 for j in range(fan.n_rays)))

    @classmethod
    def zero(cls, fan: Fan) -> "TDivisor":
        return cls(fan, (0,) * fan.n_rays)

    @classmethod
    def anticanonical(cls, fan: Fan) -> "TDivisor":
        return cls(fan, (1,) * fan.n_rays)

    def __getitem__(self, i):
        return self.coeffs[i]

    def _check(self, other):
        if not isinstance(other, TDivisor):
            return False
        if other.fan != self.fan:
            raise PreconditionError("divisors live on different fans")
        return True

    def __add__(self, other):
        if not self._check(other):
            return NotImplemented
        return TDivisor(self.fan, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not self._check(other):
            return NotImplemented
        return TDivisor(self.fan, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return TDivisor(self.fan, tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        if isinstance(k, TDivisor):
            return NotImplemented
        k = _scalar(k)
        return TDivisor(self.fan, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return all(isinstance(a, Fraction) and a.denominator == 1 for a in self.coeffs)

    def has_eps(self) -> bool:
        return any(isinstance(a, EpsPoly) for a in self.coeffs)

    def __repr__(self):
        return "TDivisor(" + ", ".join(str(a) for a in self.coeffs) + ")"


def principal_divisor(fan: Fan, m: Sequence) -> TDivisor:
    """div(chi^m) = sum <m, u_rho> D_rho."""
    return TDivisor(fan, tuple(dot(m, u) for u in fan.rays))


@dataclass(frozen=True)
class CycleClass:
    """A combination of orbit closures [V(sigma)], all of the same codimension."""

    fan: Fan
    terms: tuple  # ((cone, scalar), ...) in canonical cone order, nonzero scalars only

    @classmethod
    def from_dict(cls, fan: Fan, terms: dict) -> "CycleClass":
        items = [(c, _simplify(v)) for c, v in terms.items() if v != 0]
        dims = {len(c) for c, _ in items}
        if len(dims) > 1:
            raise PreconditionError("cycle terms of mixed dimension")
        for c, _ in items:
            if c not in fan.cones:
                raise PreconditionError(f"{sorted(c)} is not a cone of the fan")
        return cls(fan, tuple(sorted(items, key=lambda t: cone_key(t[0]))))

    @classmethod
    def orbit(cls, fan: Fan, sigma: Iterable[int], coeff=1) -> "CycleClass":
        return cls.from_dict(fan, {cone(sigma): _scalar(coeff)})

    @classmethod
    def fundamental(cls, fan: Fan) -> "CycleClass":
        return cls.orbit(fan, ())

    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def dimension(self) -> int | None:
        """Dimension of the cycles (n - dim sigma); None for the zero class."""
        if not self.terms:
            return None
        return self.fan.rank - len(self.terms[0][0])

    def degree(self):
        """Degree of a 0-cycle: each [V(sigma)], sigma maximal, is a point."""
        if self.terms and self.dimension != 0:
            raise PreconditionError("degree is only defined for 0-cycles")
        return _simplify(sum((v for _, v in self.terms), Fraction(0)))


def _moved_coefficients(D: TDivisor, sigma: Cone) -> list:
    """Coefficients of D + div(chi^m) with m chosen so they vanish on sigma."""
    fan = D.fan
    if not sigma:
        return list(D.coeffs)
    idx = sorted(sigma)
    duals = fan.dual_basis(sigma)
    out = []
    for r, u in enumerate(fan.rays):
        if r in sigma:
            out.append(Fraction(0))
            continue
        acc = D.coeffs[r]
        for i, p in zip(idx, duals):
            a = D.coeffs[i]
            if a != 0:
                pu = dot(p, u)
                if pu != 0:
                    acc = acc - a * pu
        out.append(acc)
    return out


def divisor_dot_cycle(D: TDivisor, c: CycleClass) -> CycleClass:
    fan = D.fan
    if c.fan != fan:
        raise PreconditionError("divisor and cycle live on different fans")
    require_complete(fan)
    if c.dimension == 0:
        raise PreconditionError("cannot intersect a divisor with a 0-cycle")
    out: dict = {}
    for sigma, coeff in c.terms:
        moved = _moved_coefficients(D, sigma)
        m_sigma = fan.mult(sigma)
        for r in fan.neighbours(sigma):
            a = moved[r]
            if a == 0:
                continue
            bigger = sigma | {r}
            term = coeff * a * Fraction(m_sigma, fan.mult(bigger))
            out[bigger] = out.get(bigger, Fraction(0)) + term
    return CycleClass.from_dict(fan, out)


def intersect(divisors: Sequence[TDivisor], cycle: CycleClass | None = None) -> CycleClass:
    """D_1 ... D_k . cycle (default: the fundamental class)."""
    if not divisors and cycle is None:
        raise PreconditionError("nothing to intersect")
    fan = divisors[0].fan if divisors else cycle.fan
    c = CycleClass.fundamental(fan) if cycle is None else cycle
    for D in divisors:
        c = divisor_dot_cycle(D, c)
    return c


def intersection_number(divisors: Sequence[TDivisor], cycle: CycleClass | None = None):
    """Degree of D_1 ... D_k . cycle, which must be a 0-cycle."""
    if not divisors:
        raise PreconditionError("need at least one divisor")
    fan = divisors[0].fan
    expected = fan.rank if cycle is None else cycle.dimension
    if expected is not None and len(divisors) != expected:
        raise PreconditionError(
            f"need exactly {expected} divisors, got {len(divisors)}")
    return intersect(divisors, cycle).degree()


@lru_cache(maxsize=256)
def _power_curve(L: TDivisor) -> CycleClass:
    return intersect([L] * (L.fan.rank - 1)) if L.fan.rank > 1 else CycleClass.fundamental(L.fan)


def degree(D: TDivisor, L: TDivisor):
    """deg_L(D) = D . L^{n-1}."""
    if D.fan != L.fan:
        raise PreconditionError("divisor and polarisation live on different fans")
    require_complete(D.fan)
    return divisor_dot_cycle(D, _power_curve(L)).degree()


@lru_cache(maxsize=256)
def ray_degrees(L: TDivisor) -> tuple:
    """(deg_L(D_rho))_rho, sharing one computation of L^{n-1}."""
    require_complete(L.fan)
    curve = _power_curve(L)
    return tuple(divisor_dot_cycle(TDivisor.ray(L.fan, r), curve).degree()
                 for r in range(L.fan.n_rays))


# ---------------------------------------------------------------------------
# Cartier and ample


def cartier_data(D: TDivisor) -> dict | None:
    """Integral m_sigma with <m_sigma, u_rho> = -a_rho on every maximal cone, or None."""
    if not D.is_integral():
        raise PreconditionError("Cartier test needs integer coefficients")
    fan = D.fan
    out = {}
    for sigma in fan.max_cones:
        idx = sorted(sigma)
        m = solve_integer([fan.rays[i] for i in idx], [-D.coeffs[i] for i in idx])
        if m is None:
            return None
        out[sigma] = m
    return out


def is_cartier(D: TDivisor) -> bool:
    return cartier_data(D) is not None


def wall_degrees(D: TDivisor) -> list[tuple[Cone, object]]:
    """D . V(tau) for every wall tau."""
    fan = D.fan
    require_complete(fan)
    return [(t, divisor_dot_cycle(D, CycleClass.orbit(fan, t)).degree()) for t in fan.walls()]


def is_ample(D: TDivisor) -> bool:
    """Toric Kleiman criterion: positive on every invariant curve."""
    if D.has_eps():
        raise PreconditionError("use ample_threshold for eps-dependent divisors")
    return all(v > 0 for _, v in wall_degrees(D))


def ample_threshold(D: TDivisor) -> tuple[bool, Fraction | None]:
    """For D = D(eps): (ample for all small eps, radius of certified ampleness).

    The radius is None when ampleness holds on the whole half line eps > 0.
    """
    radii = []
    for _, v in wall_degrees(D):
        p = EpsPoly.coerce(v)
        if p.germ_sign() <= 0:
            return False, None
        radii.append(p.sign_radius())
    return True, min_radius(radii)


def adiabatic_ample_threshold(L: TDivisor, Lp: TDivisor) -> Fraction | None:
    """eps_A with L + eps Lp ample for 0 < eps < eps_A (None: every eps > 0)."""
    if not is_ample(L):
        raise PreconditionError("L is not ample")
    ok, radius = ample_threshold(L + EpsPoly.eps() * Lp)
    assert ok  # constant terms are the wall degrees of L, all positive
    return radius


# ---------------------------------------------------------------------------
# pullback


def pullback_divisor(m: ToricMorphism, D: TDivisor) -> TDivisor:
    """pi^* D: the coefficient of a source ray is -phi_D(phi(u')).

    phi_D is linear on each target cone with phi_D(u_rho) = -a_rho, so if
    phi(u') = sum lam_i u_i in its minimal cone the coefficient is
    sum lam_i a_i.  On a simplicial fan every divisor is Q-Cartier and this
    agrees with pulling back c D for a Cartier multiple and dividing by c.
    """
    if D.fan != m.target:
        raise PreconditionError("divisor does not live on the target fan")
    out = []
    for im in m.ray_images:
        if im.kind is ImageKind.ZERO:
            out.append(0)
        else:
            out.append(sum((lam * D.coeffs[i] for i, lam in im.coords), Fraction(0)))
    return TDivisor(m.source, tuple(out))

"""Univariate polynomials in the perturbation parameter epsilon.

:class:`EpsPoly` is the scalar ring used for adiabatic classes
``L_eps = pi^* L + eps L'``.  Rationals and polynomials mix freely under
``+``, ``-`` and ``*``, so the intersection code is written once for both.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from .linalg import to_fraction

Scalar = Union[Fraction, "EpsPoly"]


class EpsPoly:
    """Polynomial in eps with rational coefficients, lowest degree first."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable = ()):
        cs = [to_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self._hash = None

    @classmethod
    def eps(cls) -> "EpsPoly":
        return cls((0, 1))

    @classmethod
    def coerce(cls, x) -> "EpsPoly":
        return x if isinstance(x, EpsPoly) else cls((x,))

    # ------------------------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def valuation(self) -> int | None:
        """Index of the lowest nonzero coefficient (None for zero)."""
        return next((k for k, c in enumerate(self.coeffs) if c != 0), None)

    def leading_term(self) -> tuple[int, Fraction] | None:
        """(k, a_k) for the lowest-order nonzero term, the germ at eps -> 0+."""
        k = self.valuation()
        return None if k is None else (k, self.coeffs[k])

    def germ_sign(self) -> int:
        """Sign of the polynomial for all sufficiently small eps > 0."""
        lt = self.leading_term()
        if lt is None:
            return 0
        return 1 if lt[1] > 0 else -1

    def sign_radius(self) -> Fraction | None:
        """A rational r > 0 with sign(p(eps)) = germ_sign for all 0 < eps < r.

        With a_k the lowest nonzero coefficient and M the largest |a_j|, j > k,
        among coefficients of the opposite sign, r = |a_k| / (|a_k| + M).
        Returns None when no such coefficient exists (sign constant on the
        whole half line) or for the zero polynomial.
        """
        k = self.valuation()
        if k is None:
            return None
        ak = self.coeffs[k]
        opposite = [abs(c) for c in self.coeffs[k + 1:] if c * ak < 0]
        if not opposite:
            return None
        return abs(ak) / (abs(ak) + max(opposite))

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    # ------------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (EpsPoly, int, Fraction)):
            return NotImplemented
        o = EpsPoly.coerce(other).coeffs
        a = self.coeffs
        n = max(len(a), len(o))
        return EpsPoly((a[i] if i < len(a) else 0) + (o[i] if i < len(o) else 0) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return EpsPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, (EpsPoly, int, Fraction)):
            return NotImplemented
        return self + (-EpsPoly.coerce(other))

    def __rsub__(self, other):
        return EpsPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return EpsPoly(c * other for c in self.coeffs)
        if not isinstance(other, EpsPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return EpsPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return EpsPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return EpsPoly(c / other for c in self.coeffs)
        return NotImplemented

    def __pow__(self, k: int):
        out = EpsPoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, EpsPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == EpsPoly((other,)).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs[0]) if len(self.coeffs) == 1 else (
                0 if not self.coeffs else hash(("eps",) + self.coeffs))
        return self._hash

    def __repr__(self) -> str:
        return f"EpsPoly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("eps" if k == 1 else f"eps^{k}")
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def as_poly(x) -> EpsPoly:
    return EpsPoly.coerce(x)


def germ_sign(x) -> int:
    """Sign of a rational, or the small-eps sign of an EpsPoly."""
    if isinstance(x, EpsPoly):
        return x.germ_sign()
    return (x > 0) - (x < 0)


def is_zero(x) -> bool:
    return x == 0


def min_radius(radii: Iterable[Fraction | None]) -> Fraction | None:
    """Minimum of the finite radii; None if every radius is unbounded."""
    finite = [r for r in radii if r is not None]
    return min(finite) if finite else None

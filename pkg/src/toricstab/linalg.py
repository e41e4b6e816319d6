"""Exact linear algebra over Q and integer lattice utilities.

Everything here works on plain Python sequences of ``int`` / ``Fraction``;
no floating point is ever produced.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

from .errors import PreconditionError

Vector = tuple  # tuple of Fraction (or int for lattice vectors)


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions and rational strings like ``"-3/4"`` to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def frac_vector(v: Iterable) -> Vector:
    return tuple(to_fraction(x) for x in v)


def dot(u: Sequence, v: Sequence):
    s = 0
    for a, b in zip(u, v):
        s += a * b
    return s


def _integer_row(row) -> list[int]:
    """Positive multiple of a rational row with integer entries."""
    if all(type(x) is int for x in row):
        return list(row)
    fr = [to_fraction(x) for x in row]
    den = 1
    for x in fr:
        if x.denominator != 1:
            den = den * x.denominator // gcd(den, x.denominator)
    return [int(x * den) for x in fr]


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    return row if g in (0, 1) else [x // g for x in row]


def _echelon(m: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free reduced echelon form of integer rows (modified in place)."""
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        row = m[r]
        pv = row[c]
        for i in range(len(m)):
            if i != r:
                f = m[i][c]
                if f != 0:
                    m[i] = _primitive([pv * a - f * b for a, b in zip(m[i], row)])
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with pivots normalised to 1.

    Returns the nonzero rows and their pivot columns.  Elimination runs on
    integer rows (fraction free) and only the final rows become Fractions.
    """
    m, pivots = _echelon([_integer_row(r) for r in rows], ncols)
    return [[Fraction(x, row[c]) for x in row] for row, c in zip(m, pivots)], pivots


def _int_rank(rows: list[list[int]], ncols: int) -> int:
    return len(_echelon([list(r) for r in rows], ncols)[1])


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols if ncols is not None else len(rows[0]))[0])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of ``{x : row . x = 0 for every row}``."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def dual_vectors(gens: Sequence[Sequence]) -> list[Vector]:
    """Vectors ``p_i`` in the span of ``gens`` with ``<p_i, g_j> = delta_ij``.

    ``gens`` must be linearly independent.
    """
    k = len(gens)
    if k == 0:
        return []
    n = len(gens[0])
    gram = [[Fraction(dot(gi, gj)) for gj in gens] for gi in gens]
    aug = [gram[i] + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    red, piv = rref(aug, 2 * k)
    if piv[:k] != list(range(k)) or len(red) < k:
        raise PreconditionError("generators are linearly dependent")
    inv = [row[k:] for row in red]
    return [tuple(sum(inv[i][j] * gens[j][c] for j in range(k)) for c in range(n))
            for i in range(k)]


def coordinates(v: Sequence, gens: Sequence[Sequence], duals=None) -> tuple | None:
    """Coordinates of ``v`` in the independent family ``gens``; None if not in the span."""
    duals = dual_vectors(gens) if duals is None else duals
    lam = tuple(dot(p, v) for p in duals)
    n = len(v)
    back = [sum((lam[i] * gens[i][c] for i in range(len(gens))), Fraction(0)) for c in range(n)]
    if any(back[c] != v[c] for c in range(n)):
        return None
    return lam


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^n stored by its canonical RREF basis."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int | None = None) -> "Subspace":
        vecs = [frac_vector(v) for v in vectors]
        if ambient_dim is None:
            if not vecs:
                raise PreconditionError("ambient dimension needed for an empty span")
            ambient_dim = len(vecs[0])
        if any(len(v) != ambient_dim for v in vecs):
            raise PreconditionError("vector length does not match ambient dimension")
        red, _ = rref(vecs, ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(c for c, x in enumerate(r) if x != 0) for r in self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    @cached_property
    def int_rows(self) -> tuple[tuple[int, ...], ...]:
        """The basis rows scaled to primitive integer vectors."""
        return tuple(tuple(_primitive(_integer_row(r))) for r in self.basis)

    def residue(self, v: Sequence) -> list[int]:
        """An integer multiple of v reduced against the basis; zero iff v lies in the subspace."""
        if len(v) != self.ambient_dim:
            raise PreconditionError("ambient dimension mismatch")
        w = _integer_row(v)
        for row, p in zip(self.int_rows, self.pivots):
            f = w[p]
            if f != 0:
                pv = row[p]
                w = [pv * a - f * b for a, b in zip(w, row)]
        return w

    def contains(self, v: Sequence) -> bool:
        return not any(self.residue(v))

    def __le__(self, other: "Subspace") -> bool:
        _check_same_ambient(self, other)
        if self.dim > other.dim:
            return False
        return all(other.contains(v) for v in self.int_rows)

    def __lt__(self, other: "Subspace") -> bool:
        return self.dim < other.dim and self <= other

    def meet(self, other: "Subspace") -> "Subspace":
        return subspace_meet(self, other)

    def join(self, other: "Subspace") -> "Subspace":
        return subspace_join(self, other)

    __and__ = meet
    __add__ = join

    def sort_key(self):
        return (self.dim, self.basis)

    @cached_property
    def _hash(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __hash__(self):
        return self._hash

    def __repr__(self) -> str:
        rows = ", ".join("(" + ",".join(str(x) for x in r) + ")" for r in self.basis)
        return f"Span[{rows}]" if rows else f"Zero({self.ambient_dim})"


def _check_same_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise PreconditionError(
            f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def _from_int_rows(rows: list[list[int]], n: int) -> Subspace:
    m, pivots = _echelon(rows, n)
    return Subspace(n, tuple(tuple(Fraction(x, row[c]) for x in row) for row, c in zip(m, pivots)))


def subspace_join(a: Subspace, b: Subspace) -> Subspace:
    """A + B."""
    _check_same_ambient(a, b)
    if a.is_zero() or b.is_full() or a == b:
        return b
    if b.is_zero() or a.is_full():
        return a
    if a.dim > b.dim:
        a, b = b, a
    extra = [r for r in (b.residue(v) for v in a.int_rows) if any(r)]
    if not extra:
        return b
    return _from_int_rows([list(r) for r in b.int_rows] + extra, a.ambient_dim)


def subspace_meet(a: Subspace, b: Subspace) -> Subspace:
    """A ∩ B via the Zassenhaus block reduction of [[A, A], [B, 0]]."""
    _check_same_ambient(a, b)
    n = a.ambient_dim
    if a.is_zero() or b.is_full() or a == b:
        return a
    if b.is_zero() or a.is_full():
        return b
    if a.dim > b.dim:
        a, b = b, a
    if a <= b:
        return a
    rows = [list(r) + list(r) for r in a.int_rows] + [list(r) + [0] * n for r in b.int_rows]
    m, pivots = _echelon(rows, 2 * n)
    inter = [row[n:] for row, p in zip(m, pivots) if p >= n]
    return _from_int_rows(inter, n)


def meet_dim(a: Subspace, b: Subspace) -> int:
    """dim(A ∩ B) without computing the intersection."""
    _check_same_ambient(a, b)
    if a.is_zero() or b.is_zero():
        return 0
    if b.is_full():
        return a.dim
    if a.is_full():
        return b.dim
    if a.dim > b.dim:
        a, b = b, a
    res = [r for r in (b.residue(v) for v in a.int_rows) if any(r)]
    return a.dim - (_int_rank(res, a.ambient_dim) if res else 0)


# ---------------------------------------------------------------------------
# integer lattices


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def column_hermite(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Column-style Hermite reduction of a full-row-rank integer matrix.

    For a k x n matrix A returns (H, V) with V unimodular (n x n) and
    ``A V = H`` where H = [B | 0] and B is lower triangular with positive
    diagonal.
    """
    a = [[int(x) for x in r] for r in rows]
    k = len(a)
    n = len(a[0]) if k else 0
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(i: int, j: int, p: int, q: int, r: int, s: int) -> None:
        # (col_i, col_j) <- (p col_i + q col_j, r col_i + s col_j)
        for mat in (a, v):
            for row in mat:
                ci, cj = row[i], row[j]
                row[i], row[j] = p * ci + q * cj, r * ci + s * cj

    for i in range(k):
        for j in range(i + 1, n):
            x, y = a[i][i], a[i][j]
            if y == 0:
                continue
            g, s, t = _xgcd(x, y)
            # det [[s, -y/g], [t, x/g]] = (s x + t y)/g = 1
            colop(i, j, s, t, -y // g, x // g)
        if a[i][i] == 0:
            raise PreconditionError("integer matrix does not have full row rank")
        if a[i][i] < 0:
            for mat in (a, v):
                for row in mat:
                    row[i] = -row[i]
    return a, v


def lattice_multiplicity(generators: Sequence[Sequence[int]]) -> int:
    """Index of the Z-span of ``generators`` in its saturation.

    Equal to the gcd of the maximal minors of the generator matrix.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        return 1
    if rank(gens) < len(gens):
        raise PreconditionError("generators are linearly dependent")
    h, _ = column_hermite(gens)
    d = 1
    for i in range(len(gens)):
        d *= h[i][i]
    return abs(d)


def is_primitive(v: Sequence[int]) -> bool:
    if all(x == 0 for x in v):
        raise PreconditionError("the zero vector has no primitivity")
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g == 1


def is_surjective_lattice_map(matrix: Sequence[Sequence[int]]) -> bool:
    """Whether the integer matrix (acting on column vectors) maps Z^m onto Z^n."""
    rows = [list(r) for r in matrix]
    if not rows:
        return True
    if rank(rows) < len(rows):
        return False
    h, _ = column_hermite(rows)
    return all(h[i][i] == 1 for i in range(len(rows)))


def solve_integer(rows: Sequence[Sequence[int]], rhs: Sequence) -> tuple[int, ...] | None:
    """An integer solution of ``A x = b`` for full-row-rank integer A, or None."""
    k = len(rows)
    if k == 0:
        return ()
    n = len(rows[0])
    b = [to_fraction(x) for x in rhs]
    if any(x.denominator != 1 for x in b):
        return None
    h, v = column_hermite(rows)
    y = []
    for i in range(k):
        acc = int(b[i]) - sum(h[i][j] * y[j] for j in range(i))
        if acc % h[i][i]:
            return None
        y.append(acc // h[i][i])
    return tuple(sum(v[r][j] * y[j] for j in range(k)) for r in range(n))

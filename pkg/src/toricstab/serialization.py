"""JSON encoding of fans, sheaves, divisors and workspaces.

Rationals are written as strings ("p/q" or "p") so that no value ever
passes through a float.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .chow import TDivisor
from .errors import SchemaError
from .fan import Fan
from .klyachko import EquivariantSheaf, Filtration
from .linalg import Subspace
from .polynomial import EpsPoly


def rat_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_rat(x) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise SchemaError(f"rationals must be integers or strings, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            raise SchemaError(f"not a rational: {x!r}") from None
    raise SchemaError(f"not a rational: {x!r}")


def parse_int(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(f"expected an integer, got {x!r}")
    return x


def scalar_json(x):
    """Rationals as strings, eps-polynomials as coefficient lists (lowest degree first)."""
    if isinstance(x, EpsPoly):
        return [rat_str(c) for c in x.coeffs]
    return rat_str(x)


def _require(d, key, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"missing field {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"field {key!r} has the wrong type")
    return v


# ---------------------------------------------------------------------------
# fans


def fan_to_json(f: Fan) -> dict:
    return {"rank": f.rank, "rays": [list(r) for r in f.rays],
            "max_cones": [sorted(c) for c in f.max_cones]}


def fan_from_json(d: dict) -> Fan:
    rank = parse_int(_require(d, "rank"))
    rays = _require(d, "rays", list)
    cones = _require(d, "max_cones", list)
    try:
        rays = [[parse_int(x) for x in r] for r in rays]
        cones = [[parse_int(i) for i in c] for c in cones]
    except TypeError:
        raise SchemaError("rays and max_cones must be lists of lists of integers") from None
    return Fan(rank, rays, cones)


# ---------------------------------------------------------------------------
# subspaces and sheaves


def subspace_to_json(v: Subspace) -> list:
    return [[rat_str(x) for x in row] for row in v.basis]


def subspace_from_json(rows, ambient_dim: int) -> Subspace:
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise SchemaError("a span must be a list of vectors")
    vecs = [[parse_rat(x) for x in r] for r in rows]
    if any(len(v) != ambient_dim for v in vecs):
        raise SchemaError(f"span vectors must have length {ambient_dim}")
    return Subspace.span(vecs, ambient_dim)


def sheaf_to_json(s: EquivariantSheaf) -> dict:
    out = {"rank": s.rank, "filtrations": {
        str(i): [{"jump": j, "span": subspace_to_json(v)} for j, v in flt.jumps]
        for i, flt in enumerate(s.filtrations)}}
    if s.space != Subspace.full(s.ambient_dim):
        out["ambient_dim"] = s.ambient_dim
        out["space"] = subspace_to_json(s.space)
    return out


def sheaf_from_json(d: dict, fan: Fan) -> EquivariantSheaf:
    rank = parse_int(_require(d, "rank"))
    n = parse_int(d.get("ambient_dim", rank))
    space = subspace_from_json(d["space"], n) if "space" in d else Subspace.full(n)
    if space.dim != rank:
        raise SchemaError("rank does not match the dimension of the space")
    flts_json = _require(d, "filtrations", dict)
    flts = []
    for i in range(fan.n_rays):
        steps = flts_json.get(str(i))
        if steps is None:
            raise SchemaError(f"no filtration given for ray {i}")
        if not isinstance(steps, list):
            raise SchemaError(f"filtration for ray {i} must be a list")
        pairs = [(parse_int(_require(st, "jump")), subspace_from_json(_require(st, "span"), n))
                 for st in steps]
        flts.append(Filtration.build(space, pairs))
    extra = set(flts_json) - {str(i) for i in range(fan.n_rays)}
    if extra:
        raise SchemaError(f"filtrations given for unknown rays {sorted(extra)}")
    return EquivariantSheaf(fan, space, tuple(flts))


# ---------------------------------------------------------------------------
# divisors


def divisor_to_json(D: TDivisor) -> list:
    return [scalar_json(a) for a in D.coeffs]


def divisor_from_json(d, fan: Fan) -> TDivisor:
    if isinstance(d, dict):
        d = _require(d, "coefficients", list)
    if not isinstance(d, list):
        raise SchemaError("a divisor is a list of rationals or {'coefficients': [...]}")
    if len(d) != fan.n_rays:
        raise SchemaError(f"divisor needs {fan.n_rays} coefficients, got {len(d)}")
    return TDivisor(fan, tuple(parse_rat(x) for x in d))


# ---------------------------------------------------------------------------
# workspace


@dataclass
class Workspace:
    """Everything one computation needs, cross-checked on load."""

    fan: Fan
    sheaf: EquivariantSheaf | None = None
    polarisation: TDivisor | None = None
    eps_divisor: list | None = None  # raw coefficients on the final source fan
    blowups: list = field(default_factory=list)  # centres, in indices of the base fan
    subspaces: dict = field(default_factory=dict)  # name -> Subspace
    candidates: list = field(default_factory=list)  # extra candidate Subspaces
    description: str = ""

    def to_json(self) -> dict:
        out: dict = {"fan": fan_to_json(self.fan)}
        if self.description:
            out["description"] = self.description
        if self.sheaf is not None:
            out["sheaf"] = sheaf_to_json(self.sheaf)
        if self.polarisation is not None:
            out["polarisation"] = divisor_to_json(self.polarisation)
        if self.eps_divisor is not None:
            out["eps_divisor"] = [rat_str(x) for x in self.eps_divisor]
        if self.blowups:
            out["blowups"] = [sorted(c) for c in self.blowups]
        if self.subspaces:
            out["subspaces"] = {k: subspace_to_json(v) for k, v in self.subspaces.items()}
        if self.candidates:
            out["candidates"] = [subspace_to_json(v) for v in self.candidates]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "Workspace":
        if not isinstance(d, dict):
            raise SchemaError("a workspace is a JSON object")
        fan = fan_from_json(_require(d, "fan"))
        sheaf = sheaf_from_json(d["sheaf"], fan) if "sheaf" in d else None
        pol = divisor_from_json(d["polarisation"], fan) if "polarisation" in d else None
        eps = [parse_rat(x) for x in d["eps_divisor"]] if "eps_divisor" in d else None
        blowups = [[parse_int(i) for i in c] for c in d.get("blowups", [])]
        n = sheaf.ambient_dim if sheaf is not None else fan.rank
        subs = {str(k): subspace_from_json(v, n) for k, v in d.get("subspaces", {}).items()}
        cands = [subspace_from_json(v, n) for v in d.get("candidates", [])]
        return cls(fan, sheaf, pol, eps, blowups, subs, cands, d.get("description", ""))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Workspace":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}") from None
        return cls.from_json(data)

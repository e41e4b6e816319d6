"""Exact slope stability of equivariant reflexive sheaves on toric varieties.

Fans and toric morphisms live in :mod:`toricstab.fan`, intersection numbers
in :mod:`toricstab.chow`, sheaves as families of filtrations in
:mod:`toricstab.klyachko`, reflexive pullbacks in :mod:`toricstab.pullback`
and stability verdicts in :mod:`toricstab.stability`.
"""

from .chow import CycleClass, TDivisor, degree, intersection_number, is_ample, pullback_divisor
from .errors import PreconditionError, SchemaError, ToricError, UnsupportedError
from .fan import Fan, ToricMorphism, is_complete, is_smooth, star_subdivision, validate_fan
from .klyachko import EquivariantSheaf, Filtration, first_chern, slope, subsheaf_from_subspace, tangent_sheaf
from .linalg import Subspace
from .polynomial import EpsPoly
from .pullback import BlowupContext, blowup, blowup_chain, chern_shift, pullback_defect, reflexive_pullback
from .stability import (
    Verdict,
    VerdictKind,
    adiabatic_verdict,
    candidate_subspaces,
    curve_blowup_criterion,
    make_setup,
    restricted_slope,
    stability_verdict,
)

__all__ = [
    "BlowupContext", "CycleClass", "EpsPoly", "EquivariantSheaf", "Fan", "Filtration",
    "PreconditionError", "SchemaError", "Subspace", "TDivisor", "ToricError", "ToricMorphism",
    "UnsupportedError", "Verdict", "VerdictKind", "adiabatic_verdict", "blowup", "blowup_chain",
    "candidate_subspaces", "chern_shift", "curve_blowup_criterion", "degree", "first_chern", "intersection_number",
    "is_ample", "is_complete", "is_smooth", "make_setup", "pullback_defect", "pullback_divisor",
    "reflexive_pullback", "restricted_slope", "slope", "stability_verdict", "star_subdivision",
    "subsheaf_from_subspace", "tangent_sheaf", "validate_fan",
]

"""Exact-arithmetic engine for toric Mori theory.

Fans, invariant divisors, curve classes, the D-MMP with certified traces,
Zariski decompositions, section-algebra generators, singularity
classification, and Newton-polytope hypersurface models.  All arithmetic is
exact (integers and fractions); there is not a single float in the package.
"""

from .errors import InputError, InvariantBreach, PreconditionError, ToricError
from .fan import Fan, FanMap, identity_map, map_to_point, point_fan
from .divisor import InvariantDivisor, canonical_divisor, zero_divisor

__version__ = "0.1.0"

__all__ = [
    "Fan", "FanMap", "InvariantDivisor",
    "identity_map", "map_to_point", "point_fan",
    "canonical_divisor", "zero_divisor",
    "ToricError", "InputError", "PreconditionError", "InvariantBreach",
]

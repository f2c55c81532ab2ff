"""Torus-invariant Q-divisors and their support functions.

Sign convention, pinned once for the whole package: the support function of
D = sum d_rho D_rho satisfies psi_D(v_rho) = -d_rho.  Everything downstream
(section polytopes, pullback, nef tests) is derived from this single choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

from . import exactlin as xl
from .errors import InputError, InvariantBreach, PreconditionError
from .fan import Fan, FanMap, cone_contains


class NotQCartier(PreconditionError):
    """Raised when no per-cone covector exists; carries the witness cone."""

    def __init__(self, cone):
        super().__init__(f"divisor is not Q-Cartier: no covector on cone {cone}")
        self.cone = cone


@dataclass(frozen=True)
class InvariantDivisor:
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    def __add__(self, other):
        return InvariantDivisor(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return InvariantDivisor(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c):
        return InvariantDivisor(tuple(Fraction(c) * a for a in self.coeffs))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_effective(self):
        return all(c >= 0 for c in self.coeffs)

    def is_integral(self):
        return all(c.denominator == 1 for c in self.coeffs)


def zero_divisor(F: Fan) -> InvariantDivisor:
    return InvariantDivisor((Fraction(0),) * len(F.rays))


def canonical_divisor(F: Fan) -> InvariantDivisor:
    """K = -sum of all prime invariant divisors."""
    return InvariantDivisor((Fraction(-1),) * len(F.rays))


def check_divisor(F: Fan, D: InvariantDivisor):
    if len(D.coeffs) != len(F.rays):
        raise InputError("coefficient count does not match ray count")


@dataclass(frozen=True)
class SupportFunction:
    """Per maximal cone a covector m_sigma with <m_sigma, v_rho> = -d_rho."""
    covectors: tuple  # aligned with fan.max_cones
    cartier_index: int
    fan: Fan

    def value(self, v) -> Fraction:
        for cone, m in zip(self.fan.max_cones, self.covectors):
            if cone_contains(self.fan.cone_gens(cone), v):
                return Fraction(xl.dot(m, v))
        raise PreconditionError(f"{tuple(v)} lies outside the fan support")

    def is_cartier(self) -> bool:
        return self.cartier_index == 1


@lru_cache(maxsize=None)
def support_function(F: Fan, D: InvariantDivisor) -> SupportFunction:
    """Solve <m, v_rho> = -d_rho on every maximal cone; raises NotQCartier
    with the witness cone when some system is inconsistent.  The Cartier
    index is the least l >= 1 making every covector of lD integral."""
    check_divisor(F, D)
    covectors = []
    index = 1
    for cone in F.max_cones:
        if not cone:
            covectors.append((Fraction(0),) * F.rank)
            continue
        A = [F.rays[i] for i in cone]
        b = [-D.coeffs[i] for i in cone]
        m = xl.solve_linear(A, b)
        if m is None:
            raise NotQCartier(cone)
        covectors.append(tuple(m))
        scale = math.lcm(*[c.denominator for c in b]) if b else 1
        ell = xl.integer_multiple_for_solvability(A, [scale * c for c in b])
        if ell is None:
            raise NotQCartier(cone)
        index = math.lcm(index, scale * ell)
    return SupportFunction(tuple(covectors), index, F)


def is_q_cartier(F: Fan, D: InvariantDivisor) -> bool:
    try:
        support_function(F, D)
        return True
    except NotQCartier:
        return False


def pullback(m: FanMap, D: InvariantDivisor) -> InvariantDivisor:
    """Pullback along a refinement or resolution: coefficient at a source ray
    v is -psi_D(image of v).  D must be Q-Cartier on the target."""
    check_divisor(m.target, D)
    psi = support_function(m.target, D)
    out = []
    for v in m.source.rays:
        out.append(-psi.value(m.apply(v)))
    return InvariantDivisor(tuple(out))


def pushforward(m: FanMap, D: InvariantDivisor) -> InvariantDivisor:
    """Drop coefficients at rays without a counterpart downstairs; the map
    must send every surviving ray onto a target ray."""
    check_divisor(m.source, D)
    out = []
    for w in m.target.rays:
        matches = [i for i, v in enumerate(m.source.rays)
                   if not xl.is_zero(m.apply(v)) and tuple(xl.primitive(m.apply(v))) == w]
        if not matches:
            raise PreconditionError(f"target ray {w} has no preimage ray")
        vals = {D.coeffs[i] for i in matches}
        if len(vals) > 1:
            raise PreconditionError(f"ambiguous pushforward coefficient at {w}")
        out.append(vals.pop())
    return InvariantDivisor(tuple(out))


def sections_polytope(F: Fan, D: InvariantDivisor) -> xl.HalfspaceSystem:
    """P_D = {u : <u, v_rho> + d_rho >= 0 for every ray}, the polyhedron of
    section monomials."""
    check_divisor(F, D)
    return xl.HalfspaceSystem(tuple(F.rays), tuple(D.coeffs))


def sections_basis(F: Fan, D: InvariantDivisor, box=None) -> list:
    """Lattice points of P_D; requires boundedness unless a box is given."""
    H = sections_polytope(F, D)
    return xl.lattice_points(H, bounded=box is None, box=box)


def round_down(D: InvariantDivisor) -> InvariantDivisor:
    return InvariantDivisor(tuple(Fraction(math.floor(c)) for c in D.coeffs))


def principal_divisor(F: Fan, u) -> InvariantDivisor:
    """div(chi^u): coefficient <u, v_rho> at each ray (pairs to zero with
    every wall class)."""
    return InvariantDivisor(tuple(Fraction(xl.dot(u, v)) for v in F.rays))

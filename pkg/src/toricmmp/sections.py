"""Section algebras, pseudo-effectivity, and relative Zariski decomposition.

The graded section cone of a divisor D over an affine base is
C = {(u, a) : a >= 0, <u, v_rho> + a d_rho >= 0 for every ray}; its lattice
points in degree a are the monomial sections of aD.  Finite generation is
made effective through a Hilbert basis computation (Gordan's construction:
extreme rays, fundamental parallelepipeds, irreducibility pruning).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import exactlin as xl
from .errors import InputError, InvariantBreach, PreconditionError
from .fan import (Fan, FanMap, common_refinement, identity_map,
                  parallelepiped_points, qfactorialize, resolve)
from .divisor import (InvariantDivisor, check_divisor, pullback, round_down,
                      sections_polytope, support_function, zero_divisor)
from .curves import nefness
from .mmp import contract_face, run_mmp


@dataclass(frozen=True)
class SectionCone:
    """Halfspace description of the graded section cone in M x R."""
    normals: tuple  # each (v_rho..., d_rho) plus the grading row
    dim: int

    def contains(self, x) -> bool:
        return all(xl.dot(n, x) >= 0 for n in self.normals)


def section_cone(F: Fan, D: InvariantDivisor) -> SectionCone:
    check_divisor(F, D)
    if not F.support_full_dimensional():
        raise PreconditionError("support must span the lattice (pointedness)")
    dim = F.rank + 1
    rows = [tuple([0] * F.rank + [1])]
    for v, d in zip(F.rays, D.coeffs):
        den = d.denominator  # clear the denominator row-wise
        rows.append(tuple([den * c for c in v] + [int(den * d)]))
    return SectionCone(tuple(rows), dim)


def _require_affine_base(m: FanMap):
    t = m.target
    if t.rank > 0 and len(t.max_cones) != 1:
        raise PreconditionError("base must be affine (a single cone)")


def hilbert_basis(C: SectionCone) -> list:
    """Minimal generating set of the semigroup of lattice points of C."""
    rays, lin = xl.extreme_rays_of_halfspaces(list(C.normals), (), C.dim)
    if lin:
        raise PreconditionError("section cone is not pointed")
    if not rays:
        return []
    cone_fan = Fan(C.dim, tuple(rays), (tuple(range(len(rays))),))
    simp, _ = qfactorialize(cone_fan)
    candidates = set(simp.rays)
    for c in simp.max_cones:
        gens = simp.cone_gens(c)
        for p, _t in parallelepiped_points(gens):
            candidates.add(p)
    candidates = sorted(candidates)
    basis = []
    for x in candidates:
        reducible = False
        for y in candidates:
            if y == x or xl.is_zero(y):
                continue
            diff = xl.vsub(x, y)
            if not xl.is_zero(diff) and C.contains(diff):
                reducible = True
                break
        if not reducible:
            basis.append(x)
    return basis


def algebra_generators(m: FanMap, D: InvariantDivisor) -> list:
    """Graded generators of the section algebra of a (possibly non-Q-Cartier)
    Weil divisor over an affine base."""
    _require_affine_base(m)
    return hilbert_basis(section_cone(m.source, D))


def graded_lattice_points(F: Fan, D: InvariantDivisor, degree: int,
                          box=None) -> list:
    """Lattice points of P_{floor(degree * D)} as graded vectors (u, degree);
    the brute-force oracle used against hilbert_basis."""
    mD = round_down(D.scale(degree))
    H = sections_polytope(F, mD)
    pts = xl.lattice_points(H, bounded=box is None, box=box)
    return [tuple(list(p) + [degree]) for p in pts]


# ---------------------------------------------------------------------------
# pseudo-effectivity
# ---------------------------------------------------------------------------

def is_pseudo_effective(m: FanMap, D: InvariantDivisor,
                        route: str = "lp") -> bool:
    """Two independent routes.

    'lp' (affine base): P_D is nonempty as a rational polyhedron; a witness
    scales to an integral section of some multiple.
    'mmp': run the D-MMP; a nef end certifies pseudo-effectivity, a fano end
    (D negative on a covering family of curves) refutes it.
    """
    if route == "lp":
        _require_affine_base(m)
        H = sections_polytope(m.source, D)
        return xl.lp_feasible(H) is not None
    if route == "mmp":
        trace = run_mmp(m, D)
        return trace.outcome == "minimal"
    raise InputError(f"unknown route {route!r}")


# ---------------------------------------------------------------------------
# Zariski decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZariskiResult:
    model: Fan                    # common refinement Z
    to_source: FanMap             # Z -> X (identity-matrix refinement)
    base_map: FanMap              # Z -> base
    P: InvariantDivisor
    N: InvariantDivisor
    nef_end_fan: Fan
    p_cartier_index: int


def zariski_decompose(m: FanMap, D: InvariantDivisor) -> ZariskiResult:
    """Relative Zariski decomposition: resolve, run the D-MMP, pull the nef
    end back to a common refinement; P is that pullback and N the exact
    excess of D over it."""
    X, Y = m.source, m.target
    check_divisor(X, D)
    if not X.is_simplicial():
        raise PreconditionError("source must be simplicial (Q-factorial)")
    Xr, rmap = resolve(X)
    Dr = pullback(rmap, D)
    mr = FanMap(m.matrix, Xr, Y)
    trace = run_mmp(mr, Dr)
    if trace.outcome != "minimal":
        raise PreconditionError("pseudo-effectivity failed: the MMP ends in a "
                                "fano fibration with D negative on its fibers")
    Xl, Dl = trace.final_fan, trace.final_divisor
    Z, mu, nu = common_refinement(Xr, Xl)
    P = pullback(nu, Dl)
    N = pullback(mu, Dr) - P
    if not N.is_effective():
        raise InvariantBreach("negative part is not effective")
    zbase = FanMap(m.matrix, Z, Y)
    vP = nefness(P, zbase)
    if not vP.nef:
        raise InvariantBreach("positive part is not nef over the base")
    # semi-ampleness certificate: the ample model of P exists
    contract_face(zbase, P)
    idx = support_function(Z, P).cartier_index
    return ZariskiResult(Z, identity_map(Z, X), zbase, P, N, Xl, idx)


def _lattice_free_of(ineqs_normals, ineqs_offsets):
    """Is {u : <n,u> + o >= 0} free of lattice points?  Returns (verdict,
    witness); raises when the region is rationally feasible and unbounded
    (no finite certificate available)."""
    H = xl.HalfspaceSystem(tuple(ineqs_normals), tuple(ineqs_offsets))
    if xl.lp_feasible(H) is None:
        return True, None
    if not xl.recession_cone_trivial(H):
        raise PreconditionError("cannot certify lattice emptiness of an "
                                "unbounded region")
    pts = xl.lattice_points(H)
    if pts:
        return False, pts[0]
    return True, None


@dataclass(frozen=True)
class CKMVerdict:
    ok: bool
    failed_condition: Optional[int] = None
    failed_degree: Optional[int] = None
    witness: Optional[tuple] = None


def verify_ckm(R: ZariskiResult, D: InvariantDivisor,
               m_max: Optional[int] = None) -> CKMVerdict:
    """Certify the decomposition: P nef (1), N effective (2), and for each
    m = 1..m_max equality of the section sets of floor(mP) and floor(m mu*D)
    (3).  One inclusion is free since N >= 0 pushes every coefficient up;
    the other is certified by lattice-emptiness of each violation region."""
    Z = R.model
    if not R.N.is_effective():
        return CKMVerdict(False, failed_condition=2)
    if not nefness(R.P, R.base_map).nef:
        return CKMVerdict(False, failed_condition=1)
    if m_max is None:
        m_max = 4 * R.p_cartier_index
    muD = pullback(R.to_source, D)
    if not (muD - R.P - R.N).is_zero():
        return CKMVerdict(False, failed_condition=3, failed_degree=0)
    for deg in range(1, m_max + 1):
        dP = round_down(R.P.scale(deg))
        dT = round_down(muD.scale(deg))
        if any(p > t for p, t in zip(dP.coeffs, dT.coeffs)):
            raise InvariantBreach("floor monotonicity violated")
        # sections of floor(deg*P) automatically include into the other side;
        # check the converse ray by ray
        for k, v in enumerate(Z.rays):
            if dP.coeffs[k] == dT.coeffs[k]:
                continue
            normals = list(Z.rays) + [tuple(-c for c in v)]
            offsets = list(dT.coeffs) + [-dP.coeffs[k] - 1]
            empty, witness = _lattice_free_of(normals, offsets)
            if not empty:
                return CKMVerdict(False, failed_condition=3,
                                  failed_degree=deg,
                                  witness=tuple(witness))
    return CKMVerdict(True)

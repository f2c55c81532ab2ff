from fractions import Fraction

import pytest

from toricmmp import curves as cv
from toricmmp import divisor as dv
from toricmmp.divisor import InvariantDivisor
from toricmmp.errors import PreconditionError
from toricmmp.fan import Fan, FanMap, map_to_point


def test_walls_p2(p2):
    ws = cv.walls(p2)
    assert len(ws) == 3
    assert {w.rays for w in ws} == {(0,), (1,), (2,)}


def test_walls_f1(f1):
    assert len(cv.walls(f1)) == 4


def test_walls_quadric_triangulation(quadric_tri_a):
    ws = cv.walls(quadric_tri_a)
    assert len(ws) == 1 and ws[0].rays == (0, 3)


def test_wall_relation_p2(p2):
    (w,) = [w for w in cv.walls(p2) if w.rays == (0,)]
    c = cv.wall_relation(p2, w)
    assert c.coeffs == (1, 1, 1)


def test_wall_relations_f1(f1):
    rels = {cv.wall_relation(f1, w).coeffs for w in cv.walls(f1)}
    # fiber class twice, exceptional class, and the strict transform class
    assert rels == {(0, 1, 0, 1), (1, -1, 1, 0), (1, 0, 1, 1)}


def test_wall_relation_quadric(quadric_tri_a):
    (w,) = cv.walls(quadric_tri_a)
    c = cv.wall_relation(quadric_tri_a, w)
    assert c.coeffs == (-1, 1, 1, -1)


def test_pairing(f1):
    K = dv.canonical_divisor(f1)
    fiber = cv.CurveClass((0, 1, 0, 1))
    exc = cv.CurveClass((1, -1, 1, 0))
    assert fiber.pair(K) == -2
    assert exc.pair(K) == -1


def test_pairing_principal_is_zero(f1):
    for u in ((1, 0), (0, 1), (2, -3)):
        P = dv.principal_divisor(f1, u)
        for w in cv.walls(f1):
            assert cv.wall_relation(f1, w).pair(P) == 0


def test_ne_cone_p2(p2):
    ne = cv.ne_cone(map_to_point(p2))
    assert ne.rho == 1
    assert [c.coeffs for c in ne.extremal_rays] == [(1, 1, 1)]


def test_ne_cone_f1(f1):
    ne = cv.ne_cone(map_to_point(f1))
    assert ne.rho == 2
    assert {c.coeffs for c in ne.extremal_rays} == {(0, 1, 0, 1), (1, -1, 1, 0)}
    # strict transform class is interior, not extremal
    assert cv.CurveClass((1, 0, 1, 1)) in ne.generators


def test_rho_smooth_complete(p2, f1):
    # for a smooth complete surface, rho = #rays - rank
    assert cv.ne_cone(map_to_point(p2)).rho == 3 - 2
    assert cv.ne_cone(map_to_point(f1)).rho == 4 - 2


def test_ne_cone_relative(a1xp1_over_a1):
    ne = cv.ne_cone(a1xp1_over_a1)
    assert ne.rho == 1
    assert [c.coeffs for c in ne.extremal_rays] == [(0, 1, 1)]


def test_ne_cone_affine_is_empty(orthant2):
    # an affine variety over itself carries no complete curves
    ident = FanMap(((1, 0), (0, 1)), orthant2, orthant2)
    ne = cv.ne_cone(ident)
    assert ne.generators == () and ne.rho == 0


def test_contracted_walls_blowup(blowup_map, blowup2):
    pairs = cv.contracted_walls(blowup_map)
    assert len(pairs) == 1
    w, c = pairs[0]
    assert w.rays == (2,)
    assert c.coeffs == (1, 1, -1)


def test_contracted_walls_needs_simplicial(quadric_cone_fan):
    with pytest.raises(PreconditionError):
        cv.contracted_walls(map_to_point(quadric_cone_fan))


def test_nefness(f1):
    m = map_to_point(f1)
    K = dv.canonical_divisor(f1)
    v = cv.nefness(K, m)
    assert not v.nef and v.value < 0
    # -K on F1 is nef but not ample (pairs 0 with nothing? it is ample)
    v = cv.nefness(K.scale(-1), m, strict=True)
    assert v.nef and v.strict
    # the pullback of a point divisor class: nef, not strictly
    E = InvariantDivisor((0, 1, 0, 0))  # D_{rho_1}, the -1 curve itself
    v = cv.nefness(E, m)
    assert not v.nef
    assert v.violating_class.pair(E) == v.value


def test_nefness_zero_divisor(p2):
    v = cv.nefness(dv.zero_divisor(p2), map_to_point(p2), strict=True)
    assert v.nef and not v.strict

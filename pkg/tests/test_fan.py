import itertools

import pytest

from toricmmp import exactlin as xl
from toricmmp import fan as fn
from toricmmp.errors import InputError, PreconditionError
from toricmmp.fan import Fan, FanMap, identity_map, map_to_point


def test_validate_good(p2, f1, quadric_cone_fan):
    assert fn.validate_fan(p2) == []
    assert fn.validate_fan(f1) == []
    assert fn.validate_fan(quadric_cone_fan) == []


def test_validate_line():
    F = Fan(2, ((1, 0), (-1, 0)), ((0, 1),))
    assert any("strongly convex" in v for v in fn.validate_fan(F))


def test_validate_overlap():
    F = Fan(2, ((1, 0), (0, 1), (1, 1)), ((0, 1), (1, 2), (0, 2)))
    assert fn.validate_fan(F)  # overlapping cones


def test_validate_bad_ray():
    F = Fan(2, ((2, 0), (0, 1)), ((0, 1),))
    assert any("primitive" in v for v in fn.validate_fan(F))
    F = Fan(2, ((1, 0), (0, 1)), ((0,),))
    assert any("no maximal cone" in v for v in fn.validate_fan(F))


def test_classify(orthant2, a1_cone_fan, quadric_cone_fan):
    assert fn.classify_cone(orthant2, (0, 1)).kind == "smooth"
    c = fn.classify_cone(a1_cone_fan, (0, 1))
    assert (c.kind, c.multiplicity) == ("simplicial", 2)
    c = fn.classify_cone(quadric_cone_fan, (0, 1, 2, 3))
    assert (c.kind, c.multiplicity) == ("non-simplicial", None)


def test_star_blowup(blowup2):
    S = fn.star(blowup2, (2,))
    assert S.rank == 1
    assert sorted(S.rays) == [(-1,), (1,)]
    assert fn.validate_fan(S) == []


def test_star_maximal_smooth_cone(orthant2):
    S = fn.star(orthant2, (0, 1))
    assert S.rank == 0 and S.max_cones == ((),)


def test_star_not_a_face(quadric_tri_a):
    # rays 1 and 2 span no face of triangulation A
    with pytest.raises(PreconditionError):
        fn.star(quadric_tri_a, (1, 2))


def test_star_subdivision(orthant2, blowup2):
    S = fn.star_subdivision(orthant2, (1, 1))
    assert S.canonical() == blowup2.canonical()
    with pytest.raises(PreconditionError):
        fn.star_subdivision(orthant2, (-1, 0))
    with pytest.raises(InputError):
        fn.star_subdivision(orthant2, (2, 2))


def test_star_subdivision_boundary_point():
    orth3 = Fan(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((0, 1, 2),))
    S = fn.star_subdivision(orth3, (1, 1, 0))
    assert fn.validate_fan(S) == []
    assert len(S.max_cones) == 2


def test_qfactorialize(quadric_cone_fan, quadric_tri_a, quadric_tri_b):
    Q, m = fn.qfactorialize(quadric_cone_fan)
    assert Q.is_simplicial()
    assert set(Q.rays) == set(quadric_cone_fan.rays)  # smallness
    assert Q.canonical() in (quadric_tri_a.canonical(), quadric_tri_b.canonical())
    assert fn.validate_fan(Q) == []
    # identity on simplicial input
    Q2, _ = fn.qfactorialize(quadric_tri_a)
    assert Q2 is quadric_tri_a


def test_qfactorialize_certificate(quadric_cone_fan):
    Q, _, h = fn.qfactorialize_with_heights(quadric_cone_fan)
    assert fn.wall_convexity_certificate(quadric_cone_fan, Q, h)


def test_qfactorialize_cube_cone():
    cube = tuple((x, y, z, 1) for x in (0, 1) for y in (0, 1) for z in (0, 1))
    C = Fan(4, cube, (tuple(range(8)),))
    Q, _, h = fn.qfactorialize_with_heights(C)
    assert Q.is_simplicial()
    assert set(Q.rays) == set(cube)
    assert fn.validate_fan(Q) == []
    assert fn.wall_convexity_certificate(C, Q, h)


def test_resolve_smooth_fixed_point(p2):
    R, _ = fn.resolve(p2)
    assert R.canonical() == p2.canonical()


def test_resolve_a1(a1_cone_fan):
    R, _ = fn.resolve(a1_cone_fan)
    assert (1, 1) in R.rays
    assert all(fn.cone_lattice_multiplicity(R.cone_gens(c)) == 1
               for c in R.max_cones)


def test_resolve_one_third():
    F = Fan(2, ((1, 0), (-1, 3)), ((0, 1),))
    R, _ = fn.resolve(F)
    assert (0, 1) in R.rays
    for c in R.max_cones:
        gens = R.cone_gens(c)
        assert fn.cone_lattice_multiplicity(gens) == 1


def test_resolve_preserves_support(quadric_cone_fan):
    R, _ = fn.resolve(quadric_cone_fan)
    assert set(quadric_cone_fan.rays) <= set(R.rays)
    assert fn.cone_covered_by_gens(
        quadric_cone_fan.cone_gens(quadric_cone_fan.max_cones[0]),
        [R.cone_gens(c) for c in R.max_cones])
    assert all(fn.cone_lattice_multiplicity(R.cone_gens(c)) == 1
               for c in R.max_cones)


def test_multiplicity_decreases(a1_cone_fan):
    before = fn.total_multiplicity(a1_cone_fan)
    R, _ = fn.resolve(a1_cone_fan)
    assert fn.total_multiplicity(R) < before + len(R.max_cones)


def test_common_refinement_self(p2):
    R, m1, m2 = fn.common_refinement(p2, p2)
    assert R.canonical() == p2.canonical()


def test_common_refinement_quadric(quadric_tri_a, quadric_tri_b):
    R, _, _ = fn.common_refinement(quadric_tri_a, quadric_tri_b)
    assert (1, 1, 2) in R.rays
    assert len(R.max_cones) == 4
    assert fn.validate_fan(R) == []
    # every output cone sits inside one cone of each input
    for c in R.max_cones:
        gens = R.cone_gens(c)
        for F in (quadric_tri_a, quadric_tri_b):
            hits = [mc for mc in F.max_cones
                    if all(fn.cone_contains(F.cone_gens(mc), g) for g in gens)]
            assert len(hits) == 1


def test_common_refinement_blowup(blowup2, orthant2):
    R, _, _ = fn.common_refinement(blowup2, orthant2)
    assert R.canonical() == blowup2.canonical()


def test_common_refinement_support_mismatch(orthant2, p2):
    with pytest.raises(PreconditionError):
        fn.common_refinement(orthant2, p2)


def test_check_morphism_projective(p2, blowup_map):
    flags = fn.check_morphism(map_to_point(p2))
    assert flags.toric and flags.proper and flags.projective
    flags = fn.check_morphism(blowup_map)
    assert flags.toric and flags.proper and flags.projective


def test_check_morphism_not_proper(orthant2):
    half = Fan(2, ((1, 0),), ((0,),))
    flags = fn.check_morphism(FanMap(((1, 0), (0, 1)), half, orthant2))
    assert flags.toric and not flags.proper


def test_check_morphism_not_toric(p2, orthant2):
    assert not fn.is_toric_morphism(FanMap(((1, 0), (0, 1)), p2, orthant2))


def test_check_morphism_relative(a1xp1_over_a1):
    flags = fn.check_morphism(a1xp1_over_a1)
    assert flags.toric and flags.proper and flags.projective


def _support_contains(F, v):
    return any(fn.cone_contains(F.cone_gens(c), v) for c in F.max_cones)


@pytest.mark.parametrize("mk", ["blowup", "halfray", "relative"])
def test_properness_grid_oracle(mk, blowup2, orthant2, a1xp1_over_a1):
    if mk == "blowup":
        m = FanMap(((1, 0), (0, 1)), blowup2, orthant2)
    elif mk == "halfray":
        m = FanMap(((1, 0), (0, 1)), Fan(2, ((1, 0),), ((0,),)), orthant2)
    else:
        m = a1xp1_over_a1
    proper = fn.check_morphism(m).proper
    grid_ok = True
    n = m.source.rank
    for p in itertools.product(range(-3, 4), repeat=n):
        img = m.apply(p)
        if _support_contains(m.target, img) and not _support_contains(m.source, p):
            grid_ok = False
            break
    assert proper == grid_ok


def test_ample_certificate_is_strictly_convex(p2):
    flags = fn.check_morphism(map_to_point(p2))
    d = flags.ample_certificate
    # strictly positive against the single curve class (1,1,1)
    assert sum(d) > 0

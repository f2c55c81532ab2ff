import pytest

from toricmmp.fan import Fan, FanMap, identity_map, map_to_point


@pytest.fixture
def orthant2():
    return Fan(2, ((1, 0), (0, 1)), ((0, 1),))


@pytest.fixture
def p2():
    return Fan(2, ((1, 0), (0, 1), (-1, -1)), ((0, 1), (1, 2), (0, 2)))


@pytest.fixture
def f1():
    # Hirzebruch surface, one-point blow-up of the plane
    return Fan(2, ((1, 0), (0, 1), (-1, 1), (0, -1)),
               ((0, 1), (1, 2), (2, 3), (0, 3)))


@pytest.fixture
def blowup2():
    return Fan(2, ((1, 0), (0, 1), (1, 1)), ((0, 2), (1, 2)))


@pytest.fixture
def blowup_map(blowup2, orthant2):
    return FanMap(((1, 0), (0, 1)), blowup2, orthant2)


QUADRIC_RAYS = ((0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1))


@pytest.fixture
def quadric_cone_fan():
    return Fan(3, QUADRIC_RAYS, ((0, 1, 2, 3),))


@pytest.fixture
def quadric_tri_a():
    # diagonal through rays 0 and 3
    return Fan(3, QUADRIC_RAYS, ((0, 1, 3), (0, 2, 3)))


@pytest.fixture
def quadric_tri_b():
    return Fan(3, QUADRIC_RAYS, ((0, 1, 2), (1, 2, 3)))


@pytest.fixture
def quadric_map_a(quadric_tri_a, quadric_cone_fan):
    return FanMap(((1, 0, 0), (0, 1, 0), (0, 0, 1)),
                  quadric_tri_a, quadric_cone_fan)


@pytest.fixture
def a1_cone_fan():
    return Fan(2, ((1, 0), (1, 2)), ((0, 1),))


@pytest.fixture
def a1xp1_over_a1():
    source = Fan(2, ((1, 0), (0, 1), (0, -1)), ((0, 1), (0, 2)))
    base = Fan(1, ((1,),), ((0,),))
    return FanMap(((1, 0),), source, base)

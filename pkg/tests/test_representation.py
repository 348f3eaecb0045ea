import pytest

from cubecocycle.exceptions import PreconditionError
from cubecocycle.families import group_action, parse_family
from cubecocycle.representation import (
    GroupAction,
    base_coefficient,
    check_automorphism,
    cocycle_equivariance,
    compose,
    homomorphism_deviation,
    inverse,
)
from cubecocycle.zw import CirclePoint


@pytest.fixture(scope="module")
def cube_action(cube3):
    return group_action(parse_family("hypercube:3"), cube3)


def test_compose_and_inverse():
    g = (1, 2, 0)
    assert compose(g, inverse(g)) == (0, 1, 2)
    assert compose(g, g) == (2, 0, 1)


def test_hypercube_group(cube_action):
    elements = cube_action.elements()
    assert len(elements) == 48
    assert len(set(elements)) == 48
    assert cube_action.elements(cap=10) == elements[:10]


def test_tree_groups(tree_product):
    tree_action = group_action(parse_family("tree(2,2)"))
    assert len(tree_action.elements()) == 8
    spec = parse_family("product:tree(2,1)*tree(2,1)")
    assert len(group_action(spec, tree_product).elements()) == 8


def test_equivariance(cube_action):
    point = CirclePoint.rational("1/2")
    for g in cube_action.elements():
        for x, y in ((0, 7), (1, 6), (3, 3)):
            report = cocycle_equivariance(cube_action, g, x, y, point)
            assert report.holds
            assert report.deviation == 0


def test_equivariance_at_float_points(cube_action):
    point = CirclePoint.from_z(0.3 + 0.4j)
    for g in cube_action.elements()[:12]:
        assert cocycle_equivariance(cube_action, g, 0, 7, point).holds


def test_homomorphism(cube_action):
    point = CirclePoint.rational("-1/3")
    elements = cube_action.elements()
    for g in elements[::5]:
        for h in elements[::7]:
            assert homomorphism_deviation(cube_action, g, h, point) == 0


def test_base_coefficient(cube_action):
    point = CirclePoint.rational("1/4")
    for g in cube_action.elements():
        value = base_coefficient(cube_action, g, point)
        assert value == point.z ** cube_action.length(g)


def test_check_automorphism(square):
    assert check_automorphism(square, [1, 0, 3, 2]) == (1, 0, 3, 2)
    with pytest.raises(PreconditionError):
        check_automorphism(square, [0, 0, 1, 2])
    with pytest.raises(PreconditionError) as info:
        check_automorphism(square, [0, 3, 1, 2])
    assert info.value.witness is not None
    with pytest.raises(PreconditionError):
        GroupAction(square, [(0, 3, 1, 2)])

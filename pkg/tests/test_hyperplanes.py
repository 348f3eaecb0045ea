import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubecocycle.complex_core import EdgePath, distance
from cubecocycle.exceptions import InvalidComplexError, PreconditionError
from cubecocycle.hyperplanes import (
    compute_hyperplanes,
    crossing_sequence,
    fronted_geodesic,
    hyperplane_report,
    hyperplane_system,
    intersects,
    normal_cube_path,
    opposite,
    parallel_component_count,
    separators,
    spanning_cube,
)


def test_segment_hyperplanes(segment3):
    hyperplanes = compute_hyperplanes(segment3)
    assert [h.edges for h in hyperplanes] == [((0, 1),), ((1, 2),), ((2, 3),)]
    assert hyperplanes[1].plus_side == frozenset({0, 1})
    assert hyperplanes[1].side(0) == 1
    assert hyperplanes[1].side(3) == -1
    assert hyperplanes[1].is_adjacent(2)
    assert not hyperplanes[1].is_adjacent(3)


def test_square_hyperplanes(square):
    hyperplanes = compute_hyperplanes(square)
    assert len(hyperplanes) == 2
    assert hyperplanes[0].edges == ((0, 1), (2, 3))
    assert hyperplanes[0].plus_side == frozenset({0, 2})
    assert hyperplanes[1].edges == ((0, 2), (1, 3))
    assert hyperplanes[1].plus_side == frozenset({0, 1})
    assert intersects(square, 0, 1)


def test_counts(grid23, cube3, tree23):
    assert len(compute_hyperplanes(grid23)) == 5
    assert len(compute_hyperplanes(cube3)) == 3
    assert len(compute_hyperplanes(tree23)) == tree23.n_vertices - 1


def test_unfilled_square_is_not_two_sided(unfilled_square):
    with pytest.raises(InvalidComplexError):
        compute_hyperplanes(unfilled_square)


def test_separators(grid23):
    assert len(separators(grid23, 0, 11)) == 5
    assert len(separators(grid23, 5, 5)) == 0


@settings(max_examples=50, deadline=None)
@given(x=st.integers(0, 11), y=st.integers(0, 11))
def test_distance_counts_separators(grid23, x, y):
    assert distance(grid23, x, y) == len(separators(grid23, x, y))


def test_crossing_sequence(grid23):
    path = EdgePath((0, 1, 5))
    crossed = crossing_sequence(grid23, path)
    assert len(crossed) == len(set(crossed)) == 2


def test_opposite(square, segment3):
    assert opposite(square, 0, 0) == 1
    assert opposite(square, 1, 3) == 1
    with pytest.raises(PreconditionError):
        opposite(segment3, 0, 3)
    with pytest.raises(PreconditionError):
        intersects(square, 1, 1)


def test_parallel_hyperplanes(segment3, grid23):
    assert not intersects(segment3, 0, 2)
    assert parallel_component_count(segment3, 0, 2) == 3
    assert parallel_component_count(segment3, 0, 1) == 3
    with pytest.raises(PreconditionError):
        parallel_component_count(grid23, *_crossing_pair(grid23))


def _crossing_pair(complex_):
    return sorted(next(iter(hyperplane_system(complex_).crossing)))


def test_spanning_cube(cube3):
    system = hyperplane_system(cube3)
    front = system.separator_ids(0, 7)
    cube, corner = spanning_cube(cube3, 0, front, 7)
    assert cube.dim == 3
    assert corner == 7
    with pytest.raises(PreconditionError):
        spanning_cube(cube3, 0, front, 0)


def test_fronted_geodesic_crosses_front_first(grid23):
    system = hyperplane_system(grid23)
    path = fronted_geodesic(grid23, 5, 11)
    front = [
        h
        for h in system.separator_ids(5, 11)
        if system.adjacent[h, 5]
    ]
    assert path.length == distance(grid23, 5, 11)
    assert set(crossing_sequence(grid23, path)[: len(front)]) == set(front)


def test_normal_cube_path(grid23, cube3, segment3):
    assert [c.dim for c in normal_cube_path(grid23, 0, 11)] == [2, 2, 1]
    assert [c.dim for c in normal_cube_path(cube3, 0, 7)] == [3]
    assert [c.dim for c in normal_cube_path(segment3, 0, 3)] == [1, 1, 1]
    assert normal_cube_path(segment3, 2, 2) == []


def test_quadrants_match_square_crossings(grid23):
    system = hyperplane_system(grid23)
    for h in range(len(system)):
        for k in range(h + 1, len(system)):
            quadrants = system.quadrants(h, k)
            assert system.crosses(h, k) == all(quadrants)
            assert sum(quadrants) == grid23.n_vertices


def test_report(square):
    report = hyperplane_report(square)
    assert [r["plus_size"] for r in report] == [2, 2]
    assert report[0]["edges"] == [[0, 1], [2, 3]]
    assert np.all(hyperplane_system(square).adjacent)

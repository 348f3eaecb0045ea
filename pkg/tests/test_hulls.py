import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubecocycle.complex_core import all_geodesics
from cubecocycle.exceptions import PreconditionError
from cubecocycle.hulls import (
    AUDIT_COLUMNS,
    ball,
    bound_audit_frame,
    convex_hull,
    cube_absorb,
    decompose_interval,
    hull_mask,
    interval_ball_bound,
    interval_ball_count,
    interval_by_geodesics,
)
from cubecocycle.hyperplanes import hyperplane_system


def _hyperplane_of(complex_, u, v):
    return hyperplane_system(complex_).edge_label[frozenset((u, v))]


def test_hull_of_segment(segment3):
    assert hull_mask(segment3, (0, 2)).tolist() == [True, True, True, False]
    assert convex_hull(segment3, [3]).members == frozenset({3})
    with pytest.raises(PreconditionError):
        hull_mask(segment3, [])


def test_hull_of_square_diagonal(square):
    hull = convex_hull(square, (0, 3))
    assert len(hull) == 4
    assert 2 in hull


@settings(max_examples=40, deadline=None)
@given(x=st.integers(0, 15), y=st.integers(0, 15))
def test_interval_is_hull_and_geodesic_union(grid33, x, y):
    members = interval_by_geodesics(grid33, x, y)
    hull = hull_mask(grid33, (x, y))
    assert members == frozenset(int(v) for v in np.flatnonzero(hull))
    on_paths = {v for path in all_geodesics(grid33, x, y) for v in path}
    assert on_paths == members


def test_ball(segment3):
    assert ball(segment3, 0, 1).members == frozenset({0, 1})
    assert len(ball(segment3, 1, 5)) == 4


def test_interval_ball_counts(grid23, grid33):
    assert interval_ball_bound(grid23, 2) == 9
    assert interval_ball_count(grid23, 0, 11, 1) == 3
    assert interval_ball_count(grid23, 0, 11, 1, centre="x") == 3
    assert interval_ball_count(grid33, 0, 15, 2) == 6
    with pytest.raises(PreconditionError):
        interval_ball_count(grid23, 0, 11, 1, centre="z")


def test_decompose_interval(grid23):
    h = _hyperplane_of(grid23, 0, 4)
    dec = decompose_interval(grid23, 0, 11, h, strict=True)
    assert dec.v == 3
    assert dec.x_opposite == 4
    assert dec.near == frozenset({0, 1, 2, 3})
    assert dec.far == frozenset(range(4, 12))
    assert dec.holds
    assert all(dec.flags().values())


def test_decompose_interval_preconditions(grid23):
    with pytest.raises(PreconditionError):
        decompose_interval(grid23, 0, 11, _hyperplane_of(grid23, 4, 8))
    with pytest.raises(PreconditionError):
        decompose_interval(grid23, 0, 3, _hyperplane_of(grid23, 0, 4))


def test_decompose_every_front_hyperplane(cube3, tree23):
    for complex_ in (cube3, tree23):
        system = hyperplane_system(complex_)
        for x in range(complex_.n_vertices):
            for y in range(complex_.n_vertices):
                for h in system.separator_ids(x, y):
                    if system.adjacent[h, x]:
                        assert decompose_interval(complex_, x, y, h).holds


def test_cube_absorb(square):
    cube = next(c for c in square.cubes if c.dim == 2)
    assert cube_absorb(square, 0, 3, 0, cube) == 3
    assert cube_absorb(square, 1, 3, 2, cube) == 2
    with pytest.raises(PreconditionError):
        edge = next(c for c in square.cubes if c.dim == 1 and 3 not in c)
        cube_absorb(square, 0, 3, 0, edge)


def test_bound_audit_frame(segment3, grid33):
    frame = bound_audit_frame(segment3, "segment(3)", [(0, 3)])
    assert list(frame.columns) == AUDIT_COLUMNS
    assert frame["count"].tolist() == [1, 2, 3, 4]
    assert frame["bound"].tolist() == [1, 2, 3, 4]
    assert frame["pass"].all()
    for centre in ("y", "x"):
        audit = bound_audit_frame(grid33, "grid(3x3)", centre=centre)
        assert audit["pass"].all()
        assert len(audit) == sum(
            grid33.distances[x, y] + 1 for x in range(16) for y in range(16)
        )

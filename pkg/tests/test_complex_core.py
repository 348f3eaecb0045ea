import json

import numpy as np
import pytest

from cubecocycle.complex_core import (
    Cube,
    CubeComplex,
    EdgePath,
    all_geodesics,
    check_path,
    corner_move_closure,
    distance,
    is_geodesic,
    jsonable,
    median,
    reduce_path,
    replay_moves,
    require_valid,
    some_geodesic,
    square_completion,
    validate,
)
from cubecocycle.exceptions import (
    DisconnectedComplexError,
    InvalidComplexError,
    PathError,
)


def test_cube_needs_power_of_two_vertices():
    with pytest.raises(InvalidComplexError):
        Cube.of([0, 1, 2])
    assert Cube.of([3, 1]).vertices == (1, 3)
    assert Cube.of([3, 1]).dim == 1


def test_square_faces_are_completed():
    square = CubeComplex.from_cubes(4, [[0, 1, 2, 3]])
    assert square.dim == 2
    assert sorted(square.edges) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    assert (0, 1) in square.completed_faces
    assert validate(square).valid


def test_input_order_gives_bit_coordinates():
    square = CubeComplex.from_cubes(4, [[0, 3, 1, 2]])
    assert sorted(square.edges) == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_listed_edges_fix_the_faces():
    square = CubeComplex.from_cubes(
        4, [[0, 1], [1, 3], [3, 2], [2, 0], [0, 1, 2, 3]]
    )
    assert sorted(square.edges) == [(0, 1), (0, 2), (1, 3), (2, 3)]
    assert square.completed_faces == ((0,), (1,), (2,), (3,))


def test_vertex_out_of_range():
    with pytest.raises(InvalidComplexError):
        CubeComplex.from_cubes(2, [[0, 2]])


def test_valid_families(square, grid23, cube3, tree23, tree_product):
    for complex_ in (square, grid23, cube3, tree23, tree_product):
        report = validate(complex_)
        assert report.valid
        assert list(report.checks) == [
            "closure",
            "cubes",
            "connected",
            "median",
            "squares",
        ]


def test_unfilled_square_fails_the_square_check(unfilled_square):
    report = validate(unfilled_square)
    assert not report.valid
    assert report.failure == "squares"
    assert report.checks["median"]
    assert sorted(report.witness["four_cycle"]) == [0, 1, 2, 3]


def test_two_medians_fail_the_median_check(k23):
    report = validate(k23)
    assert report.failure == "median"
    assert sorted(report.witness["triple"]) == [2, 3, 4]
    assert report.witness["medians"] == [0, 1]


def test_disconnected_complex():
    complex_ = CubeComplex.from_cubes(4, [[0, 1], [2, 3]])
    report = validate(complex_)
    assert report.failure == "connected"
    assert report.witness["components"] == [[0, 1], [2, 3]]
    with pytest.raises(DisconnectedComplexError):
        distance(complex_, 0, 3)


def test_require_valid_raises_with_witness(unfilled_square):
    with pytest.raises(InvalidComplexError) as info:
        require_valid(unfilled_square)
    assert "four_cycle" in info.value.witness


def test_median_sampling_is_recorded(grid33):
    report = validate(grid33, median_cap=2, seed=5, sample_size=200)
    assert report.valid
    assert report.median_sampled
    assert report.median_seed == 5


def test_distances(segment3, grid23):
    assert distance(segment3, 0, 3) == 3
    assert distance(grid23, 0, 11) == 5
    assert segment3.distance(1, 1) == 0
    with pytest.raises(PathError):
        distance(segment3, 0, 9)


def test_paths(square):
    assert is_geodesic(square, EdgePath((0, 1, 3)))
    assert not is_geodesic(square, EdgePath((0, 1, 3, 2)))
    with pytest.raises(PathError):
        check_path(square, EdgePath((0, 3)))
    assert some_geodesic(square, 0, 3) == EdgePath((0, 1, 3))


def test_all_geodesics_are_lexicographic(square, grid23):
    assert list(all_geodesics(square, 0, 3)) == [
        EdgePath((0, 1, 3)),
        EdgePath((0, 2, 3)),
    ]
    assert len(list(all_geodesics(grid23, 0, 11))) == 10
    assert len(list(all_geodesics(grid23, 0, 11, cap=4))) == 4


def test_median(square, segment3, cube3):
    assert median(square, 0, 1, 2) == 0
    assert median(segment3, 0, 3, 1) == 1
    assert median(cube3, 1, 2, 4) == 0


def test_square_completion(square, segment3):
    assert square_completion(square, 1, 0, 2) == 3
    assert square_completion(segment3, 0, 1, 2) is None


def test_corner_moves_reach_every_geodesic(grid23):
    start = some_geodesic(grid23, 0, 11)
    closure = corner_move_closure(grid23, start)
    assert closure == set(all_geodesics(grid23, 0, 11))


def test_reduce_backtrack(segment3):
    path = EdgePath((0, 1, 0, 1, 2))
    reduced, moves = reduce_path(segment3, path)
    assert reduced == EdgePath((0, 1, 2))
    assert replay_moves(path, moves) == reduced
    assert {m.kind for m in moves} == {"cancel"}


def test_reduce_uses_corner_moves(square):
    path = EdgePath((0, 1, 3, 2))
    reduced, moves = reduce_path(square, path)
    assert reduced == EdgePath((0, 2))
    assert "corner" in {m.kind for m in moves}
    assert replay_moves(path, moves) == reduced


def test_json_file(tmp_path, square):
    path = tmp_path / "square.json"
    path.write_text(json.dumps(square.to_dict()))
    loaded = CubeComplex.from_json(path)
    assert loaded.name == "square"
    assert loaded.cube_set == square.cube_set


def test_malformed_document():
    with pytest.raises(InvalidComplexError):
        CubeComplex.from_dict({"cubes": [[0, 1]]})


def test_jsonable():
    assert jsonable({3, 1}) == [1, 3]
    assert jsonable(np.int64(4)) == 4
    assert jsonable(1 + 2j) == [1.0, 2.0]
    assert jsonable({"path": EdgePath((0, 1))}) == {"path": [0, 1]}
    assert jsonable(np.bool_(True)) is True

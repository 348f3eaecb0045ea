import pytest

from cubecocycle.cocycle import (
    adjoint_deviation,
    cocycle,
    cocycle_along,
    cocycle_symbolic,
    coefficient_table,
    elementary,
    explain_coefficient,
    holomorphy_deviation,
    k_decomposition,
    norm_bound,
    predict_coefficient,
    verify_path_independence,
)
from cubecocycle.complex_core import EdgePath, distance
from cubecocycle.exceptions import PreconditionError
from cubecocycle.operators import (
    SparseOperator,
    operator_norm,
    unitarity_defect,
)
from cubecocycle.verification import REAL_Z
from cubecocycle.zw import (
    CirclePoint,
    SignedMonomial,
    ZWPolynomial,
    rational_points,
)

Z, W = ZWPolynomial.z(), ZWPolynomial.w()


def test_elementary_rotates_pairs(segment3):
    op = cocycle_symbolic(segment3, 1, 2)
    assert op.column(1) == {1: W, 2: -Z}
    assert op.column(2) == {2: W, 1: Z}
    assert op.column(0) == {0: 1}
    with pytest.raises(PreconditionError):
        elementary(segment3, 0, 2, CirclePoint.rational("1/2"))


def test_segment_columns(segment3):
    c = cocycle_symbolic(segment3, 0, 3)
    assert c.column(3) == {3: W, 2: Z * W, 1: Z**2 * W, 0: Z**3}
    assert c.column(2) == {3: -Z, 2: W**2, 1: W**2 * Z, 0: W * Z**2}
    assert c.column(1) == {2: -Z, 1: W**2, 0: W * Z}
    assert c.column(0) == {0: W, 1: -Z}


def test_short_segment(segment2):
    c = cocycle_symbolic(segment2, 0, 2)
    assert c.column(2) == {2: W, 1: W * Z, 0: Z**2}


def test_cocycle_identities(grid23):
    n = grid23.n_vertices
    for point in rational_points(5):
        identity = SparseOperator.identity(n, point.one)
        assert cocycle(grid23, 4, 4, point).equals(identity)
        forward = cocycle(grid23, 0, 11, point)
        assert (forward @ cocycle(grid23, 11, 0, point)).equals(identity)
        chained = cocycle(grid23, 6, 0, point) @ forward
        assert chained.equals(cocycle(grid23, 6, 11, point))


def test_matrix_coefficient_is_a_power_of_z(grid23, tree23):
    point = CirclePoint.rational("-1/3")
    for complex_ in (grid23, tree23):
        for y in range(complex_.n_vertices):
            d = distance(complex_, 0, y)
            assert cocycle(complex_, 0, y, point).entry(0, y) == point.z**d


def test_detour_gives_the_same_operator(segment3):
    point = CirclePoint.rational("1/4")
    detour = cocycle_along(segment3, EdgePath((0, 1, 0, 1, 2, 3)), point)
    assert detour.equals(cocycle(segment3, 0, 3, point))


def test_path_independence(grid23):
    report = verify_path_independence(grid23, 0, 11)
    assert report.agree
    assert report.paths_checked == 11
    assert report.detour_checked
    assert not report.truncated
    capped = verify_path_independence(grid23, 0, 11, cap=3)
    assert capped.truncated
    assert capped.paths_checked == 4


def test_coefficient_table(segment3):
    table = coefficient_table(segment3, 0, 3)
    assert len(table) == 13
    assert {e.method for e in table} == {"monomial"}
    entries = {(e.a, e.b): e.monomial for e in table}
    assert entries[(3, 2)] == SignedMonomial(-1, 1, 0)
    assert entries[(0, 3)] == SignedMonomial(1, 3, 0)


def test_predictions_on_the_segment(segment3):
    assert predict_coefficient(segment3, 0, 3, 3, 2) == SignedMonomial(
        -1, 1, 0
    )
    assert predict_coefficient(segment3, 0, 3, 1, 2) == SignedMonomial(
        1, 1, 2
    )
    assert predict_coefficient(segment3, 0, 3, 0, 2) == SignedMonomial(
        1, 2, 1
    )
    assert predict_coefficient(segment3, 0, 1, 2, 0) is None
    trace = explain_coefficient(segment3, 0, 1, 0, 0)
    assert trace.in_support
    assert trace.monomial == SignedMonomial(1, 0, 1)


def test_predictions_match_the_cocycle(square, cube3, tree_product):
    for complex_ in (square, cube3, tree_product):
        for x in range(complex_.n_vertices):
            for y in range(0, complex_.n_vertices, 3):
                for e in coefficient_table(complex_, x, y):
                    assert (
                        predict_coefficient(complex_, x, y, e.a, e.b)
                        == e.monomial
                    )
                    assert e.monomial.k == distance(complex_, e.a, e.b)
                    assert e.monomial.ell <= 2 * complex_.dim


def test_k_decomposition_on_the_segment(segment3):
    kd = k_decomposition(segment3, 0, 3)
    assert len(kd.components) == 5
    assert kd.components[3].entry(0, 3) == 1
    assert kd.components[1].entry(1, 2) == W**2
    assert kd.max_row_count(1) == 2
    assert kd.max_column_count(1) == 2
    assert kd.vanishes_beyond_distance()
    assert not kd.vanishes_from_distance()


def test_tree_sparsity(tree23):
    for x in (0, 3, 9):
        for y in range(tree23.n_vertices):
            kd = k_decomposition(tree23, x, y)
            for k in range(len(kd.components)):
                assert kd.max_row_count(k) <= 2
                assert kd.max_column_count(k) <= 2


def test_sparsity_bound(cube3):
    kd = k_decomposition(cube3, 0, 7)
    for k in range(len(kd.components)):
        assert kd.max_row_count(k) <= kd.count_bound(k)
        assert kd.max_column_count(k) <= kd.count_bound(k)


def test_norm_bounds(segment3, square):
    bounds = norm_bound(segment3, 0, 3, 0.5)
    assert bounds.general == pytest.approx(10.25)
    assert bounds.tree == pytest.approx(8)
    assert bounds.best == pytest.approx(8)
    assert norm_bound(square, 0, 3, 0.5).tree is None
    with pytest.raises(PreconditionError):
        norm_bound(segment3, 0, 3, 1.0)


def test_measured_norms(segment3, square):
    for z in (0.5, 0.7j, -0.6 + 0.6j):
        point = CirclePoint.from_z(z)
        for complex_, y in ((segment3, 3), (square, 3)):
            norm = operator_norm(cocycle(complex_, 0, y, point))
            assert norm <= norm_bound(complex_, 0, y, abs(z)).best + 1e-9
    real = operator_norm(cocycle(segment3, 0, 3, CirclePoint.from_z(0.5)))
    assert real == pytest.approx(1)


def test_adjoint_and_holomorphy(grid23):
    assert adjoint_deviation(grid23, 0, 11, CirclePoint.rational("1/2")) == 0
    point = CirclePoint.from_z(0.4 - 0.3j)
    assert adjoint_deviation(grid23, 0, 11, point) < 1e-10
    assert holomorphy_deviation(grid23, 0, 11, point) < 1e-10


@pytest.mark.parametrize("z", [0.95, 0.95j, -0.95, 0.95 * (0.6 - 0.8j)])
def test_general_norm_bound_near_the_circle(square, cube3, grid23, z):
    point = CirclePoint.from_z(z)
    for complex_ in (square, cube3, grid23):
        n = complex_.n_vertices
        for x, y in ((0, n - 1), (1, n - 2), (0, 1), (n - 1, 0)):
            norm = operator_norm(cocycle(complex_, x, y, point))
            bound = norm_bound(complex_, x, y, abs(z)).general
            assert norm <= bound + 1e-9


@pytest.mark.parametrize("z", REAL_Z)
def test_unitary_for_real_z(segment3, square, grid23, z):
    point = CirclePoint.from_z(z)
    for complex_ in (segment3, square, grid23):
        n = complex_.n_vertices
        for x in range(n):
            for y in range(n):
                op = cocycle(complex_, x, y, point)
                assert unitarity_defect(op) <= 1e-10

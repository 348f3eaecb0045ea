from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubecocycle.exceptions import PreconditionError
from cubecocycle.zw import (
    SYMBOLIC,
    CirclePoint,
    SignedMonomial,
    ZWPolynomial,
    rational_parameters,
    rational_points,
    z_grid,
)

polynomials = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4)),
    st.integers(-5, 5),
    max_size=5,
).map(ZWPolynomial)

Z, W = ZWPolynomial.z(), ZWPolynomial.w()


@given(polynomials, polynomials, polynomials)
def test_ring_laws(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p - p == ZWPolynomial.zero()
    assert p * ZWPolynomial.one() == p


@given(polynomials, st.integers(-3, 3))
def test_evaluation_is_a_homomorphism(p, t):
    point = CirclePoint.rational(Fraction(t, 4))
    q = p * p + Z
    assert point.evaluate(q) == point.evaluate(p) ** 2 + point.z


def test_monomials():
    assert ZWPolynomial.monomial(-1, 2, 1) == -(Z**2) * W
    assert (-(Z**2) * W).as_monomial() == SignedMonomial(-1, 2, 1)
    assert (Z + W).as_monomial() is None
    assert (2 * Z).as_monomial() is None
    assert str(W * W * Z - Z) == "-z + z*w^2"
    assert str(ZWPolynomial.zero()) == "0"


def test_z_components_and_circle_reduction():
    p = Z * W + Z * W**3 - W**2
    assert p.z_components() == {0: -(W**2), 1: W + W**3}
    assert (W**2).reduce_circle() == 1 - Z**2
    assert (Z * W**3).reduce_circle() == Z * W - Z**3 * W


def test_rational_points_lie_on_the_circle():
    assert list(zip(range(4), rational_parameters())) == [
        (0, Fraction(1, 2)),
        (1, Fraction(-1, 3)),
        (2, Fraction(1, 4)),
        (3, Fraction(-1, 5)),
    ]
    for point in rational_points(6):
        assert point.exact
        assert point.z**2 + point.w**2 == 1
    half = CirclePoint.rational("1/2")
    assert (half.z, half.w) == (Fraction(4, 5), Fraction(3, 5))
    with pytest.raises(PreconditionError):
        CirclePoint.rational(1)


def test_float_points():
    point = CirclePoint.from_z(0.6)
    assert point.w == pytest.approx(0.8)
    assert point.is_real
    assert CirclePoint.from_z(0.3j).conjugate().z == -0.3j
    assert abs(CirclePoint.from_z(0.5 + 0.5j).w.real) > 0


def test_z_grid():
    grid = z_grid(2, 4, 0.8)
    assert len(grid) == 9
    assert grid[0].z == 0
    assert max(abs(p.z) for p in grid) == pytest.approx(0.8)
    assert len(z_grid(2, 4, 0.8, include_zero=False)) == 8


def test_symbolic_point():
    assert SYMBOLIC.z == Z
    assert SYMBOLIC.w == W
    assert SYMBOLIC.one == 1

from fractions import Fraction

import pytest

from onionclass.scalars import (
    GaussianRational,
    QuadExt,
    approx_zero,
    exact_sqrt,
    gaussian_sqrt,
    rational_sqrt,
)


def test_field_arithmetic_closed():
    a = GaussianRational(Fraction(1, 2), Fraction(-3, 4))
    b = GaussianRational(2, 5)
    assert a + b == GaussianRational(Fraction(5, 2), Fraction(17, 4))
    assert (a * b) / b == a
    assert a - a == GaussianRational(0)
    assert not (a - a)
    assert a * 0 == GaussianRational(0)


def test_int_and_fraction_coercion():
    a = GaussianRational(3, 1)
    assert 2 * a == GaussianRational(6, 2)
    assert a + Fraction(1, 3) == GaussianRational(Fraction(10, 3), 1)
    assert 1 / GaussianRational(0, 1) == GaussianRational(0, -1)


def test_powers():
    i = GaussianRational(0, 1)
    assert i**2 == GaussianRational(-1)
    assert i**-1 == GaussianRational(0, -1)
    assert GaussianRational(Fraction(1, 2)) ** 3 == GaussianRational(Fraction(1, 8))


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        GaussianRational(1) / GaussianRational(0)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None
    assert rational_sqrt(Fraction(-1)) is None


@pytest.mark.parametrize(
    "value",
    [
        GaussianRational(4),
        GaussianRational(-9),
        GaussianRational(0, 2),  # (1+i)^2
        GaussianRational(3, 4),  # (2+i)^2
        GaussianRational(2, Fraction(3, 2)),  # ((3+i)/2)^2
    ],
)
def test_gaussian_sqrt_perfect_squares(value):
    root = gaussian_sqrt(value)
    assert root is not None
    assert root * root == value


def test_gaussian_sqrt_absent():
    assert gaussian_sqrt(GaussianRational(2)) is None
    assert gaussian_sqrt(GaussianRational(1, 1)) is None


def test_quad_ext_field():
    rad = GaussianRational(2)
    x = exact_sqrt(rad)
    assert isinstance(x, QuadExt)
    assert x * x == QuadExt(2, 0, rad)
    y = (1 + x) / (1 - x)
    assert y * (1 - x) == 1 + x
    assert (x / x).simplified() == GaussianRational(1)


def test_quad_ext_mixed_radicands_rejected():
    a = QuadExt(1, 1, GaussianRational(2))
    b = QuadExt(1, 1, GaussianRational(3))
    with pytest.raises(ValueError):
        a + b


def test_approx_zero_relative():
    assert approx_zero(1e-12, scale=1.0, tol=1e-9)
    assert not approx_zero(1e-6, scale=1.0, tol=1e-9)
    assert approx_zero(1e-6, scale=1e4, tol=1e-9)
    assert approx_zero(0.0, scale=0.0, tol=1e-9)
    assert not approx_zero(1e-300, scale=0.0, tol=1e-9)

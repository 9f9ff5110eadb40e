from __future__ import annotations

import pickle
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wpverify.errors import DivisionByZero, NotAPerfectRoot
from wpverify.exactnum import (
    I,
    ONE,
    ZERO,
    GaussianRational,
    as_rational,
    format_gaussian,
    parse_gaussian,
    rational_root,
)

fractions = st.builds(Fraction, st.integers(-10**6, 10**6), st.integers(1, 50))
gaussians = st.builds(lambda a, b: (a, b), fractions, fractions)


def G(pair):
    a, b = pair
    return GaussianRational(a, b)


def as_pair(x: GaussianRational):
    return Fraction(str(x.re)), Fraction(str(x.im))


@given(gaussians, gaussians)
def test_add_mul_match_fraction_oracle(x, y):
    (a, b), (c, d) = x, y
    assert as_pair(G(x) + G(y)) == (a + c, b + d)
    assert as_pair(G(x) * G(y)) == (a * c - b * d, a * d + b * c)
    assert as_pair(G(x) - G(y)) == (a - c, b - d)


@given(gaussians)
def test_inverse_is_two_sided(x):
    g = G(x)
    if g.is_zero():
        with pytest.raises(DivisionByZero):
            g.inverse()
    else:
        assert g * g.inverse() == ONE
        assert g / g == ONE


@given(gaussians, st.integers(-6, 6))
def test_integer_powers(x, k):
    g = G(x)
    if g.is_zero() and k < 0:
        return
    expected = ONE
    base = g if k >= 0 else g.inverse()
    for _ in range(abs(k)):
        expected = expected * base
    assert g**k == expected


@given(gaussians)
def test_sqrt_of_square_is_canonical(x):
    g = G(x)
    r = (g * g).sqrt()
    assert r * r == g * g
    assert r == g or r == -g
    assert r.re > 0 or (r.re == 0 and r.im >= 0)


@given(gaussians)
def test_parse_format_roundtrip(x):
    g = G(x)
    assert parse_gaussian(format_gaussian(g)) == g


def test_format_examples():
    assert str(GaussianRational(Fraction(3, 4))) == "3/4"
    assert str(GaussianRational(Fraction(1, 2), Fraction(-3, 4))) == "1/2 - 3/4 i"
    assert str(-I) == "-i"
    assert parse_gaussian("3/2 i") == GaussianRational(0, Fraction(3, 2))
    assert parse_gaussian("-i") == -I


def test_i_squared():
    assert I * I == -ONE
    assert (-ONE).sqrt() == I


def test_roots():
    assert rational_root(as_rational(Fraction(16, 81)), 4) == as_rational(Fraction(2, 3))
    assert rational_root(as_rational(-8), 3) == -2
    with pytest.raises(NotAPerfectRoot):
        rational_root(as_rational(2), 2)
    with pytest.raises(NotAPerfectRoot):
        GaussianRational(2).sqrt()
    assert GaussianRational(Fraction(81, 16)).root(4) == GaussianRational(Fraction(3, 2))
    # (1+2i)^2 = -3+4i
    assert GaussianRational(-3, 4).sqrt() == GaussianRational(1, 2)


def test_zero_division():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_pickle_and_hash():
    g = GaussianRational(Fraction(2, 3), -5)
    assert pickle.loads(pickle.dumps(g)) == g
    assert hash(GaussianRational(3)) == hash(as_rational(3))
    with pytest.raises(AttributeError):
        g.re = 1

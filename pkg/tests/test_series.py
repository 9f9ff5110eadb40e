from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from wpverify.errors import NegativeExponent, NonInvertible, NotAPerfectRoot, OrderMismatch
from wpverify.exactnum import ONE, GaussianRational
from wpverify.series import (
    P,
    Q,
    QMonomial,
    TruncatedSeries,
    div_binomial_inplace,
    first_mismatch,
    m_root,
    mono,
    mul_binomial_inplace,
    parse_monomial,
    s_from_monomial,
    s_inv,
    s_mul,
    s_valuation,
)

small = st.builds(Fraction, st.integers(-49, 49), st.integers(1, 9))


def series_strategy(order=8):
    return st.lists(small, min_size=order + 1, max_size=order + 1).map(lambda cs: TruncatedSeries(cs, order))


def ser(pairs, N):
    return TruncatedSeries([GaussianRational(a, b) for a, b in pairs], N)


@given(series_strategy(), series_strategy())
def test_mul_matches_oracle(x, y):
    expected = oracle.mul(oracle.to_pairs(x), oracle.to_pairs(y))
    assert oracle.to_pairs(s_mul(x, y)) == expected


@given(series_strategy(), series_strategy(), series_strategy())
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(series_strategy())
def test_inverse(x):
    if x[0].is_zero():
        with pytest.raises(NonInvertible):
            s_inv(x)
    else:
        assert x * s_inv(x) == TruncatedSeries.one(x.order)


@settings(max_examples=50)
@given(series_strategy(12), small, st.integers(1, 5))
def test_binomial_kernels(x, c, m):
    coeff = GaussianRational(c)
    s = list(x.coeffs)
    mul_binomial_inplace(s, coeff, m, x.order)
    expected = oracle.mul(oracle.to_pairs(x), oracle.binomial(oracle.c(c), m, x.order))
    assert oracle.to_pairs(s) == expected
    div_binomial_inplace(s, coeff, m, x.order)
    assert tuple(s) == x.coeffs


def test_shift_and_truncate():
    x = TruncatedSeries([1, 2, 3], 2)
    assert x.shift(1, 3).coeffs == TruncatedSeries([0, 1, 2, 3], 3).coeffs
    assert x.shift(5, 3).is_zero()
    with pytest.raises(NegativeExponent):
        x.shift(-1, 2)
    with pytest.raises(OrderMismatch):
        x.shift(0, 4)
    assert x.truncate(1).coeffs == (ONE, GaussianRational(2))
    with pytest.raises(OrderMismatch):
        x + TruncatedSeries([1], 0)


def test_first_mismatch_and_valuation():
    x = TruncatedSeries([1, 2, 3, 4], 3)
    y = TruncatedSeries([1, 2, 5, 4], 3)
    assert first_mismatch(x, y) == 2
    assert first_mismatch(x, y, 1) is None
    assert s_valuation(TruncatedSeries([0, 0, 7], 2)) == 2
    assert s_valuation(TruncatedSeries.zero(3)) == float("inf")


def test_monomials():
    m = mono(Fraction(2, 3), 3)
    assert m * m == mono(Fraction(4, 9), 6)
    assert m / m == QMonomial(ONE, 0)
    assert m_root(mono(Fraction(4, 9), 6), 2) == mono(Fraction(2, 3), 3)
    assert m_root(mono(Fraction(4, 9), 6), 2, branch=-1) == mono(Fraction(-2, 3), 3)
    with pytest.raises(NotAPerfectRoot):
        m_root(mono(4, 3), 2)
    assert P * P == Q
    assert QMonomial(GaussianRational(0), 5).pexp == 0
    with pytest.raises(NegativeExponent):
        s_from_monomial(mono(2, -1), 4)
    assert s_from_monomial(mono(2, 9), 4).is_zero()


@pytest.mark.parametrize(
    "text, expected",
    [
        ("3/4·p^2", mono(Fraction(3, 4), 2)),
        ("-2*p^-3", mono(-2, -3)),
        ("5", mono(5, 0)),
        ("p", mono(1, 1)),
        ("(1/2 + 3/4 i)·p^4", QMonomial(GaussianRational(Fraction(1, 2), Fraction(3, 4)), 4)),
    ],
)
def test_parse_monomial(text, expected):
    assert parse_monomial(text) == expected
    assert parse_monomial(str(expected)) == expected


def test_format_series():
    assert str(TruncatedSeries([1, 0, Fraction(-1, 2)], 2)) == "1 + -1/2·p^2"
    assert str(TruncatedSeries.zero(3)) == "0"

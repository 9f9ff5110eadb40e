from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from wpverify.errors import DegenerateParameter, NegativeExponent, NonTruncating, PoleInDenominator
from wpverify.qkernel import (
    BASE_Q,
    BASE_Q2,
    BASE_SQRT_Q,
    Expr,
    factors,
    materialize,
    phi_series,
    phi_terms,
    poch,
    poch_finite,
    poch_infinite,
    pochs,
    ratio,
    scaled_series,
    strict_zeros,
    sum_series,
    w_params,
    w_series,
)
from wpverify.series import Q, TruncatedSeries, mono

N = 30
coeffs = st.sampled_from([Fraction(2), Fraction(-3), Fraction(1, 2), Fraction(-2, 3), Fraction(9, 4)])


@settings(max_examples=40, deadline=None)
@given(coeffs, st.integers(1, 5), st.sampled_from([1, 2, 4]), st.integers(0, 7))
def test_finite_poch_matches_expansion(c, e, step, n):
    got = poch_finite(mono(c, e), step, n, N)
    assert oracle.to_pairs(got) == oracle.poch(oracle.c(c), e, step, n, N)


@settings(max_examples=20, deadline=None)
@given(coeffs, st.integers(1, 5), st.sampled_from([1, 2, 4]))
def test_infinite_poch_matches_expansion(c, e, step):
    got = poch_infinite(mono(c, e), step, N)
    assert oracle.to_pairs(got) == oracle.poch(oracle.c(c), e, step, None, N)


def test_euler_pentagonal():
    # (q;q)_oo = sum_k (-1)^k q^(k(3k-1)/2), written in p = q^(1/2)
    got = poch_infinite(Q, BASE_Q, 2 * N)
    expected = [0] * (2 * N + 1)
    for k in range(-10, 11):
        e = k * (3 * k - 1)
        if e <= 2 * N:
            expected[e] += (-1) ** k
    assert [int(x.re) for x in got] == expected


def test_partition_numbers():
    inv = materialize(ratio([], [Q], None), 2 * N)
    counts = oracle.partitions(N)
    assert [int(inv[2 * j].re) for j in range(N + 1)] == counts
    assert all(inv[2 * j + 1].is_zero() for j in range(N))


def test_plus_minus_pair_folds_into_base_q2():
    x = mono(Fraction(2, 3), 3)
    for n in range(6):
        lhs = materialize(pochs([x, -x], n), N)
        rhs = materialize(poch(x * x, n, BASE_Q2), N)
        assert lhs == rhs


@pytest.mark.parametrize("a, z", [(mono(2, 1), mono(Fraction(1, 3), 1)), (mono(Fraction(-1, 2), 0), mono(3, 2))])
def test_q_binomial_theorem(a, z):
    # sum (a;q)_n/(q;q)_n z^n = (az;q)_oo/(z;q)_oo
    lhs = phi_series([a], [], BASE_Q, z, N)
    rhs = materialize(ratio([a * z], [z], None), N)
    assert lhs == rhs


@pytest.mark.parametrize("n", [0, 1, 3, 6])
def test_q_chu_vandermonde_terminates(n):
    # 2phi1(q^-n, b; c; q, c q^n/b) = (c/b;q)_n / (c;q)_n, with a Laurent numerator
    b, c = mono(Fraction(2, 3), 1), mono(Fraction(-3, 2), 4)
    lhs = phi_series([mono(1, -2 * n), b], [c], BASE_Q, c * Q**n / b, N)
    rhs = materialize(ratio([c / b], [c], n), N)
    assert lhs == rhs


def test_stream_matches_direct_terms():
    nums = [mono(2, 1), mono(Fraction(1, 3), 2), mono(-4, 0)]
    dens = [mono(Fraction(3, 2), 3), mono(9, 1)]
    terms = phi_terms(nums, dens, BASE_SQRT_Q, mono(Fraction(-1, 2), 1))
    streamed = list(terms.stream(20))
    for n, s in enumerate(streamed):
        assert s == terms.direct(n, 20)
    assert sum(1 for _ in streamed) >= 5


def test_very_well_poised_factor():
    a1 = mono(Fraction(4, 9), 2)
    rest = [mono(2, 1), mono(Fraction(-1, 2), 3)]
    z = mono(3, 1)
    nums, dens = w_params(a1, rest, BASE_Q)
    terms = phi_terms(nums, dens, BASE_Q, z)
    for n in range(6):
        # (1 - a1 q^2n)/(1 - a1) * (a1, rest)_n / (q, a1 q/rest)_n z^n
        direct = (
            factors([a1 * Q ** (2 * n)], [a1])
            * ratio([a1] + rest, [Q] + [a1 * Q / x for x in rest], n)
            * z**n
        )
        assert terms.direct(n, N) == materialize(direct, N)
    assert w_series(a1, rest, BASE_Q, z, N) == phi_series(nums, dens, BASE_Q, z, N)


def test_laurent_factors_cancel():
    # (q^-1 x; q)_1 / (x; q)_0 carries p^-2 alone, but times q it is a series
    x = mono(3, 1)
    prod = poch(x / Q, 1) * Q
    got = materialize(prod, 6)
    assert got == TruncatedSeries([0, -3, 1], 6)
    with pytest.raises(NegativeExponent):
        materialize(poch(x / Q, 1), 6)


def test_expr_laurent_terms_cancel():
    a = ratio([], [], None) * mono(1, -2)
    b = ratio([], [], None) * mono(-1, -2)
    assert Expr([a, b]).materialize(5).is_zero()
    with pytest.raises(NegativeExponent):
        Expr([a]).materialize(5)


def test_pole_in_denominator():
    with pytest.raises(PoleInDenominator):
        materialize(ratio([], [mono(1, 0)], 1), 5)
    # a vanishing numerator does not mask the pole
    with pytest.raises(PoleInDenominator):
        materialize(ratio([mono(1, 0)], [mono(1, 0)], 1), 5)
    assert materialize(ratio([mono(1, 0)], [mono(2, 0)], 1), 5).is_zero()


def test_non_truncating():
    with pytest.raises(NonTruncating):
        phi_series([mono(2, 1)], [], BASE_Q, mono(3, 0), 10)


def test_sum_series_window_and_cap():
    terms = [TruncatedSeries.constant(1, 4)] + [TruncatedSeries.zero(4)] * 4 + [TruncatedSeries.constant(5, 4)]
    assert sum_series(terms, 4)[0] == 1
    assert sum_series(terms, 4, window=None)[0] == 6
    with pytest.raises(NonTruncating):
        sum_series(lambda n: TruncatedSeries.constant(1, 4), 4)


def test_terminating_sum_with_later_pole_is_indeterminate():
    # (1; q)_n kills every n >= 1 term, but (q^-1; q)_n vanishes from n = 2 on
    with pytest.raises(PoleInDenominator):
        phi_series([mono(1, 0)], [mono(1, -2)], BASE_Q, mono(1, 2), 10)
    # without the later pole the sum is just its first term
    assert phi_series([mono(1, 0)], [mono(3, -2)], BASE_Q, mono(1, 2), 10) == TruncatedSeries.constant(1, 10)


def test_zero_prefactor_still_checks_body():
    divergent = lambda M: phi_series([mono(2, 1)], [], BASE_Q, mono(3, 0), M)  # noqa: E731
    with pytest.raises(NonTruncating):
        scaled_series(ratio([mono(1, 0)], [], 1), divergent, 5)
    with pytest.raises(NonTruncating):
        scaled_series(ratio([], [], None) * mono(1, 9), divergent, 5)


def test_strict_zeros():
    zero = ratio([mono(1, 0)], [mono(2, 0)], 1)
    assert materialize(zero, 5).is_zero()
    with strict_zeros():
        with pytest.raises(DegenerateParameter):
            materialize(zero, 5)
    assert materialize(zero, 5).is_zero()

"""Naive reference arithmetic for the tests.

Everything here works on plain lists of (re, im) Fraction pairs, expands
products factor by factor and inverts via geometric series, so it shares
no code with the package.
"""
from __future__ import annotations

from fractions import Fraction

C = tuple  # (Fraction re, Fraction im)


def c(x, y=0) -> C:
    return (Fraction(x), Fraction(y))


def cadd(x: C, y: C) -> C:
    return (x[0] + y[0], x[1] + y[1])


def cmul(x: C, y: C) -> C:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def cneg(x: C) -> C:
    return (-x[0], -x[1])


def zeros(N: int) -> list:
    return [c(0)] * (N + 1)


def one(N: int) -> list:
    return [c(1)] + [c(0)] * N


def mul(x: list, y: list) -> list:
    N = len(x) - 1
    out = zeros(N)
    for i in range(N + 1):
        if x[i] == c(0):
            continue
        for j in range(N + 1 - i):
            out[i + j] = cadd(out[i + j], cmul(x[i], y[j]))
    return out


def binomial(coeff: C, m: int, N: int) -> list:
    """1 - coeff*p^m with m >= 1."""
    out = one(N)
    if m <= N:
        out[m] = cadd(out[m], cneg(coeff))
    return out


def inv_binomial(coeff: C, m: int, N: int) -> list:
    """1/(1 - coeff*p^m) as a geometric series."""
    out = zeros(N)
    power = c(1)
    for j in range(0, N // m + 1):
        out[j * m] = power
        power = cmul(power, coeff)
    return out


def poch(coeff: C, pexp: int, step: int, n: int | None, N: int) -> list:
    """(x; B)_n with x = coeff*p^pexp, B = p^step; n=None is the infinite product.
    Requires every factor to have positive exponent except a possible constant
    first factor."""
    out = one(N)
    j = 0
    while n is None or j < n:
        e = pexp + step * j
        if e > N and n is None:
            break
        if e == 0:
            out = [cmul(v, cadd(c(1), cneg(coeff))) for v in out]
        elif e > 0:
            out = mul(out, binomial(coeff, e, N))
        else:
            raise ValueError("oracle only handles nonnegative exponents")
        j += 1
    return out


def poch_inv(coeff: C, pexp: int, step: int, n: int | None, N: int) -> list:
    out = one(N)
    j = 0
    while n is None or j < n:
        e = pexp + step * j
        if e > N and n is None:
            break
        if e == 0:
            d = cadd(c(1), cneg(coeff))
            norm = d[0] ** 2 + d[1] ** 2
            inv = (d[0] / norm, -d[1] / norm)
            out = [cmul(v, inv) for v in out]
        else:
            out = mul(out, inv_binomial(coeff, e, N))
        j += 1
    return out


def monomial(coeff: C, e: int, N: int) -> list:
    out = zeros(N)
    if e <= N:
        out[e] = coeff
    return out


def partitions(N: int) -> list[int]:
    """Partition numbers p(0..N) by the standard dynamic program."""
    table = [1] + [0] * N
    for part in range(1, N + 1):
        for total in range(part, N + 1):
            table[total] += table[total - part]
    return table


def to_pairs(series) -> list:
    return [(Fraction(int(x.re.numerator), int(x.re.denominator)), Fraction(int(x.im.numerator), int(x.im.denominator))) for x in series]

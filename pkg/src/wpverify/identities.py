"""Registry of identities, the parameter sampler and the comparison engine.

Each identity is a list of left-hand and right-hand side builders; the
sides are built independently at the working order and the sums of the
two lists are compared coefficient by coefficient.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import ADMISSIBILITY_ERRORS, NonTruncating, SamplerExhausted, UnknownIdentity
from .exactnum import I, GaussianRational
from .qkernel import (
    BASE_Q,
    BASE_Q2,
    Expr,
    Product,
    factors,
    materialize,
    phi_series,
    pochs,
    ratio,
    scaled_series,
    strict_zeros,
    sum_series,
    w_series,
)
from .report import NON_TRUNCATING, PASS, REJECTED, VerificationReport, compare
from .series import MONO_ONE, P, Q, QMonomial, TruncatedSeries, s_sum
from .wpbailey import SINGH, TRIVIAL, ParamEnv, WPPair, get_pair

Q2 = Q * Q
Q3 = Q2 * Q
Q4 = Q2 * Q2
P3 = P * Q
P5 = P * Q2

Builder = Callable[[ParamEnv, int, frozenset], TruncatedSeries]

# -- parameter requirements ------------------------------------------------------------


@dataclass(frozen=True)
class ParamSpec:
    """Sampling rule for one symbol.

    ``root``: the coefficient is an exact ``root``-th power and the exponent
    a multiple of ``root``.  ``exps``: candidate p-exponents.  ``value``
    pins the symbol (for example ``k = q``).
    """

    name: str
    root: int = 1
    exps: tuple[int, ...] = (0,)
    value: QMonomial | None = None


@dataclass(frozen=True)
class IdentityDef:
    name: str
    params: tuple[ParamSpec, ...]
    lhs: tuple[Builder, ...]
    rhs: tuple[Builder, ...]
    # relation between sampled exponents, e.g. val(a) >= val(k)
    relation: Callable[[Mapping[str, int]], bool] | None = None
    pair: str | None = None
    mutations: tuple[str, ...] = ()
    doc: str = ""

    @property
    def n_sides(self) -> int:
        return len(self.lhs) + len(self.rhs)

    def param(self, name: str) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def sides(self, env: ParamEnv, N: int, mutation: str | None = None) -> tuple[TruncatedSeries, TruncatedSeries]:
        mut = frozenset([mutation]) if mutation else frozenset()
        lhs = s_sum((b(env, N, mut) for b in self.lhs), N)
        rhs = s_sum((b(env, N, mut) for b in self.rhs), N)
        return lhs, rhs


# -- shared pieces ------------------------------------------------------------------------


def _sum(term: Callable[[int], Expr | Product], M: int) -> TruncatedSeries:
    """Sum of Expr-valued terms, each materialized at order M."""

    def series(n: int) -> TruncatedSeries:
        t = term(n)
        return Expr.of(t).materialize(M)

    return sum_series(series, M)


def _abk(env: ParamEnv):
    return env["a"], env["b"], env["k"]


def main_lhs_prefactor(a, b, k) -> Product:
    return ratio([Q * a * b / k, k * Q / b], [k * Q, Q * a / k], None) * pochs(
        [Q, k * k * Q / a, Q2 * a, Q2 * a * a / (k * k)], None, BASE_Q2
    )


def main_rhs1_prefactor(a, b, k) -> Product:
    return pochs([Q * k * k / (a * b), b * Q, Q2 * a * a * b / (k * k), Q2 * a / b], None, BASE_Q2)


def main_rhs2_prefactor(a, b, k) -> Product:
    return pochs([k * k / (a * b), b, Q3 * a * a * b / (k * k), Q3 * a / b], None, BASE_Q2)


# -- classical sums --------------------------------------------------------------------------


def _qgauss_lhs(env, N, mut):
    a, b, c = env["a"], env["b"], env["c"]
    z = c / (a * b)
    if "shift-exponent" in mut:
        z = z * Q
    return phi_series([a, b], [c], BASE_Q, z, N)


def _qgauss_rhs(env, N, mut):
    a, b, c = env["a"], env["b"], env["c"]
    return materialize(ratio([c / a, c / b], [c, c / (a * b)], None), N)


def _qwatson_params(env):
    lam, a, b = env["lam"], env["a"], env["b"]
    sl = env.sqrt("lam")
    sab = env.sqrt("a") * env.sqrt("b")
    return lam, a, b, sl, sab


def qwatson_lhs_sum(env, N, flip=False):
    lam, a, b, sl, sab = _qwatson_params(env)
    z = Q * lam / (a * b)
    return phi_series(
        [lam, Q * sl, -(Q * sl), a, b, lam * P / sab, -(lam * P / sab), a * b / lam],
        [sl, -sl, lam * Q / a, lam * Q / b, lam * lam * Q / (a * b), P * sab, -(P * sab)],
        BASE_Q,
        z if flip else -z,
        N,
    )


def _qwatson_lhs(env, N, mut):
    return qwatson_lhs_sum(env, N, flip="flip-sign" in mut)


def _qwatson_rhs(env, N, mut):
    lam, a, b = env["lam"], env["a"], env["b"]
    ll = lam * lam
    prod = ratio([lam * Q, lam * Q / (a * b)], [lam * Q / a, lam * Q / b], None) * ratio(
        [a * Q, b * Q, Q2 * ll / (a * a * b), Q2 * ll / (a * b * b)],
        [Q, a * b * Q, Q2 * ll / (a * b), Q2 * ll / (a * a * b * b)],
        None,
        BASE_Q2,
    )
    return materialize(prod, N)


# -- Bailey's lemma with a classical pair (k = 0) -------------------------------------------


def _baileyeq(pair: WPPair):
    def env_k0(env):
        return env.replace(k=QMonomial(GaussianRational(0), 0))

    def lhs(env, N, mut):
        a, y, z = env["a"], env["y"], env["z"]
        x = a * Q
        e0 = env_k0(env)
        return _sum(lambda n: pair.beta(n, e0) * (ratio([y, z], [], n) * (x / (y * z)) ** n), N)

    def rhs(env, N, mut):
        a, y, z = env["a"], env["y"], env["z"]
        x = a * Q
        e0 = env_k0(env)
        nums = [x / z] if "drop-factor" in mut else [x / y, x / z]
        pre = ratio(nums, [x, x / (y * z)], None)
        return scaled_series(
            pre,
            lambda M: _sum(lambda n: pair.alpha(n, e0) * (ratio([y, z], [x / y, x / z], n) * (x / (y * z)) ** n), M),
            N,
        )

    return lhs, rhs


# -- Bailey-type transformations for WP pairs ------------------------------------------------


def _wpbt1(pair: WPPair):
    def lhs(env, N, mut):
        a, k = env["a"], env["k"]
        r1, r2 = env["rho1"], env["rho2"]

        def term(n):
            w = ratio([r1, r2], [k * Q / r1, k * Q / r2], n) * (a * Q / (r1 * r2)) ** n
            if "drop-k-factor" not in mut:
                w = w * factors([k * Q ** (2 * n)], [k])
            return pair.beta(n, env) * w

        return _sum(term, N)

    def rhs(env, N, mut):
        a, k = env["a"], env["k"]
        r1, r2 = env["rho1"], env["rho2"]
        pre = ratio(
            [k * Q, k * Q / (r1 * r2), a * Q / r1, a * Q / r2],
            [k * Q / r1, k * Q / r2, a * Q / (r1 * r2), a * Q],
            None,
        )
        return scaled_series(
            pre,
            lambda M: _sum(
                lambda n: pair.alpha(n, env) * (ratio([r1, r2], [a * Q / r1, a * Q / r2], n) * (a * Q / (r1 * r2)) ** n),
                M,
            ),
            N,
        )

    return lhs, rhs


def _wpbt2(pair: WPPair):
    def lhs(env, N, mut):
        a, k = env["a"], env["k"]
        t = Q * a * a / (k * k)
        return _sum(lambda n: pair.beta(n, env) * t**n, N)

    def rhs(env, N, mut):
        a, k = env["a"], env["k"]
        t = Q * a * a / (k * k)
        shift = 1 if "shift-exponent" in mut else 0
        pre = ratio([Q * a / k, Q * a * a / k], [Q * a, Q * a * a / (k * k)], None)
        return scaled_series(
            pre,
            lambda M: _sum(lambda n: pair.alpha(n, env) * (ratio([k], [Q * a * a / k], 2 * n + shift) * t**n), M),
            N,
        )

    return lhs, rhs


# -- the main transformation --------------------------------------------------------------------


def main_lhs_terms(env: ParamEnv) -> tuple[list[QMonomial], list[QMonomial], QMonomial]:
    a, b, k = _abk(env)
    rk, ra = env.sqrt("k"), env.sqrt("a")
    nums = [Q * rk, -(Q * rk), k * k / (a * b), b, P * ra, -(P * ra)]
    dens = [rk, -rk, Q * a * b / k, k * Q / b, k * P / ra, -(k * P / ra)]
    return nums, dens, -(Q * a / k)


def main_lhs_sum(pair: WPPair, env: ParamEnv, M: int) -> TruncatedSeries:
    nums, dens, z = main_lhs_terms(env)
    return _sum(lambda n: pair.beta(n, env) * (ratio(nums, dens, n) * z**n), M)


def _main(pair: WPPair):
    def lhs(env, N, mut):
        a, b, k = _abk(env)
        return scaled_series(main_lhs_prefactor(a, b, k), lambda M: main_lhs_sum(pair, env, M), N)

    def rhs1(env, N, mut):
        a, b, k = _abk(env)
        z = -(Q * a / k)

        def body(M):
            return _sum(
                lambda n: pair.alpha(2 * n, env)
                * (ratio([k * k / (a * b), b], [Q2 * a * a * b / (k * k), Q2 * a / b], n, BASE_Q2) * z ** (2 * n)),
                M,
            )

        return scaled_series(main_rhs1_prefactor(a, b, k), body, N)

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        z = -(Q * a / k)

        def body(M):
            return _sum(
                lambda n: pair.alpha(2 * n + 1, env)
                * (
                    ratio([k * k * Q / (a * b), b * Q], [Q3 * a * a * b / (k * k), Q3 * a / b], n, BASE_Q2)
                    * z ** (2 * n + 1)
                ),
                M,
            )

        pre = main_rhs2_prefactor(a, b, k)
        if "flip-sign" in mut:
            pre = -pre
        return scaled_series(pre, body, N)

    return lhs, rhs1, rhs2


# -- q-Watson side reused by the trivial-pair reduction -----------------------------------------


def _unit8w7_lhs(env, N, mut):
    a, b, k = _abk(env)
    pre = ratio(
        [P * a * b / k, Q * a * b / k, k * P / b, k * Q / b, -(a * P / k), -(a * Q / k), P, k * k * P / a, Q * a],
        [k * Q, k * P],
        None,
    )
    return materialize(pre, N)


def _unit8w7_rhs1(env, N, mut):
    a, b, k = _abk(env)
    ra = env.sqrt("a")
    pre = pochs([k * k * P / (a * b), b * P, a * a * b * Q / (k * k), Q * a / b], None)
    return scaled_series(
        pre,
        lambda M: w_series(a, [a * P, a / k, a * P / k, k * k / (a * b), b], BASE_Q, Q, M, sqrt_a1=ra),
        N,
    )


def _unit8w7_rhs2(env, N, mut):
    a, b, k = _abk(env)
    ra = env.sqrt("a")
    sign = P if "flip-sign" in mut else -P
    pre = (
        Product(sign)
        * factors([a * Q, a / k], [P, k * P])
        * pochs([k * k / (a * b), b, a * a * b * P3 / (k * k), P3 * a / b], None)
    )
    return scaled_series(
        pre,
        lambda M: w_series(
            a * Q, [a * P, a * P / k, a * Q / k, k * k * P / (a * b), b * P], BASE_Q, Q, M, sqrt_a1=P * ra
        ),
        N,
    )


# -- specializations to concrete pairs ---------------------------------------------------------------------------------


def _lhs_with(env, N, body: Callable[[int], TruncatedSeries]):
    a, b, k = _abk(env)
    return scaled_series(main_lhs_prefactor(a, b, k), body, N)


def _rhs1_with(env, N, body):
    a, b, k = _abk(env)
    return scaled_series(main_rhs1_prefactor(a, b, k), body, N)


def _rhs2_with(env, N, body, extra: Product, mut):
    a, b, k = _abk(env)
    pre = extra * main_rhs2_prefactor(a, b, k)
    if "flip-sign" in mut:
        pre = -pre
    return scaled_series(pre, body, N)


def _singhcor_sides():
    def lhs(env, N, mut):
        a, b, k = _abk(env)
        y, z = env["y"], env["z"]
        ra = env.sqrt("a")
        rest = [k * k / (a * b), b, P * ra, -(P * ra), k * y / a, k * z / a, a * Q / (y * z)]
        return _lhs_with(env, N, lambda M: w_series(k, rest, BASE_Q, -(Q * a / k), M, sqrt_a1=env.sqrt("k")))

    def rhs1(env, N, mut):
        a, b, k = _abk(env)
        y, z = env["y"], env["z"]
        c = a * a / (k * y * z)
        rest = [k * k / (a * b), b, a * Q, y, y * Q, z, z * Q, c * Q, c * Q2]
        return _rhs1_with(env, N, lambda M: w_series(a, rest, BASE_Q2, Q2, M, sqrt_a1=env.sqrt("a")))

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        y, z = env["y"], env["z"]
        c = a * a / (k * y * z)
        extra = Product(-Q) * factors([a * Q2, y, z, c * Q], [Q, a * Q / y, a * Q / z, k * y * z / a])
        rest = [k * k * Q / (a * b), b * Q, a * Q, y * Q, y * Q2, z * Q, z * Q2, c * Q2, c * Q3]
        return _rhs2_with(
            env, N, lambda M: w_series(Q2 * a, rest, BASE_Q2, Q2, M, sqrt_a1=Q * env.sqrt("a")), extra, mut
        )

    return lhs, rhs1, rhs2


def _ab1_sides():
    def lhs(env, N, mut):
        a, b, k = _abk(env)
        rk, ra = env.sqrt("k"), env.sqrt("a")
        nums = [Q * rk, -(Q * rk), k * k / (a * b), b, P * ra, -(P * ra), k * k / (Q * a * a)]
        dens = [rk, -rk, Q * a * b / k, Q * k / b, k * P / ra, -(k * P / ra)]
        return _lhs_with(env, N, lambda M: phi_series(nums, dens, BASE_Q, -(Q * a / k), M))

    def rhs1(env, N, mut):
        a, b, k = _abk(env)
        rk = env.sqrt("k")
        s = a / rk
        rest = [
            k * k / (a * b), b, a * Q, k / (a * Q), k / a,
            s * P, -(s * P), s * Q, -(s * Q), s * P3, -(s * P3), s * Q2, -(s * Q2),
        ]
        return _rhs1_with(env, N, lambda M: w_series(a, rest, BASE_Q2, Q2, M, sqrt_a1=env.sqrt("a")))

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        rk = env.sqrt("k")
        s = a / rk
        extra = Product(-Q) * factors(
            [a * Q2, Q * a * a / k, Q2 * a * a / k, k / (a * Q)],
            [Q, k, k * Q, a * a * Q2 / k],
        )
        rest = [
            k * k * Q / (a * b), b * Q, a * Q, k * Q / a, k / a,
            s * P3, -(s * P3), s * Q2, -(s * Q2), s * P5, -(s * P5), s * Q3, -(s * Q3),
        ]
        return _rhs2_with(
            env, N, lambda M: w_series(a * Q2, rest, BASE_Q2, Q2, M, sqrt_a1=Q * env.sqrt("a")), extra, mut
        )

    return lhs, rhs1, rhs2


def _ab2_sides():
    def lhs(env, N, mut):
        a, b, k = _abk(env)
        rk, ra = env.sqrt("k"), env.sqrt("a")
        nums = [-(Q * rk), k * k / (a * b), b, P * ra, -(P * ra), k * k / (a * a)]
        dens = [-rk, Q * a * b / k, Q * k / b, k * P / ra, -(k * P / ra)]
        return _lhs_with(env, N, lambda M: phi_series(nums, dens, BASE_Q, -(Q * a / k), M))

    def rhs1(env, N, mut):
        a, b, k = _abk(env)
        s = a / env.sqrt("k")
        rest = [
            k * k / (a * b), b, a * Q, k * Q / a, k / a,
            s * P, -(s * P), s * P3, -(s * P3), s, s * Q, -(s * Q), -(s * Q2),
        ]
        return _rhs1_with(env, N, lambda M: w_series(a, rest, BASE_Q2, Q2, M, sqrt_a1=env.sqrt("a")))

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        rk = env.sqrt("k")
        s = a / rk
        extra = Product(-Q) * factors([a * Q2, k / a, s, -(s * Q)], [Q, k * Q, rk * Q, -rk])
        rest = [
            k * k * Q / (a * b), b * Q, a * Q, k * Q / a, k * Q2 / a,
            s * P3, -(s * P3), s * P5, -(s * P5), s * Q, s * Q2, -(s * Q2), -(s * Q3),
        ]
        return _rhs2_with(
            env, N, lambda M: w_series(a * Q2, rest, BASE_Q2, Q2, M, sqrt_a1=Q * env.sqrt("a")), extra, mut
        )

    return lhs, rhs1, rhs2


def _br1_sides():
    def lhs(env, N, mut):
        a, b, k = _abk(env)
        ra = env.sqrt("a")
        rest = [k * k / (a * b), b, P * ra, a * Q / k, -(k / ra)]
        return _lhs_with(env, N, lambda M: w_series(k, rest, BASE_Q, -P, M, sqrt_a1=env.sqrt("k")))

    def rhs1(env, N, mut):
        a, b, k = _abk(env)
        ra, rb = env.sqrt("a"), env.sqrt("b")
        rest = [k / (ra * rb), -(k / (ra * rb)), rb, -rb, P * ra, a * P / k, a * Q / k]
        return _rhs1_with(env, N, lambda M: w_series(ra, rest, BASE_Q, Q, M, sqrt_a1=env.root("a", 4)))

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        ra, rb = env.sqrt("a"), env.sqrt("b")
        extra = Product(-P) * factors([Q * ra, a * P / k], [P, k / ra])
        rest = [k * P / (ra * rb), -(k * P / (ra * rb)), P * rb, -(P * rb), P * ra, a * P3 / k, a * Q / k]
        return _rhs2_with(
            env, N, lambda M: w_series(Q * ra, rest, BASE_Q, Q, M, sqrt_a1=P * env.root("a", 4)), extra, mut
        )

    return lhs, rhs1, rhs2


_IQ = QMonomial(I, 0)


def br2_rhs1_rest(env: ParamEnv) -> list[QMonomial]:
    """Parameters after a1 = sqrt(a) in the first right-hand series; the
    first two carry the factor i."""
    a, b, k = _abk(env)
    ra, rb, r4 = env.sqrt("a"), env.sqrt("b"), env.root("a", 4)
    return [_IQ * Q * r4, -(_IQ * Q * r4), k / (ra * rb), -(k / (ra * rb)), rb, -rb, P * ra, a / k, a * P / k]


def _br2_sides():
    iq = _IQ

    def lhs(env, N, mut):
        a, b, k = _abk(env)
        ra = env.sqrt("a")
        rest = [k * k / (a * b), b, P * ra, a / k, -(k * Q / ra)]
        return _lhs_with(env, N, lambda M: w_series(k, rest, BASE_Q, -P, M, sqrt_a1=env.sqrt("k")))

    def rhs1(env, N, mut):
        ra, r4 = env.sqrt("a"), env.root("a", 4)
        rest = br2_rhs1_rest(env)
        return _rhs1_with(env, N, lambda M: w_series(ra, rest, BASE_Q, Q, M, sqrt_a1=r4))

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        ra, rb, r4 = env.sqrt("a"), env.sqrt("b"), env.root("a", 4)
        extra = Product(-P) * factors([a * Q2, a / k], [P, k * P / ra, -ra])
        rest = [
            iq * P3 * r4, -(iq * P3 * r4), k * P / (ra * rb), -(k * P / (ra * rb)),
            P * rb, -(P * rb), P * ra, a * P / k, a * Q / k,
        ]
        return _rhs2_with(env, N, lambda M: w_series(Q * ra, rest, BASE_Q, Q, M, sqrt_a1=P * r4), extra, mut)

    return lhs, rhs1, rhs2


def _mz1_sides(paired: bool = False):
    """``paired`` folds each +-x parameter couple into one base-q^2 factor,
    so neither sqrt(k) nor sqrt(a) is needed (used for k = a sqrt(q))."""

    def lhs(env, N, mut):
        a, b, k = _abk(env)
        rest = [k * k / (a * b), b, Q * a / k]
        z = -(Q * a / k)
        if not paired:
            ra = env.sqrt("a")
            rest = rest + [k / ra, -(k / ra)]
            return _lhs_with(env, N, lambda M: w_series(k, rest, BASE_Q, z, M, sqrt_a1=env.sqrt("k")))
        # (q sqrt k, -q sqrt k; q)_n = (q^2 k; q^2)_n, and so on
        nums = [k] + rest
        dens = [Q] + [k * Q / x for x in rest]
        def body(M):
            return _sum(
                lambda n: ratio(nums, dens, n)
                * ratio([Q2 * k, k * k / a], [k, Q2 * a], n, BASE_Q2)
                * z**n,
                M,
            )
        return _lhs_with(env, N, body)

    def rhs1(env, N, mut):
        a, b, k = _abk(env)
        t = a * a / (k * k)
        nums = [k * k / (a * b), b, Q * t, Q2 * t]
        dens = [Q2 * t * b, Q2 * a / b, Q]
        return _rhs1_with(env, N, lambda M: phi_series(nums, dens, BASE_Q2, Q2, M))

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        t = a * a / (k * k)
        extra = Product(-Q) * factors([Q * t], [Q])
        nums = [k * k * Q / (a * b), b * Q, Q2 * t, Q3 * t]
        dens = [Q3 * t * b, Q3 * a / b, Q3]
        return _rhs2_with(env, N, lambda M: phi_series(nums, dens, BASE_Q2, Q2, M), extra, mut)

    return lhs, rhs1, rhs2


def _mz2_sides():
    def lhs(env, N, mut):
        a, b, k = _abk(env)
        ra = env.sqrt("a")
        rest = [
            k * k / (a * b), k * k * Q / (a * b), b, b * Q,
            P * ra, -(P * ra), P3 * ra, -(P3 * ra), k * k / (a * a),
        ]
        z = Q2 * a * a / (k * k)
        return _lhs_with(env, N, lambda M: w_series(k, rest, BASE_Q2, z, M, sqrt_a1=env.sqrt("k")))

    def rhs1(env, N, mut):
        a, b, k = _abk(env)
        s = a / env.sqrt("k")
        rest = [k * k / (a * b), b, a * Q, k / a, k * Q / a, s * P, -(s * P), s * P3, -(s * P3)]
        z = Q2 * a * a / (k * k)
        return _rhs1_with(env, N, lambda M: w_series(a, rest, BASE_Q2, z, M, sqrt_a1=env.sqrt("a")))

    def rhs2(env, N, mut):
        a, b, k = _abk(env)
        s = a / env.sqrt("k")
        extra = Product(Q * a / k) * factors([a * Q2, k / a], [Q, k * Q])
        rest = [k * k * Q / (a * b), b * Q, a * Q, k * Q / a, k * Q2 / a, s * P3, -(s * P3), s * P5, -(s * P5)]
        z = Q2 * a * a / (k * k)
        return _rhs2_with(
            env, N, lambda M: w_series(a * Q2, rest, BASE_Q2, z, M, sqrt_a1=Q * env.sqrt("a")), extra, mut
        )

    return lhs, rhs1, rhs2


def _mz3_sides():
    def prefactor(env):
        a, b = env["a"], env["b"]
        return ratio([a * b, Q2 / b], [Q2, a], None) * pochs([Q, Q3 / a, Q2 * a, a * a], None, BASE_Q2)

    def lhs1(env, N, mut):
        a, b, d = env["a"], env["b"], env["d"]
        ra = env.sqrt("a")
        rest = [
            Q2 / (a * b), Q3 / (a * b), b, b * Q,
            P * ra, -(P * ra), P3 * ra, -(P3 * ra), Q2 / (a * d), Q * d / a, Q2,
        ]
        return scaled_series(prefactor(env), lambda M: w_series(Q, rest, BASE_Q2, a * a, M, sqrt_a1=P), N)

    def lhs2(env, N, mut):
        a, b, d = env["a"], env["b"], env["d"]
        ra = env.sqrt("a")
        extra = Product(a * a) * factors(
            [Q3, Q2 / (a * b), b, a * Q, Q / (a * d), d / a],
            [Q, Q2 / b, a * b, a * d, Q3 / a, a * Q / d],
        )
        rest = [
            Q3 / (a * b), Q4 / (a * b), b * Q, b * Q2,
            P3 * ra, -(P3 * ra), P5 * ra, -(P5 * ra), Q3 / (a * d), Q2 * d / a, Q2,
        ]
        pre = prefactor(env) * extra
        if "flip-sign" in mut:
            pre = -pre
        return scaled_series(pre, lambda M: w_series(Q3, rest, BASE_Q2, a * a, M, sqrt_a1=P3), N)

    def rhs1(env, N, mut):
        a, b, d = env["a"], env["b"], env["d"]
        pre = pochs([a * a * b, b * Q, Q3 / (a * b), Q2 * a / b], None, BASE_Q2)
        rest = [Q2 / (a * b), b, a * Q, -a, -(a * Q), d, d * Q, Q / d, Q2 / d]
        return scaled_series(pre, lambda M: w_series(a, rest, BASE_Q2, a * a, M, sqrt_a1=env.sqrt("a")), N)

    def rhs2(env, N, mut):
        a, b, d = env["a"], env["b"], env["d"]
        pre = (
            Product(a)
            * factors([a * Q2, d, Q / d, -a], [Q2, a * Q / d, a * d])
            * pochs([Q * a * a * b, b, Q2 / (a * b), Q3 * a / b], None, BASE_Q2)
        )
        rest = [Q3 / (a * b), b * Q, a * Q, -(a * Q), -(a * Q2), d * Q, d * Q2, Q2 / d, Q3 / d]
        return scaled_series(
            pre, lambda M: w_series(a * Q2, rest, BASE_Q2, a * a, M, sqrt_a1=Q * env.sqrt("a")), N
        )

    return (lhs1, lhs2), (rhs1, rhs2)


# -- registry -------------------------------------------------------------------------------------

_EXPS = tuple(range(-4, 9))


def _spec(name: str, root: int = 1, exps: Sequence[int] = _EXPS, **kw) -> ParamSpec:
    return ParamSpec(name, root, tuple(e for e in exps if e % root == 0), **kw)


def _merge_specs(base: Sequence[ParamSpec], pair: WPPair, extra: Mapping[str, ParamSpec] = {}) -> tuple[ParamSpec, ...]:
    """Union of an identity's parameters with those its pair needs."""
    out = {p.name: p for p in base}
    for sym in pair.params:
        if sym in pair.fixed:
            out[sym] = ParamSpec(sym, value=pair.fixed[sym])
        elif sym not in out:
            out[sym] = extra.get(sym) or _spec(sym)
        need = pair.roots.get(sym, 1)
        spec = out[sym]
        if spec.value is None and need > spec.root:
            out[sym] = _spec(sym, need, spec.exps)
    return tuple(out.values())


def _pair_param_defaults() -> dict[str, ParamSpec]:
    return {"y": _spec("y"), "z": _spec("z"), "d": _spec("d"), "rho1": _spec("rho1"), "rho2": _spec("rho2")}


def make_wpbt1(pair: WPPair = SINGH) -> IdentityDef:
    lhs, rhs = _wpbt1(pair)
    params = _merge_specs([_spec("a"), _spec("k"), _spec("rho1"), _spec("rho2")], pair, _pair_param_defaults())
    return IdentityDef(
        "wpbt1", params, (lhs,), (rhs,), relation=_RELATIONS.get("wpbt1"), pair=pair.name,
        mutations=("drop-k-factor",), doc="first Bailey-type transformation for a WP pair",
    )


def make_wpbt2(pair: WPPair = SINGH) -> IdentityDef:
    lhs, rhs = _wpbt2(pair)
    params = _merge_specs([_spec("a"), _spec("k")], pair, _pair_param_defaults())
    return IdentityDef(
        "wpbt2", params, (lhs,), (rhs,), relation=_RELATIONS.get("wpbt2"), pair=pair.name,
        mutations=("shift-exponent",), doc="second Bailey-type transformation for a WP pair",
    )


def make_main(pair: WPPair = SINGH) -> IdentityDef:
    lhs, rhs1, rhs2 = _main(pair)
    params = _merge_specs([_spec("a", 2), _spec("b"), _spec("k", 2)], pair, _pair_param_defaults())
    return IdentityDef(
        "main", params, (lhs,), (rhs1, rhs2), relation=_RELATIONS.get("main"), pair=pair.name,
        mutations=("flip-sign",), doc="the main transformation, split into even and odd alpha",
    )


def make_baileyeq(pair: WPPair = TRIVIAL) -> IdentityDef:
    lhs, rhs = _baileyeq(pair)
    params = [_spec("a"), _spec("y"), _spec("z")]
    params += [s for s in _merge_specs([], pair, _pair_param_defaults()) if s.name not in ("a", "k")]
    return IdentityDef(
        "baileyeq", tuple(params), (lhs,), (rhs,), relation=_RELATIONS.get("baileyeq"), pair=pair.name,
        mutations=("drop-factor",), doc="Bailey's lemma for the classical pair obtained at k = 0",
    )


def _simple(name, params, lhs, rhs, pair=None, mutations=("flip-sign",), doc="") -> IdentityDef:
    return IdentityDef(
        name, tuple(params), tuple(lhs), tuple(rhs), relation=_RELATIONS.get(name), pair=pair,
        mutations=tuple(mutations), doc=doc,
    )


def _three(name, params, sides, pair, doc="") -> IdentityDef:
    lhs, rhs1, rhs2 = sides
    return _simple(name, params, (lhs,), (rhs1, rhs2), pair=pair, doc=doc)


def registry() -> list[IdentityDef]:
    sq = lambda s: _spec(s, 2)  # noqa: E731
    abk = [sq("a"), _spec("b"), sq("k")]
    mz3_pair = get_pair("mz3")
    return [
        _simple("qgauss", [_spec("a"), _spec("b"), _spec("c")], [_qgauss_lhs], [_qgauss_rhs],
                mutations=("shift-exponent",), doc="q-Gauss sum"),
        _simple("qwatson", [sq("lam"), sq("a"), sq("b")], [_qwatson_lhs], [_qwatson_rhs],
                doc="q-analogue of Watson's 3F2 sum"),
        make_baileyeq(TRIVIAL),
        make_wpbt1(SINGH),
        make_wpbt2(SINGH),
        make_main(SINGH),
        _simple("unit8w7", abk, [_unit8w7_lhs], [_unit8w7_rhs1, _unit8w7_rhs2], pair="unit",
                doc="nonterminating 8W7 evaluation from the unit pair"),
        _three("singhcor", abk + [_spec("y"), _spec("z")], _singhcor_sides(), "singh"),
        _three("ab1", abk, _ab1_sides(), "ab1"),
        _three("ab2", abk, _ab2_sides(), "ab2"),
        _three("br1", [_spec("a", 4), sq("b"), sq("k")], _br1_sides(), "bressoud2"),
        _three("br2", [_spec("a", 4), sq("b"), sq("k")], _br2_sides(), "bressoud3"),
        _three("mz1", abk, _mz1_sides(), "mz1"),
        _three("mz2", abk, _mz2_sides(), "mz2"),
        _simple("mz3", [sq("a"), _spec("b"), _spec("d"), ParamSpec("k", value=mz3_pair.fixed["k"])],
                _mz3_sides()[0], _mz3_sides()[1], pair="mz3", doc="specialization at k = q"),
    ]


def identity_names() -> list[str]:
    return [d.name for d in registry()]


def get_identity(name: str, pair: str | WPPair | None = None) -> IdentityDef:
    """Look up an identity; ``pair`` re-instantiates the pair-generic ones."""
    if pair is not None:
        p = get_pair(pair) if isinstance(pair, str) else pair
        makers = {"wpbt1": make_wpbt1, "wpbt2": make_wpbt2, "main": make_main, "baileyeq": make_baileyeq}
        if name not in makers:
            raise UnknownIdentity(f"{name} is not parameterized by a pair")
        return makers[name](p)
    for d in registry():
        if d.name == name:
            return d
    raise UnknownIdentity(f"unknown identity {name!r}; known: {', '.join(identity_names())}")


# -- sampling ------------------------------------------------------------------------------------

COEFF_POOL = ("2", "3", "1/2", "1/3", "2/3", "3/2", "4", "9/4")
RETRY_BUDGET = 400
# Validation runs at the order that will be verified: a window-stopped sum
# can look finite at low order and reach a pole only further out.
DRY_RUN_ORDER = 40


def _draw_coeff(rng: random.Random, root: int) -> GaussianRational:
    r = GaussianRational.coerce(rng.choice(COEFF_POOL))
    sign = rng.choice((1, -1))
    if root == 1:
        return r * sign
    if root == 2:
        # a negative square has an imaginary root, which is still exact
        return r**2 * sign
    return r**root


def _draw_env(d: IdentityDef, rng: random.Random) -> ParamEnv:
    values: dict[str, QMonomial] = {}
    exps: dict[str, int] = {}
    for spec in d.params:
        if spec.value is not None:
            values[spec.name] = spec.value
            exps[spec.name] = spec.value.pexp
    free = [s for s in d.params if s.value is None]
    for _ in range(200):
        for spec in free:
            exps[spec.name] = rng.choice(spec.exps)
        if d.relation is None or d.relation(exps):
            break
    else:
        raise SamplerExhausted(f"{d.name}: no exponent choice satisfies the declared relation")
    for spec in free:
        values[spec.name] = QMonomial(_draw_coeff(rng, spec.root), exps[spec.name])
    return ParamEnv(values)


def admissible(d: IdentityDef, env: ParamEnv, order: int = DRY_RUN_ORDER, strict: bool = True) -> str | None:
    """None if every side builds at ``order``, else the reason.

    ``strict`` also rejects environments where some factor vanishes
    exactly; there a sum can be finite while the identity is 0/0.
    """
    try:
        for spec in d.params:
            if spec.root > 1:
                env.root(spec.name, spec.root)
        if d.pair is not None:
            p = get_pair(d.pair)
            if d.name != "baileyeq":
                p.check(env)
        with strict_zeros(strict):
            d.sides(env, order)
    except ADMISSIBILITY_ERRORS as exc:
        return f"{type(exc).__name__}: {exc}"
    return None


def sample_env(d: IdentityDef, seed: int, order: int = DRY_RUN_ORDER) -> ParamEnv:
    """Deterministic admissible environment for ``d``, validated at ``order``."""
    rng = random.Random(f"{d.name}:{d.pair}:{seed}")
    last = None
    for _ in range(RETRY_BUDGET):
        env = _draw_env(d, rng)
        last = admissible(d, env, order)
        if last is None:
            return env
    raise SamplerExhausted(f"{d.name}: no admissible environment in {RETRY_BUDGET} draws (last: {last})")


# -- verification ---------------------------------------------------------------------------------


def _label(d: IdentityDef) -> str:
    if d.pair is None or d.name in ("unit8w7", "singhcor", "ab1", "ab2", "br1", "br2", "mz1", "mz2", "mz3"):
        return d.name
    default = {"baileyeq": "trivial"}.get(d.name, "singh")
    return d.name if d.pair == default else f"{d.name}[{d.pair}]"


def verify(
    d: IdentityDef,
    env: ParamEnv,
    N: int,
    seed: int | None = None,
    mutation: str | None = None,
    timing: bool = False,
) -> VerificationReport:
    name = _label(d) if mutation is None else f"{_label(d)}~{mutation}"
    start = time.perf_counter()
    try:
        lhs, rhs = d.sides(env, N, mutation)
    except NonTruncating as exc:
        return VerificationReport(name, N, NON_TRUNCATING, seed=seed, env=env.render(), detail=str(exc))
    except ADMISSIBILITY_ERRORS as exc:
        return VerificationReport(
            name, N, REJECTED, seed=seed, env=env.render(), detail=f"{type(exc).__name__}: {exc}"
        )
    report = compare(name, lhs, rhs, N, seed=seed, env=env.render())
    if timing:
        report.elapsed_ms = round((time.perf_counter() - start) * 1000, 3)
    return report


def verify_seeded(d: IdentityDef, seed: int, N: int, timing: bool = False) -> VerificationReport:
    return verify(d, sample_env(d, seed, N), N, seed=seed, timing=timing)


def mutations() -> list[tuple[IdentityDef, str]]:
    return [(d, m) for d in registry() for m in d.mutations]


def run_mutation(d: IdentityDef, mutation: str, seed: int, N: int) -> VerificationReport:
    return verify(d, sample_env(d, seed, N), N, seed=seed, mutation=mutation)


# -- cross checks ---------------------------------------------------------------------------------


def _combine(name: str, parts: Sequence[VerificationReport], N: int, seed, env) -> VerificationReport:
    subchecks = [(r.name, r.mismatch_index) for r in parts]
    bad = [r for r in parts if not r.passed]
    if not bad:
        return VerificationReport(name, N, PASS, seed=seed, env=env, subchecks=subchecks)
    first = bad[0]
    return VerificationReport(
        name, N, first.outcome, seed=seed, env=env, mismatch_index=first.mismatch_index,
        lhs_coeff=first.lhs_coeff, rhs_coeff=first.rhs_coeff, detail=f"{first.name}: {first.detail or ''}".strip(),
        subchecks=subchecks,
    )


def cross_check_singh_y1(seed: int = 1, N: int = 40) -> VerificationReport:
    d = get_identity("singhcor")
    rng = random.Random(f"singhcor-y1:{seed}")
    for _ in range(RETRY_BUDGET):
        env = _draw_env(d, rng).replace(y=QMonomial(GaussianRational(1), 0))
        # y = 1 makes factors vanish on purpose
        if admissible(d, env, N, strict=False) is None:
            break
    else:
        raise SamplerExhausted("singhcor at y = 1")
    r = verify(d, env, N, seed=seed)
    r.name = "cross:singhcor[y=1]"
    return r


def cross_check_mz1_k(seed: int = 1, N: int = 40) -> VerificationReport:
    """k = a sqrt(q): sqrt(k) and sqrt(a) cannot both be monomials, so the
    +-pairs of the very-well-poised side are folded (see ``_mz1_sides``)."""
    lhs, rhs1, rhs2 = _mz1_sides(paired=True)
    d = IdentityDef("mz1", (_spec("a"), _spec("b")), (lhs,), (rhs1, rhs2), pair="mz1")
    rng = random.Random(f"mz1-k:{seed}")
    for _ in range(RETRY_BUDGET):
        env = _draw_env(d, rng)
        env = env.replace(k=env["a"] * P)
        # here q a^2/k^2 = 1, so the right side has a vanishing factor by design
        if admissible(d, env, N, strict=False) is None:
            break
    else:
        raise SamplerExhausted("mz1 at k = a sqrt(q)")
    r = verify(d, env, N, seed=seed)
    r.name = "cross:mz1[k=a*sqrt(q)]"
    return r


def cross_check_main_trivial(seed: int = 1, N: int = 40) -> VerificationReport:
    """main with the trivial pair against q-Watson at lam = k, a -> k^2/(ab), b -> b."""
    d = make_main(TRIVIAL)
    env = sample_env(d, seed, N)
    a, b, k = _abk(env)
    wenv = ParamEnv(lam=k, a=k * k / (a * b), b=b)
    parts = []
    try:
        main_sum = main_lhs_sum(TRIVIAL, env, N)
        w_lhs = qwatson_lhs_sum(_WatsonEnv(wenv, env.sqrt("k"), k / env.sqrt("a")), N)
        parts.append(compare("main-sum vs watson-lhs", main_sum, w_lhs, N))
        m_lhs, m_rhs = d.sides(env, N)
        w_rhs = _qwatson_rhs(wenv, N, frozenset())
        parts.append(compare("main-rhs vs prefactor*watson-rhs", m_rhs, materialize(main_lhs_prefactor(a, b, k), N) * w_rhs, N))
        parts.append(compare("main", m_lhs, m_rhs, N))
    except ADMISSIBILITY_ERRORS as exc:
        return VerificationReport("cross:main[trivial]~qwatson", N, REJECTED, seed=seed, env=env.render(), detail=str(exc))
    return _combine("cross:main[trivial]~qwatson", parts, N, seed, env.render())


class _WatsonEnv(ParamEnv):
    """q-Watson environment with its radicals pinned to main's branches:
    sqrt(lam) = sqrt(k), and sqrt(a)*sqrt(b) = k/sqrt(a) through sqrt(b) = 1."""

    def __init__(self, env: ParamEnv, sqrt_lam: QMonomial, sqrt_ab: QMonomial):
        super().__init__(dict(env))
        self._pinned = {"lam": sqrt_lam, "a": sqrt_ab, "b": MONO_ONE}

    def sqrt(self, name: str) -> QMonomial:
        return self._pinned.get(name) or super().sqrt(name)


def cross_checks(seed: int = 1, N: int = 40) -> list[VerificationReport]:
    return [cross_check_singh_y1(seed, N), cross_check_mz1_k(seed, N), cross_check_main_trivial(seed, N)]


# Necessary valuation conditions: each infinite sum's argument must have
# positive p-valuation.  Everything finer is left to the dry run.
_RELATIONS: dict[str, Callable[[Mapping[str, int]], bool]] = {
    "qgauss": lambda e: e["c"] - e["a"] - e["b"] >= 1,
    "qwatson": lambda e: 2 + e["lam"] - e["a"] - e["b"] >= 1,
    "baileyeq": lambda e: 2 + e["a"] - e["y"] - e["z"] >= 1,
    "wpbt1": lambda e: 2 + e["a"] - e["rho1"] - e["rho2"] >= 1,
    "wpbt2": lambda e: 2 + 2 * e["a"] - 2 * e["k"] >= 1,
    "main": lambda e: e["a"] >= e["k"],
    "mz2": lambda e: e["a"] >= e["k"],
    "mz3": lambda e: e["a"] >= 2,
}


# -- environments for pair-level checks -------------------------------------------------------


def pair_specs(pair: WPPair) -> tuple[ParamSpec, ...]:
    return _merge_specs([_spec("a"), _spec("k")], pair, _pair_param_defaults())


def sample_pair_env(
    pair: WPPair,
    seed: int,
    check: Callable[[ParamEnv], VerificationReport] | None = None,
    nmax: int = 8,
    order: int = DRY_RUN_ORDER,
) -> ParamEnv:
    """Admissible environment for ``pair``, validated by a strict WP-relation
    run at ``nmax`` and ``order`` (or by ``check`` when given)."""
    from .wpbailey import verify_wp_relation

    d = IdentityDef(pair.name, pair_specs(pair), (), ())
    rng = random.Random(f"pair:{pair.name}:{seed}")
    if check is None:
        check = lambda env: verify_wp_relation(pair, env, nmax, order)  # noqa: E731
    for _ in range(RETRY_BUDGET):
        env = _draw_env(d, rng)
        with strict_zeros():
            outcome = check(env).outcome
        if outcome not in (REJECTED, NON_TRUNCATING):
            return env
    raise SamplerExhausted(f"pair {pair.name}: no admissible environment in {RETRY_BUDGET} draws")

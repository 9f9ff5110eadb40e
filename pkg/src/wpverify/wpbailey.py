"""WP-Bailey pairs and the Bailey transform machinery built on them.

A pair's ``alpha``/``beta`` return an ``Expr`` (a finite sum of Pochhammer
products) rather than a series, so that factors such as ``(k/a)^n`` may be
Laurent on their own and only the final summands need to be power series.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Mapping

from .errors import ADMISSIBILITY_ERRORS, ConstraintViolation, NonTruncating
from .qkernel import (
    BASE_Q2,
    BASE_SQRT_Q,
    ZERO_EXPR,
    Expr,
    Product,
    factors,
    materialize,
    poch,
    ratio,
    scalar,
    scaled_series,
    sum_series,
)
from .report import MISMATCH, NON_TRUNCATING, PASS, REJECTED, VerificationReport, compare
from .series import P, Q, QMonomial, TruncatedSeries, first_mismatch, m_root, parse_monomial

Q2 = Q * Q


class ParamEnv(Mapping[str, QMonomial]):
    """Symbol -> monomial substitution with a cache of canonical roots."""

    def __init__(self, assignments: Mapping[str, QMonomial] | None = None, **kw: QMonomial):
        values = dict(assignments or {})
        values.update(kw)
        for name, value in values.items():
            if isinstance(value, str):
                values[name] = parse_monomial(value)
            elif not isinstance(value, QMonomial):
                raise TypeError(f"{name}: expected QMonomial, got {type(value).__name__}")
        self._values = values
        self._roots: dict[tuple[str, int], QMonomial] = {}

    def __getitem__(self, name: str) -> QMonomial:
        return self._values[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)

    def root(self, name: str, k: int = 2) -> QMonomial:
        key = (name, k)
        if key not in self._roots:
            if k == 4:
                # a^(1/4) must square to the cached sqrt(a), not just to some root
                self._roots[key] = m_root(self.root(name, 2), 2)
            else:
                self._roots[key] = m_root(self._values[name], k)
        return self._roots[key]

    def sqrt(self, name: str) -> QMonomial:
        return self.root(name, 2)

    def replace(self, **kw: QMonomial) -> ParamEnv:
        values = dict(self._values)
        values.update(kw)
        return ParamEnv(values)

    def render(self) -> dict[str, str]:
        return {name: str(self._values[name]) for name in sorted(self._values)}

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.render().items())
        return f"ParamEnv({inner})"


SeqFn = Callable[[int, ParamEnv], Expr]


@dataclass(frozen=True)
class WPPair:
    """A named WP-Bailey pair.

    ``roots`` maps symbols to the radical degree the pair needs resolved
    (2 for a square root).  ``constraint`` returns an error message for
    inadmissible environments.
    """

    name: str
    alpha: SeqFn
    beta: SeqFn
    params: tuple[str, ...] = ("a", "k")
    roots: Mapping[str, int] = field(default_factory=dict)
    constraint: Callable[[ParamEnv], str | None] | None = None
    fixed: Mapping[str, QMonomial] = field(default_factory=dict)
    doc: str = ""

    def check(self, env: ParamEnv) -> None:
        for sym in self.params:
            if sym not in env:
                raise ConstraintViolation(f"pair {self.name}: missing parameter {sym}")
        if self.constraint is not None:
            msg = self.constraint(env)
            if msg:
                raise ConstraintViolation(f"pair {self.name}: {msg}")
        for sym, deg in self.roots.items():
            env.root(sym, deg)

    def alpha_series(self, n: int, env: ParamEnv, N: int) -> TruncatedSeries:
        return self.alpha(n, env).materialize(N)

    def beta_series(self, n: int, env: ParamEnv, N: int) -> TruncatedSeries:
        return self.beta(n, env).materialize(N)


def _delta0(n: int) -> Expr:
    return Expr.of(scalar(1)) if n == 0 else ZERO_EXPR


def _ak(env: ParamEnv) -> tuple[QMonomial, QMonomial]:
    return env["a"], env["k"]


# -- the nine pairs ----------------------------------------------------------------------


def _trivial_alpha(n, env):
    return _delta0(n)


def _trivial_beta(n, env):
    a, k = _ak(env)
    return Expr.of(ratio([k / a, k], [Q, a * Q], n))


def _unit_alpha(n, env):
    a, k = _ak(env)
    ra = env.sqrt("a")
    return Expr.of(ratio([Q * ra, -(Q * ra), a, a / k], [ra, -ra, Q, k * Q], n) * (k / a) ** n)


def _unit_beta(n, env):
    # beta_1 = 0 as well; the WP relation forces it
    return _delta0(n)


def _singh_alpha(n, env):
    a, k = _ak(env)
    y, z = env["y"], env["z"]
    ra = env.sqrt("a")
    return Expr.of(
        ratio(
            [Q * ra, -(Q * ra), a, y, z, a * a * Q / (k * y * z)],
            [ra, -ra, Q, a * Q / y, a * Q / z, k * y * z / a],
            n,
        )
        * (k / a) ** n
    )


def _singh_beta(n, env):
    a, k = _ak(env)
    y, z = env["y"], env["z"]
    return Expr.of(
        ratio(
            [k * y / a, k * z / a, k, a * Q / (y * z)],
            [a * Q / y, a * Q / z, k * y * z / a, Q],
            n,
        )
    )


def _ab1_alpha(n, env):
    a, k = _ak(env)
    ra = env.sqrt("a")
    return Expr.of(
        ratio([a, Q * ra, -(Q * ra), k / (a * Q)], [Q, ra, -ra, a * a * Q2 / k], n)
        * ratio([Q * a * a / k], [k], 2 * n)
        * (k / a) ** n
    )


def _ab1_beta(n, env):
    a, k = _ak(env)
    return Expr.of(ratio([k * k / (Q * a * a)], [Q], n))


def _ab2_alpha(n, env):
    a, k = _ak(env)
    ra, rk = env.sqrt("a"), env.sqrt("k")
    return Expr.of(
        ratio(
            [a, Q * ra, -(Q * ra), a * P / rk, -(a * P / rk), a / rk, -(a * Q / rk), k / a],
            [Q, ra, -ra, P * rk, -(P * rk), Q * rk, -rk, Q * a * a / k],
            n,
        )
        * (k / a) ** n
    )


def _ab2_beta(n, env):
    a, k = _ak(env)
    rk = env.sqrt("k")
    return Expr.of(ratio([rk, k * k / (a * a)], [Q, Q * rk], n))


def _bressoud2_alpha(n, env):
    a, k = _ak(env)
    ra = env.sqrt("a")
    return Expr.of(
        factors([ra * Q**n], [ra])
        * ratio([ra, a * P / k], [P, k / ra], n, BASE_SQRT_Q)
        * (k / (a * P)) ** n
    )


def _bressoud2_beta(n, env):
    a, k = _ak(env)
    ra = env.sqrt("a")
    return Expr.of(
        ratio([k, a * Q / k], [Q, k * k / a], n)
        * ratio([-(k / ra)], [-(P * ra)], 2 * n, BASE_SQRT_Q)
        * (k / (a * P)) ** n
    )


def _bressoud3_alpha(n, env):
    a, k = _ak(env)
    ra = env.sqrt("a")
    return Expr.of(
        factors([a * Q ** (2 * n)], [a])
        * ratio([ra, a / k], [P, k * P / ra], n, BASE_SQRT_Q)
        * (k / (a * P)) ** n
    )


def _bressoud3_beta(n, env):
    a, k = _ak(env)
    ra = env.sqrt("a")
    return Expr.of(
        ratio(
            [k, a / k, -(k * P / ra), -(k * Q / ra)],
            [Q, Q * k * k / a, -ra, -(ra * P)],
            n,
        )
        * (k / (a * P)) ** n
    )


def _mz1_alpha(n, env):
    a, k = _ak(env)
    return Expr.of(ratio([Q * a * a / (k * k)], [Q], n) * (k / a) ** n)


def _mz1_beta(n, env):
    a, k = _ak(env)
    return Expr.of(
        ratio([Q * a / k, k], [k * k / a, Q], n)
        * ratio([k * k / a], [a * Q], 2 * n)
    )


def _mz2_alpha(n, env):
    a, k = _ak(env)
    ra, rk = env.sqrt("a"), env.sqrt("k")
    return Expr.of(
        ratio(
            [a, Q * ra, -(Q * ra), k / a, a * P / rk, -(a * P / rk)],
            [ra, -ra, Q * a * a / k, P * rk, -(P * rk), Q],
            n,
        )
        * (-1) ** n
    )


def _mz2_beta(n, env):
    a, k = _ak(env)
    if n % 2:
        return ZERO_EXPR
    return Expr.of(ratio([k, k * k / (a * a)], [Q2, Q2 * a * a / k], n // 2, BASE_Q2))


def _mz3_alpha(n, env):
    a, d = env["a"], env["d"]
    ra = env.sqrt("a")
    return Expr.of(
        ratio(
            [a, Q * ra, -(Q * ra), d, Q / d, -a],
            [ra, -ra, a * Q / d, a * d, -Q, Q],
            n,
        )
        * (-1) ** n
    )


def _mz3_beta(n, env):
    a, d = env["a"], env["d"]
    if n % 2 == 0:
        return Expr.of(ratio([Q2 / (a * d), d * Q / a], [a * d * Q, a * Q2 / d], n // 2, BASE_Q2))
    return Expr.of(
        ratio([Q / (a * d), d / a], [a * d, a * Q / d], (n + 1) // 2, BASE_Q2) * (-a)
    )


def _mz3_constraint(env: ParamEnv) -> str | None:
    if env["k"] != Q:
        return f"requires k = q, got k = {env['k']}"
    return None


TRIVIAL = WPPair("trivial", _trivial_alpha, _trivial_beta, doc="alpha = delta_n0")
UNIT = WPPair("unit", _unit_alpha, _unit_beta, roots={"a": 2}, doc="beta = delta_n0")
SINGH = WPPair("singh", _singh_alpha, _singh_beta, params=("a", "k", "y", "z"), roots={"a": 2})
AB1 = WPPair("ab1", _ab1_alpha, _ab1_beta, roots={"a": 2}, doc="Andrews-Berkovich")
AB2 = WPPair("ab2", _ab2_alpha, _ab2_beta, roots={"a": 2, "k": 2}, doc="Andrews-Berkovich")
BRESSOUD2 = WPPair("bressoud2", _bressoud2_alpha, _bressoud2_beta, roots={"a": 2}, doc="base sqrt(q)")
BRESSOUD3 = WPPair("bressoud3", _bressoud3_alpha, _bressoud3_beta, roots={"a": 2}, doc="base sqrt(q)")
MZ1 = WPPair("mz1", _mz1_alpha, _mz1_beta)
MZ2 = WPPair("mz2", _mz2_alpha, _mz2_beta, roots={"a": 2, "k": 2}, doc="beta_n = 0 for odd n")
MZ3 = WPPair(
    "mz3",
    _mz3_alpha,
    _mz3_beta,
    params=("a", "k", "d"),
    roots={"a": 2},
    constraint=_mz3_constraint,
    fixed={"k": Q},
    doc="only valid at k = q",
)

_BUILTIN = (TRIVIAL, UNIT, SINGH, AB1, AB2, BRESSOUD2, BRESSOUD3, MZ1, MZ2, MZ3)


def builtin_pairs() -> list[WPPair]:
    """The nine pairs inserted into the main transformation, plus ``trivial``.

    ``trivial`` is the degenerate pair used for reductions and is excluded
    from the count of nine.
    """
    return [p for p in _BUILTIN if p is not TRIVIAL]


def all_pairs() -> list[WPPair]:
    return list(_BUILTIN)


PAIRS: dict[str, WPPair] = {p.name: p for p in _BUILTIN}


def get_pair(name: str) -> WPPair:
    try:
        return PAIRS[name]
    except KeyError:
        raise KeyError(f"unknown WP-Bailey pair {name!r}; known: {', '.join(PAIRS)}") from None


# -- the two constructions ---------------------------------------------------------------


def _andrews1_c(env: ParamEnv) -> QMonomial:
    a, k = _ak(env)
    return k * env["rho1"] * env["rho2"] / (a * Q)


def construct_andrews_1(pair: WPPair) -> WPPair:
    """New pair in ``(a, k, rho1, rho2)`` from a pair evaluated at ``k -> c = k rho1 rho2/(a q)``."""

    def source_env(env: ParamEnv) -> ParamEnv:
        return env.replace(k=_andrews1_c(env))

    def alpha(n, env):
        a = env["a"]
        r1, r2 = env["rho1"], env["rho2"]
        k_over_c = a * Q / (r1 * r2)
        return pair.alpha(n, source_env(env)) * (
            ratio([r1, r2], [a * Q / r1, a * Q / r2], n) * k_over_c**n
        )

    def beta(n, env):
        a, k = _ak(env)
        r1, r2 = env["rho1"], env["rho2"]
        c = _andrews1_c(env)
        k_over_c = a * Q / (r1 * r2)
        senv = source_env(env)
        outer = ratio([k * r1 / a, k * r2 / a], [a * Q / r1, a * Q / r2], n)
        total = ZERO_EXPR
        for j in range(n + 1):
            bj = pair.beta(j, senv)
            if bj.is_zero():
                continue
            weight = (
                factors([c * Q ** (2 * j)], [c])
                * ratio([r1, r2], [k * r1 / a, k * r2 / a], j)
                * poch(k_over_c, n - j)
                * poch(k, n + j)
                / (poch(Q, n - j) * poch(Q * c, n + j))
                * k_over_c**j
            )
            total = total + bj * (outer * weight)
        return total

    def constraint(env):
        senv = source_env(env)
        pair.check(senv)
        return None

    return WPPair(
        f"{pair.name}+andrews1",
        alpha,
        beta,
        params=tuple(dict.fromkeys(pair.params + ("rho1", "rho2"))),
        roots={},
        constraint=constraint,
        doc=f"first Andrews construction applied to {pair.name}",
    )


def construct_andrews_2(pair: WPPair) -> WPPair:
    """New pair from ``pair`` evaluated at ``k -> q a^2/k``."""

    def source_env(env: ParamEnv) -> ParamEnv:
        a, k = _ak(env)
        return env.replace(k=Q * a * a / k)

    def alpha(n, env):
        a, k = _ak(env)
        return pair.alpha(n, source_env(env)) * (
            ratio([Q * a * a / k], [k], 2 * n) * (k * k / (Q * a * a)) ** n
        )

    def beta(n, env):
        a, k = _ak(env)
        t = k * k / (Q * a * a)
        senv = source_env(env)
        total = ZERO_EXPR
        for j in range(n + 1):
            bj = pair.beta(j, senv)
            if bj.is_zero():
                continue
            total = total + bj * (ratio([t], [Q], n - j) * t**j)
        return total

    def constraint(env):
        pair.check(source_env(env))
        return None

    return WPPair(
        f"{pair.name}+andrews2",
        alpha,
        beta,
        params=pair.params,
        roots={},
        constraint=constraint,
        doc=f"second Andrews construction applied to {pair.name}",
    )


# -- checks ------------------------------------------------------------------------------------


def wp_relation_rhs(pair: WPPair, env: ParamEnv, n: int) -> Expr:
    """``sum_j (k/a)_{n-j} (k)_{n+j} / ((q)_{n-j} (aq)_{n+j}) alpha_j``."""
    a, k = _ak(env)
    total = ZERO_EXPR
    for j in range(n + 1):
        aj = pair.alpha(j, env)
        if aj.is_zero():
            continue
        w = ratio([k / a], [Q], n - j) * ratio([k], [a * Q], n + j)
        total = total + aj * w
    return total


def verify_wp_relation(pair: WPPair, env: ParamEnv, n_max: int, N: int, seed: int | None = None) -> VerificationReport:
    start = time.perf_counter()
    name = f"wp:{pair.name}"
    try:
        pair.check(env)
        subchecks = []
        first: tuple[int, int, TruncatedSeries, TruncatedSeries] | None = None
        for n in range(n_max + 1):
            lhs = pair.beta(n, env).materialize(N)
            rhs = wp_relation_rhs(pair, env, n).materialize(N)
            k = first_mismatch(lhs, rhs)
            subchecks.append((f"n={n}", k))
            if k is not None and first is None:
                first = (n, k, lhs, rhs)
    except ADMISSIBILITY_ERRORS as exc:
        return VerificationReport(name, N, REJECTED, seed=seed, env=env.render(), detail=f"{type(exc).__name__}: {exc}")
    elapsed = (time.perf_counter() - start) * 1000
    if first is None:
        return VerificationReport(name, N, PASS, seed=seed, env=env.render(), subchecks=subchecks, elapsed_ms=elapsed)
    n, k, lhs, rhs = first
    return VerificationReport(
        name,
        N,
        MISMATCH,
        seed=seed,
        env=env.render(),
        mismatch_index=k,
        lhs_coeff=str(lhs[k]),
        rhs_coeff=str(rhs[k]),
        detail=f"first failing n = {n}",
        subchecks=subchecks,
        elapsed_ms=elapsed,
    )


# -- gamma_n from the proof of the main transformation ------------------------------------
# These use the proof's own variables: env supplies "lam", "a", "b".


def _proof_vars(env: ParamEnv):
    lam, a, b = env["lam"], env["a"], env["b"]
    sl = env.sqrt("lam")
    sab = m_root(a * b, 2)
    return lam, a, b, sl, sab


def proof_env(env: ParamEnv) -> ParamEnv:
    """Proof variables from the transformation's ``(a, k, b)``.

    lambda -> k, the proof's a -> k^2/(a b), its b -> b.
    """
    a, k, b = env["a"], env["k"], env["b"]
    return ParamEnv(lam=k, a=k * k / (a * b), b=b)


def delta_product(r: int, env: ParamEnv) -> Product:
    lam, a, b, sl, sab = _proof_vars(env)
    return ratio(
        [Q * sl, -(Q * sl), a, b, lam * P / sab, -(lam * P / sab)],
        [sl, -sl, lam * Q / a, lam * Q / b, P * sab, -(P * sab)],
        r,
    ) * (-(Q * lam / (a * b))) ** r


def u_product(r: int, env: ParamEnv) -> Product:
    lam, a, b = env["lam"], env["a"], env["b"]
    return ratio([a * b / lam], [Q], r)


def v_product(r: int, env: ParamEnv) -> Product:
    lam, a, b = env["lam"], env["a"], env["b"]
    return ratio([lam], [lam * lam * Q / (a * b)], r)


def gamma_direct(n: int, env: ParamEnv, N: int) -> TruncatedSeries:
    """``sum_{r >= n} delta_r U_{r-n} V_{r+n}`` summed term by term."""
    _proof_vars(env)

    def term(m: int) -> TruncatedSeries:
        r = m + n
        return materialize(delta_product(r, env) * u_product(m, env) * v_product(r + n, env), N)

    return sum_series(term, N)


def gamma_closed_product(n: int, env: ParamEnv) -> Product:
    lam, a, b, _, _ = _proof_vars(env)
    ll = lam * lam
    pre = ratio([lam * Q, lam * Q / (a * b)], [lam * Q / a, lam * Q / b], None) * (
        -(Q * lam / (a * b))
    ) ** n
    den_inf = [Q, Q * a * b, ll * Q2 / (a * b), ll * Q2 / (a * a * b * b)]
    if n % 2 == 0:
        m = n // 2
        body = ratio([a * Q, b * Q, ll * Q2 / (a * a * b), ll * Q2 / (a * b * b)], den_inf, None, BASE_Q2) * ratio(
            [a, b], [ll * Q2 / (a * a * b), ll * Q2 / (a * b * b)], m, BASE_Q2
        )
    else:
        m = (n - 1) // 2
        Q3 = Q2 * Q
        body = ratio([a, b, ll * Q3 / (a * a * b), ll * Q3 / (a * b * b)], den_inf, None, BASE_Q2) * ratio(
            [a * Q, b * Q], [ll * Q3 / (a * a * b), ll * Q3 / (a * b * b)], m, BASE_Q2
        )
    return pre * body


def gamma_closed(n: int, env: ParamEnv, N: int) -> TruncatedSeries:
    """Closed form of ``gamma_n`` (even/odd case split)."""
    return materialize(gamma_closed_product(n, env), N)


def bailey_lemma_check(
    pair: WPPair,
    env: ParamEnv,
    N: int,
    seed: int | None = None,
) -> VerificationReport:
    """``sum alpha_n gamma_n == sum beta_n delta_n`` with gamma from the direct sum.

    ``env`` is in the transformation's variables ``(a, k, b, ...)``.
    """
    start = time.perf_counter()
    name = f"bailey-lemma:{pair.name}"
    try:
        pair.check(env)
        penv = proof_env(env)
        _proof_vars(penv)

        @lru_cache(maxsize=None)
        def gamma(n: int, M: int) -> TruncatedSeries:
            return gamma_direct(n, penv, M)

        def lhs_term(n: int) -> TruncatedSeries:
            an = pair.alpha(n, env)
            parts = [scaled_series(t, lambda M, n=n: gamma(n, M), N) for t in an.terms]
            out = TruncatedSeries.zero(N)
            for s in parts:
                out = out + s
            return out

        def rhs_term(n: int) -> TruncatedSeries:
            bn = pair.beta(n, env)
            return (bn * delta_product(n, penv)).materialize(N)

        lhs = sum_series(lhs_term, N)
        rhs = sum_series(rhs_term, N)
    except NonTruncating as exc:
        return VerificationReport(name, N, NON_TRUNCATING, seed=seed, env=env.render(), detail=str(exc))
    except ADMISSIBILITY_ERRORS as exc:
        return VerificationReport(name, N, REJECTED, seed=seed, env=env.render(), detail=f"{type(exc).__name__}: {exc}")
    report = compare(name, lhs, rhs, N, seed=seed, env=env.render())
    report.elapsed_ms = (time.perf_counter() - start) * 1000
    return report

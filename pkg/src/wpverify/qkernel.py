"""q-Pochhammer symbols and basic hypergeometric sums over truncated series.

Everything is a product of binomials ``1 - c*p^m``.  A binomial whose
monomial has a negative exponent is rewritten as ``-c*p^m * (1 - p^-m/c)``,
so a product splits into an exact Laurent monomial times a unit power
series.  The monomial part is computed first; it fixes how many
coefficients of the unit part are needed, which makes products such as
``(k/(a q); q)_n (-q a/k)^n`` exact even when one factor alone is not a
power series.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .errors import DegenerateParameter, NegativeExponent, NonTruncating, PoleInDenominator
from .exactnum import ONE, ZERO, GaussianRational
from .series import (
    MONO_ONE,
    QMonomial,
    TruncatedSeries,
    div_binomial_inplace,
    m_root,
    mul_binomial_inplace,
    s_sum,
)

DEFAULT_WINDOW = 4

# In strict mode an exactly vanishing numerator factor is an error rather
# than a zero.  Samplers use it to keep away from removable singularities.
_STRICT = contextvars.ContextVar("wpverify_strict_zeros", default=False)


@contextlib.contextmanager
def strict_zeros(enabled: bool = True):
    token = _STRICT.set(enabled)
    try:
        yield
    finally:
        _STRICT.reset(token)


@dataclass(frozen=True)
class PochBase:
    """Base ``p**step``: 1 for sqrt(q), 2 for q, 4 for q**2."""

    step: int

    def __post_init__(self):
        if self.step < 1:
            raise ValueError("base step must be positive")

    @property
    def monomial(self) -> QMonomial:
        return QMonomial(ONE, self.step)


BASE_SQRT_Q = PochBase(1)
BASE_Q = PochBase(2)
BASE_Q2 = PochBase(4)


def _as_base(base) -> PochBase:
    return base if isinstance(base, PochBase) else PochBase(int(base))


@dataclass(frozen=True)
class Poch:
    """``(x; base)_n``; ``n=None`` is the infinite product."""

    x: QMonomial
    n: int | None
    step: int = 2

    def __post_init__(self):
        if self.n is not None and self.n < 0:
            raise ValueError("Pochhammer length must be nonnegative")


def binomial(x: QMonomial) -> Poch:
    """``1 - x`` as a length-one Pochhammer."""
    return Poch(x, 1, 2)


@dataclass(frozen=True)
class Product:
    """``scalar * prod(num) / prod(den)`` with Pochhammer factors."""

    scalar: QMonomial = MONO_ONE
    num: tuple[Poch, ...] = ()
    den: tuple[Poch, ...] = ()

    def __mul__(self, other) -> Product:
        if isinstance(other, Product):
            return Product(self.scalar * other.scalar, self.num + other.num, self.den + other.den)
        if isinstance(other, QMonomial):
            return Product(self.scalar * other, self.num, self.den)
        if isinstance(other, Expr):
            return Expr((self,)) * other
        return Product(self.scalar * QMonomial(GaussianRational.coerce(other), 0), self.num, self.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Product:
        if isinstance(other, Product):
            return Product(self.scalar / other.scalar, self.num + other.den, self.den + other.num)
        return Product(self.scalar / other, self.num, self.den)

    def __neg__(self) -> Product:
        return Product(-self.scalar, self.num, self.den)

    def is_zero(self) -> bool:
        return self.scalar.is_zero()

    def shift(self) -> int | None:
        """Exponent of the Laurent monomial part, or None for an exact zero."""
        split = _split(self)
        return None if split is None else split.pexp

    def materialize(self, N: int) -> TruncatedSeries:
        return materialize(self, N)


def poch(x: QMonomial, n: int | None, base=BASE_Q) -> Product:
    return Product(MONO_ONE, (Poch(x, n, _as_base(base).step),))


def pochs(xs: Sequence[QMonomial], n: int | None, base=BASE_Q) -> Product:
    step = _as_base(base).step
    return Product(MONO_ONE, tuple(Poch(x, n, step) for x in xs))


def ratio(nums: Sequence[QMonomial], dens: Sequence[QMonomial], n: int | None, base=BASE_Q) -> Product:
    """``(nums; base)_n / (dens; base)_n``."""
    step = _as_base(base).step
    return Product(
        MONO_ONE,
        tuple(Poch(x, n, step) for x in nums),
        tuple(Poch(y, n, step) for y in dens),
    )


def factors(nums: Sequence[QMonomial] = (), dens: Sequence[QMonomial] = ()) -> Product:
    """``prod(1 - x) / prod(1 - y)``."""
    return ratio(nums, dens, 1, BASE_Q)


def scalar(m) -> Product:
    if not isinstance(m, QMonomial):
        m = QMonomial(GaussianRational.coerce(m), 0)
    return Product(m)


class Expr:
    """A finite sum of Products (what a pair's alpha_n or beta_n evaluates to)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Product] = ()):
        self.terms = tuple(t for t in terms if not t.is_zero())

    @classmethod
    def of(cls, x) -> Expr:
        if isinstance(x, Expr):
            return x
        if isinstance(x, Product):
            return cls((x,))
        if isinstance(x, QMonomial):
            return cls((Product(x),))
        raise TypeError(f"cannot make an Expr from {type(x).__name__}")

    def __add__(self, other) -> Expr:
        return Expr(self.terms + Expr.of(other).terms)

    def __neg__(self) -> Expr:
        return Expr(-t for t in self.terms)

    def __mul__(self, other) -> Expr:
        if isinstance(other, (Product, QMonomial)):
            return Expr(t * other for t in self.terms)
        other = Expr.of(other)
        return Expr(s * t for s in self.terms for t in other.terms)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def materialize(self, N: int) -> TruncatedSeries:
        """Sum of the products to order ``N``.

        Individual products may be Laurent as long as their negative parts
        cancel in the sum.
        """
        shifts = [t.shift() for t in self.terms]
        low = min((e for e in shifts if e is not None), default=0)
        if low >= 0:
            return s_sum((materialize(t, N) for t in self.terms), N)
        lift = QMonomial(ONE, -low)
        M = N - low
        total = s_sum((materialize(t * lift, M) for t in self.terms), M)
        if any(total.coeffs[:-low]):
            raise NegativeExponent(f"sum has negative valuation (down to p^{low})")
        return TruncatedSeries._raw(total.coeffs[-low:], N)

    def __len__(self) -> int:
        return len(self.terms)


ZERO_EXPR = Expr()


# -- materialization ------------------------------------------------------------


class _Split:
    """Laurent part of a Product, before the regular factors are expanded."""

    __slots__ = ("coeff", "pexp", "num_bins", "den_bins", "num_inf", "den_inf")

    def __init__(self, coeff: GaussianRational, pexp: int):
        self.coeff = coeff
        self.pexp = pexp
        self.num_bins: list[tuple[GaussianRational, int]] = []
        self.den_bins: list[tuple[GaussianRational, int]] = []
        # (coefficient, first regular exponent, step) of infinite products
        self.num_inf: list[tuple[GaussianRational, int, int]] = []
        self.den_inf: list[tuple[GaussianRational, int, int]] = []


class _Zero(Exception):
    pass


def _absorb(split: _Split, c: GaussianRational, m: int, numerator: bool) -> None:
    """Fold one binomial ``1 - c*p^m`` into ``split``."""
    if m < 0:
        # 1 - c p^m = (-c p^m) (1 - c^-1 p^-m)
        if numerator:
            split.coeff = split.coeff * -c
            split.pexp += m
            split.num_bins.append((c.inverse(), -m))
        else:
            split.coeff = split.coeff / -c
            split.pexp -= m
            split.den_bins.append((c.inverse(), -m))
    elif m == 0:
        one_minus = ONE - c
        if one_minus.is_zero():
            if numerator:
                raise _Zero
            raise PoleInDenominator("denominator factor 1 - 1")
        split.coeff = split.coeff * one_minus if numerator else split.coeff / one_minus
    elif numerator:
        split.num_bins.append((c, m))
    else:
        split.den_bins.append((c, m))


def _split(prod: Product) -> _Split | None:
    if prod.scalar.is_zero():
        return None
    split = _Split(prod.scalar.coeff, prod.scalar.pexp)
    zero = False
    # denominators first: a pole is an error even when a numerator vanishes
    for numerator, group in ((False, prod.den), (True, prod.num)):
        for f in group:
            x = f.x
            if x.is_zero() or f.n == 0:
                continue
            c, e0, step = x.coeff, x.pexp, f.step
            if f.n is None:
                j = 0
                while e0 + step * j <= 0:
                    try:
                        _absorb(split, c, e0 + step * j, numerator)
                    except _Zero:
                        zero = True
                    j += 1
                (split.num_inf if numerator else split.den_inf).append((c, e0 + step * j, step))
            else:
                for j in range(f.n):
                    try:
                        _absorb(split, c, e0 + step * j, numerator)
                    except _Zero:
                        zero = True
    if zero and _STRICT.get():
        raise DegenerateParameter("a numerator factor vanishes exactly")
    return None if zero else split


def materialize(prod: Product, N: int) -> TruncatedSeries:
    """Expand a Product to order ``N``.

    Raises NegativeExponent when the product is a genuine Laurent series
    and PoleInDenominator when a denominator factor vanishes.
    """
    split = _split(prod)
    if split is None or split.pexp > N:
        return TruncatedSeries.zero(N)
    if split.pexp < 0:
        raise NegativeExponent(f"product has valuation {split.pexp}")
    top = N - split.pexp
    s = [split.coeff] + [ZERO] * top
    deg = 0
    for c, m in split.num_bins:
        if m > top:
            continue
        deg = min(deg + m, top)
        mul_binomial_inplace(s, c, m, deg)
    for c, m0, step in split.num_inf:
        for m in range(m0, top + 1, step):
            deg = min(deg + m, top)
            mul_binomial_inplace(s, c, m, deg)
    for c, m in split.den_bins:
        if m <= top:
            div_binomial_inplace(s, c, m, top)
    for c, m0, step in split.den_inf:
        for m in range(m0, top + 1, step):
            div_binomial_inplace(s, c, m, top)
    return TruncatedSeries._raw([ZERO] * split.pexp + s, N)


def scaled_series(prefactor: Product, build: Callable[[int], TruncatedSeries], N: int) -> TruncatedSeries:
    """``prefactor * build(...)`` to order ``N``, tolerating a Laurent prefactor.

    ``build(M)`` must return the cofactor series to order ``M``.
    """
    split = _split(prefactor)
    if split is None or split.pexp > N:
        # the body must still make sense even where it is not visible
        build(0)
        return TruncatedSeries.zero(N)
    e = split.pexp
    M = N - e
    unit = materialize(Product(QMonomial(prefactor.scalar.coeff, prefactor.scalar.pexp - e), prefactor.num, prefactor.den), M)
    body = build(M)
    prod = unit * body
    if e >= 0:
        return prod.shift(e, N)
    lead = prod.coeffs[:-e]
    if any(lead):
        raise NegativeExponent(f"side has negative valuation (prefactor p^{e})")
    return TruncatedSeries._raw(prod.coeffs[-e:], N)


# -- Pochhammer symbols -------------------------------------------------------------


def poch_finite(x: QMonomial, base, n: int, N: int) -> TruncatedSeries:
    if n < 0:
        raise ValueError("n must be nonnegative")
    return materialize(poch(x, n, base), N)


def poch_infinite(x: QMonomial, base, N: int) -> TruncatedSeries:
    return materialize(poch(x, None, base), N)


def poch_multi(xs: Sequence[QMonomial], base, n: int | None, N: int) -> TruncatedSeries:
    return materialize(pochs(xs, n, base), N)


# -- infinite sums ------------------------------------------------------------------------


def sum_series(
    g: Callable[[int], TruncatedSeries] | Iterable[TruncatedSeries],
    N: int,
    window: int | None = DEFAULT_WINDOW,
    cap: int | None = None,
) -> TruncatedSeries:
    """Sum the terms of ``g`` to order ``N``.

    Stops after ``window`` consecutive terms that vanish to order ``N``, or
    when an iterable ``g`` is exhausted.  ``window=None`` relies on
    exhaustion alone.  Reaching ``cap`` terms raises NonTruncating.
    """
    if window is not None and window < 1:
        raise ValueError("window must be >= 1")
    if cap is None:
        cap = 4 * max(N, 1)
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if callable(g):
        fn = g

        def _gen() -> Iterator[TruncatedSeries]:
            n = 0
            while True:
                yield fn(n)
                n += 1

        terms = _gen()
    else:
        terms = iter(g)
    acc = [ZERO] * (N + 1)
    quiet = 0
    for n, term in enumerate(terms):
        if n >= cap:
            raise NonTruncating(f"no truncation after {cap} terms at order {N}")
        if term.order != N:
            raise ValueError(f"term {n} has order {term.order}, expected {N}")
        if term.is_zero():
            quiet += 1
            if window is not None and quiet >= window:
                break
            continue
        quiet = 0
        for k, c in enumerate(term.coeffs):
            if c:
                acc[k] = acc[k] + c
    return TruncatedSeries._raw(acc, N)


# -- basic hypergeometric series ------------------------------------------------------


@dataclass
class HyperTerms:
    """Term stream of ``sum_n prod(nums)_n / prod(dens)_n * ((-1)^n B^(n(n-1)/2))^qpow * z^n``.

    ``dens`` must include the ``(B; B)_n`` factor if one is wanted.  Terms
    are built by exact ratios; see ``direct`` for the from-scratch version.
    """

    nums: tuple[QMonomial, ...]
    dens: tuple[QMonomial, ...]
    base: PochBase
    z: QMonomial
    qpow: int = 0

    def ratio_product(self, n: int) -> Product:
        """term(n+1) / term(n)."""
        step = self.base.step
        sc = self.z * QMonomial(ONE if self.qpow % 2 == 0 else -ONE, step * n * self.qpow)
        return Product(
            sc,
            tuple(Poch(QMonomial(x.coeff, x.pexp + step * n), 1, step) for x in self.nums if not x.is_zero()),
            tuple(Poch(QMonomial(y.coeff, y.pexp + step * n), 1, step) for y in self.dens if not y.is_zero()),
        )

    def direct_product(self, n: int) -> Product:
        step = self.base.step
        sign = -ONE if (self.qpow * n) % 2 else ONE
        sc = (self.z**n) * QMonomial(sign, step * self.qpow * n * (n - 1) // 2)
        return Product(
            sc,
            tuple(Poch(x, n, step) for x in self.nums),
            tuple(Poch(y, n, step) for y in self.dens),
        )

    def direct(self, n: int, N: int) -> TruncatedSeries:
        return materialize(self.direct_product(n), N)

    def _laurent_horizon(self) -> int:
        """First n from which every step binomial has a nonnegative exponent."""
        step = self.base.step
        worst = min([x.pexp for x in self.nums + self.dens if not x.is_zero()], default=0)
        return 0 if worst >= 0 else -(worst // step)

    def _check_no_later_pole(self, n: int) -> None:
        """A numerator zero at step ``n`` ends the sum; a later denominator zero makes it 0/0."""
        step = self.base.step
        for y in self.dens:
            if y.is_zero() or y.pexp > 0 or y.pexp % step:
                continue
            m = -y.pexp // step
            if m > n and (ONE - y.coeff).is_zero():
                raise PoleInDenominator(f"terminating sum has a 0/0 term at step {m}")

    def plan(self, N: int, cap: int | None = None) -> list[tuple[int, _Split | None]]:
        """Exponent of each term's monomial part plus the step splits.

        Entry ``n`` is ``(e_n, split of ratio n-1 -> n)``; the list ends
        once every later term is provably invisible at order ``N`` or the
        series terminates.
        """
        horizon = self._laurent_horizon()
        if cap is None:
            cap = 4 * max(N, 1) + horizon
        if self.z.is_zero():
            return [(0, None)]
        plan: list[tuple[int, _Split | None]] = [(0, None)]
        e = 0
        n = 0
        while True:
            growth_ok = self.z.pexp >= 1 and self.qpow >= 0
            if n > horizon and e > N and (growth_ok or (self.z.pexp >= 0 and self.qpow > 0)):
                return plan[:-1] if len(plan) > 1 else plan
            if len(plan) > cap:
                raise NonTruncating(
                    f"hypergeometric sum not truncating after {cap} terms at order {N}"
                )
            split = _split(self.ratio_product(n))
            if split is None:
                self._check_no_later_pole(n)
                return plan
            e += split.pexp
            plan.append((e, split))
            n += 1

    def stream(self, N: int, cap: int | None = None) -> Iterator[TruncatedSeries]:
        plan = self.plan(N, cap)
        exps = [e for e, _ in plan]
        suffix_min = exps[:]
        for i in range(len(exps) - 2, -1, -1):
            suffix_min[i] = min(suffix_min[i], suffix_min[i + 1])
        if suffix_min and suffix_min[0] < 0:
            raise NegativeExponent(f"hypergeometric term with valuation {suffix_min[0]}")
        top = N - suffix_min[0]
        coeff = ONE
        s = [ONE] + [ZERO] * top
        for n, (e, split) in enumerate(plan):
            if split is not None:
                top = N - suffix_min[n]
                del s[top + 1:]
                coeff = coeff * split.coeff
                for c, m in split.num_bins:
                    if m <= top:
                        mul_binomial_inplace(s, c, m, top)
                for c, m in split.den_bins:
                    if m <= top:
                        div_binomial_inplace(s, c, m, top)
            if e > N:
                yield TruncatedSeries.zero(N)
                continue
            yield TruncatedSeries._raw([ZERO] * e + [coeff * v for v in s[: N + 1 - e]], N)


def phi_series(
    nums: Sequence[QMonomial],
    dens: Sequence[QMonomial],
    base,
    z: QMonomial,
    N: int,
) -> TruncatedSeries:
    """``_r phi_s(nums; dens; base, z)`` truncated at order ``N``."""
    base = _as_base(base)
    nums = tuple(nums)
    dens = tuple(dens)
    r, s = len(nums), len(dens)
    terms = HyperTerms(nums, (base.monomial,) + dens, base, z, qpow=s + 1 - r)
    return sum_series(terms.stream(N), N, window=None, cap=10**9)


def phi_terms(nums, dens, base, z) -> HyperTerms:
    base = _as_base(base)
    nums, dens = tuple(nums), tuple(dens)
    return HyperTerms(nums, (base.monomial,) + dens, base, z, qpow=len(dens) + 1 - len(nums))


def w_params(
    a1: QMonomial,
    rest: Sequence[QMonomial],
    base,
    sqrt_a1: QMonomial | None = None,
) -> tuple[list[QMonomial], list[QMonomial]]:
    """Numerator and denominator parameters of the very-well-poised series."""
    base = _as_base(base)
    B = base.monomial
    if sqrt_a1 is None:
        sqrt_a1 = m_root(a1, 2)
    nums = [a1, B * sqrt_a1, -(B * sqrt_a1)] + list(rest)
    dens = [sqrt_a1, -sqrt_a1] + [a1 * B / x for x in rest]
    return nums, dens


def w_series(
    a1: QMonomial,
    rest: Sequence[QMonomial],
    base,
    z: QMonomial,
    N: int,
    sqrt_a1: QMonomial | None = None,
) -> TruncatedSeries:
    """``_{r+1}W_r(a1; rest; base, z)``."""
    nums, dens = w_params(a1, rest, base, sqrt_a1)
    return phi_series(nums, dens, base, z, N)

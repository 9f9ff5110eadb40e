"""Truncated power series in ``p`` where ``q = p**2``.

Every parameter of an identity is substituted by a monomial ``c * p**e``;
``sqrt(q) = p`` is then exact, and so is any radical whose monomial has a
suitable exponent and coefficient.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NegativeExponent, NonInvertible, NotAPerfectRoot, OrderMismatch
from .exactnum import ONE, ZERO, GaussianRational, parse_gaussian

INFINITY = float("inf")


@dataclass(frozen=True)
class QMonomial:
    """``coeff * p**pexp``.

    ``pexp`` may be negative while monomials are being combined; only
    materializing such a monomial as a series is an error.
    """

    coeff: GaussianRational
    pexp: int = 0

    def __post_init__(self):
        if not isinstance(self.coeff, GaussianRational):
            object.__setattr__(self, "coeff", GaussianRational.coerce(self.coeff))
        if self.coeff.is_zero() and self.pexp != 0:
            object.__setattr__(self, "pexp", 0)

    def is_zero(self) -> bool:
        return self.coeff.is_zero()

    def is_one(self) -> bool:
        return self.pexp == 0 and self.coeff.is_one()

    def __mul__(self, other) -> QMonomial:
        if not isinstance(other, QMonomial):
            other = QMonomial(GaussianRational.coerce(other), 0)
        return QMonomial(self.coeff * other.coeff, self.pexp + other.pexp)

    __rmul__ = __mul__

    def __truediv__(self, other) -> QMonomial:
        if not isinstance(other, QMonomial):
            other = QMonomial(GaussianRational.coerce(other), 0)
        return QMonomial(self.coeff / other.coeff, self.pexp - other.pexp)

    def __rtruediv__(self, other) -> QMonomial:
        return QMonomial(GaussianRational.coerce(other), 0) / self

    def __neg__(self) -> QMonomial:
        return QMonomial(-self.coeff, self.pexp)

    def __pow__(self, k: int) -> QMonomial:
        return m_pow(self, k)

    def __str__(self) -> str:
        return f"{self.coeff}·p^{self.pexp}"


def m_pow(m: QMonomial, k: int) -> QMonomial:
    if k == 0:
        return QMonomial(ONE, 0)
    return QMonomial(m.coeff**k, m.pexp * k)


def m_root(m: QMonomial, k: int, branch: int = 1) -> QMonomial:
    """A monomial ``r`` with ``r**k == m``.

    The canonical root is taken coefficientwise (see
    ``GaussianRational.root``); ``branch=-1`` negates it for even ``k``.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    if m.pexp % k:
        raise NotAPerfectRoot(f"exponent {m.pexp} of {m} not divisible by {k}")
    r = QMonomial(m.coeff.root(k), m.pexp // k)
    if branch == -1:
        if k % 2:
            raise ValueError("negative branch only exists for even roots")
        r = -r
    return r


def mono(coeff, pexp: int = 0) -> QMonomial:
    return QMonomial(GaussianRational.coerce(coeff), pexp)


P = QMonomial(ONE, 1)
Q = QMonomial(ONE, 2)
MONO_ONE = QMonomial(ONE, 0)

_MONO_RE = re.compile(r"^\s*(?P<c>.*?)\s*(?:[·*]?\s*p\s*(?:\^\s*(?P<e>-?\d+))?)?\s*$")


def parse_monomial(text: str) -> QMonomial:
    """Parse ``"c·p^e"`` (also ``c*p^e``, ``c*p``, bare ``c``)."""
    m = _MONO_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse monomial {text!r}")
    coeff_text = m.group("c")
    has_p = text.rstrip().endswith("p") or "^" in text
    pexp = int(m.group("e")) if m.group("e") is not None else (1 if has_p else 0)
    if coeff_text.startswith("(") and coeff_text.endswith(")"):
        coeff_text = coeff_text[1:-1]
    if coeff_text in ("", "+", "-"):
        coeff_text += "1"
    return QMonomial(parse_gaussian(coeff_text), pexp)


class TruncatedSeries:
    """Coefficients ``c_0 .. c_N`` of a power series in ``p``, known mod ``p**(N+1)``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Sequence[GaussianRational], order: int | None = None):
        coeffs = tuple(GaussianRational.coerce(c) for c in coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be nonnegative")
        if len(coeffs) < order + 1:
            coeffs = coeffs + (ZERO,) * (order + 1 - len(coeffs))
        self.order = order
        self.coeffs = coeffs[: order + 1]

    @classmethod
    def _raw(cls, coeffs: list | tuple, order: int) -> TruncatedSeries:
        obj = object.__new__(cls)
        obj.order = order
        obj.coeffs = tuple(coeffs)
        return obj

    @classmethod
    def zero(cls, order: int) -> TruncatedSeries:
        return cls._raw((ZERO,) * (order + 1), order)

    @classmethod
    def one(cls, order: int) -> TruncatedSeries:
        return cls.constant(ONE, order)

    @classmethod
    def constant(cls, c, order: int) -> TruncatedSeries:
        return cls._raw((GaussianRational.coerce(c),) + (ZERO,) * order, order)

    def __getitem__(self, k: int) -> GaussianRational:
        return self.coeffs[k]

    def __len__(self) -> int:
        return self.order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def _check(self, other: TruncatedSeries) -> None:
        if self.order != other.order:
            raise OrderMismatch(f"order {self.order} vs {other.order}")

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        return s_add(self, other)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        self._check(other)
        return TruncatedSeries._raw([a - b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries._raw([-a for a in self.coeffs], self.order)

    def __mul__(self, other) -> TruncatedSeries:
        if isinstance(other, TruncatedSeries):
            return s_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> TruncatedSeries:
        c = GaussianRational.coerce(c)
        return TruncatedSeries._raw([a * c for a in self.coeffs], self.order)

    def truncate(self, order: int) -> TruncatedSeries:
        if order > self.order:
            raise OrderMismatch(f"cannot extend a series known to order {self.order} to {order}")
        return TruncatedSeries._raw(self.coeffs[: order + 1], order)

    def shift(self, e: int, order: int) -> TruncatedSeries:
        """``p**e * self`` viewed at ``order``; needs ``self.order >= order - e``."""
        if e < 0:
            raise NegativeExponent(f"shift by p^{e}")
        if order - e > self.order:
            raise OrderMismatch(f"shift by {e} to order {order} needs order {order - e}")
        if e > order:
            return TruncatedSeries.zero(order)
        return TruncatedSeries._raw((ZERO,) * e + self.coeffs[: order + 1 - e], order)

    def agrees_with(self, other: TruncatedSeries, upto: int | None = None) -> bool:
        return first_mismatch(self, other, upto) is None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coeffs)

    def __eq__(self, other):
        # Structural; the comparison verifiers rely on is ``first_mismatch``.
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __str__(self) -> str:
        return format_series(self)

    def __repr__(self) -> str:
        return f"TruncatedSeries({format_series(self)!r}, order={self.order})"


def first_mismatch(x: TruncatedSeries, y: TruncatedSeries, upto: int | None = None) -> int | None:
    """Index of the first differing coefficient in ``0..upto``, or None."""
    if upto is None:
        x._check(y)
        upto = x.order
    if upto > min(x.order, y.order):
        raise OrderMismatch(f"cannot compare to order {upto}")
    for k in range(upto + 1):
        if x.coeffs[k] != y.coeffs[k]:
            return k
    return None


def s_add(x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
    x._check(y)
    return TruncatedSeries._raw([a + b for a, b in zip(x.coeffs, y.coeffs)], x.order)


def s_sum(terms: Iterable[TruncatedSeries], order: int) -> TruncatedSeries:
    acc = list(TruncatedSeries.zero(order).coeffs)
    for t in terms:
        if t.order != order:
            raise OrderMismatch(f"order {t.order} vs {order}")
        for k, c in enumerate(t.coeffs):
            if c:
                acc[k] = acc[k] + c
    return TruncatedSeries._raw(acc, order)


def s_mul(x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
    x._check(y)
    n = x.order
    xs = [(i, c) for i, c in enumerate(x.coeffs) if c]
    ys = [(j, c) for j, c in enumerate(y.coeffs) if c]
    out = [ZERO] * (n + 1)
    for i, a in xs:
        for j, b in ys:
            if i + j > n:
                break
            out[i + j] = out[i + j] + a * b
    return TruncatedSeries._raw(out, n)


def s_inv(x: TruncatedSeries) -> TruncatedSeries:
    c0 = x.coeffs[0]
    if c0.is_zero():
        raise NonInvertible("constant term is zero")
    n = x.order
    inv0 = c0.inverse()
    out = [inv0] + [ZERO] * n
    nz = [(i, c) for i, c in enumerate(x.coeffs) if c and i > 0]
    for k in range(1, n + 1):
        acc = ZERO
        for i, c in nz:
            if i > k:
                break
            acc = acc + c * out[k - i]
        out[k] = -acc * inv0
    return TruncatedSeries._raw(out, n)


def s_valuation(x: TruncatedSeries):
    for k, c in enumerate(x.coeffs):
        if c:
            return k
    return INFINITY


def s_from_monomial(m: QMonomial, N: int) -> TruncatedSeries:
    if m.is_zero():
        return TruncatedSeries.zero(N)
    if m.pexp < 0:
        raise NegativeExponent(f"cannot materialize {m}")
    if m.pexp > N:
        return TruncatedSeries.zero(N)
    out = [ZERO] * (N + 1)
    out[m.pexp] = m.coeff
    return TruncatedSeries._raw(out, N)


def format_series(x: TruncatedSeries) -> str:
    parts = []
    for k, c in enumerate(x.coeffs):
        if not c:
            continue
        text = str(c)
        if not c.is_real() and c.re != 0:
            text = f"({text})"
        if k == 0:
            parts.append(text)
        elif k == 1:
            parts.append(f"{text}·p")
        else:
            parts.append(f"{text}·p^{k}")
    return " + ".join(parts) if parts else "0"


# -- in-place kernels on coefficient lists ------------------------------------
# A product of q-Pochhammer symbols is a product of binomials 1 - c*p^m; these
# multiply or divide a dense coefficient list by one binomial in O(N).


def mul_binomial_inplace(s: list, c: GaussianRational, m: int, top: int) -> None:
    """``s *= (1 - c*p^m)`` for ``m >= 1``; ``s`` has ``top+1`` entries."""
    for i in range(top, m - 1, -1):
        v = s[i - m]
        if v:
            s[i] = s[i] - c * v


def div_binomial_inplace(s: list, c: GaussianRational, m: int, top: int) -> None:
    """``s /= (1 - c*p^m)`` for ``m >= 1`` (geometric recurrence)."""
    for i in range(m, top + 1):
        v = s[i - m]
        if v:
            s[i] = s[i] + c * v

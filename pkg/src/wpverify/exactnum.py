"""Exact rational and Gaussian-rational arithmetic.

``BigRational`` is gmpy2's ``mpq``: always in lowest terms with a positive
denominator, so equality and hashing are structural.  ``GaussianRational``
adds an imaginary part on top of it.
"""
from __future__ import annotations

import re

import gmpy2
from gmpy2 import mpq

from .errors import DivisionByZero, NotAPerfectRoot

BigRational = type(mpq(0))

_ZERO = mpq(0)
_ONE = mpq(1)


def as_rational(value) -> mpq:
    if isinstance(value, BigRational):
        return value
    if isinstance(value, str):
        try:
            return mpq(value.strip())
        except ValueError as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    return mpq(value)


def rational_root(r: mpq, k: int) -> mpq:
    """Exact ``k``-th root of a rational, or NotAPerfectRoot.

    Odd roots of negatives are negative; even roots of negatives do not exist
    here (the Gaussian layer handles those).
    """
    if k < 1:
        raise ValueError("root index must be positive")
    if r == 0:
        return _ZERO
    sign = 1
    if r < 0:
        if k % 2 == 0:
            raise NotAPerfectRoot(f"even root of negative rational {r}")
        sign, r = -1, -r
    num, num_exact = gmpy2.iroot(r.numerator, k)
    den, den_exact = gmpy2.iroot(r.denominator, k)
    if not (num_exact and den_exact):
        raise NotAPerfectRoot(f"{r} has no exact rational {k}-th root")
    return sign * mpq(num, den)


class GaussianRational:
    """``re + im*i`` with exact rational parts.  Immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_rational(re))
        object.__setattr__(self, "im", as_rational(im))

    @classmethod
    def _raw(cls, re: mpq, im: mpq) -> GaussianRational:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (str(self.re), str(self.im)))

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, str):
            return parse_gaussian(value)
        return cls._raw(as_rational(value), _ZERO)

    # -- predicates -------------------------------------------------------
    def is_real(self) -> bool:
        return self.im == 0

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_one(self) -> bool:
        return self.re == 1 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, BigRational)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> GaussianRational:
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other) -> GaussianRational:
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other) -> GaussianRational:
        return GaussianRational.coerce(other) - self

    def __neg__(self) -> GaussianRational:
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other) -> GaussianRational:
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if b == 0:
            if d == 0:
                return GaussianRational._raw(a * c, _ZERO)
            return GaussianRational._raw(a * c, a * d)
        if d == 0:
            return GaussianRational._raw(a * c, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def norm(self) -> mpq:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    def inverse(self) -> GaussianRational:
        if self.im == 0:
            if self.re == 0:
                raise DivisionByZero("inverse of zero")
            return GaussianRational._raw(1 / self.re, _ZERO)
        n = self.norm()
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other) -> GaussianRational:
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        if other.im == 0:
            if other.re == 0:
                raise DivisionByZero("division by zero")
            return GaussianRational._raw(self.re / other.re, self.im / other.re)
        return self * other.inverse()

    def __rtruediv__(self, other) -> GaussianRational:
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int) -> GaussianRational:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def sqrt(self) -> GaussianRational:
        """Canonical exact square root: positive real part, else positive imaginary part."""
        u, v = self.re, self.im
        if v == 0:
            if u >= 0:
                return GaussianRational._raw(rational_root(u, 2), _ZERO)
            return GaussianRational._raw(_ZERO, rational_root(-u, 2))
        modulus = rational_root(u * u + v * v, 2)
        x = rational_root((u + modulus) / 2, 2)
        y = v / (2 * x)
        return GaussianRational._raw(x, y)

    def root(self, k: int) -> GaussianRational:
        """Canonical exact ``k``-th root (even ``k`` goes through ``sqrt``)."""
        if k < 1:
            raise ValueError("root index must be positive")
        if k == 1:
            return self
        if k % 2 == 0:
            return self.sqrt().root(k // 2)
        if self.im == 0:
            return GaussianRational._raw(rational_root(self.re, k), _ZERO)
        raise NotAPerfectRoot(f"odd root of non-real {self} not supported")

    # -- rendering --------------------------------------------------------
    def __str__(self) -> str:
        return format_gaussian(self)

    def __repr__(self) -> str:
        return f"GaussianRational({format_gaussian(self)!r})"


ZERO = GaussianRational._raw(_ZERO, _ZERO)
ONE = GaussianRational._raw(_ONE, _ZERO)
I = GaussianRational._raw(_ZERO, _ONE)


def gr_add(x: GaussianRational, y: GaussianRational) -> GaussianRational:
    return x + y


def gr_mul(x: GaussianRational, y: GaussianRational) -> GaussianRational:
    return x * y


def gr_inv(x: GaussianRational) -> GaussianRational:
    return x.inverse()


def format_gaussian(x: GaussianRational) -> str:
    if x.im == 0:
        return str(x.re)
    im = x.im
    im_text = "" if abs(im) == 1 else f"{abs(im)} "
    if x.re == 0:
        return f"{'-' if im < 0 else ''}{im_text}i"
    return f"{x.re} {'-' if im < 0 else '+'} {im_text}i"


_RAT = r"\d+(?:/\d+)?"
_GAUSS_RE = re.compile(
    rf"""^\s*
    (?:(?P<re>[+-]?\s*{_RAT}))?           # real part
    \s*
    (?:(?P<isign>[+-])?\s*(?P<im>{_RAT})?\s*\*?\s*i)?   # imaginary part
    \s*$""",
    re.VERBOSE,
)


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"a/b"``, ``"a/b + c/d i"``, ``"-i"``, ``"3/2 i"`` and the like."""
    m = _GAUSS_RE.match(text)
    if not m or not text.strip():
        raise ValueError(f"cannot parse Gaussian rational {text!r}")
    re_part, isign, im_part = m.group("re"), m.group("isign"), m.group("im")
    has_i = text.strip().endswith("i")
    if not has_i:
        if re_part is None:
            raise ValueError(f"cannot parse Gaussian rational {text!r}")
        return GaussianRational(re_part.replace(" ", ""), 0)
    if re_part is not None and isign is None and im_part is None:
        # "3i" parsed the coefficient as the real part
        return GaussianRational(0, re_part.replace(" ", ""))
    if re_part is not None and isign is None:
        raise ValueError(f"cannot parse Gaussian rational {text!r}")
    im = as_rational(im_part) if im_part is not None else _ONE
    if isign == "-":
        im = -im
    re_val = as_rational(re_part.replace(" ", "")) if re_part is not None else _ZERO
    return GaussianRational._raw(re_val, im)

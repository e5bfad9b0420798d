"""Exact rational arithmetic and rational-endpoint interval arithmetic.

Everything downstream reduces numeric truth to two primitives:

* exact order tests between a rational and the square root of a rational,
  decided by integer cross multiplication (`cmp_abs_sq`), and
* certified enclosures of square roots and of quotients by square roots,
  produced from `math.isqrt` at a caller-chosen width (`sqrt_enclose`,
  `quotient_enclose`).

No floating point enters any verdict.  Floats appear only in display
helpers and performance heuristics elsewhere in the package.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

Rational = Fraction
RationalLike = Union[Fraction, int]


class NegativeInput(ValueError):
    """A square root of a negative rational was requested."""


class ZeroDenominator(ZeroDivisionError):
    """A quotient by the square root of zero was requested."""


class Ordering(enum.Enum):
    """Result of an exact three-way comparison."""

    LESS = -1
    EQUAL = 0
    GREATER = 1


def cmp_abs_sq(a: RationalLike, b: RationalLike) -> Ordering:
    """Exact order of ``a**2`` versus ``abs(b)``.

    Equivalently, the order of ``abs(a)`` versus ``abs(b) ** (1/2)``,
    decided without ever forming the root.  Both arguments are rationals;
    the comparison cross-multiplies integers and is always conclusive.
    """
    a = Fraction(a)
    b = Fraction(b)
    lhs = a.numerator * a.numerator * b.denominator
    rhs = abs(b.numerator) * a.denominator * a.denominator
    if lhs < rhs:
        return Ordering.LESS
    if lhs == rhs:
        return Ordering.EQUAL
    return Ordering.GREATER


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _floor_to(q: Fraction, den: int) -> Fraction:
    return Fraction(q.numerator * den // q.denominator, den)


def _ceil_to(q: Fraction, den: int) -> Fraction:
    return Fraction(_ceil_div(q.numerator * den, q.denominator), den)


@dataclass(frozen=True)
class Interval:
    """Closed interval with exact rational endpoints.

    An Interval produced by any operation in this package is a sound
    enclosure: the true real value is guaranteed to lie inside it.
    Degenerate intervals (``lo == hi``) represent exactly known values.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @classmethod
    def point(cls, q: RationalLike) -> "Interval":
        q = Fraction(q)
        return cls(q, q)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, q: RationalLike) -> bool:
        q = Fraction(q)
        return self.lo <= q <= self.hi

    def encloses(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def intersects(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def inside_ball(self, center: RationalLike, tol: RationalLike) -> bool:
        """Certified ``|self - center| <= tol`` (true for every point of self)."""
        center = Fraction(center)
        tol = Fraction(tol)
        return center - tol <= self.lo and self.hi <= center + tol

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def _coerce(self, other: Union["Interval", RationalLike]) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.point(other)

    def __add__(self, other: Union["Interval", RationalLike]) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    def __sub__(self, other: Union["Interval", RationalLike]) -> "Interval":
        o = self._coerce(other)
        return Interval(self.lo - o.hi, self.hi - o.lo)

    def scale(self, q: RationalLike) -> "Interval":
        q = Fraction(q)
        if q >= 0:
            return Interval(self.lo * q, self.hi * q)
        return Interval(self.hi * q, self.lo * q)

    def __truediv__(self, other: "Interval") -> "Interval":
        """Division by an interval that is strictly positive."""
        if not isinstance(other, Interval):
            other = Interval.point(other)
        if other.lo <= 0:
            raise ZeroDenominator(
                f"interval division needs a strictly positive denominator, got {other}"
            )
        cands = (
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        )
        return Interval(min(cands), max(cands))

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return Interval(-self.hi, -self.lo)
        return Interval(Fraction(0), max(-self.lo, self.hi))

    @staticmethod
    def max_of(a: "Interval", b: "Interval") -> "Interval":
        return Interval(max(a.lo, b.lo), max(a.hi, b.hi))

    @staticmethod
    def min_of(a: "Interval", b: "Interval") -> "Interval":
        return Interval(min(a.lo, b.lo), min(a.hi, b.hi))

    def round_out(self, max_den: int) -> "Interval":
        """Widen outward so both endpoints have denominator <= max_den."""
        if max_den < 1:
            raise ValueError("max_den must be a positive integer")
        return Interval(_floor_to(self.lo, max_den), _ceil_to(self.hi, max_den))

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def sqrt_enclose(x: RationalLike, width: RationalLike = Fraction(1, 2**30)) -> Interval:
    """Enclosure of ``x ** (1/2)`` of width at most ``width``.

    Exact (degenerate) whenever x is the square of a rational; sound
    outward enclosure otherwise.  The root of p/q is computed as
    isqrt(p*q*4**k) / (2**k * q), with k chosen so the unit step of the
    integer square root is at most width/2.
    """
    x = Fraction(x)
    width = Fraction(width)
    if x < 0:
        raise NegativeInput(f"sqrt of negative rational {x}")
    if width <= 0:
        raise ValueError("width must be positive")
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Interval.point(Fraction(rp, rq))
    m = p * q
    t = _ceil_div(2 * width.denominator, width.numerator * q)
    k = (t - 1).bit_length() if t > 1 else 0
    s = isqrt(m << (2 * k))
    den = (1 << k) * q
    if s * s == m << (2 * k):
        return Interval.point(Fraction(s, den))
    return Interval(Fraction(s, den), Fraction(s + 1, den))


def quotient_enclose(
    num: RationalLike,
    denom_sq: RationalLike,
    width: RationalLike = Fraction(1, 2**30),
) -> Interval:
    """Enclosure of ``num / denom_sq ** (1/2)`` of width at most ``width``.

    denom_sq must be strictly positive.  Exact whenever denom_sq is the
    square of a rational (then the quotient is rational).
    """
    num = Fraction(num)
    denom_sq = Fraction(denom_sq)
    width = Fraction(width)
    if denom_sq == 0:
        raise ZeroDenominator("quotient by sqrt(0)")
    if denom_sq < 0:
        raise NegativeInput(f"sqrt of negative rational {denom_sq}")
    if width <= 0:
        raise ValueError("width must be positive")
    p, q = denom_sq.numerator, denom_sq.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Interval.point(num / Fraction(rp, rq))
    if num == 0:
        return Interval.point(0)
    # First guess sized so one pass usually suffices; halve until sound
    # division through the root enclosure meets the requested width.
    w = width * denom_sq / abs(num)
    while True:
        root = sqrt_enclose(denom_sq, w)
        if root.lo > 0:
            if num > 0:
                cand = Interval(num / root.hi, num / root.lo)
            else:
                cand = Interval(num / root.lo, num / root.hi)
            if cand.width() <= width:
                return cand
        w = w / 4

"""The self-similar square-root-Hölder function and its certified analysis.

The function u : [0,1] -> [0,1] is the uniform limit of piecewise linear
iterates.  Starting from u_0(t) = t, each step replaces the graph over
[0,1] with three affine copies of itself, one per branch of a small
iterated function system:

    left   covers [0, 4/9]   with vertical factor  2/3
    mid    covers [4/9, 5/9] with vertical factor -1/3
    right  covers [5/9, 1]   with vertical factor  2/3

Every branch satisfies y_scale**2 == x_scale, which is exactly the
relation that makes the limit 1/2-Hölder with constant 1 and produces
difference quotients

    q(s, t) = (u(s) - u(t)) / (sgn(s - t) * |s - t| ** (1/2))

that are invariant, up to the sign of the branch, under pushing both
arguments through a branch.  The mid branch flips the quotient's sign;
descending into a subcell therefore reproduces the full unit-scale
oscillation at every scale, which is what the witness constructions
below certify.

All evaluation is exact rational arithmetic.  The limit u is never
materialised: `eval_limit` returns an Interval whose width contracts
like (2/3)**depth, and quotient enclosures divide through certified
root enclosures from `numerics`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .numerics import Interval, RationalLike, quotient_enclose, sqrt_enclose

MAX_LEVEL = 12

# Witness offsets live at distance between UNIT_MIN_OFFSET and 1 from the
# base point at unit scale; after descending to a cell of length ell the
# distances rescale to [ell/18, ell], and ell >= delta/9 for the first
# cell of length <= delta, giving the ratio 1/162 against delta itself.
UNIT_MIN_OFFSET = Fraction(1, 18)
WINDOW_OFFSET_RATIO = Fraction(1, 162)

_TWO_THIRDS = Fraction(2, 3)
_HALF = Fraction(1, 2)


class OutOfDomain(ValueError):
    """Argument outside the interval the operation is defined on."""


class DepthTooLarge(ValueError):
    """Requested level or pair count exceeds the configured cap."""


class CoincidentPoints(ValueError):
    """A difference quotient needs two distinct abscissas."""


class UncoveredPoint(ValueError):
    """No branch cell contains the point (possible for perturbed systems)."""


class InvalidCurve(ValueError):
    """A polyline violating the curve invariants was constructed."""


class BranchTag(enum.Enum):
    LEFT = "left"
    MID = "mid"
    RIGHT = "right"


@dataclass(frozen=True)
class Branch:
    """One affine branch: t -> x_scale*t + x_offset, v -> y_scale*v + y_offset."""

    tag: BranchTag
    x_scale: Fraction
    x_offset: Fraction
    y_scale: Fraction
    y_offset: Fraction

    def __post_init__(self) -> None:
        for name in ("x_scale", "x_offset", "y_scale", "y_offset"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @property
    def x_lo(self) -> Fraction:
        return self.x_offset

    @property
    def x_hi(self) -> Fraction:
        return self.x_offset + self.x_scale

    def x_map(self, t: RationalLike) -> Fraction:
        return self.x_scale * Fraction(t) + self.x_offset

    def y_map(self, v: RationalLike) -> Fraction:
        return self.y_scale * Fraction(v) + self.y_offset

    def x_inverse(self, t: RationalLike) -> Fraction:
        return (Fraction(t) - self.x_offset) / self.x_scale


BRANCHES: tuple[Branch, ...] = (
    Branch(BranchTag.LEFT, Fraction(4, 9), Fraction(0), Fraction(2, 3), Fraction(0)),
    Branch(BranchTag.MID, Fraction(1, 9), Fraction(4, 9), Fraction(-1, 3), Fraction(2, 3)),
    Branch(BranchTag.RIGHT, Fraction(4, 9), Fraction(5, 9), Fraction(2, 3), Fraction(1, 3)),
)


@dataclass(frozen=True)
class AffineMap1D:
    """Increasing affine map t -> a*t + b used for cell coordinates."""

    a: Fraction
    b: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    def __call__(self, t: RationalLike) -> Fraction:
        return self.a * Fraction(t) + self.b

    def inverse(self, t: RationalLike) -> Fraction:
        return (Fraction(t) - self.b) / self.a

    def after(self, inner: "AffineMap1D") -> "AffineMap1D":
        """self composed with inner: t -> self(inner(t))."""
        return AffineMap1D(self.a * inner.a, self.a * inner.b + self.b)


IDENTITY_MAP = AffineMap1D(Fraction(1), Fraction(0))


@dataclass(frozen=True)
class Address:
    """A word of branch tags naming a descent into nested cells."""

    word: tuple[BranchTag, ...]

    @property
    def sign(self) -> int:
        """Parity of mid branches: the factor picked up by quotients."""
        flips = sum(1 for tag in self.word if tag is BranchTag.MID)
        return -1 if flips % 2 else 1

    def __len__(self) -> int:
        return len(self.word)


@dataclass(frozen=True)
class QuotientWitness:
    """Two probe abscissas with a certified gap between their quotients.

    s1 and s2 lie on the same side of the base point the witness was
    built for, and gap_lower_bound encloses |q(s1, t0) - q(s2, t0)|.
    Certification succeeds when gap_lower_bound.lo clears the curve's
    guaranteed gap floor.
    """

    s1: Fraction
    s2: Fraction
    gap_lower_bound: Interval
    side: int


@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise linear curve through strictly increasing breakpoints.

    Instances represent iterates of the construction, so the invariants
    are structural: abscissas strictly increase, the first breakpoint is
    (0, 0) and the last is (1, 1).  Violations raise InvalidCurve, which
    is how perturbed branch systems announce that they no longer build a
    curve at all.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        pts = tuple((Fraction(t), Fraction(v)) for t, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if len(pts) < 2:
            raise InvalidCurve("need at least two breakpoints")
        for (t0, _), (t1, _) in zip(pts, pts[1:]):
            if t0 >= t1:
                raise InvalidCurve(f"abscissas not strictly increasing at t={t0}")
        if pts[0] != (0, 0):
            raise InvalidCurve(f"curve must start at (0, 0), got {pts[0]}")
        if pts[-1] != (1, 1):
            raise InvalidCurve(f"curve must end at (1, 1), got {pts[-1]}")

    def __len__(self) -> int:
        return len(self.breakpoints)

    def value(self, t: RationalLike) -> Fraction:
        """Exact value at t by linear interpolation."""
        t = Fraction(t)
        pts = self.breakpoints
        if t < pts[0][0] or t > pts[-1][0]:
            raise OutOfDomain(f"t={t} outside [{pts[0][0]}, {pts[-1][0]}]")
        lo, hi = 0, len(pts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pts[mid][0] <= t:
                lo = mid
            else:
                hi = mid
        (t0, v0), (t1, v1) = pts[lo], pts[hi]
        if t == t0:
            return v0
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0)

    def sup_diff(self, other: "PiecewiseLinear") -> Fraction:
        """Exact sup norm of self - other.

        Both curves are piecewise linear, so the sup over [0, 1] is
        attained at a breakpoint of one of them; the union of abscissas
        is checked.
        """
        best = Fraction(0)
        for t, v in self.breakpoints:
            best = max(best, abs(v - other.value(t)))
        for t, v in other.breakpoints:
            best = max(best, abs(self.value(t) - v))
        return best


def reduce_domain(t: RationalLike) -> Fraction:
    """Fold t into [0, 1] using evenness about 0 and period 2.

    The limit extends from [0, 1] to the line by u(-t) = u(t) and
    u(t + 2) = u(t); the extension keeps both the Hölder bound and the
    oscillation behaviour, so every evaluation funnels through this
    fold.
    """
    t = Fraction(t) % 2
    return 2 - t if t > 1 else t


def _quotient_interval(num: Interval, gap: Fraction, depth: int) -> Interval:
    """Sound enclosure of num / gap**(1/2) for gap > 0."""
    width = min(gap, Fraction(1)) * _TWO_THIRDS**depth
    root = sqrt_enclose(gap, width)
    return num / root


@dataclass(frozen=True)
class Curve:
    """A branch system together with evaluation and witness machinery.

    The default instance is the standard three-branch system above.
    Alternative branch tuples exist to serve the perturbation harness;
    they share all the machinery and are allowed to fail loudly
    (InvalidCurve, UncoveredPoint) when a perturbation destroys the
    structure the standard system has.
    """

    branches: tuple[Branch, ...] = BRANCHES
    max_level: int = MAX_LEVEL

    # ------------------------------------------------------------------
    # branch geometry

    def locate_branch(self, t: RationalLike) -> Branch:
        """Leftmost branch whose x-cell contains t."""
        t = Fraction(t)
        for br in self.branches:
            if br.x_lo <= t <= br.x_hi:
                return br
        raise UncoveredPoint(f"no branch cell contains t={t}")

    # ------------------------------------------------------------------
    # iterates

    def iterate(self, n: int) -> PiecewiseLinear:
        """The n-th piecewise linear iterate, with 3**n + 1 breakpoints.

        Level 0 is the diagonal.  Each level maps the previous polyline
        through every branch and concatenates; seam points shared by
        adjacent branches are deduplicated exactly.
        """
        if n < 0:
            raise OutOfDomain("level must be nonnegative")
        if n > self.max_level:
            raise DepthTooLarge(f"level {n} exceeds cap {self.max_level}")
        pts: list[tuple[Fraction, Fraction]] = [
            (Fraction(0), Fraction(0)),
            (Fraction(1), Fraction(1)),
        ]
        for _ in range(n):
            nxt: list[tuple[Fraction, Fraction]] = []
            for br in self.branches:
                for t, v in pts:
                    p = (br.x_map(t), br.y_map(v))
                    if nxt and nxt[-1] == p:
                        continue
                    nxt.append(p)
            pts = nxt
        return PiecewiseLinear(tuple(pts))

    def eval_iterate(self, n: int, t: RationalLike) -> Fraction:
        """Exact value of the n-th iterate at t, without building it."""
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise OutOfDomain(f"t={t} outside [0, 1]")
        if n < 0:
            raise OutOfDomain("level must be nonnegative")
        if n > self.max_level:
            raise DepthTooLarge(f"level {n} exceeds cap {self.max_level}")
        if n == 0:
            return t
        br = self.locate_branch(t)
        return br.y_map(self.eval_iterate(n - 1, br.x_inverse(t)))

    # ------------------------------------------------------------------
    # the limit

    def eval_limit(self, t: RationalLike, depth: int) -> Interval:
        """Certified enclosure of the limit value u(t).

        Descends through branch cells, composing the vertical affine
        maps.  The composed vertical image of [0, 1] is the enclosure;
        its width is the product of |y_scale| factors, at most
        (2/3)**depth for the standard system.  If the descent reaches an
        endpoint of [0, 1] the value is exact and the enclosure
        degenerates to a point, whatever the requested depth.
        """
        t = Fraction(t)
        if not 0 <= t <= 1:
            raise OutOfDomain(f"t={t} outside [0, 1]")
        if depth < 0:
            raise OutOfDomain("depth must be nonnegative")
        a, b = Fraction(1), Fraction(0)
        for _ in range(depth):
            if t == 0 or t == 1:
                break
            br = self.locate_branch(t)
            a, b = a * br.y_scale, a * br.y_offset + b
            t = br.x_inverse(t)
        if t == 0 or t == 1:
            v = a * t + b
            return Interval.point(v)
        lo, hi = (b, a + b) if a >= 0 else (a + b, b)
        return Interval(lo, hi)

    # ------------------------------------------------------------------
    # difference quotients

    def diff_quotient(self, s: RationalLike, t: RationalLike, depth: int) -> Interval:
        """Enclosure of q(s, t) = (u(s) - u(t)) / (sgn(s-t) |s-t|**(1/2)).

        Arguments may be anywhere on the line; they are folded into
        [0, 1] for evaluation while the gap |s - t| is taken between the
        original abscissas.
        """
        s = Fraction(s)
        t = Fraction(t)
        if s == t:
            raise CoincidentPoints("difference quotient needs s != t")
        us = self.eval_limit(reduce_domain(s), depth)
        ut = self.eval_limit(reduce_domain(t), depth)
        q = _quotient_interval(us - ut, abs(s - t), depth)
        return q if s > t else -q

    def diff_quotient_within(
        self,
        s: RationalLike,
        t: RationalLike,
        width: RationalLike,
        start_depth: int = 16,
        max_depth: int = 256,
    ) -> Interval:
        """Quotient enclosure no wider than width, deepening as needed.

        Returns the best enclosure found if max_depth is reached first;
        the caller decides whether an overwide result is a failure.
        """
        width = Fraction(width)
        depth = max(4, start_depth)
        best = self.diff_quotient(s, t, depth)
        while best.width() > width and depth < max_depth:
            depth = min(max_depth, depth * 2)
            best = self.diff_quotient(s, t, depth)
        return best

    # ------------------------------------------------------------------
    # cell location

    def locate_cell(
        self, t: RationalLike, delta: RationalLike
    ) -> tuple[Address, AffineMap1D, int]:
        """First nested cell containing t whose length is at most delta.

        Returns the branch word, the increasing affine map from [0, 1]
        onto the cell, and the quotient sign accumulated from mid
        branches.  Ties at cell boundaries resolve to the leftmost
        containing cell.  Cell length shrinks by at least 4/9 per step,
        so the length lands in [delta/9, delta] for the standard system.
        """
        t = Fraction(t)
        delta = Fraction(delta)
        if not 0 <= t <= 1:
            raise OutOfDomain(f"t={t} outside [0, 1]")
        if not 0 < delta <= 1:
            raise OutOfDomain(f"delta={delta} outside (0, 1]")
        word: list[BranchTag] = []
        cell = IDENTITY_MAP
        sign = 1
        guard = 0
        while cell.a > delta:
            br = self.locate_branch(cell.inverse(t))
            word.append(br.tag)
            cell = cell.after(AffineMap1D(br.x_scale, br.x_offset))
            if br.tag is BranchTag.MID:
                sign = -sign
            guard += 1
            if guard > 4 * MAX_LEVEL * 16:
                raise UncoveredPoint("descent does not contract; branch system broken")
        return Address(tuple(word)), cell, sign

    # ------------------------------------------------------------------
    # witnesses

    @staticmethod
    def _unit_probe(t0: Fraction) -> tuple[Fraction, Fraction, int]:
        """Unit-scale probe pair for a base point in [0, 1].

        For t0 in the left half both probes sit to the right at 5/9 and
        1; otherwise to the left at 0 and 4/9.  Distances from t0 are
        then pinned to [1/18, 1] and all probe values are exact
        breakpoint values, so only u(t0) needs an enclosure.
        """
        if t0 <= _HALF:
            return Fraction(5, 9), Fraction(1), 1
        return Fraction(0), Fraction(4, 9), -1

    def unit_witnesses(
        self,
        t0: RationalLike,
        floor: Optional[Interval] = None,
        depths: Sequence[int] = (16, 24, 32, 48, 64, 96),
    ) -> QuotientWitness:
        """Probe pair at unit scale with a certified quotient gap.

        The returned gap_lower_bound encloses |q(s1,t0) - q(s2,t0)|.
        Depth increases until the lower endpoint clears the requested
        floor (default: the guaranteed gap floor); if the schedule is
        exhausted the best enclosure is returned for the caller to
        judge.
        """
        t0 = Fraction(t0)
        if not 0 <= t0 <= 1:
            raise OutOfDomain(f"t0={t0} outside [0, 1]")
        s1, s2, side = self._unit_probe(t0)
        floor_hi = (floor or quotient_gap_floor()).hi
        gap = None
        for depth in depths:
            q1 = self.diff_quotient(s1, t0, depth)
            q2 = self.diff_quotient(s2, t0, depth)
            gap = (q1 - q2).abs()
            if gap.lo >= floor_hi:
                break
        return QuotientWitness(s1, s2, gap, side)

    def window_witnesses(
        self,
        t: RationalLike,
        delta: RationalLike,
        floor: Optional[Interval] = None,
    ) -> QuotientWitness:
        """Probe pair at scale delta with a certified quotient gap.

        Descends to the first cell of length at most delta containing t,
        replays the unit-scale probe construction inside that cell, and
        certifies the gap directly at the small scale.  Probe distances
        from t are guaranteed to lie in [delta/162, delta].
        """
        t = Fraction(t)
        delta = Fraction(delta)
        _, cell, _ = self.locate_cell(t, delta)
        t0 = cell.inverse(t)
        b1, b2, side = self._unit_probe(t0)
        s1, s2 = cell(b1), cell(b2)
        floor_hi = (floor or quotient_gap_floor()).hi
        # Probe values are exact breakpoint images, so enclosure width is
        # driven by u(t) alone; size the starting depth to the cell scale.
        start = 16 + max(0, int(2.2 * math.log(1 / float(cell.a), 3))) if cell.a < 1 else 16
        gap = None
        depth = start
        for _ in range(6):
            q1 = self.diff_quotient(s1, t, depth)
            q2 = self.diff_quotient(s2, t, depth)
            gap = (q1 - q2).abs()
            if gap.lo >= floor_hi:
                break
            depth += 24
        return QuotientWitness(s1, s2, gap, side)


UNIT_CURVE = Curve()


@lru_cache(maxsize=None)
def quotient_gap_floor(width: Fraction = Fraction(1, 10**12)) -> Interval:
    """Certified enclosure of the guaranteed witness gap constant.

    The constant is the minimum of three closed-form terms:

        (1/3) * ((1 - 4/81) ** (-1/2) - 1),   7/9 - 3/5,   5 ** (-1/2)

    The first and third are irrational, so the minimum is returned as an
    enclosure; its value is about 0.0085484 and the first term attains
    the minimum.
    """
    t1 = (quotient_enclose(1, Fraction(77, 81), width) - 1).scale(Fraction(1, 3))
    t2 = Interval.point(Fraction(7, 9) - Fraction(3, 5))
    t3 = quotient_enclose(1, Fraction(5), width)
    lo = min(t1.lo, t2.lo, t3.lo)
    hi = min(t1.hi, t2.hi, t3.hi)
    return Interval(lo, hi)


# ----------------------------------------------------------------------
# module-level conveniences bound to the standard curve


def iterate(n: int) -> PiecewiseLinear:
    return UNIT_CURVE.iterate(n)


def eval_iterate(n: int, t: RationalLike) -> Fraction:
    return UNIT_CURVE.eval_iterate(n, t)


def eval_limit(t: RationalLike, depth: int) -> Interval:
    return UNIT_CURVE.eval_limit(t, depth)


def diff_quotient(s: RationalLike, t: RationalLike, depth: int) -> Interval:
    return UNIT_CURVE.diff_quotient(s, t, depth)


def locate_cell(t: RationalLike, delta: RationalLike) -> tuple[Address, AffineMap1D, int]:
    return UNIT_CURVE.locate_cell(t, delta)


def unit_witnesses(t0: RationalLike) -> QuotientWitness:
    return UNIT_CURVE.unit_witnesses(t0)


def window_witnesses(t: RationalLike, delta: RationalLike) -> QuotientWitness:
    return UNIT_CURVE.window_witnesses(t, delta)

"""Construction, evaluation, and witness machinery for the self-similar curve."""

import math
import random
from fractions import Fraction as F

import pytest

from lipgraph.numerics import Interval, Ordering, cmp_abs_sq, quotient_enclose
from lipgraph.selfsim import (
    BRANCHES,
    MAX_LEVEL,
    UNIT_CURVE,
    UNIT_MIN_OFFSET,
    WINDOW_OFFSET_RATIO,
    Address,
    Branch,
    BranchTag,
    CoincidentPoints,
    Curve,
    DepthTooLarge,
    InvalidCurve,
    OutOfDomain,
    PiecewiseLinear,
    UncoveredPoint,
    diff_quotient,
    eval_iterate,
    eval_limit,
    iterate,
    locate_cell,
    quotient_gap_floor,
    reduce_domain,
    unit_witnesses,
    window_witnesses,
)


def u_float(t, iters=80):
    """Independent oracle for the limit function: exact descent, float values."""
    a, b = 1.0, 0.0
    t = F(t)
    for _ in range(iters):
        if t == 0 or t == 1:
            return a * float(t) + b
        if t < F(4, 9):
            t = t * F(9, 4)
            a *= 2 / 3
        elif t <= F(5, 9):
            t = (t - F(4, 9)) * 9
            b += a * (2 / 3)
            a *= -1 / 3
        else:
            t = (t - F(5, 9)) * F(9, 4)
            b += a * (1 / 3)
            a *= 2 / 3
    return b + a * 0.5


class TestBranches:
    def test_frozen_maps(self):
        by_tag = {b.tag: b for b in BRANCHES}
        left, mid, right = by_tag[BranchTag.LEFT], by_tag[BranchTag.MID], by_tag[BranchTag.RIGHT]
        assert (left.x_scale, left.x_offset) == (F(4, 9), 0)
        assert (left.y_scale, left.y_offset) == (F(2, 3), 0)
        assert (mid.x_scale, mid.x_offset) == (F(1, 9), F(4, 9))
        assert (mid.y_scale, mid.y_offset) == (F(-1, 3), F(2, 3))
        assert (right.x_scale, right.x_offset) == (F(4, 9), F(5, 9))
        assert (right.y_scale, right.y_offset) == (F(2, 3), F(1, 3))

    def test_scaling_invariant(self):
        # the vertical contraction is the square root of the horizontal one
        for b in BRANCHES:
            assert b.y_scale**2 == b.x_scale

    def test_affine_map_round_trip(self):
        for b in BRANCHES:
            assert b.x_map(0) == b.x_lo and b.x_map(1) == b.x_hi
            assert b.y_map(0) == b.y_offset
            assert b.x_inverse(b.x_map(F(1, 3))) == F(1, 3)

    def test_intervals_tile_the_domain(self):
        assert [(b.x_lo, b.x_hi) for b in BRANCHES] == [
            (0, F(4, 9)),
            (F(4, 9), F(5, 9)),
            (F(5, 9), 1),
        ]

    def test_address_sign(self):
        assert Address(()).sign == 1
        assert Address((BranchTag.MID,)).sign == -1
        assert Address((BranchTag.MID, BranchTag.LEFT, BranchTag.MID)).sign == 1
        assert Address((BranchTag.RIGHT, BranchTag.MID)).sign == -1


class TestPiecewiseLinear:
    def test_value_and_endpoints(self):
        pl = PiecewiseLinear(((F(0), F(0)), (F(1, 2), F(1, 4)), (F(1), F(1))))
        assert pl.value(F(1, 4)) == F(1, 8)
        assert pl.value(F(3, 4)) == F(5, 8)
        assert pl.value(0) == 0 and pl.value(1) == 1

    def test_out_of_domain(self):
        pl = PiecewiseLinear(((F(0), F(0)), (F(1), F(1))))
        with pytest.raises(OutOfDomain):
            pl.value(F(-1, 10))
        with pytest.raises(OutOfDomain):
            pl.value(F(11, 10))

    def test_invalid_constructions(self):
        with pytest.raises(InvalidCurve):
            PiecewiseLinear(((F(0), F(0)), (F(1, 2), F(1, 2))))  # does not end at (1, 1)
        with pytest.raises(InvalidCurve):
            PiecewiseLinear(((F(1, 9), F(0)), (F(1), F(1))))  # does not start at (0, 0)
        with pytest.raises(InvalidCurve):
            PiecewiseLinear(((F(0), F(0)), (F(1, 2), F(1, 3)), (F(1, 2), F(2, 3)), (F(1), F(1))))

    def test_sup_diff_matches_brute_force(self):
        a = iterate(2)
        b = iterate(3)
        got = a.sup_diff(b)
        xs = sorted({p[0] for p in a.breakpoints} | {p[0] for p in b.breakpoints})
        brute = max(abs(a.value(x) - b.value(x)) for x in xs)
        assert got == brute


class TestIterates:
    def test_breakpoint_counts(self):
        for n in range(6):
            assert len(iterate(n).breakpoints) == 3**n + 1

    def test_first_iterate_frozen(self):
        assert iterate(1).breakpoints == (
            (F(0), F(0)),
            (F(4, 9), F(2, 3)),
            (F(5, 9), F(1, 3)),
            (F(1), F(1)),
        )

    def test_pinned_values(self):
        for n in range(1, 9):
            assert eval_iterate(n, F(0)) == 0
            assert eval_iterate(n, F(1)) == 1
            assert eval_iterate(n, F(4, 9)) == F(2, 3)
            assert eval_iterate(n, F(5, 9)) == F(1, 3)

    def test_symmetry_at_breakpoints(self):
        for n in range(5):
            pl = iterate(n)
            for x, y in pl.breakpoints:
                assert y == 1 - pl.value(1 - x)

    def test_contraction(self):
        sups = [iterate(n).sup_diff(iterate(n + 1)) for n in range(5)]
        assert sups[0] == F(2, 9)
        for prev, cur in zip(sups, sups[1:]):
            assert cur <= F(2, 3) * prev

    def test_eval_iterate_matches_breakpoint_interpolation(self):
        rng = random.Random(11)
        for n in (2, 4, 6):
            pl = iterate(n)
            for _ in range(50):
                t = F(rng.randrange(0, 3**n + 1), 3**n)
                assert eval_iterate(n, t) == pl.value(t)

    def test_eval_iterate_frozen(self):
        assert eval_iterate(2, F(1, 2)) == F(1, 2)
        assert eval_iterate(2, F(2, 9)) == F(1, 3)

    def test_depth_cap(self):
        with pytest.raises(DepthTooLarge):
            iterate(MAX_LEVEL + 1)
        with pytest.raises(DepthTooLarge):
            eval_iterate(MAX_LEVEL + 1, F(1, 2))

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            eval_iterate(1, F(-1, 9))
        with pytest.raises(OutOfDomain):
            iterate(-1)


class TestLimitFunction:
    def test_exact_at_breakpoints(self):
        assert eval_limit(F(4, 9), 1) == Interval.point(F(2, 3))
        assert eval_limit(F(5, 9), 1) == Interval.point(F(1, 3))
        assert eval_limit(F(0), 0) == Interval.point(0)
        assert eval_limit(F(1), 0) == Interval.point(1)

    def test_frozen_enclosures(self):
        assert eval_limit(F(2, 9), 2) == Interval(F(2, 9), F(4, 9))
        assert eval_limit(F(2, 9), 2).contains(F(1, 3))
        assert eval_limit(F(2, 9), 4) == Interval(F(26, 81), F(28, 81))
        assert eval_limit(F(1, 2), 8).contains(F(1, 2))

    def test_width_bound_and_nesting(self):
        rng = random.Random(22)
        for _ in range(40):
            t = F(rng.randrange(0, 7921), 7920)
            prev = None
            for depth in (1, 3, 6, 10):
                enc = eval_limit(t, depth)
                assert enc.width() <= F(2, 3) ** depth
                if prev is not None:
                    assert prev.encloses(enc)
                prev = enc

    def test_iterate_value_within_enclosure(self):
        rng = random.Random(33)
        for _ in range(40):
            t = F(rng.randrange(0, 1001), 1000)
            for n in (2, 5):
                assert eval_limit(t, n).contains(eval_iterate(n, t))

    def test_against_float_oracle(self):
        rng = random.Random(44)
        for _ in range(60):
            t = F(rng.randrange(0, 10001), 10000)
            enc = eval_limit(t, 40)
            approx = u_float(t)
            assert float(enc.lo) - 1e-9 <= approx <= float(enc.hi) + 1e-9

    def test_symmetry_via_enclosures(self):
        rng = random.Random(55)
        for _ in range(30):
            t = F(rng.randrange(0, 1001), 1000)
            a = eval_limit(t, 30)
            b = eval_limit(1 - t, 30)
            mirrored = Interval(1 - b.hi, 1 - b.lo)
            assert a.intersects(mirrored)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            eval_limit(F(3, 2), 5)


class TestDomainFold:
    def test_frozen(self):
        assert reduce_domain(F(-1, 3)) == F(1, 3)
        assert reduce_domain(F(5, 2)) == F(1, 2)
        assert reduce_domain(F(3, 2)) == F(1, 2)
        assert reduce_domain(F(7, 4)) == F(1, 4)
        assert reduce_domain(2) == 0

    def test_even_and_periodic(self):
        rng = random.Random(66)
        for _ in range(100):
            t = F(rng.randrange(-5000, 5001), 1000)
            r = reduce_domain(t)
            assert 0 <= r <= 1
            assert reduce_domain(-t) == r
            assert reduce_domain(t + 2) == r


class TestDiffQuotient:
    def test_frozen_exact(self):
        assert diff_quotient(F(1), F(0), 10) == Interval.point(1)
        assert diff_quotient(F(4, 9), F(0), 10) == Interval.point(1)
        assert diff_quotient(F(0), F(1), 10) == Interval.point(1)

    def test_inverse_root_five(self):
        got = diff_quotient(F(5, 9), F(0), 30)
        ref = quotient_enclose(F(1, 3), F(5, 9), F(1, 10**9))
        assert got.intersects(ref)
        assert got.width() < F(1, 10**6)

    def test_symmetric_under_swap(self):
        # the signed root in the denominator makes the quotient swap-invariant
        a = diff_quotient(F(1, 3), F(2, 3), 25)
        b = diff_quotient(F(2, 3), F(1, 3), 25)
        assert a == b

    def test_coincident_points(self):
        with pytest.raises(CoincidentPoints):
            diff_quotient(F(1, 2), F(1, 2), 10)

    def test_bounded_by_one_on_random_breakpoints(self):
        rng = random.Random(77)
        pl = iterate(6)
        pts = pl.breakpoints
        for _ in range(300):
            (s, us), (t, ut) = rng.sample(pts, 2)
            # exact check of (u(s) - u(t))^2 <= |s - t|
            assert cmp_abs_sq(us - ut, s - t) is not Ordering.GREATER

    def test_branch_self_similarity_exact(self):
        # vertical increments contract by y_scale exactly under each branch map
        pts = iterate(3).breakpoints
        rng = random.Random(88)
        for branch in BRANCHES:
            for _ in range(40):
                (s, us), (t, ut) = rng.sample(pts, 2)
                ms, mt = branch.x_map(s), branch.x_map(t)
                vs = eval_limit(ms, 16)
                vt = eval_limit(mt, 16)
                assert vs.is_point() and vt.is_point()
                assert vs.lo - vt.lo == branch.y_scale * (us - ut)
                assert ms - mt == branch.x_scale * (s - t)

    def test_quotient_invariance_under_branches(self):
        # |q(Bs, Bt)| agrees with |q(s, t)|, with the middle branch flipping sign
        pts = iterate(2).breakpoints
        rng = random.Random(99)
        for branch in BRANCHES:
            sign = 1 if branch.y_scale > 0 else -1
            for _ in range(25):
                (s, _), (t, _) = rng.sample(pts, 2)
                base = diff_quotient(s, t, 30)
                mapped = diff_quotient(branch.x_map(s), branch.x_map(t), 30)
                assert mapped.intersects(base.scale(sign))

    def test_fold_enters_quotient(self):
        # u(3/2) = u(1/2): values fold, the horizontal gap does not
        enc = diff_quotient(F(3, 2), F(1, 2), 40)
        assert enc.contains(0)
        assert enc.abs().hi < F(1, 10**6)


class TestGapFloor:
    def test_enclosure(self):
        floor = quotient_gap_floor()
        assert floor.lo >= F(854, 100000)
        assert floor.hi <= F(855, 100000)
        assert floor.width() < F(1, 10**9)

    def test_first_term_attains_minimum(self):
        # term 1: (1/3) * ((1 - 4/81) ** (-1/2) - 1); term 2: 7/9 - 3/5; term 3: 5 ** (-1/2)
        t1 = (quotient_enclose(1, 1 - F(4, 81), F(1, 10**12)) - 1).scale(F(1, 3))
        t2 = Interval.point(F(7, 9) - F(3, 5))
        t3 = quotient_enclose(1, 5, F(1, 10**12))
        assert t1.hi < t2.lo
        assert t1.hi < t3.lo
        assert quotient_gap_floor().intersects(t1)


class TestUnitWitnesses:
    def test_frozen_probe_choices(self):
        for t0, expect in (
            (F(1, 5), (F(5, 9), F(1))),
            (F(1, 2), (F(5, 9), F(1))),
            (F(3, 4), (F(0), F(4, 9))),
            (F(4, 9), (F(5, 9), F(1))),
        ):
            w = unit_witnesses(t0)
            assert (w.s1, w.s2) == expect

    def test_offsets_and_gap(self):
        rng = random.Random(111)
        floor = quotient_gap_floor()
        for _ in range(25):
            t0 = F(rng.randrange(0, 1001), 1000)
            w = unit_witnesses(t0)
            for s in (w.s1, w.s2):
                assert UNIT_MIN_OFFSET <= abs(s - t0) <= 1
            assert w.side in (-1, 1)
            assert w.gap_lower_bound.lo >= floor.hi

    def test_min_offset_constant(self):
        assert UNIT_MIN_OFFSET == F(1, 18)


class TestLocateCell:
    def test_frozen(self):
        word, cell, sign = locate_cell(F(1, 5), F(1))
        assert word == Address(())
        assert (cell.a, cell.b, sign) == (F(1), F(0), 1)

        word, cell, sign = locate_cell(F(1, 2), F(1, 10))
        assert word == Address((BranchTag.MID, BranchTag.MID))
        assert (cell.a, cell.b, sign) == (F(1, 81), F(40, 81), 1)

        word, cell, _ = locate_cell(F(1, 10), F(3, 10))
        assert word == Address((BranchTag.LEFT, BranchTag.LEFT))
        assert (cell.a, cell.b) == (F(16, 81), F(0))

        word, cell, _ = locate_cell(F(0), F(1, 81))
        assert word == Address((BranchTag.LEFT,) * 6)
        assert cell.a == F(4, 9) ** 6

    def test_cell_contains_point_with_calibrated_length(self):
        rng = random.Random(222)
        for _ in range(60):
            t = F(rng.randrange(0, 1001), 1000)
            delta = F(1, 9) ** rng.randrange(0, 7)
            _, cell, _ = locate_cell(t, delta)
            assert cell.b <= t <= cell.a + cell.b
            assert cell.a <= delta
            assert cell.a >= delta * F(1, 9)

    def test_sign_tracks_middle_branch_parity(self):
        word, _, sign = locate_cell(F(1, 2), F(1, 10))
        assert sign == (-1) ** sum(1 for w in word.word if w is BranchTag.MID)
        assert sign == word.sign


class TestWindowWitnesses:
    def test_frozen(self):
        w = window_witnesses(F(1, 2), F(1, 10))
        assert (w.s1, w.s2) == (F(365, 729), F(41, 81))

        w = window_witnesses(F(0), F(1, 81))
        assert (w.s1, w.s2) == (F(20480, 4782969), F(4096, 531441))

        w = window_witnesses(F(1, 5), F(1))
        assert (w.s1, w.s2) == (F(5, 9), F(1))

    def test_distances_and_gap(self):
        rng = random.Random(333)
        floor = quotient_gap_floor()
        for _ in range(25):
            t = F(rng.randrange(0, 10**6 + 1), 10**6)
            delta = F(1, 9) ** rng.randrange(1, 8)
            w = window_witnesses(t, delta)
            for s in (w.s1, w.s2):
                assert delta * WINDOW_OFFSET_RATIO <= abs(s - t) <= delta
                assert 0 <= s <= 1
            assert w.gap_lower_bound.lo >= floor.hi

    def test_offset_ratio_constant(self):
        assert WINDOW_OFFSET_RATIO == F(1, 162)


class TestCurveValidation:
    def test_uncovered_point(self):
        left, mid, right = BRANCHES
        shrunk = Branch(
            tag=left.tag,
            x_scale=F(2, 5),
            x_offset=F(0),
            y_scale=left.y_scale,
            y_offset=left.y_offset,
        )
        curve = Curve(branches=(shrunk, mid, right))
        with pytest.raises(UncoveredPoint):
            curve.eval_limit(F(42, 100), 20)

    def test_invalid_iterate_raises(self):
        left, mid, right = BRANCHES
        drifted = Branch(
            tag=mid.tag,
            x_scale=mid.x_scale,
            x_offset=mid.x_offset,
            y_scale=F(-7, 20),
            y_offset=mid.y_offset,
        )
        curve = Curve(branches=(left, drifted, right))
        with pytest.raises(InvalidCurve):
            curve.iterate(2)

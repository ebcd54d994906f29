from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmaps import (
    CriticalPoint,
    PiecewiseMonotonicMap,
    advance,
    affine,
    boundary_critical_times,
    covering_times,
    cut_times,
    cylinder_of_point,
    init_tracker,
    track,
)
from pmaps.zoo import GOLDEN, skew_tent

from oracles import golden_step, grid_codes


def test_init_examples(tent_f, golden):
    st0 = init_tracker(tent_f, 0.3)
    assert (st0.C, st0.D, st0.orientation) == ((0, 0.5), (0, 1), 1)
    st0 = init_tracker(tent_f, 0.75)
    assert (st0.C, st0.D, st0.orientation) == ((0.5, 1), (0, 1), -1)
    st0 = init_tracker(golden, 0.3)
    assert st0.C == pytest.approx((0, 1 / GOLDEN)) and st0.D == pytest.approx((0, 1))


def test_advance_example(tent_f):
    st1 = advance(init_tracker(tent_f, 0.3))
    assert st1.l == 2 and st1.word == (0, 1)
    assert st1.C == (0.25, 0.5) and st1.D == (0, 1)
    assert st1.orientation == -1


def test_covering_examples(tent_f, tent_q):
    assert covering_times(tent_f, 0.3, 3, 1e-9).times == [2, 3]
    scan = covering_times(tent_q, Fraction(3, 10), 3, 1e-9)
    assert scan.times == [2, 3]
    assert scan[1].C == (Fraction(1, 4), Fraction(3, 8))


def test_shared_endpoint_excluded(tent_f):
    # l = 1: C_1 = (0, 1/2) shares 0 with D_1 = (0, 1)
    st0 = init_tracker(tent_f, 0.3)
    assert not st0.is_covering(0.0)
    assert not st0.is_covering(1e-9)


def test_golden_generic_has_coverings(golden):
    assert len(covering_times(golden, 0.1234567, 50, 1e-9)) > 0


def test_cut_examples(tent_f, golden):
    assert cut_times(tent_f, 0.3, 4) == [1, 2, 3, 4]
    assert cut_times(golden, 0.3, 1) == [1]


def test_no_cuts_when_images_avoid_critical_set():
    T = PiecewiseMonotonicMap([0, 0.5, 1], [affine(0.5, 0.1), affine(-0.5, 0.8)])
    assert cut_times(T, 0.2, 10) == []
    assert boundary_critical_times(T, 0.2, 10) == []


def test_truncated_scan(tent_q):
    scan = covering_times(tent_q, Fraction(1, 8), 10)
    assert scan.truncated and scan.truncated_at == 2


def test_tracker_is_cylinder_and_image(golden):
    # C_l is the l-cylinder of y and D_l its l-th image; checked on a grid
    y = 0.3141592653589793
    x0, codes, h = grid_codes(golden_step, 8, n_points=400_000)
    xs = x0.copy()
    images = []
    for _ in range(8):
        xs, _ = golden_step(xs)
        images.append(xs.copy())
    for st_l in track(golden, y, 8):
        cyl = cylinder_of_point(golden, y, st_l.l)
        assert st_l.C == pytest.approx(cyl.interval, abs=1e-15)
        mask = np.ones_like(x0, dtype=bool)
        z, zs = np.array([y]), x0.copy()
        for _ in range(st_l.l):
            z, sy = golden_step(z)
            zs, sx = golden_step(zs)
            mask &= sx == sy[0]
        img = images[st_l.l - 1][mask]
        assert abs(img.min() - st_l.D.lo) <= 2 * h * GOLDEN**st_l.l
        assert abs(img.max() - st_l.D.hi) <= 2 * h * GOLDEN**st_l.l


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10**12))
def test_tracker_invariants_rational(n):
    T = skew_tent(3, Fraction(3, 2), backend="rational")
    y = Fraction(n, 10**12 + 39)
    prev = None
    try:
        for s in track(T, y, 25):
            assert s.C.lo < y < s.C.hi
            x = y
            for i in s.word:
                assert T.branch_of(x) == i
                x = T.branches[i](x)
            assert s.D.lo < x < s.D.hi
            if prev is not None:
                assert prev.C.lo <= s.C.lo and s.C.hi <= prev.C.hi
            prev = s
    except CriticalPoint:
        pass


def test_covering_margin_strictness(tent_q):
    hit = covering_times(tent_q, Fraction(3, 10), 3, 0)[0]
    assert hit.l == 2
    assert covering_times(tent_q, Fraction(3, 10), 3, Fraction(1, 4)).times == [2, 3]
    assert covering_times(tent_q, Fraction(3, 10), 3, Fraction(1, 4) + Fraction(1, 10**9)).times == []

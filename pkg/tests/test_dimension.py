import numpy as np
import pytest
from hypothesis import given, strategies as st

from salem.dimension import ShellLevel, ball_cover, box_count_dimension, covering_sum, points_covered
from salem.errors import DegenerateMask
from salem.measure import build_scale_function, sample_grid


def test_single_ball():
    lv = ShellLevel(4, np.array([[4, 0]]), np.array([1]), np.array([4]), 1.0)
    assert lv.radii[0] == 1 / 16
    assert lv.covering_sum(2.0) == pytest.approx(1 / 256)


def test_ball_count_brute_force(gaussian):
    expect = sum(a * a + b * b for a in range(-3, 4) for b in range(-3, 4) if 2 <= max(abs(a), abs(b)) < 4)
    cover = ball_cover(gaussian, 4, 1.0)
    assert cover.ball_count == expect
    assert len(cover.centers(0)[0]) == expect


@pytest.mark.parametrize("M", [4, 8, 16])
def test_radii_bound(gaussian, M):
    cover = ball_cover(gaussian, M, 1.0, levels=2)
    assert cover.max_radius <= (M / 2) ** -2.0


def test_bad_arguments(gaussian):
    with pytest.raises(ValueError):
        ball_cover(gaussian, 5, 1.0)
    with pytest.raises(ValueError):
        ball_cover(gaussian, 4, 1.0, levels=0)


def test_cover_contains_support(gaussian):
    sf = build_scale_function(gaussian, 8, 1.0)
    pts = np.argwhere(sample_grid(sf, 512) > 0) / 512
    assert points_covered(ball_cover(gaussian, 8, 1.0, levels=2), pts).all()


@given(st.floats(1.0, 3.0), st.floats(0.01, 1.0))
def test_sum_decreases_in_s(s, ds):
    from salem.fields import fixture

    cover = ball_cover(fixture("gaussian"), 4, 1.0, levels=2)
    assert covering_sum(cover, s + ds)["total"] < covering_sum(cover, s)["total"]


def test_box_count_extremes():
    assert box_count_dimension(np.ones((64, 64), bool))["slope"] == pytest.approx(2.0)
    m = np.zeros((64, 64), bool)
    m[3, 5] = True
    assert box_count_dimension(m)["slope"] == pytest.approx(0.0)
    line = np.zeros((64, 64), bool)
    line[10] = True
    assert box_count_dimension(line)["slope"] == pytest.approx(1.0)
    with pytest.raises(DegenerateMask):
        box_count_dimension(np.zeros((8, 8), bool))

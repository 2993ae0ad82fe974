import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import components8, line_pixels_bruteforce
from tonguecurve.errors import ParameterError, RasterizeError, ShapeError
from tonguecurve.rasterize import (
    LossWeights,
    bresenham,
    rasterize_contour,
    weight_map,
    weighted_bce,
)
from tonguecurve.types import BinaryMask, Contour, ProbMap


def _set(mask):
    return {tuple(p) for p in mask.points().tolist()}


def test_horizontal_line():
    mask = rasterize_contour(Contour([(0, 0), (3, 0)]), 4, 1)
    assert mask.labels.tolist() == [[1, 1, 1, 1]]


def test_diagonal_line():
    mask = rasterize_contour(Contour([(0, 0), (2, 2)]), 3, 3)
    assert _set(mask) == {(0, 0), (1, 1), (2, 2)}


def test_shallow_slope_against_bruteforce():
    mask = rasterize_contour(Contour([(0, 0), (3, 1)]), 4, 2)
    expected = line_pixels_bruteforce(0, 0, 3, 1)
    assert expected == {(0, 0), (1, 0), (2, 1), (3, 1)}
    assert _set(mask) == expected


coords = st.integers(-15, 15)


@given(coords, coords, coords, coords)
def test_bresenham_matches_bruteforce(x0, y0, x1, y1):
    got = {tuple(p) for p in bresenham(x0, y0, x1, y1).tolist()}
    assert got == line_pixels_bruteforce(x0, y0, x1, y1)


@given(coords, coords, coords, coords)
def test_bresenham_one_pixel_per_major_step(x0, y0, x1, y1):
    pix = bresenham(x0, y0, x1, y1)
    assert len(pix) == max(abs(x1 - x0), abs(y1 - y0)) + 1
    steps = np.abs(np.diff(pix, axis=0))
    assert np.all(steps.max(axis=1) == 1) if len(pix) > 1 else True


polylines = st.lists(st.tuples(st.integers(0, 19), st.integers(0, 19)), min_size=2, max_size=8)


@given(polylines)
def test_mask_single_component_and_contains_vertices(points):
    dedup = [p for i, p in enumerate(points) if i == 0 or p != points[i - 1]]
    if len(dedup) < 2 or dedup[0] == dedup[-1]:
        return
    mask = rasterize_contour(Contour(dedup), 20, 20)
    pixels = _set(mask)
    assert components8(pixels) == 1
    assert set(dedup) <= pixels


def test_rasterize_out_of_bounds():
    with pytest.raises(RasterizeError):
        rasterize_contour(Contour([(0, 0), (4, 0)]), 4, 1)


def test_weight_map_defaults():
    w = weight_map(BinaryMask([[1, 0]]))
    assert w.weights.tolist() == [[0.8, 0.2]]
    assert np.all(weight_map(BinaryMask(np.zeros((2, 3)))).weights == 0.2)
    assert np.all(weight_map(BinaryMask(np.ones((2, 3)))).weights == 0.8)
    assert len(np.unique(weight_map(BinaryMask([[1, 0, 0]])).weights)) == 2


def test_loss_weights_validation():
    assert LossWeights() == LossWeights(0.8, 0.2)
    with pytest.raises(ParameterError):
        LossWeights(-1, 0.2)
    with pytest.raises(ParameterError):
        LossWeights(0, 0)


def test_bce_hand_example():
    loss = weighted_bce(ProbMap([[0.5, 0.5]]), BinaryMask([[1, 0]]))
    assert loss == pytest.approx(0.5 * math.log(2), abs=1e-12)


def test_bce_perfect_prediction():
    mask = BinaryMask(np.eye(8, dtype=np.uint8))
    assert weighted_bce(ProbMap(mask.labels.astype(float)), mask) <= 1e-6


def test_bce_saturated_miss_is_finite():
    loss = weighted_bce(ProbMap([[0.0]]), BinaryMask([[1]]))
    assert loss == pytest.approx(0.8 * -math.log(1e-7), rel=1e-6)
    assert 0.8 * 16.118 == pytest.approx(loss, rel=1e-4)


def test_bce_shape_mismatch():
    with pytest.raises(ShapeError):
        weighted_bce(ProbMap([[0.5]]), BinaryMask([[1, 0]]))


probs = st.lists(st.floats(0, 1), min_size=6, max_size=6)
labels = st.lists(st.integers(0, 1), min_size=6, max_size=6)


@given(probs, labels)
def test_bce_unit_weights_is_plain_bce(p, y):
    prob, mask = ProbMap([p]), BinaryMask([y])
    pc = np.clip(p, 1e-7, 1 - 1e-7)
    plain = np.mean([-math.log(q) if t else -math.log(1 - q) for q, t in zip(pc, y)])
    got = weighted_bce(prob, mask, LossWeights(1.0, 1.0))
    assert got >= 0
    assert got == pytest.approx(plain, rel=1e-9, abs=1e-12)


@given(probs, labels, st.integers(0, 5), st.floats(0, 1))
def test_bce_monotone_in_error(p, y, i, step):
    mask = BinaryMask([y])
    base = weighted_bce(ProbMap([p]), mask)
    worse = list(p)
    # move p_i away from its label
    worse[i] = p[i] - step * p[i] if y[i] == 1 else p[i] + step * (1 - p[i])
    assert weighted_bce(ProbMap([worse]), mask) >= base - 1e-15

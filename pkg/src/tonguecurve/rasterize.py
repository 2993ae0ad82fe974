"""Ground-truth masks, per-pixel class weights and weighted binary cross-entropy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RasterizeError, ShapeError
from .types import BinaryMask, Contour, ProbMap, WeightMap

BCE_EPS = 1e-7


@dataclass(frozen=True)
class LossWeights:
    w_contour: float = 0.8
    w_background: float = 0.2

    def __post_init__(self):
        if self.w_contour < 0 or self.w_background < 0:
            raise ParameterError("loss weights must be non-negative")
        if self.w_contour == 0 and self.w_background == 0:
            raise ParameterError("loss weights cannot both be zero")


def bresenham(x0: int, y0: int, x1: int, y1: int) -> np.ndarray:
    """Integer line from (x0, y0) to (x1, y1), both ends included.

    Steps one pixel along the major axis; the minor coordinate is the exact
    line position rounded to the nearest integer, halves rounded away from the
    start.  Returns an ``(n, 2)`` array of ``(x, y)``.
    """
    dx, dy = x1 - x0, y1 - y0
    adx, ady = abs(dx), abs(dy)
    sx = 1 if dx >= 0 else -1
    sy = 1 if dy >= 0 else -1
    if adx == 0 and ady == 0:
        return np.array([[x0, y0]], dtype=np.int64)
    if adx >= ady:
        k = np.arange(adx + 1, dtype=np.int64)
        minor = (2 * k * ady + adx) // (2 * adx)
        return np.column_stack([x0 + sx * k, y0 + sy * minor])
    k = np.arange(ady + 1, dtype=np.int64)
    minor = (2 * k * adx + ady) // (2 * ady)
    return np.column_stack([x0 + sx * minor, y0 + sy * k])


def polyline_pixels(points: np.ndarray) -> np.ndarray:
    """Pixels of all segments of a polyline, in drawing order, joints not repeated."""
    points = np.asarray(points, dtype=np.int64)
    parts = [points[:1]]
    for (x0, y0), (x1, y1) in zip(points[:-1].tolist(), points[1:].tolist()):
        parts.append(bresenham(x0, y0, x1, y1)[1:])
    return np.concatenate(parts)


def rasterize_contour(contour: Contour, width: int, height: int) -> BinaryMask:
    if not contour.within(width, height):
        raise RasterizeError(f"contour leaves the {width}x{height} grid")
    pix = polyline_pixels(contour.points)
    labels = np.zeros((height, width), dtype=np.uint8)
    labels[pix[:, 1], pix[:, 0]] = 1
    return BinaryMask(labels)


def weight_map(mask: BinaryMask, w: LossWeights = LossWeights()) -> WeightMap:
    return WeightMap(np.where(mask.labels == 1, w.w_contour, w.w_background))


def weighted_bce(prob: ProbMap, mask: BinaryMask, w: LossWeights = LossWeights()) -> float:
    """Mean over pixels of class-weighted binary cross-entropy.

    Probabilities are clamped to ``[1e-7, 1 - 1e-7]`` so saturated predictions
    give a finite loss.
    """
    if prob.shape != mask.shape:
        raise ShapeError(f"probability map {prob.shape} and mask {mask.shape} differ in shape")
    p = np.clip(prob.values, BCE_EPS, 1.0 - BCE_EPS)
    y = mask.labels.astype(np.float64)
    weights = np.where(mask.labels == 1, w.w_contour, w.w_background)
    terms = -y * np.log(p) - (1.0 - y) * np.log1p(-p)
    return float(np.mean(weights * terms))

"""Raster and geometry containers.

Grids are stored as read-only 2-D numpy arrays of shape ``(height, width)``;
row-major indexing means pixel ``(x, y)`` lives at flat index
``y * width + x``.  Points use ``x`` = column, ``y`` = row, origin top-left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import BoundsError, InvalidContourError, InvalidMetaError, ShapeError


class PixelPoint(NamedTuple):
    x: int
    y: int


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


class _Grid:
    """Common behaviour of the 2-D grid types.

    Subclasses define ``_dtype`` and ``_validate``.
    """

    _dtype: type = np.float64
    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=self._dtype, copy=True)
        if arr.ndim != 2:
            raise ShapeError(f"{type(self).__name__} needs a 2-D array, got {arr.ndim}-D")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"{type(self).__name__} must be at least 1x1")
        self._validate(arr)
        self.data = _frozen(arr)

    def _validate(self, arr: np.ndarray) -> None:
        pass

    @classmethod
    def from_buffer(cls, width: int, height: int, values: Sequence):
        values = np.asarray(values)
        if width < 1 or height < 1:
            raise ShapeError("width and height must be >= 1")
        if values.size != width * height:
            raise ShapeError(
                f"buffer holds {values.size} values, expected {width}x{height}={width * height}"
            )
        return cls(values.reshape(height, width))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def flat(self) -> np.ndarray:
        """Row-major buffer view."""
        return self.data.reshape(-1)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((type(self).__name__, self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({self.width}x{self.height})"


class GrayImage(_Grid):
    """8-bit grayscale frame."""

    _dtype = np.uint8
    __slots__ = ()

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.size and (arr.min() < 0 or arr.max() > 255 or np.any(arr != np.round(arr))):
            raise ShapeError("GrayImage levels must be integers in 0..255")
        super().__init__(arr)

    @property
    def pixels(self) -> np.ndarray:
        return self.data


class ProbMap(_Grid):
    """Per-pixel contour probabilities in [0, 1]."""

    _dtype = np.float64
    __slots__ = ()

    def _validate(self, arr):
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0:
            raise ShapeError("ProbMap values must lie in [0, 1]")

    @property
    def values(self) -> np.ndarray:
        return self.data


class BinaryMask(_Grid):
    """Labels: 1 = contour, 0 = background."""

    _dtype = np.uint8
    __slots__ = ()

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ShapeError("BinaryMask labels must be 0 or 1")
        super().__init__(arr)

    @property
    def labels(self) -> np.ndarray:
        return self.data

    def points(self) -> np.ndarray:
        """Coordinates ``(x, y)`` of the 1-pixels in row-major order."""
        ys, xs = np.nonzero(self.data)
        return np.column_stack([xs, ys]).astype(np.int64)


class WeightMap(_Grid):
    _dtype = np.float64
    __slots__ = ()

    def _validate(self, arr):
        if not np.all(np.isfinite(arr)) or arr.min() < 0.0:
            raise ShapeError("weights must be finite and non-negative")

    @property
    def weights(self) -> np.ndarray:
        return self.data


def _check_bounds(grid: _Grid, p) -> tuple[int, int]:
    x, y = int(p[0]), int(p[1])
    if not (0 <= x < grid.width and 0 <= y < grid.height):
        raise BoundsError(f"point ({x}, {y}) outside {grid.width}x{grid.height} grid")
    return x, y


def get_pixel(grid: _Grid, p):
    x, y = _check_bounds(grid, p)
    return grid.flat()[y * grid.width + x].item()


def set_pixel(grid: _Grid, p, value):
    """Return a copy of ``grid`` with one pixel replaced."""
    x, y = _check_bounds(grid, p)
    arr = grid.data.copy()
    arr[y, x] = value
    return type(grid)(arr)


@dataclass(frozen=True)
class ImageMeta:
    """Acquisition geometry; 19.2 cm FOV over a 136-pixel matrix by default."""

    fov_mm: float = 192.0
    acq_resolution: int = 136

    @property
    def pixel_spacing_mm(self) -> float:
        return pixel_spacing(self)


def pixel_spacing(meta: ImageMeta) -> float:
    """Millimetres per pixel."""
    if meta.acq_resolution is None or meta.acq_resolution < 1:
        raise InvalidMetaError(f"acquisition resolution must be >= 1, got {meta.acq_resolution}")
    if not meta.fov_mm > 0:
        raise InvalidMetaError(f"field of view must be positive, got {meta.fov_mm}")
    return meta.fov_mm / meta.acq_resolution


class Contour:
    """Ordered open polyline of integer pixel centres.

    At least two points, no repeated consecutive points and the first point
    differs from the last.
    """

    __slots__ = ("points",)

    def __init__(self, points):
        arr = np.array(points, dtype=np.int64, copy=True)
        if arr.size == 0:
            raise InvalidContourError("contour is empty")
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise InvalidContourError(f"contour points must have shape (n, 2), got {arr.shape}")
        if len(arr) < 2:
            raise InvalidContourError("contour needs at least 2 points")
        steps = np.all(arr[1:] == arr[:-1], axis=1)
        if steps.any():
            i = int(np.argmax(steps)) + 1
            raise InvalidContourError(f"duplicate consecutive point at index {i}: {tuple(arr[i])}")
        if np.array_equal(arr[0], arr[-1]):
            raise InvalidContourError("contour is closed (first point equals last point)")
        self.points = _frozen(arr)

    def __len__(self):
        return len(self.points)

    def __iter__(self) -> Iterator[PixelPoint]:
        for x, y in self.points.tolist():
            yield PixelPoint(x, y)

    def __getitem__(self, i) -> PixelPoint:
        x, y = self.points[i].tolist()
        return PixelPoint(x, y)

    def __eq__(self, other):
        if not isinstance(other, Contour):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    def __repr__(self):
        return f"Contour(n={len(self)}, start={tuple(self[0])}, end={tuple(self[-1])})"

    def to_list(self) -> list[tuple[int, int]]:
        return [tuple(p) for p in self.points.tolist()]

    def translated(self, dx: int, dy: int) -> "Contour":
        return Contour(self.points + np.array([dx, dy]))

    def within(self, width: int, height: int) -> bool:
        xs, ys = self.points[:, 0], self.points[:, 1]
        return bool(xs.min() >= 0 and ys.min() >= 0 and xs.max() < width and ys.max() < height)

"""Frame preparation: cropping and histogram equalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CropError
from .types import GrayImage


@dataclass(frozen=True)
class CropRect:
    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise CropError(f"crop extent must be >= 1, got {self.width}x{self.height}")
        if self.x0 < 0 or self.y0 < 0:
            raise CropError(f"crop origin must be non-negative, got ({self.x0}, {self.y0})")


def centered_rect(width: int, height: int, out_width: int = 128, out_height: int = 128) -> CropRect:
    """Centered crop; a 136x136 frame gives origin (4, 4) for a 128x128 output."""
    if out_width > width or out_height > height:
        raise CropError(f"cannot crop {out_width}x{out_height} out of {width}x{height}")
    return CropRect((width - out_width) // 2, (height - out_height) // 2, out_width, out_height)


def crop(image: GrayImage, rect: CropRect) -> GrayImage:
    if rect.x0 + rect.width > image.width or rect.y0 + rect.height > image.height:
        raise CropError(f"{rect} does not fit inside {image.width}x{image.height} image")
    return GrayImage(image.pixels[rect.y0:rect.y0 + rect.height, rect.x0:rect.x0 + rect.width])


def equalization_lut(image: GrayImage) -> np.ndarray:
    """256-entry level mapping of classical cdf-remap equalization.

    Level ``v`` maps to ``round((cdf(v) - cdf_min) / (N - cdf_min) * 255)`` with
    halves rounded up.  A constant image (``N == cdf_min``) maps to itself.
    """
    hist = np.bincount(image.pixels.reshape(-1), minlength=256)
    cdf = np.cumsum(hist)
    n = int(cdf[-1])
    cdf_min = int(cdf[np.nonzero(cdf)[0][0]])
    if n == cdf_min:
        return np.arange(256, dtype=np.uint8)
    scaled = (cdf - cdf_min).astype(np.float64) / (n - cdf_min) * 255.0
    return np.clip(np.floor(scaled + 0.5), 0, 255).astype(np.uint8)


def equalize(image: GrayImage) -> GrayImage:
    return GrayImage(equalization_lut(image)[image.pixels])

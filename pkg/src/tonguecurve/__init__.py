"""Tongue-contour post-processing: probability maps to ordered 1-pixel curves,
plus MSD evaluation and cross-validation tooling."""

__version__ = "0.1.0"

from .types import (  # noqa: E402
    BinaryMask,
    Contour,
    GrayImage,
    ImageMeta,
    PixelPoint,
    ProbMap,
    WeightMap,
    get_pixel,
    pixel_spacing,
    set_pixel,
)
from .extract import ExtractConfig, extract_contour  # noqa: E402
from .metrics import msd  # noqa: E402

__all__ = [
    "BinaryMask",
    "Contour",
    "ExtractConfig",
    "GrayImage",
    "ImageMeta",
    "PixelPoint",
    "ProbMap",
    "WeightMap",
    "extract_contour",
    "get_pixel",
    "msd",
    "pixel_spacing",
    "set_pixel",
]

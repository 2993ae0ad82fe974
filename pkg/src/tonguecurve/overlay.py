"""Colour overlays of predicted and manual contours for visual QC."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import OverlayError
from .types import Contour, GrayImage

RED = (255, 0, 0)
BLUE = (0, 0, 255)
PURPLE = (255, 0, 255)


def overlay(image: GrayImage, truth: Optional[Contour] = None,
            predicted: Optional[Contour] = None) -> np.ndarray:
    """RGB ``(height, width, 3)`` array: prediction red, truth blue, both purple.

    Only the contour points themselves are painted; every other pixel keeps
    its gray level.
    """
    h, w = image.shape
    rgb = np.repeat(image.pixels[:, :, None], 3, axis=2).astype(np.uint8)
    layers = np.zeros((h, w), dtype=np.uint8)
    for bit, c in ((1, truth), (2, predicted)):
        if c is None:
            continue
        if not c.within(w, h):
            raise OverlayError(f"contour leaves the {w}x{h} image")
        layers[c.points[:, 1], c.points[:, 0]] |= bit
    rgb[layers == 1] = BLUE
    rgb[layers == 2] = RED
    rgb[layers == 3] = PURPLE
    return rgb

"""
Contour extraction on a synthetic probability map
=================================================

A seeded arc stands in for a tongue contour.  We corrupt it the way a
segmentation network tends to fail (gaps, a stray cluster, blur, noise) and
recover a single open curve from the map.
"""

import tempfile
from pathlib import Path

import numpy as np

from tonguecurve import ExtractConfig, extract_contour
from tonguecurve.formats import write_ppm
from tonguecurve.metrics import msd_px
from tonguecurve.overlay import overlay
from tonguecurve.synth import SynthParams, make_sample
from tonguecurve.types import GrayImage, ImageMeta

params = SynthParams(seed=7, blur_sigma=1.0, gap_count=2, gap_length_px=3,
                     spur_count=1, spur_size_px=5, noise_amplitude=0.2)
sample = make_sample(params)
print("source curve:", len(sample.curve), "points")
print("gap pixels:", sample.corruption.gap_pixels.tolist())
print("spur pixels:", sample.corruption.spur_pixels.tolist())

# how many pixels clear the decision threshold
above = int((sample.prob.values >= 0.4).sum())
print("pixels >= 0.4:", above)

#############################################################################
# Thinning first collapses the blurred band to a skeleton, which keeps the
# stray cluster small relative to the curve.
config = ExtractConfig(enable_thinning=True, min_component_size=4)
contour = extract_contour(sample.prob, config)
spacing = ImageMeta().pixel_spacing_mm
d = msd_px(sample.curve, contour)
print(f"extracted {len(contour)} points, MSD {d:.3f} px = {d * spacing:.3f} mm")
print("endpoints:", contour[0], contour[len(contour) - 1])

#############################################################################
# Paint both curves over the map for a quick look.
gray = GrayImage(np.floor(sample.prob.values * 255 + 0.5).astype(np.uint8))
rgb = overlay(gray, truth=sample.curve, predicted=contour)
out = Path(tempfile.mkdtemp()) / "overlay.ppm"
out.write_bytes(write_ppm(rgb))
print("overlay written to", out)

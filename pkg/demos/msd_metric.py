"""
Mean Sum of Distance between two curves
=======================================

MSD averages nearest-point distances in both directions.  Two short
parallel segments five pixels apart give exactly five.
"""

from tonguecurve.metrics import EvalRecord, aggregate_fold, aggregate_overall, msd, msd_px
from tonguecurve.types import Contour, ImageMeta

u = Contour([(0, 0), (1, 0), (2, 0)])
v = Contour([(0, 5), (1, 5), (2, 5)])
print("parallel segments:", msd_px(u, v), "px")

# shifting one curve sideways only changes the nearest partners
w = Contour([(2, 5), (3, 5), (4, 5)])
print("shifted copy:", round(msd_px(u, w), 4), "px")

spacing = ImageMeta(fov_mm=192.0, acq_resolution=136).pixel_spacing_mm
print(f"spacing {spacing:.6f} mm/px -> {msd(u, v, spacing):.4f} mm")

#############################################################################
# Folds report mean and sample standard deviation, as in a results table.
records = [EvalRecord.scored(f"img{i}", px, spacing) for i, px in enumerate([0.4, 0.5, 0.45, 3.9])]
records.append(EvalRecord.failed("img9", "[shortest_path] no path"))
fold = aggregate_fold(records)
print("fold:", fold.formatted(), "mm,", fold.count, "scored,", fold.failures, "failed")

# one bad frame dominates the spread
summary = aggregate_overall([fold], records)
for line in summary.lines():
    print(line)

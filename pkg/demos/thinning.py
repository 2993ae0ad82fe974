"""
Thinning a thick band before path search
========================================

A band three pixels wide thins to a one-pixel skeleton.  Running the
thinning again changes nothing.
"""

import numpy as np

from tonguecurve.extract import thin
from tonguecurve.types import BinaryMask

band = np.zeros((9, 24), dtype=np.uint8)
band[3:6, 2:22] = 1
band[2, 8:14] = 1


def show(grid):
    for row in grid:
        print("".join("#" if v else "." for v in row))


show(band)
print()
skeleton = thin(BinaryMask(band))
show(skeleton.labels)
print("pixels:", int(band.sum()), "->", int(skeleton.labels.sum()))
print("idempotent:", thin(skeleton) == skeleton)

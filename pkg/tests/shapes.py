"""Binary fixture shapes for thinning checks (lists of row strings, '#' = 1)."""

import numpy as np


def _grid(h, w):
    return np.zeros((h, w), dtype=np.uint8)


def _rect(h, w, r0, c0, rh, cw):
    g = _grid(h, w)
    g[r0:r0 + rh, c0:c0 + cw] = 1
    return g


def _disc(size, radius):
    y, x = np.mgrid[:size, :size]
    c = (size - 1) / 2
    return ((x - c) ** 2 + (y - c) ** 2 <= radius ** 2).astype(np.uint8)


def _ring(size, outer, inner):
    y, x = np.mgrid[:size, :size]
    c = (size - 1) / 2
    d = (x - c) ** 2 + (y - c) ** 2
    return ((d <= outer ** 2) & (d >= inner ** 2)).astype(np.uint8)


def _thick_line(h, w, p0, p1, half):
    y, x = np.mgrid[:h, :w]
    (x0, y0), (x1, y1) = p0, p1
    dx, dy = x1 - x0, y1 - y0
    t = np.clip(((x - x0) * dx + (y - y0) * dy) / (dx * dx + dy * dy), 0, 1)
    d = np.hypot(x - (x0 + t * dx), y - (y0 + t * dy))
    return (d <= half).astype(np.uint8)


def _arc_band(size, radius, width, a0, a1):
    y, x = np.mgrid[:size, :size]
    c = (size - 1) / 2
    r = np.hypot(x - c, y - c)
    a = np.degrees(np.arctan2(y - c, x - c)) % 360
    return ((np.abs(r - radius) <= width / 2) & (a >= a0) & (a <= a1)).astype(np.uint8)


def _from_rows(rows):
    return np.array([[1 if ch == "#" else 0 for ch in row] for row in rows], dtype=np.uint8)


def fixture_shapes():
    """Twenty shapes, each a single 8-connected blob, on a blank border."""
    shapes = {
        "rect_3x10": _rect(7, 14, 2, 2, 3, 10),
        "rect_5x12": _rect(9, 16, 2, 2, 5, 12),
        "square_7": _rect(11, 11, 2, 2, 7, 7),
        "rect_tall": _rect(16, 8, 2, 2, 12, 4),
        "disc_r4": _disc(13, 4),
        "disc_r7": _disc(19, 7),
        "ring": _ring(21, 8, 5),
        "thick_h": _thick_line(12, 30, (3, 6), (26, 6), 1.5),
        "thick_diag": _thick_line(24, 24, (4, 4), (19, 19), 1.6),
        "thick_slope": _thick_line(20, 32, (3, 4), (28, 15), 1.8),
        "arc_band": _arc_band(31, 11, 3, 200, 340),
        "tongue_band": _arc_band(41, 16, 4, 190, 350),
        "one_px_line": _thick_line(9, 20, (2, 4), (17, 4), 0.4),
    }
    cross = _grid(17, 17)
    cross[7:10, 2:15] = 1
    cross[2:15, 7:10] = 1
    shapes["plus"] = cross
    ell = _grid(16, 16)
    ell[2:14, 2:5] = 1
    ell[11:14, 2:14] = 1
    shapes["ell"] = ell
    tee = _grid(16, 16)
    tee[2:5, 2:14] = 1
    tee[2:14, 7:10] = 1
    shapes["tee"] = tee
    u = _grid(16, 16)
    u[2:14, 2:5] = 1
    u[2:14, 11:14] = 1
    u[11:14, 2:14] = 1
    shapes["u"] = u
    frame = _rect(16, 16, 2, 2, 12, 12)
    frame[5:11, 5:11] = 0
    shapes["frame"] = frame
    shapes["blob"] = _from_rows([
        "..............",
        "...#####......",
        "..#######.....",
        "..########....",
        "...########...",
        "....#######...",
        ".....######...",
        "......####....",
        "..............",
    ])
    shapes["zigzag"] = _thick_line(20, 34, (3, 4), (14, 15), 1.5) | _thick_line(20, 34, (14, 15), (29, 4), 1.5)
    return shapes

"""Seeded synthetic curves and corrupted probability maps.

All randomness comes from SplitMix64, a counter-based generator fully defined
by three constants, so any implementation reproduces the same fixtures:

    state_i = seed + i * 0x9E3779B97F4A7C15        (mod 2**64, i = 1, 2, ...)
    z = (state_i ^ (state_i >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_i = z ^ (z >> 31)

A uniform float is ``(out >> 11) * 2**-53``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .formats import ManifestEntry, write_contour_csv, write_manifest, write_pgm
from .rasterize import polyline_pixels, rasterize_contour
from .types import BinaryMask, Contour, GrayImage, ProbMap

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1

# per-purpose stream tags so curve and corruption draws never overlap
CURVE_STREAM = 0
CORRUPT_STREAM = 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, n: int, start: int = 0) -> np.ndarray:
    """Outputs ``start+1 .. start+n`` of the SplitMix64 sequence for ``seed``."""
    i = np.arange(start + 1, start + n + 1, dtype=np.uint64)
    states = np.uint64(seed & MASK64) + i * np.uint64(GAMMA)
    return _mix(states)


class SplitMix64:
    def __init__(self, seed: int, stream: int = 0):
        # a different stream is the sequence of a derived seed
        self.seed = seed & MASK64 if stream == 0 else int(splitmix64(seed ^ stream, 1)[0])
        self.count = 0

    def u64(self, n: int) -> np.ndarray:
        out = splitmix64(self.seed, n, self.count)
        self.count += n
        return out

    def uniform(self, n: Optional[int] = None, low: float = 0.0, high: float = 1.0):
        k = 1 if n is None else n
        u = (self.u64(k) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
        u = low + (high - low) * u
        return float(u[0]) if n is None else u

    def below(self, n: int) -> int:
        """Integer in ``[0, n)``."""
        return min(int(self.uniform() * n), n - 1)


@dataclass(frozen=True)
class SynthParams:
    seed: int = 0
    image_size: int = 128
    blur_sigma: float = 0.0
    gap_count: int = 0
    gap_length_px: int = 1
    spur_count: int = 0
    spur_size_px: int = 1
    spur_min_dist_px: float = 15.0
    noise_amplitude: float = 0.0

    def __post_init__(self):
        if self.blur_sigma < 0:
            raise ParameterError("blur_sigma must be >= 0")
        if self.gap_count < 0 or self.spur_count < 0:
            raise ParameterError("gap_count and spur_count must be >= 0")
        if self.gap_length_px < 1 or self.spur_size_px < 1:
            raise ParameterError("gap_length_px and spur_size_px must be >= 1")
        if not 0.0 <= self.noise_amplitude < 1.0:
            raise ParameterError("noise_amplitude must lie in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)


def _round_half_up(x):
    return np.floor(np.asarray(x) + 0.5).astype(np.int64)


def gen_curve(params: SynthParams) -> Contour:
    """Random open circular arc, spanning 120-300 degrees and at least half the
    image width, sampled every pixel of arc length."""
    size = params.image_size
    if size < 32:
        raise ParameterError(f"image_size must be >= 32, got {size}")
    rng = SplitMix64(params.seed, CURVE_STREAM)
    margin = 4
    for _ in range(10_000):
        span = math.radians(rng.uniform(low=120.0, high=300.0))
        radius = rng.uniform(low=0.22 * size, high=0.45 * size)
        a0 = rng.uniform(high=2.0 * math.pi)
        steps = max(2, math.ceil(span * radius))
        angles = a0 + span * np.arange(steps + 1) / steps
        ox, oy = radius * np.cos(angles), radius * np.sin(angles)
        lo = margin - np.array([ox.min(), oy.min()])
        hi = size - 1 - margin - np.array([ox.max(), oy.max()])
        u1, u2 = rng.uniform(), rng.uniform()
        if np.any(hi < lo) or ox.max() - ox.min() < size / 2:
            continue
        cx, cy = lo + (hi - lo) * np.array([u1, u2])
        pts = np.column_stack([_round_half_up(cx + ox), _round_half_up(cy + oy)])
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
        return Contour(pts[keep])
    raise ParameterError("could not place an arc in the image")  # pragma: no cover


@dataclass(frozen=True)
class Corruption:
    prob: ProbMap
    gap_pixels: np.ndarray
    spur_pixels: np.ndarray


def _unique_in_order(pixels: np.ndarray) -> np.ndarray:
    _, first = np.unique(pixels, axis=0, return_index=True)
    return pixels[np.sort(first)]


def trace_mask(mask: BinaryMask) -> np.ndarray:
    """Order mask pixels by walking from an end pixel to nearest unvisited neighbours."""
    pts = mask.points()
    if len(pts) == 0:
        return pts
    labels = mask.labels.astype(np.int32)
    counts = ndimage.convolve(labels, np.ones((3, 3), dtype=np.int32), mode="constant") - labels
    deg = counts[pts[:, 1], pts[:, 0]]
    start = int(np.lexsort((pts[:, 1], pts[:, 0], deg))[0])
    remaining = {tuple(p) for p in pts.tolist()}
    cur = tuple(pts[start].tolist())
    order = [cur]
    remaining.discard(cur)
    while remaining:
        x, y = cur
        step = [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1),
                (x + 1, y + 1), (x - 1, y - 1), (x + 1, y - 1), (x - 1, y + 1)]
        nxt = next((q for q in step if q in remaining), None)
        if nxt is None:
            nxt = min(remaining, key=lambda q: ((q[0] - x) ** 2 + (q[1] - y) ** 2, q))
        order.append(nxt)
        remaining.discard(nxt)
        cur = nxt
    return np.array(order, dtype=np.int64)


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    radius = max(1, math.ceil(4.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-0.5 * (x / sigma) ** 2)
    return g / g.sum()


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Sampled 2-D Gaussian renormalized to sum to 1."""
    g = gaussian_kernel_1d(sigma)
    k = np.outer(g, g)
    return k / k.sum()


def ridge_gain(sigma: float) -> float:
    """Scale that brings the blurred ridge of a diagonal 1-pixel line to 1.

    Diagonal lines have the sparsest pixels per unit length, so every other
    direction ends at least as high.
    """
    g = gaussian_kernel_1d(sigma)
    return 1.0 / float(np.sum(g * g))


def _place_gaps(order: np.ndarray, params: SynthParams, rng: SplitMix64) -> np.ndarray:
    n, k, length = len(order), params.gap_count, params.gap_length_px
    if k == 0:
        return np.empty((0, 2), dtype=np.int64)
    interior = n - 2
    slot = interior // k
    if slot < length + 1:
        raise ParameterError(
            f"{k} gaps of {length} px do not fit in a {n}-pixel curve"
        )
    picked = []
    for i in range(k):
        start = 1 + i * slot + rng.below(slot - length + 1)
        picked.append(order[start:start + length])
    return np.concatenate(picked)


def _place_spurs(mask: BinaryMask, params: SynthParams, rng: SplitMix64) -> np.ndarray:
    if params.spur_count == 0:
        return np.empty((0, 2), dtype=np.int64)
    h, w = mask.shape
    dist = ndimage.distance_transform_edt(mask.labels == 0)
    allowed = dist >= params.spur_min_dist_px
    allowed[[0, -1], :] = False
    allowed[:, [0, -1]] = False
    taken = np.zeros_like(allowed)
    spurs = []
    for _ in range(params.spur_count):
        for _attempt in range(1000):
            ys, xs = np.nonzero(allowed & ~taken)
            if len(xs) == 0:
                raise ParameterError("no room for a spurious cluster at the requested distance")
            i = rng.below(len(xs))
            cluster = [(int(xs[i]), int(ys[i]))]
            members = set(cluster)
            while len(cluster) < params.spur_size_px:
                frontier = sorted({
                    (x + dx, y + dy)
                    for x, y in cluster
                    for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1))
                    if 0 <= x + dx < w and 0 <= y + dy < h
                    and allowed[y + dy, x + dx] and not taken[y + dy, x + dx]
                    and (x + dx, y + dy) not in members
                })
                if not frontier:
                    break
                nxt = frontier[rng.below(len(frontier))]
                cluster.append(nxt)
                members.add(nxt)
            if len(cluster) == params.spur_size_px:
                break
        else:
            raise ParameterError("could not grow a spurious cluster")  # pragma: no cover
        arr = np.array(cluster, dtype=np.int64)
        # keep a one-pixel moat so clusters never merge
        grown = np.zeros_like(taken)
        grown[arr[:, 1], arr[:, 0]] = True
        taken |= ndimage.binary_dilation(grown, structure=np.ones((3, 3), dtype=bool))
        spurs.append(arr)
    return np.concatenate(spurs)


def corrupt_detailed(mask: BinaryMask, params: SynthParams, curve: Optional[Contour] = None) -> Corruption:
    """Corrupt a curve mask into a probability map.

    Steps: cut gaps along the curve, add spurious clusters far from it, blur,
    add uniform noise, clamp to [0, 1].  ``curve`` gives the pixel order used
    for gap placement; without it the mask is traced.
    """
    rng = SplitMix64(params.seed, CORRUPT_STREAM)
    if curve is not None:
        order = _unique_in_order(polyline_pixels(curve.points))
    else:
        order = trace_mask(mask)
    values = mask.labels.astype(np.float64)

    gaps = _place_gaps(order, params, rng)
    if len(gaps):
        values[gaps[:, 1], gaps[:, 0]] = 0.0
    spurs = _place_spurs(mask, params, rng)
    if len(spurs):
        values[spurs[:, 1], spurs[:, 0]] = 1.0
    if params.blur_sigma > 0:
        values = ndimage.convolve(values, gaussian_kernel(params.blur_sigma), mode="constant")
        values *= ridge_gain(params.blur_sigma)
    if params.noise_amplitude > 0:
        noise = rng.uniform(values.size, high=params.noise_amplitude)
        values = values + noise.reshape(values.shape)
    return Corruption(ProbMap(np.clip(values, 0.0, 1.0)), gaps, spurs)


def corrupt(mask: BinaryMask, params: SynthParams, curve: Optional[Contour] = None) -> ProbMap:
    return corrupt_detailed(mask, params, curve).prob


@dataclass(frozen=True)
class SynthSample:
    curve: Contour
    mask: BinaryMask
    corruption: Corruption

    @property
    def prob(self) -> ProbMap:
        return self.corruption.prob


def make_sample(params: SynthParams) -> SynthSample:
    curve = gen_curve(params)
    mask = rasterize_contour(curve, params.image_size, params.image_size)
    return SynthSample(curve, mask, corrupt_detailed(mask, params, curve))


def write_dataset(out_dir, count: int, params: SynthParams, split: str = "test") -> list[ManifestEntry]:
    """Write ``count`` samples (seeds ``params.seed + i``) plus ``manifest.json``.

    Paths in the manifest are relative to ``out_dir``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(count):
        p = SynthParams(**{**params.to_dict(), "seed": params.seed + i})
        sample = make_sample(p)
        sid = f"synth_{p.seed:06d}"
        gray = GrayImage(np.floor(sample.prob.values * 255 + 0.5).astype(np.uint8))
        (out / f"{sid}_truth.csv").write_text(write_contour_csv(sample.curve))
        (out / f"{sid}_prob.pgm").write_bytes(write_pgm(sample.prob))
        (out / f"{sid}_image.pgm").write_bytes(write_pgm(gray))
        entries.append(ManifestEntry(
            id=sid,
            image_path=f"{sid}_image.pgm",
            prob_path=f"{sid}_prob.pgm",
            truth_contour_path=f"{sid}_truth.csv",
            speaker="synth",
            split=split,
        ))
    (out / "manifest.json").write_text(write_manifest(entries))
    return entries

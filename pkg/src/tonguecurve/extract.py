"""Probability map -> ordered 1-pixel-wide open contour.

Pipeline: threshold, optional Zhang-Suen thinning, removal of small
8-connected components, extremity search by the widest angular gap around
the centroid, then a minimum-cost path between the extremities on a graph
whose edges cost the squared Euclidean distance.  Squared costs make many
short hops cheaper than one long jump, so the path follows the point cloud
and still bridges gaps.

Point sets are ``(n, 2)`` int64 arrays of ``(x, y)`` sorted lexicographically.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from .errors import (
    DegenerateExtremitiesError,
    DegenerateGeometryError,
    DisconnectedPathError,
    EmptyInputError,
    ExtractionError,
    ParameterError,
)
from .types import BinaryMask, Contour, PixelPoint, ProbMap

# above this many nodes the graph is kept as an edge list instead of a dense matrix
DENSE_NODE_LIMIT = 3000

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class ExtractConfig:
    threshold: float = 0.4
    min_component_size: int = 3
    rel_component_size: float = 0.05
    connection_radius_override: Optional[float] = None
    enable_thinning: bool = False

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ParameterError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.min_component_size < 1:
            raise ParameterError("min_component_size must be >= 1")
        if not 0.0 <= self.rel_component_size <= 1.0:
            raise ParameterError("rel_component_size must lie in [0, 1]")
        if self.connection_radius_override is not None and not self.connection_radius_override > 0:
            raise ParameterError("connection_radius_override must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


def sort_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.int64).reshape(-1, 2)
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order]


def points_to_mask(points: np.ndarray, width: int, height: int) -> BinaryMask:
    labels = np.zeros((height, width), dtype=np.uint8)
    if len(points):
        labels[points[:, 1], points[:, 0]] = 1
    return BinaryMask(labels)


def threshold_map(prob: ProbMap, t: float) -> np.ndarray:
    """Pixels whose probability is >= ``t``."""
    ys, xs = np.nonzero(prob.values >= t)
    return sort_points(np.column_stack([xs, ys]))


def _bbox_mask(points: np.ndarray):
    origin = points.min(axis=0)
    local = points - origin
    w, h = local.max(axis=0) + 1
    mask = np.zeros((h, w), dtype=bool)
    mask[local[:, 1], local[:, 0]] = True
    return mask, local


def filter_outliers(points, min_component_size: int = 3, rel_component_size: float = 0.05) -> np.ndarray:
    """Drop 8-connected components smaller than
    ``max(min_component_size, rel_component_size * largest)``.

    The largest component always survives.
    """
    points = sort_points(points)
    if len(points) == 0:
        raise EmptyInputError("no points above threshold")
    mask, local = _bbox_mask(points)
    labels, count = ndimage.label(mask, structure=_EIGHT)
    sizes = np.bincount(labels.ravel(), minlength=count + 1)
    sizes[0] = 0
    largest = sizes.max()
    floor = max(min_component_size, rel_component_size * largest)
    keep = sizes >= floor
    keep[np.argmax(sizes)] = True
    keep[0] = False
    return points[keep[labels[local[:, 1], local[:, 0]]]]


def _neighbours(img: np.ndarray):
    """P2..P9 (N, NE, E, SE, S, SW, W, NW) of every pixel, zero-padded."""
    p = np.pad(img, 1)
    h, w = img.shape
    return [
        p[0:h, 1:w + 1],      # P2 north
        p[0:h, 2:w + 2],      # P3 north-east
        p[1:h + 1, 2:w + 2],  # P4 east
        p[2:h + 2, 2:w + 2],  # P5 south-east
        p[2:h + 2, 1:w + 1],  # P6 south
        p[2:h + 2, 0:w],      # P7 south-west
        p[1:h + 1, 0:w],      # P8 west
        p[0:h, 0:w],          # P9 north-west
    ]


def thin(mask: BinaryMask) -> BinaryMask:
    """Zhang-Suen parallel thinning, iterated until stable."""
    img = mask.labels.astype(np.int8)
    while True:
        changed = False
        for step in (0, 1):
            nb = _neighbours(img)
            b = sum(nb)
            ring = nb + nb[:1]
            a = sum(((ring[k] == 0) & (ring[k + 1] == 1)).astype(np.int8) for k in range(8))
            p2, p4, p6, p8 = nb[0], nb[2], nb[4], nb[6]
            if step == 0:
                c = p2 * p4 * p6 == 0
                d = p4 * p6 * p8 == 0
            else:
                c = p2 * p4 * p8 == 0
                d = p2 * p6 * p8 == 0
            delete = (img == 1) & (b >= 2) & (b <= 6) & (a == 1) & c & d
            if delete.any():
                img = img.copy()
                img[delete] = 0
                changed = True
        if not changed:
            return BinaryMask(img.astype(np.uint8))


def find_extremities(points) -> tuple[PixelPoint, PixelPoint]:
    """The two angularly adjacent points bounding the widest gap around the centroid.

    The first returned point bounds the gap from the smaller-angle side.
    """
    pts = sort_points(points)
    if len(pts) < 2:
        raise DegenerateGeometryError(f"need at least 2 points, got {len(pts)}")
    g = pts.mean(axis=0)
    rel = pts - g
    off = np.any(rel != 0, axis=1)
    pts, rel = pts[off], rel[off]
    if len(pts) < 2:
        raise DegenerateGeometryError("points collapse onto their gravity centre")
    theta = np.arctan2(rel[:, 1], rel[:, 0])
    order = np.lexsort((pts[:, 1], pts[:, 0], theta))
    theta = theta[order]
    pts = pts[order]
    gaps = np.append(np.diff(theta), theta[0] + 2.0 * math.pi - theta[-1])
    i = int(np.argmax(gaps))
    j = (i + 1) % len(pts)
    return PixelPoint(*pts[i].tolist()), PixelPoint(*pts[j].tolist())


@dataclass(frozen=True, eq=False)
class PointGraph:
    """Undirected graph on pixel points; edge cost is the squared distance.

    Small graphs carry a dense cost matrix (``-1`` marks a missing edge); large
    ones carry an ``i < j`` edge list.
    """

    nodes: np.ndarray
    radius: float
    dense: Optional[np.ndarray] = field(default=None, repr=False)
    pairs: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(i, j, cost)`` arrays, each undirected edge once with ``i < j``."""
        if self.dense is not None:
            i, j = np.nonzero(np.triu(self.dense >= 0, k=1))
            return i, j, self.dense[i, j]
        i, j = self.pairs[:, 0], self.pairs[:, 1]
        d = self.nodes[i] - self.nodes[j]
        return i, j, (d * d).sum(axis=1)

    def cost(self, i: int, j: int) -> Optional[int]:
        if self.dense is not None:
            c = int(self.dense[i, j])
            return None if c < 0 else c
        a, b = min(i, j), max(i, j)
        hit = np.any((self.pairs[:, 0] == a) & (self.pairs[:, 1] == b))
        if not hit:
            return None
        d = self.nodes[a] - self.nodes[b]
        return int(d @ d)

    def index_of(self, p) -> int:
        hit = np.nonzero((self.nodes[:, 0] == p[0]) & (self.nodes[:, 1] == p[1]))[0]
        if len(hit) == 0:
            raise KeyError(f"point {tuple(p)} is not a graph node")
        return int(hit[0])


def make_graph(points, radius: float, dense: Optional[bool] = None) -> PointGraph:
    """Connect every pair of points closer than ``radius`` (strictly)."""
    nodes = sort_points(points)
    n = len(nodes)
    r2 = radius * radius
    if dense is None:
        dense = n <= DENSE_NODE_LIMIT
    if dense:
        small = nodes.max(initial=0) < 20_000 and nodes.min(initial=0) >= 0
        xy = nodes.astype(np.int32) if small else nodes
        dx = xy[:, 0, None] - xy[None, :, 0]
        dy = xy[:, 1, None] - xy[None, :, 1]
        d2 = dx * dx
        d2 += dy * dy
        cost = np.where(d2 < r2, d2, -1)
        np.fill_diagonal(cost, -1)
        return PointGraph(nodes, radius, dense=cost)
    if n < 2 or radius <= 0:
        return PointGraph(nodes, radius, pairs=np.empty((0, 2), dtype=np.int64))
    pairs = cKDTree(nodes).query_pairs(radius, output_type="ndarray").astype(np.int64)
    d = nodes[pairs[:, 0]] - nodes[pairs[:, 1]]
    pairs = pairs[(d * d).sum(axis=1) < r2]
    pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
    return PointGraph(nodes, radius, pairs=pairs)


def connection_radius(e1, e2, config: ExtractConfig = ExtractConfig()) -> float:
    if config.connection_radius_override is not None:
        return float(config.connection_radius_override)
    return math.hypot(e1[0] - e2[0], e1[1] - e2[1]) - 1.0


def build_graph(points, e1, e2, config: ExtractConfig = ExtractConfig()) -> PointGraph:
    """Graph with radius ``|e1 - e2| - 1`` unless the config overrides it."""
    r = connection_radius(e1, e2, config)
    if r <= 0:
        raise DegenerateExtremitiesError(f"connection radius {r:.3f} is not positive")
    return make_graph(points, r)


def _dijkstra_dense(cost: np.ndarray, s: int, t: int):
    """Array-based Dijkstra on a dense cost matrix.

    Each label packs ``(cost, hops, predecessor)`` into one int64 so that a
    plain minimum orders by cost, then hop count, then predecessor index.
    Returns None when the packing could overflow.
    """
    n = len(cost)
    m = n + 1
    unreached = np.int64(1) << np.int64(61)
    max_edge = int(cost.max()) if n else 0
    if max_edge > 0 and (n * max_edge + 1) * m * m >= int(unreached):
        return None
    step = np.where(cost >= 0, (cost.astype(np.int64) * m + 1) * m, unreached)
    key = np.full(n, unreached, dtype=np.int64)
    key[s] = n
    work = key.copy()
    while True:
        u = int(np.argmin(work))
        if work[u] >= unreached or u == t:
            break
        work[u] = unreached
        cand = step[u] + ((key[u] // m) * m + u)
        # settled nodes always have a smaller label than any candidate
        better = cand < key
        np.minimum(key, cand, out=key)
        np.copyto(work, cand, where=better)
    return key[t] < unreached, key % m


def _dijkstra_heap(graph: PointGraph, s: int, t: int):
    n = graph.n
    i, j, c = graph.edges()
    adj = [[] for _ in range(n)]
    for a, b, w in zip(i.tolist(), j.tolist(), c.tolist()):
        adj[a].append((b, w))
        adj[b].append((a, w))
    inf = (math.inf, 0)
    label = [inf] * n
    pred = [n] * n
    done = [False] * n
    label[s] = (0, 0)
    heap = [(0, 0, s)]
    while heap:
        cst, hops, u = heapq.heappop(heap)
        if done[u] or (cst, hops) != label[u]:
            continue
        if u == t:
            break
        done[u] = True
        for v, w in adj[u]:
            if done[v]:
                continue
            cand = (cst + w, hops + 1)
            if cand < label[v] or (cand == label[v] and u < pred[v]):
                if cand != label[v]:
                    heapq.heappush(heap, (cand[0], cand[1], v))
                label[v] = cand
                pred[v] = u
    return label[t] != inf, np.asarray(pred, dtype=np.int64)


def shortest_path(graph: PointGraph, e1, e2) -> np.ndarray:
    """Minimum squared-distance path from ``e1`` to ``e2`` as an ``(k, 2)`` array.

    Ties go to fewer hops, then to the lowest-index predecessor, so the result
    is fully deterministic.
    """
    s, t = graph.index_of(e1), graph.index_of(e2)
    if s == t:
        return graph.nodes[[s]].copy()
    result = _dijkstra_dense(graph.dense, s, t) if graph.dense is not None else None
    if result is None:
        result = _dijkstra_heap(graph, s, t)
    reached, pred = result
    if not reached:
        raise DisconnectedPathError(f"no path between {tuple(e1)} and {tuple(e2)}")
    path = [t]
    while path[-1] != s:
        path.append(int(pred[path[-1]]))
    return graph.nodes[path[::-1]].copy()


def path_cost(path: np.ndarray) -> int:
    d = np.diff(np.asarray(path, dtype=np.int64), axis=0)
    return int((d * d).sum())


def extract_contour(prob: ProbMap, config: ExtractConfig = ExtractConfig()) -> Contour:
    """Run the whole post-processing chain on one probability map."""
    points = threshold_map(prob, config.threshold)
    if config.enable_thinning and len(points):
        thinned = thin(points_to_mask(points, prob.width, prob.height))
        points = sort_points(thinned.points())
    points = filter_outliers(points, config.min_component_size, config.rel_component_size)
    e1, e2 = find_extremities(points)
    graph = build_graph(points, e1, e2, config)
    path = shortest_path(graph, e1, e2)
    try:
        return Contour(path)
    except ValueError as exc:
        raise ExtractionError(str(exc), stage="contour") from None

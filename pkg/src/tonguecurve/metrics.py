"""Mean Sum of Distance between curves and fold-level aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptyFoldError, InvalidContourError, ParameterError
from .types import Contour

OK = "ok"
FAILED = "extraction_failed"


def _as_points(c) -> np.ndarray:
    pts = c.points if isinstance(c, Contour) else np.asarray(c)
    if pts.size == 0:
        raise InvalidContourError("cannot measure an empty contour")
    return np.asarray(pts, dtype=np.float64).reshape(-1, 2)


def msd_px(u, v) -> float:
    """MSD in pixels: nearest-point distances from each curve to the other,
    summed in both directions and divided by the total point count."""
    a, b = _as_points(u), _as_points(v)
    d_ab, _ = cKDTree(b).query(a)
    d_ba, _ = cKDTree(a).query(b)
    return float((d_ab.sum() + d_ba.sum()) / (len(a) + len(b)))


def msd(u, v, spacing: float = 1.0) -> float:
    """MSD scaled by ``spacing`` (millimetres per pixel)."""
    if not spacing > 0:
        raise ParameterError(f"pixel spacing must be positive, got {spacing}")
    return spacing * msd_px(u, v)


@dataclass(frozen=True)
class EvalRecord:
    id: str
    status: str = OK
    msd_px: Optional[float] = None
    msd_mm: Optional[float] = None
    reason: str = ""

    def __post_init__(self):
        if self.status not in (OK, FAILED):
            raise ValueError(f"unknown status {self.status!r}")
        has = self.msd_px is not None and self.msd_mm is not None
        if has != (self.status == OK):
            raise ValueError("msd values must be present exactly when status is ok")

    @classmethod
    def scored(cls, id: str, value_px: float, spacing_mm: float) -> "EvalRecord":
        return cls(id, OK, float(value_px), float(value_px) * spacing_mm)

    @classmethod
    def failed(cls, id: str, reason: str) -> "EvalRecord":
        return cls(id, FAILED, reason=reason)

    @property
    def ok(self) -> bool:
        return self.status == OK


@dataclass(frozen=True)
class FoldReport:
    fold_index: int
    mean_mm: float
    std_mm: float
    count: int
    failures: int

    def formatted(self, digits: int = 2) -> str:
        return format_pm(self.mean_mm, self.std_mm, digits)


def format_pm(mean: float, std: float, digits: int = 2) -> str:
    """``mean ± std`` with a fixed number of decimals, e.g. ``"1.00 ± 0.71"``."""
    return f"{mean:.{digits}f} ± {std:.{digits}f}"


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Arithmetic mean and sample (n-1) standard deviation; std is 0 for one value."""
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise EmptyFoldError("no values to aggregate")
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return float(np.mean(x)), std


def aggregate_fold(records: Sequence[EvalRecord], fold_index: int = 0) -> FoldReport:
    ok = [r.msd_mm for r in records if r.ok]
    if not ok:
        raise EmptyFoldError(f"fold {fold_index} has no successfully scored records")
    mean, std = mean_std(ok)
    return FoldReport(fold_index, mean, std, len(ok), len(records) - len(ok))


@dataclass(frozen=True)
class OverallSummary:
    pooled_mean_mm: float
    pooled_std_mm: float
    count: int
    failures: int
    worst_id: Optional[str]
    excl_worst_mean_mm: float
    excl_worst_std_mm: float
    # mean and std of the per-fold means, the other reading of a "mean MSD" column
    fold_mean_of_means_mm: float
    fold_std_of_means_mm: float

    def lines(self, digits: int = 2) -> list[str]:
        return [
            f"pooled: {format_pm(self.pooled_mean_mm, self.pooled_std_mm, digits)} mm (n={self.count}, failed={self.failures})",
            f"worst excluded ({self.worst_id}): {format_pm(self.excl_worst_mean_mm, self.excl_worst_std_mm, digits)} mm",
            f"mean of fold means: {format_pm(self.fold_mean_of_means_mm, self.fold_std_of_means_mm, digits)} mm",
        ]


def aggregate_overall(reports: Sequence[FoldReport], records: Sequence[EvalRecord]) -> OverallSummary:
    """Pool every scored record, and repeat with the single worst record removed."""
    if not reports or not records:
        raise EmptyFoldError("nothing to aggregate")
    ok = [r for r in records if r.ok]
    if not ok:
        raise EmptyFoldError("no successfully scored records")
    values = [r.msd_mm for r in ok]
    mean, std = mean_std(values)
    worst = max(range(len(ok)), key=lambda i: (values[i], -i))
    rest = values[:worst] + values[worst + 1:]
    if rest:
        ex_mean, ex_std = mean_std(rest)
    else:
        ex_mean, ex_std = math.nan, math.nan
    fm, fs = mean_std([r.mean_mm for r in reports])
    return OverallSummary(
        pooled_mean_mm=mean,
        pooled_std_mm=std,
        count=len(ok),
        failures=len(records) - len(ok),
        worst_id=ok[worst].id,
        excl_worst_mean_mm=ex_mean,
        excl_worst_std_mm=ex_std,
        fold_mean_of_means_mm=fm,
        fold_std_of_means_mm=fs,
    )

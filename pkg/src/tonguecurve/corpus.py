"""Cross-validation splits, validation-driven parameter selection and the batch runner."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from .errors import SplitError, TongueCurveError
from .extract import ExtractConfig, extract_contour
from .formats import ManifestEntry, read_contour_csv, read_pgm
from .metrics import (
    EvalRecord,
    FoldReport,
    OverallSummary,
    aggregate_fold,
    aggregate_overall,
    format_pm,
    msd_px,
)
from .synth import SplitMix64
from .types import Contour, GrayImage, ImageMeta, ProbMap

log = logging.getLogger(__name__)

# train : valid : test
RATIO = (4, 1, 1)


@dataclass(frozen=True)
class FoldAssignment:
    fold_index: int
    id_to_split: dict

    def ids(self, split: str) -> list[str]:
        return [k for k, v in self.id_to_split.items() if v == split]

    def sizes(self) -> tuple[int, int, int]:
        return tuple(len(self.ids(s)) for s in ("train", "valid", "test"))


def shuffled(items: Sequence, rng: SplitMix64) -> list:
    """Fisher-Yates shuffle driven by SplitMix64 (portable across implementations)."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = rng.below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def split_folds(entries, n_folds: int = 6, seed: int = 0, mode: str = "rotate") -> list[FoldAssignment]:
    """Train/valid/test assignments for ``n_folds`` folds in a 4:1:1 ratio.

    ``rotate`` shuffles once and slides the test window by ``N / n_folds``
    per fold, so with 6 folds every entry is tested exactly once; validation
    is the window after the test window.  ``random`` reshuffles per fold.
    """
    ids = [e.id if isinstance(e, ManifestEntry) else str(e) for e in entries]
    n = len(ids)
    if len(set(ids)) != n:
        raise SplitError("entry ids must be unique")
    if n_folds < 1 or n < max(n_folds, sum(RATIO) // RATIO[2]):
        raise SplitError(f"{n} entries are too few for {n_folds} folds")
    if mode not in ("rotate", "random"):
        raise SplitError(f"unknown split mode {mode!r}")
    window = n * RATIO[2] // sum(RATIO)
    rng = SplitMix64(seed)
    perm = shuffled(ids, rng)
    folds = []
    for k in range(n_folds):
        if mode == "random" and k > 0:
            perm = shuffled(ids, rng)
            start = 0
        else:
            start = 0 if mode == "random" else (k * n) // n_folds
        test = {perm[(start + i) % n] for i in range(window)}
        valid = {perm[(start + window + i) % n] for i in range(window)}
        mapping = {}
        for i in ids:
            mapping[i] = "test" if i in test else "valid" if i in valid else "train"
        folds.append(FoldAssignment(k, mapping))
    return folds


def _load_prob(path: Path) -> ProbMap:
    img = read_pgm(path.read_bytes())
    if isinstance(img, GrayImage):
        return ProbMap(img.pixels / 255.0)
    return img


def evaluate_entry(entry: ManifestEntry, config: ExtractConfig, spacing_mm: float,
                   base_dir: Optional[Path] = None) -> EvalRecord:
    """Extract and score one entry; every failure becomes a failed record."""
    base = Path(base_dir) if base_dir is not None else Path(".")
    if not entry.prob_path or not entry.truth_contour_path:
        return EvalRecord.failed(entry.id, "missing prob_path or truth_contour_path")
    try:
        prob = _load_prob(base / entry.prob_path)
        truth = read_contour_csv((base / entry.truth_contour_path).read_text())
    except (OSError, TongueCurveError, UnicodeDecodeError) as exc:
        return EvalRecord.failed(entry.id, f"read: {exc}")
    try:
        pred = extract_contour(prob, config)
    except TongueCurveError as exc:
        return EvalRecord.failed(entry.id, str(exc))
    return EvalRecord.scored(entry.id, msd_px(truth, pred), spacing_mm)


@dataclass(frozen=True)
class BatchResult:
    records: list
    report: Optional[FoldReport]

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.records)


def run_batch(entries: Sequence[ManifestEntry], config: ExtractConfig = ExtractConfig(),
              meta: ImageMeta = ImageMeta(), worker_count: int = 1, base_dir=None,
              splits: Optional[Iterable[str]] = ("test",), fold_index: int = 0) -> BatchResult:
    """Evaluate every entry whose split is in ``splits`` (``None`` = all entries).

    Records come back in manifest order whatever the worker count.
    """
    spacing = meta.pixel_spacing_mm
    wanted = None if splits is None else set(splits)
    todo = [e for e in entries if wanted is None or e.split in wanted]
    if worker_count <= 1 or len(todo) <= 1:
        records = [evaluate_entry(e, config, spacing, base_dir) for e in todo]
    else:
        records = Parallel(n_jobs=worker_count)(
            delayed(evaluate_entry)(e, config, spacing, base_dir) for e in todo
        )
    ok = [r for r in records if r.ok]
    report = aggregate_fold(records, fold_index) if ok else None
    log.info("fold %d: %d records, %d failed", fold_index, len(records), len(records) - len(ok))
    return BatchResult(list(records), report)


@dataclass(frozen=True)
class CrossValidation:
    folds: list
    results: list
    summary: Optional[OverallSummary]


def cross_validate(entries: Sequence[ManifestEntry], folds: Sequence[FoldAssignment],
                   config: ExtractConfig = ExtractConfig(), meta: ImageMeta = ImageMeta(),
                   worker_count: int = 1, base_dir=None) -> CrossValidation:
    """Score each fold's test set and pool the results."""
    results = []
    for fold in folds:
        test = [replace(e, split="test") for e in entries if fold.id_to_split.get(e.id) == "test"]
        results.append(run_batch(test, config, meta, worker_count, base_dir, fold_index=fold.fold_index))
    reports = [r.report for r in results if r.report is not None]
    records = [rec for r in results for rec in r.records]
    summary = aggregate_overall(reports, records) if reports else None
    return CrossValidation(list(folds), results, summary)


def default_candidates() -> list[ExtractConfig]:
    grid = itertools.product((False, True), (3, 4, 5), (0.05, 0.1))
    return [
        ExtractConfig(enable_thinning=t, min_component_size=m, rel_component_size=r)
        for t, m, r in grid
    ]


@dataclass(frozen=True)
class Selection:
    config: ExtractConfig
    # (config, failures, mean msd in pixels) for every candidate, in trial order
    table: list


def select_config(pairs: Sequence[tuple[ProbMap, Contour]],
                  candidates: Optional[Sequence[ExtractConfig]] = None) -> Selection:
    """Pick the extraction config with the fewest failures, then lowest mean MSD,
    on a validation set of ``(probability map, truth contour)`` pairs."""
    candidates = list(candidates) if candidates is not None else default_candidates()
    if not pairs or not candidates:
        raise ValueError("need validation pairs and candidate configs")
    table = []
    for cfg in candidates:
        failures, scores = 0, []
        for prob, truth in pairs:
            try:
                scores.append(msd_px(truth, extract_contour(prob, cfg)))
            except TongueCurveError:
                failures += 1
        mean = float(np.mean(scores)) if scores else float("inf")
        table.append((cfg, failures, mean))
    best = min(range(len(table)), key=lambda i: (table[i][1], table[i][2], i))
    return Selection(table[best][0], table)


def records_csv(records: Sequence[EvalRecord]) -> str:
    lines = ["id,status,msd_px,msd_mm"]
    for r in records:
        if r.ok:
            lines.append(f"{r.id},{r.status},{r.msd_px:.6f},{r.msd_mm:.6f}")
        else:
            lines.append(f"{r.id},{r.status},,")
    return "\n".join(lines) + "\n"


def summary_table(reports: Sequence[FoldReport], summary: Optional[OverallSummary] = None,
                  digits: int = 2) -> str:
    """Plain-text table with one ``mean ± std`` row per fold."""
    lines = ["fold\tcount\tfailed\tMSD (mm)"]
    for r in reports:
        lines.append(f"{r.fold_index + 1}\t{r.count}\t{r.failures}\t{format_pm(r.mean_mm, r.std_mm, digits)}")
    if summary is not None:
        lines.extend(summary.lines(digits))
    return "\n".join(lines) + "\n"

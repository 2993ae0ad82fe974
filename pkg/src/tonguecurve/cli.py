"""Command-line entry point: ``tonguecurve <subcommand> [flags]``.

Settings come from built-in defaults, then an optional ``--config`` JSON file
(keys mirror the long flag names, dashes or underscores), then explicit
flags.  The effective settings are written next to the main output as
``<output>.config.json``.

Exit codes: 0 success, 1 usage error, 2 data or processing failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .corpus import cross_validate, records_csv, run_batch, split_folds, summary_table
from .errors import TongueCurveError
from .extract import ExtractConfig, extract_contour
from .formats import (
    mask_from_gray,
    read_contour_csv,
    read_manifest,
    read_pgm,
    write_contour_csv,
    write_pgm,
    write_ppm,
)
from .metrics import aggregate_overall, msd_px
from .overlay import overlay
from .preprocess import CropRect, centered_rect, crop, equalize
from .rasterize import LossWeights, rasterize_contour, weighted_bce
from .synth import SynthParams, write_dataset
from .types import GrayImage, ImageMeta, ProbMap

log = logging.getLogger("tonguecurve")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# (flag, type, default, help); type bool means a switch
EXTRACT_OPTS = [
    ("threshold", float, 0.4, "decision threshold on the probability map"),
    ("min-component-size", int, 3, "absolute size floor for the outlier filter"),
    ("rel-component-size", float, 0.05, "size floor relative to the largest component"),
    ("connection-radius-override", float, None, "graph connection radius in pixels"),
    ("enable-thinning", bool, False, "Zhang-Suen thinning before filtering"),
]
META_OPTS = [
    ("fov-mm", float, 192.0, "field of view side in millimetres"),
    ("resolution", int, 136, "acquisition matrix side in pixels"),
]
WEIGHT_OPTS = [
    ("w-contour", float, 0.8, "loss weight of contour pixels"),
    ("w-background", float, 0.2, "loss weight of background pixels"),
]
SYNTH_OPTS = [
    ("seed", int, 0, "seed of the first sample"),
    ("image-size", int, 128, "image side in pixels"),
    ("blur-sigma", float, 0.0, "Gaussian blur sigma in pixels"),
    ("gap-count", int, 0, "number of gaps cut into the curve"),
    ("gap-length-px", int, 1, "pixels per gap"),
    ("spur-count", int, 0, "number of spurious clusters"),
    ("spur-size-px", int, 1, "pixels per spurious cluster"),
    ("spur-min-dist-px", float, 15.0, "minimum cluster distance from the curve"),
    ("noise-amplitude", float, 0.0, "uniform noise amplitude"),
]
CROP_OPTS = [
    ("crop-x0", int, None, "crop origin column (default: centered)"),
    ("crop-y0", int, None, "crop origin row (default: centered)"),
    ("crop-width", int, 128, "crop width"),
    ("crop-height", int, 128, "crop height"),
    ("no-equalize", bool, False, "skip histogram equalization"),
]
BATCH_OPTS = [
    ("workers", int, 1, "parallel worker processes"),
    ("folds", int, 0, "split the manifest into this many folds (0: use manifest splits)"),
    ("split-seed", int, 0, "seed of the fold shuffle"),
    ("split-mode", str, "rotate", "rotate or random"),
    ("all-splits", bool, False, "evaluate every entry, not only the test split"),
]


def _key(flag: str) -> str:
    return flag.replace("-", "_")


def _add_opts(parser, opts):
    for flag, typ, default, help_ in opts:
        if typ is bool:
            parser.add_argument(f"--{flag}", action="store_true", default=None, help=help_)
        else:
            shown = "" if default is None else f" (default {default})"
            parser.add_argument(f"--{flag}", type=typ, default=None, help=help_ + shown)


SUBCOMMANDS = {
    "preprocess": (CROP_OPTS,),
    "rasterize": (WEIGHT_OPTS,),
    "extract": (EXTRACT_OPTS,),
    "eval": (META_OPTS,),
    "synth": (SYNTH_OPTS,),
    "batch": (EXTRACT_OPTS, META_OPTS, BATCH_OPTS),
    "overlay": (),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tonguecurve", description="Tongue contour post-processing and evaluation.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("preprocess", help="crop and equalize an 8-bit PGM frame")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("rasterize", help="contour CSV -> 1-pixel-wide mask PGM")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=128)
    p.add_argument("--height", type=int, default=128)
    p.add_argument("--prob", help="probability map to score against the mask with weighted BCE")

    p = sub.add_parser("extract", help="probability map PGM -> contour CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="MSD between two contour CSVs")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)

    p = sub.add_parser("synth", help="write a synthetic corpus with manifest")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--count", type=int, default=10)

    p = sub.add_parser("batch", help="extract and score every manifest entry")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("overlay", help="paint contours over a frame as PPM")
    p.add_argument("--image", required=True)
    p.add_argument("--truth")
    p.add_argument("--pred")
    p.add_argument("--out", required=True)

    for name, groups in SUBCOMMANDS.items():
        sp = sub.choices[name]
        sp.add_argument("--config", help="JSON file with default flag values")
        for opts in groups:
            _add_opts(sp, opts)
    return parser


def effective_settings(args, groups) -> dict:
    """defaults <- config file <- explicit flags."""
    settings = {_key(f): d for opts in groups for f, _, d, _ in opts}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        for k, v in raw.items():
            k = _key(k)
            if k not in settings:
                raise UsageError(f"unknown config key {k!r}")
            settings[k] = v
    for k in settings:
        v = getattr(args, k, None)
        if v is not None:
            settings[k] = v
    return settings


def _sidecar(out: Path, command: str, settings: dict, extra: dict) -> None:
    payload = {"command": command, **extra, "settings": settings}
    Path(f"{out}.config.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _extract_config(s: dict) -> ExtractConfig:
    return ExtractConfig(
        threshold=float(s["threshold"]),
        min_component_size=int(s["min_component_size"]),
        rel_component_size=float(s["rel_component_size"]),
        connection_radius_override=s["connection_radius_override"],
        enable_thinning=bool(s["enable_thinning"]),
    )


def _meta(s: dict) -> ImageMeta:
    return ImageMeta(fov_mm=float(s["fov_mm"]), acq_resolution=int(s["resolution"]))


def _read_gray(path) -> GrayImage:
    img = read_pgm(Path(path).read_bytes())
    if not isinstance(img, GrayImage):
        raise UsageError(f"{path} is not an 8-bit PGM")
    return img


def _read_prob(path) -> ProbMap:
    img = read_pgm(Path(path).read_bytes())
    return ProbMap(img.pixels / 255.0) if isinstance(img, GrayImage) else img


def cmd_preprocess(args, s):
    image = _read_gray(args.inp)
    if s["crop_x0"] is None and s["crop_y0"] is None:
        rect = centered_rect(image.width, image.height, s["crop_width"], s["crop_height"])
    else:
        default = centered_rect(image.width, image.height, s["crop_width"], s["crop_height"])
        x0 = default.x0 if s["crop_x0"] is None else s["crop_x0"]
        y0 = default.y0 if s["crop_y0"] is None else s["crop_y0"]
        rect = CropRect(x0, y0, s["crop_width"], s["crop_height"])
    out = crop(image, rect)
    if not s["no_equalize"]:
        out = equalize(out)
    Path(args.out).write_bytes(write_pgm(out))
    _sidecar(args.out, "preprocess", s, {"input": args.inp, "crop": [rect.x0, rect.y0, rect.width, rect.height]})
    print(json.dumps({"out": args.out, "width": out.width, "height": out.height}))
    return 0


def cmd_rasterize(args, s):
    contour = read_contour_csv(Path(args.inp).read_text())
    mask = rasterize_contour(contour, args.width, args.height)
    Path(args.out).write_bytes(write_pgm(mask))
    result = {"out": args.out, "contour_pixels": int(mask.labels.sum())}
    if args.prob:
        w = LossWeights(float(s["w_contour"]), float(s["w_background"]))
        result["weighted_bce"] = weighted_bce(_read_prob(args.prob), mask, w)
    _sidecar(args.out, "rasterize", s, {"input": args.inp, "width": args.width, "height": args.height})
    print(json.dumps(result))
    return 0


def cmd_extract(args, s):
    config = _extract_config(s)
    contour = extract_contour(_read_prob(args.inp), config)
    Path(args.out).write_text(write_contour_csv(contour))
    _sidecar(args.out, "extract", s, {"input": args.inp})
    print(json.dumps({"out": args.out, "points": len(contour)}))
    return 0


def cmd_eval(args, s):
    pred = read_contour_csv(Path(args.pred).read_text())
    truth = read_contour_csv(Path(args.truth).read_text())
    spacing = _meta(s).pixel_spacing_mm
    px = msd_px(truth, pred)
    print(json.dumps({"msd_px": px, "msd_mm": px * spacing, "pixel_spacing_mm": spacing}))
    return 0


def cmd_synth(args, s):
    params = SynthParams(**s)
    out = Path(args.out)
    entries = write_dataset(out, args.count, params)
    _sidecar(out / "manifest.json", "synth", s, {"count": args.count})
    print(json.dumps({"manifest": str(out / "manifest.json"), "entries": len(entries)}))
    return 0


def cmd_batch(args, s):
    manifest_path = Path(args.manifest)
    entries = read_manifest(manifest_path.read_text())
    config, meta = _extract_config(s), _meta(s)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = manifest_path.parent
    if s["folds"]:
        folds = split_folds(entries, s["folds"], s["split_seed"], s["split_mode"])
        cv = cross_validate(entries, folds, config, meta, s["workers"], base)
        records = [r for res in cv.results for r in res.records]
        reports = [res.report for res in cv.results if res.report is not None]
        summary = cv.summary
        splits = {f"fold{f.fold_index + 1}": f.id_to_split for f in folds}
        (out / "folds.json").write_text(json.dumps(splits, indent=2) + "\n")
    else:
        res = run_batch(entries, config, meta, s["workers"], base,
                        splits=None if s["all_splits"] else ("test",))
        records = res.records
        reports = [res.report] if res.report is not None else []
        summary = aggregate_overall(reports, records) if reports else None
    (out / "records.csv").write_text(records_csv(records))
    (out / "summary.txt").write_text(summary_table(reports, summary))
    settings = {k: v for k, v in s.items() if k != "workers"}
    _sidecar(out / "records.csv", "batch", settings, {"manifest": str(manifest_path)})
    failed = sum(not r.ok for r in records)
    for r in records:
        if not r.ok:
            log.warning("%s failed: %s", r.id, r.reason)
    print(json.dumps({"records": len(records), "failed": failed, "out_dir": str(out)}))
    return 0 if failed == 0 else 2


def cmd_overlay(args, s):
    image = _read_gray(args.image)
    truth = read_contour_csv(Path(args.truth).read_text()) if args.truth else None
    pred = read_contour_csv(Path(args.pred).read_text()) if args.pred else None
    Path(args.out).write_bytes(write_ppm(overlay(image, truth, pred)))
    print(json.dumps({"out": args.out}))
    return 0


COMMANDS = {
    "preprocess": cmd_preprocess,
    "rasterize": cmd_rasterize,
    "extract": cmd_extract,
    "eval": cmd_eval,
    "synth": cmd_synth,
    "batch": cmd_batch,
    "overlay": cmd_overlay,
}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        if not argv:
            raise UsageError(parser.format_help())
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_help())
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        settings = effective_settings(args, SUBCOMMANDS[args.command])
        return COMMANDS[args.command](args, settings)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return 1
    except (TongueCurveError, OSError, TypeError) as exc:
        print(f"tonguecurve: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

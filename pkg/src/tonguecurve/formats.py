"""Readers and writers for binary PGM/PPM rasters, contour CSV and corpus manifests.

16-bit PGM samples are big-endian.  A probability ``p`` is stored as
``floor(p * 65535 + 0.5)`` and read back as ``v / 65535``; the quantization
is idempotent, so write -> read -> write reproduces the same bytes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import FormatError, InvalidContourError, ManifestError
from .types import BinaryMask, Contour, GrayImage, ProbMap

PROB_MAXVAL = 65535
SPLITS = ("train", "valid", "test", "unassigned")

_WHITESPACE = b" \t\n\r\v\f"


def _parse_header(data: bytes, magic: bytes):
    """Parse a Netpbm header; returns (width, height, maxval, payload offset)."""
    if data[:2] != magic:
        raise FormatError(f"expected magic {magic.decode()!r}, got {data[:2]!r}", offset=0)
    pos = 2
    fields = []
    while len(fields) < 3:
        # whitespace and comments between tokens
        while pos < len(data) and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < len(data) and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        token = data[start:pos]
        if not token:
            raise FormatError("header ends before width, height and maxval", offset=start)
        if not token.isdigit():
            raise FormatError(f"non-numeric header field {token!r}", offset=start)
        fields.append((int(token), start))
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise FormatError("missing whitespace after maxval", offset=pos)
    (width, wpos), (height, hpos), (maxval, mpos) = fields
    if width < 1:
        raise FormatError("width must be >= 1", offset=wpos)
    if height < 1:
        raise FormatError("height must be >= 1", offset=hpos)
    return width, height, maxval, mpos, pos + 1


def _payload(data: bytes, offset: int, nbytes: int) -> bytes:
    have = len(data) - offset
    if have < nbytes:
        raise FormatError(f"truncated payload: need {nbytes} bytes, found {have}", offset=len(data))
    if have > nbytes:
        raise FormatError(f"{have - nbytes} trailing bytes after payload", offset=offset + nbytes)
    return data[offset:]


def read_pgm(data: bytes):
    """Decode a binary (P5) PGM.

    maxval 255 gives a :class:`GrayImage`, maxval 65535 a :class:`ProbMap`.
    """
    width, height, maxval, mpos, offset = _parse_header(data, b"P5")
    n = width * height
    if maxval == 255:
        buf = _payload(data, offset, n)
        return GrayImage(np.frombuffer(buf, dtype=np.uint8).reshape(height, width))
    if maxval == PROB_MAXVAL:
        buf = _payload(data, offset, 2 * n)
        samples = np.frombuffer(buf, dtype=">u2").reshape(height, width)
        return ProbMap(samples.astype(np.float64) / PROB_MAXVAL)
    raise FormatError(f"unsupported maxval {maxval} (expected 255 or 65535)", offset=mpos)


def quantize_prob(values: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=np.float64) * PROB_MAXVAL + 0.5).astype(np.uint16)


def write_pgm(image) -> bytes:
    """Encode a GrayImage, BinaryMask (as levels 0/255) or ProbMap as P5 PGM."""
    if isinstance(image, ProbMap):
        header = f"P5\n{image.width} {image.height}\n{PROB_MAXVAL}\n".encode("ascii")
        return header + quantize_prob(image.values).astype(">u2").tobytes()
    if isinstance(image, BinaryMask):
        pixels = (image.labels * 255).astype(np.uint8)
    elif isinstance(image, GrayImage):
        pixels = image.pixels
    else:
        raise TypeError(f"cannot write {type(image).__name__} as PGM")
    header = f"P5\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + pixels.astype(np.uint8).tobytes()


def mask_from_gray(image: GrayImage) -> BinaryMask:
    """Interpret a written mask PGM: nonzero levels are contour pixels."""
    return BinaryMask((image.pixels > 0).astype(np.uint8))


def read_ppm(data: bytes) -> np.ndarray:
    """Decode an 8-bit binary (P6) PPM into a ``(height, width, 3)`` uint8 array."""
    width, height, maxval, mpos, offset = _parse_header(data, b"P6")
    if maxval != 255:
        raise FormatError(f"unsupported PPM maxval {maxval}", offset=mpos)
    buf = _payload(data, offset, 3 * width * height)
    return np.frombuffer(buf, dtype=np.uint8).reshape(height, width, 3).copy()


def write_ppm(rgb: np.ndarray) -> bytes:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected (height, width, 3) array, got {rgb.shape}")
    height, width = rgb.shape[:2]
    return f"P6\n{width} {height}\n255\n".encode("ascii") + rgb.astype(np.uint8).tobytes()


def read_contour_csv(text: str) -> Contour:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != "x,y":
        raise FormatError("missing 'x,y' header", line=1)
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.strip().split(",")
        if len(fields) != 2:
            raise FormatError(f"expected 2 fields, got {len(fields)}", line=lineno)
        try:
            x, y = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError(f"non-integer field in {line!r}", line=lineno) from None
        if points and points[-1] == (x, y):
            raise FormatError(f"duplicate consecutive point ({x}, {y})", line=lineno)
        points.append((x, y))
    if len(points) < 2:
        raise FormatError(f"contour needs at least 2 points, got {len(points)}", line=len(lines))
    try:
        return Contour(points)
    except InvalidContourError as exc:
        raise FormatError(str(exc), line=len(lines)) from None


def write_contour_csv(contour: Contour) -> str:
    rows = "".join(f"{x},{y}\n" for x, y in contour.points.tolist())
    return "x,y\n" + rows


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    image_path: Optional[str] = None
    prob_path: Optional[str] = None
    truth_contour_path: Optional[str] = None
    speaker: str = ""
    split: str = "unassigned"


def read_manifest(text: str) -> list[ManifestEntry]:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(raw, list):
        raise ManifestError("manifest must be a JSON array")
    seen = set()
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "id" not in item:
            raise ManifestError(f"entry {i} must be an object with an 'id'")
        eid = str(item["id"])
        if eid in seen:
            raise ManifestError(f"duplicate id {eid!r} (entry {i})")
        seen.add(eid)
        split = item.get("split", "unassigned")
        if split not in SPLITS:
            raise ManifestError(f"entry {eid!r}: invalid split {split!r}, expected one of {SPLITS}")
        entries.append(
            ManifestEntry(
                id=eid,
                image_path=item.get("image_path"),
                prob_path=item.get("prob_path"),
                truth_contour_path=item.get("truth_contour_path"),
                speaker=str(item.get("speaker", "")),
                split=split,
            )
        )
    return entries


def write_manifest(entries) -> str:
    return json.dumps([asdict(e) for e in entries], indent=2) + "\n"

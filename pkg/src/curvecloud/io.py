"""Dataset readers and run manifests for the command-line tools.

Two input shapes are understood: NDJSON sequence files (one sketch per
line, either the public waypoint layout {"drawing": [[xs],[ys]], ...} or a
plain {"strokes": [[[x,y],...],...]}) and binary or ASCII PGM rasters,
which are binarized, thinned, and clustered into stroke polylines.
"""

import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import __version__
from .prep import RasterImage, binarize_thin, cluster_strokes


@dataclass(frozen=True)
class SketchRecord:
    """One sketch as read from disk: ordered stroke polylines plus where
    they came from."""

    strokes: tuple
    label: str | None = None
    source: str = "sequence"

    def __post_init__(self):
        if self.source not in ("sequence", "raster"):
            raise ValueError("source must be 'sequence' or 'raster'")
        strokes = []
        for s in self.strokes:
            arr = np.asarray(s, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
                raise ValueError(
                    "every stroke must be an (n, 2) polyline with n >= 2"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError("stroke coordinates must be finite")
            strokes.append(arr)
        if not strokes:
            raise ValueError("a sketch record needs at least one stroke")
        object.__setattr__(self, "strokes", tuple(strokes))


def _strokes_of_line(doc):
    if not isinstance(doc, dict):
        raise ValueError("line is not a JSON object")
    if "drawing" in doc:
        raw = doc["drawing"]
        strokes = []
        for arrs in raw:
            # waypoint layout: [xs, ys] (raw exports append extra
            # channels; only the first two are coordinates)
            if len(arrs) < 2:
                raise ValueError("drawing stroke needs x and y arrays")
            xs, ys = arrs[0], arrs[1]
            if len(xs) != len(ys):
                raise ValueError("x and y arrays differ in length")
            if len(xs) < 2:
                continue
            strokes.append(np.stack([np.asarray(xs, float), np.asarray(ys, float)], axis=1))
    elif "strokes" in doc:
        strokes = []
        for s in doc["strokes"]:
            arr = np.asarray(s, dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise ValueError("stroke is not a list of [x, y] points")
            if arr.shape[0] < 2:
                continue
            strokes.append(arr)
    else:
        raise ValueError("no 'drawing' or 'strokes' field")
    if not strokes:
        raise ValueError("no stroke with at least two points")
    label = doc.get("label", doc.get("word"))
    return strokes, label


def read_ndjson(path) -> list:
    """Read a sequence dataset: one JSON sketch per line.

    Malformed lines are skipped with a warning each; a file with no valid
    record at all is an error.
    """
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                strokes, label = _strokes_of_line(doc)
            except (ValueError, TypeError, KeyError) as e:
                warnings.warn(f"{path}:{lineno}: skipping sketch: {e}")
                continue
            records.append(
                SketchRecord(tuple(strokes), label=label, source="sequence")
            )
    if not records:
        raise ValueError(f"{path}: no valid sketch records")
    return records


def _pgm_tokens(blob: bytes):
    """Header tokens of a PGM file, comment-aware; returns (tokens, offset
    of the byte right after the fourth token's trailing whitespace)."""
    tokens = []
    i = 0
    n = len(blob)
    while len(tokens) < 4 and i < n:
        c = blob[i : i + 1]
        if c == b"#":
            while i < n and blob[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        if c.isspace():
            i += 1
            continue
        j = i
        while j < n and not blob[j : j + 1].isspace() and blob[j : j + 1] != b"#":
            j += 1
        tokens.append(blob[i:j])
        i = j
    if len(tokens) < 4:
        raise ValueError("truncated PGM header")
    # exactly one whitespace byte separates the maxval from the raster
    return tokens, i + 1


def read_pgm(path) -> RasterImage:
    """Parse a P2 (ASCII) or P5 (binary) PGM file with maxval up to 255."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:2] not in (b"P2", b"P5"):
        raise ValueError(f"{path}: unsupported format (want PGM P2 or P5)")
    tokens, data_at = _pgm_tokens(blob)
    try:
        width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    except ValueError as e:
        raise ValueError(f"{path}: bad PGM header: {e}") from e
    if width < 1 or height < 1:
        raise ValueError(f"{path}: bad PGM dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise ValueError(f"{path}: unsupported maxval {maxval} (want 1..255)")
    count = width * height
    if blob[:2] == b"P5":
        data = blob[data_at : data_at + count]
        if len(data) < count:
            raise ValueError(f"{path}: truncated PGM raster")
        pixels = np.frombuffer(data, dtype=np.uint8).reshape(height, width)
    else:
        fields = blob[data_at:].split()
        if len(fields) < count:
            raise ValueError(f"{path}: truncated PGM raster")
        pixels = np.array(fields[:count], dtype=np.uint8).reshape(height, width)
    if pixels.max(initial=0) > maxval:
        raise ValueError(f"{path}: pixel value exceeds maxval")
    if maxval != 255:
        pixels = (pixels.astype(np.uint16) * 255 // maxval).astype(np.uint8)
    return RasterImage(width, height, pixels)


def _leftmost_key(polyline: np.ndarray):
    idx = np.lexsort((polyline[:, 1], polyline[:, 0]))[0]
    return (float(polyline[idx, 0]), float(polyline[idx, 1]))


def read_raster(path, thresh: int = 128, ink: str = "dark",
                cluster: str = "components", k_hint=None) -> SketchRecord:
    """Read a PGM image and lift its ink into stroke polylines.

    Binarizes and thins the image, clusters the skeleton pixels into
    strokes, and orders strokes by their leftmost point so repeated runs
    agree byte for byte.
    """
    img = read_pgm(path)
    points = binarize_thin(img, thresh=thresh, ink=ink)
    if points.shape[0] == 0:
        raise ValueError(f"{path}: empty ink")
    strokes = cluster_strokes(points, method=cluster, k_hint=k_hint)
    usable = [s for s in strokes if s.shape[0] >= 2]
    dropped = len(strokes) - len(usable)
    if dropped:
        warnings.warn(f"{path}: dropped {dropped} single-pixel stroke(s)")
    if not usable:
        raise ValueError(f"{path}: no stroke with at least two points")
    usable.sort(key=_leftmost_key)
    return SketchRecord(tuple(usable), label=None, source="raster")


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one command invocation bit for bit."""

    command: str
    inputs: tuple
    outputs: tuple
    config: dict
    seed: int
    version: str = __version__
    outcomes: tuple = ()

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "outcomes": list(self.outcomes),
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"

    def write_beside(self, primary_output: str) -> str:
        path = f"{primary_output}.manifest.json"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json())
        return path

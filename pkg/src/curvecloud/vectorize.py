"""Whole-sketch vectorization.

Normalizes a sketch into the unit disc, fits every stroke independently,
and assembles the results into a compact parametric form that can be
serialized to JSON ("curvecloud-1" schema) or rendered to SVG.  Curves are
stored position-free: each control polygon starts at the origin and an
offset vector carries the placement, so translating the input moves only
the frame and offsets.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .bezier import RenderGrid, render_fixed_degree
from .fitting import FitConfig, FitResult, fit_stroke
from .losses import SliceSet, mse_seq, swd
from .prep import SketchFrame, StrokeCloud, normalize_sketch

_ANCHOR_TOL = 1e-12


@dataclass(frozen=True)
class CurveRecord:
    """One fitted stroke: control points anchored at the origin, a hard
    degree, and the offset placing the curve inside the normalized frame."""

    points: np.ndarray
    degree: int
    offset: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        off = np.asarray(self.offset, dtype=float).reshape(2)
        if self.degree < 1:
            raise ValueError("curve degree must be at least 1")
        if pts.shape != (self.degree + 1, 2):
            raise ValueError(
                f"degree {self.degree} curve needs {self.degree + 1} control "
                f"points, got shape {pts.shape}"
            )
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(off)):
            raise ValueError("curve coordinates must be finite")
        if np.abs(pts[0]).max() > _ANCHOR_TOL:
            raise ValueError("first control point must sit at the origin")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "offset", off)

    def placed(self) -> np.ndarray:
        """Control points in the normalized sketch frame."""
        return self.points + self.offset


@dataclass(frozen=True)
class CurveProvenance:
    """How the fit behind one curve went."""

    fit_term: float
    total: float
    converged: bool
    degenerate: bool
    iterations: int

    @classmethod
    def of_result(cls, res: FitResult) -> "CurveProvenance":
        return cls(
            fit_term=float(res.final_loss.fit_term),
            total=float(res.final_loss.total),
            converged=bool(res.converged),
            degenerate=bool(res.degenerate),
            iterations=len(res.trace) - 1,
        )


@dataclass(frozen=True)
class ParametricSketch:
    curves: tuple
    frame: SketchFrame
    provenance: tuple

    def __post_init__(self):
        curves = tuple(self.curves)
        prov = tuple(self.provenance)
        if not curves:
            raise ValueError("a sketch needs at least one curve")
        if len(prov) != len(curves):
            raise ValueError("one provenance entry per curve required")
        for c in curves:
            if not isinstance(c, CurveRecord):
                raise TypeError("curves must be CurveRecord instances")
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "provenance", prov)

    def __len__(self):
        return len(self.curves)


@dataclass(frozen=True)
class VectorizeReport:
    """Fit quality and storage-compactness summary for one sketch."""

    fit_terms: tuple
    mean_test_loss: float
    stroke_hist: dict
    sketch_points: int

    def __post_init__(self):
        hist = dict(self.stroke_hist)
        if sum(hist.values()) != len(self.fit_terms):
            raise ValueError("histogram counts must sum to the stroke count")
        if any(k < 2 for k in hist):
            raise ValueError("every stored curve keeps at least two points")
        object.__setattr__(self, "fit_terms", tuple(float(f) for f in self.fit_terms))
        object.__setattr__(self, "stroke_hist", hist)


def _curve_of_result(res: FitResult, stroke_offset: np.ndarray) -> CurveRecord:
    n = res.degree
    prefix = res.control_points.points[: n + 1]
    start = prefix[0]
    return CurveRecord(prefix - start, n, stroke_offset + start)


def vectorize_sketch(strokes, cfg: FitConfig):
    """Fit every stroke of a sketch and assemble the parametric result.

    Returns (ParametricSketch, VectorizeReport).  Strokes are normalized
    into the unit disc as one sketch, each is fitted independently with
    fit_stroke, and the fitted curve is stored as the degree-n prefix of
    the control polygon, translated so its first control point is the
    origin.  Degenerate strokes collapse to a point-like line and are
    flagged in the provenance rather than aborting the sketch.
    """
    strokes = list(strokes)
    if not strokes:
        raise ValueError("sketch has no strokes")
    for s in strokes:
        if not isinstance(s, StrokeCloud):
            raise TypeError("vectorize_sketch expects StrokeCloud inputs")

    normed, frame = normalize_sketch([s.absolute() for s in strokes])

    curves = []
    prov = []
    for raw_pts, src in zip(normed, strokes):
        anchored = StrokeCloud(raw_pts - raw_pts[0], raw_pts[0], src.ordered)
        res = fit_stroke(anchored, cfg)
        curves.append(_curve_of_result(res, anchored.offset))
        prov.append(CurveProvenance.of_result(res))

    sketch = ParametricSketch(tuple(curves), frame, tuple(prov))

    metric = "mse" if cfg.loss.loss_kind == "mse" else "swd"
    mean_loss = eval_fit(
        sketch,
        strokes,
        metric,
        slices=SliceSet.from_seed(cfg.seed, cfg.loss.slices),
    )
    hist = {}
    for c in curves:
        hist[c.degree + 1] = hist.get(c.degree + 1, 0) + 1
    total = sum(c.degree + 1 for c in curves) + len(curves)
    report = VectorizeReport(
        fit_terms=tuple(p.fit_term for p in prov),
        mean_test_loss=float(mean_loss),
        stroke_hist=hist,
        sketch_points=total,
    )
    return sketch, report


def _absolute_control_points(sketch: ParametricSketch, curve: CurveRecord):
    return sketch.frame.invert(curve.placed())


def eval_fit(sketch: ParametricSketch, ground_truth, metric: str = "swd",
             slices: SliceSet | None = None, seed: int = 0,
             n_slices: int = 64) -> float:
    """Mean per-stroke loss between the sketch's rendered curves and
    order-aligned ground-truth strokes, in original coordinates."""
    ground_truth = list(ground_truth)
    if len(ground_truth) != len(sketch.curves):
        raise ValueError(
            f"sketch has {len(sketch.curves)} curves but {len(ground_truth)} "
            "ground-truth strokes were given"
        )
    if metric not in ("swd", "mse"):
        raise ValueError(f"unknown metric {metric!r}; choose swd or mse")
    if metric == "swd" and slices is None:
        slices = SliceSet.from_seed(seed, n_slices)

    losses = []
    for curve, gt in zip(sketch.curves, ground_truth):
        target = gt.absolute() if isinstance(gt, StrokeCloud) else np.asarray(gt, dtype=float)
        grid = RenderGrid.uniform(len(target))
        rendered = render_fixed_degree(
            _absolute_control_points(sketch, curve), curve.degree, grid
        )
        if metric == "swd":
            losses.append(swd(rendered, target, slices))
        else:
            losses.append(mse_seq(rendered, target))
    return float(np.mean(losses))


@dataclass(frozen=True)
class LengthStats:
    """Storage histograms: points kept per stroke and per sketch."""

    per_stroke: dict
    per_sketch: dict


def length_stats(sketches) -> LengthStats:
    """Histogram the stored point counts of a corpus.

    A stroke of degree n keeps n+1 control points; a sketch additionally
    stores one offset per stroke, counted as one point each.
    """
    sketches = list(sketches)
    if not sketches:
        raise ValueError("no sketches given")
    per_stroke = {}
    per_sketch = {}
    for sk in sketches:
        total = 0
        for c in sk.curves:
            per_stroke[c.degree + 1] = per_stroke.get(c.degree + 1, 0) + 1
            total += c.degree + 1
        total += len(sk.curves)
        per_sketch[total] = per_sketch.get(total, 0) + 1
    return LengthStats(per_stroke, per_sketch)


# -- serialization ----------------------------------------------------------

_SCHEMA = "curvecloud-1"


def _num(x) -> str:
    v = float(x)
    if not math.isfinite(v):
        raise ValueError("cannot serialize a non-finite number")
    return format(v, ".17g")


def _pair(p) -> str:
    return f"[{_num(p[0])},{_num(p[1])}]"


def _curve_json(c: CurveRecord) -> str:
    pts = ",".join(_pair(row) for row in c.points)
    return (
        f'{{"degree":{c.degree},"offset":{_pair(c.offset)},'
        f'"points":[{pts}]}}'
    )


def _prov_json(p: CurveProvenance) -> str:
    return (
        f'{{"fit_term":{_num(p.fit_term)},"total":{_num(p.total)},'
        f'"converged":{"true" if p.converged else "false"},'
        f'"degenerate":{"true" if p.degenerate else "false"},'
        f'"iterations":{p.iterations}}}'
    )


def to_json(sketch: ParametricSketch) -> str:
    """Serialize a sketch to the "curvecloud-1" document, one line of JSON.

    Floats are written with 17 significant digits, which reads back to the
    exact same doubles."""
    frame = sketch.frame
    parts = [
        f'"schema":"{_SCHEMA}"',
        f'"frame":{{"center":{_pair(frame.center)},"scale":{_num(frame.scale)},'
        f'"degenerate":{"true" if frame.degenerate else "false"}}}',
        '"curves":[' + ",".join(_curve_json(c) for c in sketch.curves) + "]",
        '"provenance":[' + ",".join(_prov_json(p) for p in sketch.provenance) + "]",
    ]
    return "{" + ",".join(parts) + "}\n"


def from_json(text: str) -> ParametricSketch:
    """Parse a "curvecloud-1" document back into a ParametricSketch."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed sketch document: {e}") from e
    if not isinstance(doc, dict):
        raise ValueError("malformed sketch document: not an object")
    schema = doc.get("schema")
    if schema != _SCHEMA:
        raise ValueError(f"unsupported schema {schema!r}; expected {_SCHEMA!r}")
    try:
        fr = doc["frame"]
        frame = SketchFrame(
            np.asarray(fr["center"], dtype=float),
            float(fr["scale"]),
            bool(fr["degenerate"]),
        )
        curves = tuple(
            CurveRecord(
                np.asarray(c["points"], dtype=float),
                int(c["degree"]),
                np.asarray(c["offset"], dtype=float),
            )
            for c in doc["curves"]
        )
        prov = tuple(
            CurveProvenance(
                fit_term=float(p["fit_term"]),
                total=float(p["total"]),
                converged=bool(p["converged"]),
                degenerate=bool(p["degenerate"]),
                iterations=int(p["iterations"]),
            )
            for p in doc["provenance"]
        )
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed sketch document: {e}") from e
    return ParametricSketch(curves, frame, prov)


# -- SVG --------------------------------------------------------------------


@dataclass(frozen=True)
class SvgOptions:
    samples_per_curve: int = 64
    stroke_width: float = 1.0
    exact_low_degree: bool = True

    def __post_init__(self):
        if self.samples_per_curve < 2:
            raise ValueError("samples_per_curve must be at least 2")
        if self.stroke_width <= 0:
            raise ValueError("stroke width must be positive")


def _path_d(cps: np.ndarray, degree: int, opts: SvgOptions) -> str:
    head = f"M {_num(cps[0, 0])} {_num(cps[0, 1])}"
    if opts.exact_low_degree and degree <= 3:
        cmd = {1: "L", 2: "Q", 3: "C"}[degree]
        coords = " ".join(f"{_num(p[0])} {_num(p[1])}" for p in cps[1:])
        return f"{head} {cmd} {coords}"
    grid = RenderGrid.uniform(opts.samples_per_curve)
    samples = render_fixed_degree(cps, degree, grid)
    coords = " ".join(f"L {_num(p[0])} {_num(p[1])}" for p in samples[1:])
    return f"{head} {coords}"


def to_svg(sketch: ParametricSketch, opts: SvgOptions | None = None) -> str:
    """Render the sketch as a standalone SVG document.

    Degrees 1 to 3 are emitted as native line/quadratic/cubic path
    commands when exact_low_degree is on; higher degrees are sampled
    polylines.  Coordinates are in the original (denormalized) frame; a
    group transform flips the y axis so y-up data displays upright.
    """
    opts = opts or SvgOptions()
    all_pts = []
    paths = []
    for curve in sketch.curves:
        cps = _absolute_control_points(sketch, curve)
        paths.append(_path_d(cps, curve.degree, opts))
        grid = RenderGrid.uniform(max(opts.samples_per_curve, 8))
        all_pts.append(render_fixed_degree(cps, curve.degree, grid))
        all_pts.append(cps)
    pts = np.vstack(all_pts)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    pad = 0.05 * float(span.max()) + opts.stroke_width
    x0, y0 = lo - pad
    w, h = (hi - lo) + 2 * pad
    # flip y about the viewBox midline so the y-up sketch displays upright
    flip = f"matrix(1 0 0 -1 0 {_num(y0 + y0 + h)})"
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_num(x0)} {_num(y0)} {_num(w)} {_num(h)}">',
        f'<g transform="{flip}" fill="none" stroke="black" '
        f'stroke-width="{_num(opts.stroke_width)}" stroke-linecap="round">',
    ]
    for d in paths:
        lines.append(f'<path d="{d}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"

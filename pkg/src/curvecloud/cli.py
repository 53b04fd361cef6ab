"""Command-line surface.

Subcommands:
  fit-stroke  fit one stroke from a sequence file and report the result
  vectorize   turn a sketch (NDJSON or PGM) into parametric curves
  segment     cluster a raster into stroke polylines, emitted as NDJSON
  eval        mean test loss of a saved sketch against ground truth
  stats       storage histograms over saved sketch documents

All outputs are deterministic byte for byte for a fixed invocation; batch
outputs are accompanied by a manifest recording the full configuration.
"""

import argparse
import json
import sys
import warnings

from . import __version__
from .fitting import FitConfig, fit_stroke
from .io import RunManifest, SketchRecord, read_ndjson, read_raster
from .losses import LossConfig
from .prep import StrokeCloud, normalize_sketch, split_strokes
from .vectorize import (
    SvgOptions,
    _num,
    eval_fit,
    from_json,
    length_stats,
    to_json,
    to_svg,
    vectorize_sketch,
)


class FlagError(ValueError):
    """A flag failed validation; the message names the flag."""


def _check(cond: bool, message: str):
    if not cond:
        raise FlagError(message)


def _add_fit_flags(p: argparse.ArgumentParser):
    p.add_argument("--max-degree", type=int, default=9,
                   help="largest Bezier degree a stroke may use (default 9)")
    p.add_argument("--granularity", type=int, default=128,
                   help="points per stroke after resampling (default 128)")
    p.add_argument("--lambda-d", type=float, default=1e-3,
                   help="degree regularizer weight (default 1e-3)")
    p.add_argument("--lambda-c", type=float, default=5e-2,
                   help="control polygon cohesion weight (default 5e-2)")
    p.add_argument("--loss", choices=("swd", "mse", "swd+mse"), default="swd",
                   help="fit term (default swd)")
    p.add_argument("--slices", type=int, default=64,
                   help="projection directions for swd (default 64)")
    p.add_argument("--tau", type=float, default=0.1,
                   help="degree binning temperature (default 0.1)")
    p.add_argument("--iters", type=int, default=500,
                   help="optimizer iterations (default 500)")
    p.add_argument("--lr", type=float, default=0.02,
                   help="optimizer learning rate (default 0.02)")
    p.add_argument("--seed", type=int, default=0,
                   help="random seed for slice directions (default 0)")


def _add_prep_flags(p: argparse.ArgumentParser):
    p.add_argument("--angle-thresh", type=float, default=60.0,
                   help="corner-splitting angle in degrees (default 60)")
    p.add_argument("--max-stroke-points", type=int, default=100,
                   help="longest polyline kept unsplit (default 100)")


def _fit_config(args) -> FitConfig:
    _check(args.max_degree >= 1, "--max-degree must be at least 1")
    _check(args.granularity >= args.max_degree + 1,
           "--granularity must be at least --max-degree + 1")
    _check(args.iters >= 1, "--iters must be at least 1")
    _check(args.lr > 0, "--lr must be positive")
    _check(args.slices >= 1, "--slices must be at least 1")
    _check(args.tau > 0, "--tau must be positive")
    _check(args.lambda_d >= 0, "--lambda-d must be non-negative")
    _check(args.lambda_c >= 0, "--lambda-c must be non-negative")
    loss = LossConfig(
        loss_kind=args.loss,
        lambda_d=args.lambda_d,
        lambda_c=args.lambda_c,
        slices=args.slices,
        tau=args.tau,
    )
    return FitConfig(
        max_degree=args.max_degree,
        granularity=args.granularity,
        loss=loss,
        iters=args.iters,
        lr=args.lr,
        seed=args.seed,
    )


def _config_dump(args) -> dict:
    keys = ("max_degree", "granularity", "lambda_d", "lambda_c", "loss",
            "slices", "tau", "iters", "lr", "seed", "angle_thresh",
            "max_stroke_points", "cluster", "index", "stroke")
    return {k: getattr(args, k) for k in keys if hasattr(args, k)}


def _write_text(path: str, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _prep_flags_ok(args):
    _check(0 < args.angle_thresh <= 180,
           "--angle-thresh must lie in (0, 180] degrees")
    _check(args.max_stroke_points >= 2,
           "--max-stroke-points must be at least 2")


def _prepare_clouds(record, args) -> list:
    """Shared sequence preprocessing: corner-split every polyline, then
    resample each piece to the configured granularity."""
    clouds = []
    for poly in record.strokes:
        for part in split_strokes(poly, args.angle_thresh, args.max_stroke_points):
            try:
                clouds.append(StrokeCloud.from_polyline(part, args.granularity))
            except ValueError as e:
                warnings.warn(f"skipping degenerate stroke piece: {e}")
    if not clouds:
        raise ValueError("no usable strokes after preprocessing")
    return clouds


def _read_record(path: str, args) -> SketchRecord:
    if path.endswith(".pgm"):
        cluster = getattr(args, "cluster", "components")
        return read_raster(path, cluster=cluster)
    records = read_ndjson(path)
    index = getattr(args, "index", 0)
    _check(0 <= index < len(records),
           f"--index must lie in [0, {len(records) - 1}] for this file")
    return records[index]


def _fit_result_json(res, frame) -> str:
    pts = ",".join(
        f"[{_num(p[0])},{_num(p[1])}]" for p in res.control_points.points
    )
    bd = res.final_loss
    return (
        "{"
        f'"frame":{{"center":[{_num(frame.center[0])},{_num(frame.center[1])}],'
        f'"scale":{_num(frame.scale)}}},'
        f'"degree":{res.degree},'
        f'"raw":{_num(res.degree_param.raw)},'
        f'"value":{_num(res.degree_param.value)},'
        f'"converged":{"true" if res.converged else "false"},'
        f'"degenerate":{"true" if res.degenerate else "false"},'
        f'"iterations":{len(res.trace) - 1},'
        f'"control_points":[{pts}],'
        f'"final":{{"fit":{_num(bd.fit_term)},"degree_reg":{_num(bd.degree_term)},'
        f'"ctrl_reg":{_num(bd.ctrl_term)},"total":{_num(bd.total)}}}'
        "}\n"
    )


def _trace_csv(trace) -> str:
    lines = ["iter,fit,degree_reg,ctrl_reg,total"]
    for i, bd in enumerate(trace):
        lines.append(
            f"{i},{_num(bd.fit_term)},{_num(bd.degree_term)},"
            f"{_num(bd.ctrl_term)},{_num(bd.total)}"
        )
    return "\n".join(lines) + "\n"


def cmd_fit_stroke(args) -> int:
    cfg = _fit_config(args)
    record = _read_record(args.input, args)
    _check(0 <= args.stroke < len(record.strokes),
           f"--stroke must lie in [0, {len(record.strokes) - 1}] for this sketch")
    # the stroke is normalized into the unit disc on its own so the
    # default regularizer weights act at their intended scale
    normed, frame = normalize_sketch([record.strokes[args.stroke]])
    stroke = StrokeCloud.from_polyline(normed[0], cfg.granularity)
    res = fit_stroke(stroke, cfg)
    doc = _fit_result_json(res, frame)
    outputs = []
    if args.out_json:
        _write_text(args.out_json, doc)
        outputs.append(args.out_json)
    else:
        sys.stdout.write(doc)
    if args.out_csv:
        _write_text(args.out_csv, _trace_csv(res.trace))
        outputs.append(args.out_csv)
    if outputs:
        manifest = RunManifest(
            command="fit-stroke",
            inputs=(args.input,),
            outputs=tuple(outputs),
            config=_config_dump(args),
            seed=args.seed,
            outcomes=(f"degree={res.degree}",),
        )
        manifest.write_beside(outputs[0])
    return 0


def cmd_vectorize(args) -> int:
    cfg = _fit_config(args)
    _prep_flags_ok(args)
    record = _read_record(args.input, args)
    clouds = _prepare_clouds(record, args)
    sketch, report = vectorize_sketch(clouds, cfg)
    doc = to_json(sketch)
    svg = to_svg(sketch, SvgOptions())
    outputs = []
    if args.out_json:
        _write_text(args.out_json, doc)
        outputs.append(args.out_json)
    if args.out_svg:
        _write_text(args.out_svg, svg)
        outputs.append(args.out_svg)
    summary = {
        "strokes": len(sketch),
        "mean_test_loss": report.mean_test_loss,
        "sketch_points": report.sketch_points,
        "stroke_hist": {str(k): v for k, v in sorted(report.stroke_hist.items())},
    }
    sys.stdout.write(json.dumps(summary, sort_keys=True) + "\n")
    if not outputs:
        sys.stdout.write(doc)
    else:
        manifest = RunManifest(
            command="vectorize",
            inputs=(args.input,),
            outputs=tuple(outputs),
            config=_config_dump(args),
            seed=args.seed,
            outcomes=(f"strokes={len(sketch)}",),
        )
        manifest.write_beside(outputs[0])
    return 0


def cmd_segment(args) -> int:
    _check(args.input.endswith(".pgm"),
           "segment reads PGM rasters; pass a .pgm file")
    record = read_raster(args.input, cluster=args.cluster)
    doc = {
        "source": "raster",
        "strokes": [s.tolist() for s in record.strokes],
    }
    line = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if args.out_json:
        _write_text(args.out_json, line)
        manifest = RunManifest(
            command="segment",
            inputs=(args.input,),
            outputs=(args.out_json,),
            config=_config_dump(args),
            seed=0,
            outcomes=(f"strokes={len(record.strokes)}",),
        )
        manifest.write_beside(args.out_json)
    else:
        sys.stdout.write(line)
    return 0


def cmd_eval(args) -> int:
    _check(args.loss in ("swd", "mse"),
           "--loss must be swd or mse for eval")
    _check(args.slices >= 1, "--slices must be at least 1")
    _prep_flags_ok(args)
    _check(args.granularity >= 2, "--granularity must be at least 2")
    with open(args.sketch, "r", encoding="utf-8") as fh:
        sketch = from_json(fh.read())
    record = _read_record(args.truth, args)
    clouds = _prepare_clouds(record, args)
    loss = eval_fit(sketch, clouds, args.loss, seed=args.seed,
                    n_slices=args.slices)
    sys.stdout.write(_num(loss) + "\n")
    return 0


def cmd_stats(args) -> int:
    sketches = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            sketches.append(from_json(fh.read()))
    stats = length_stats(sketches)
    lines = ["kind,value,count"]
    for value, count in sorted(stats.per_stroke.items()):
        lines.append(f"stroke,{value},{count}")
    for value, count in sorted(stats.per_sketch.items()):
        lines.append(f"sketch,{value},{count}")
    text = "\n".join(lines) + "\n"
    if args.out_csv:
        _write_text(args.out_csv, text)
        manifest = RunManifest(
            command="stats",
            inputs=tuple(args.inputs),
            outputs=(args.out_csv,),
            config={},
            seed=0,
            outcomes=(f"sketches={len(sketches)}",),
        )
        manifest.write_beside(args.out_csv)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvecloud",
        description="Fit variable-degree Bezier curves to point-cloud "
                    "strokes and vectorize sketches.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit-stroke", help="fit one stroke from a sequence file")
    p.add_argument("input", help="NDJSON sketch file")
    p.add_argument("--index", type=int, default=0, help="sketch line to use")
    p.add_argument("--stroke", type=int, default=0, help="stroke within the sketch")
    _add_fit_flags(p)
    p.add_argument("--out-json", help="write the fit result here")
    p.add_argument("--out-csv", help="write the loss trace here")
    p.set_defaults(func=cmd_fit_stroke)

    p = sub.add_parser("vectorize", help="vectorize a sketch to curves")
    p.add_argument("input", help="NDJSON sketch file or PGM raster")
    p.add_argument("--index", type=int, default=0, help="sketch line to use")
    _add_fit_flags(p)
    _add_prep_flags(p)
    p.add_argument("--cluster", choices=("components", "spectral"),
                   default="components", help="raster stroke clustering")
    p.add_argument("--out-json", help="write the parametric sketch here")
    p.add_argument("--out-svg", help="write the rendered SVG here")
    p.set_defaults(func=cmd_vectorize)

    p = sub.add_parser("segment", help="cluster a raster into strokes")
    p.add_argument("input", help="PGM raster")
    p.add_argument("--cluster", choices=("components", "spectral"),
                   default="components", help="stroke clustering method")
    p.add_argument("--out-json", help="write the stroke NDJSON here")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("eval", help="mean test loss of a sketch document")
    p.add_argument("sketch", help="parametric sketch JSON")
    p.add_argument("truth", help="ground-truth NDJSON or PGM")
    p.add_argument("--index", type=int, default=0, help="sketch line to use")
    _add_fit_flags(p)
    _add_prep_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="storage histograms over sketch documents")
    p.add_argument("inputs", nargs="+", help="parametric sketch JSON files")
    p.add_argument("--out-csv", help="write the histogram CSV here")
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FlagError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

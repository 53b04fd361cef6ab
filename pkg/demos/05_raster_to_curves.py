"""Raster glyph to parametric curves.

Builds a tiny PGM of a 'T' in memory, segments the ink into strokes via
thinning plus connected components, and vectorizes each stroke.  The bar
splits at the stem junction, so three curves come out.
"""

from pathlib import Path

import numpy as np

from curvecloud.fitting import FitConfig
from curvecloud.io import read_raster
from curvecloud.losses import LossConfig
from curvecloud.vectorize import to_svg, vectorize_sketch


def write_glyph(path: Path):
    px = np.full((16, 16), 255, dtype=np.uint8)
    px[2:5, 2:14] = 0
    px[5:14, 7:10] = 0
    path.write_bytes(b"P5\n16 16\n255\n" + px.tobytes())


def main():
    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    pgm = out / "tee.pgm"
    write_glyph(pgm)

    record = read_raster(pgm)
    print(f"segmented strokes: {len(record.strokes)}")
    for i, s in enumerate(record.strokes):
        print(f"  stroke {i}: {s.shape[0]} skeleton points, "
              f"starts near ({s[0, 0]:.0f}, {s[0, 1]:.0f})")

    from curvecloud.prep import StrokeCloud

    clouds = [StrokeCloud.from_polyline(s, 128) for s in record.strokes]
    cfg = FitConfig(
        max_degree=9,
        granularity=128,
        loss=LossConfig(loss_kind="swd", lambda_d=1e-3, lambda_c=5e-2, tau=0.1),
        iters=500,
        lr=0.02,
        seed=0,
    )
    sketch, report = vectorize_sketch(clouds, cfg)
    print(f"curves: {len(sketch)}, degrees {[c.degree for c in sketch.curves]}")
    print(f"mean test loss: {report.mean_test_loss:.4e}")

    (out / "tee.svg").write_text(to_svg(sketch))
    print(f"wrote {out / 'tee.svg'}")


if __name__ == "__main__":
    main()

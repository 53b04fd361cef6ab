"""Stored-point statistics over a small random corpus.

Each fitted stroke keeps at most max_degree+1 control points plus one
offset, so a vectorized sketch is dramatically smaller than its resampled
input clouds regardless of how wiggly the input was.
"""

import numpy as np

from curvecloud.bezier import RenderGrid, render_fixed_degree
from curvecloud.fitting import FitConfig
from curvecloud.losses import LossConfig
from curvecloud.prep import StrokeCloud
from curvecloud.vectorize import length_stats, vectorize_sketch


def random_corpus(n_sketches, rng):
    grid = RenderGrid.uniform(128)
    corpus = []
    for _ in range(n_sketches):
        strokes = []
        for _ in range(int(rng.integers(2, 5))):
            degree = int(rng.integers(1, 4))
            ctrl = rng.uniform(-0.8, 0.8, (degree + 1, 2)) + rng.uniform(-2, 2, (1, 2))
            pts = render_fixed_degree(ctrl, degree, grid)
            strokes.append(StrokeCloud(pts - pts[0], pts[0]))
        corpus.append(strokes)
    return corpus


def main():
    rng = np.random.default_rng(21)
    corpus = random_corpus(6, rng)
    cfg = FitConfig(
        max_degree=9,
        granularity=128,
        loss=LossConfig(loss_kind="swd", lambda_d=1e-2, lambda_c=5e-2, tau=0.1),
        iters=300,
        lr=0.02,
        seed=0,
    )

    sketches = []
    ratios = []
    for strokes in corpus:
        sketch, report = vectorize_sketch(strokes, cfg)
        sketches.append(sketch)
        ratios.append(report.sketch_points / (len(strokes) * cfg.granularity))

    stats = length_stats(sketches)
    print("stored points per stroke (degree+1 -> count):")
    for k in sorted(stats.per_stroke):
        print(f"  {k:2d}: {'#' * stats.per_stroke[k]} ({stats.per_stroke[k]})")
    print()
    print("stored points per sketch (offsets included):")
    for k in sorted(stats.per_sketch):
        print(f"  {k:3d}: {stats.per_sketch[k]}")
    print()
    print(f"stored/resampled ratio: min {min(ratios):.4f}, max {max(ratios):.4f}")


if __name__ == "__main__":
    main()

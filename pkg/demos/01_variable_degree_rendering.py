"""Walk through the variable-degree renderer.

A curve is stored as a full bank of N+1 control points plus one scalar
degree parameter.  Soft-binning the scalar gives a mixture over degrees
1..N; a one-hot bin vector reproduces plain fixed-degree rendering on the
matching control-point prefix exactly, which is what makes the continuous
degree search trustworthy.
"""

import numpy as np

from curvecloud.bezier import (
    ControlPolygon,
    DegreeParam,
    RenderGrid,
    de_casteljau,
    hard_degree,
    one_hot_bins,
    render_fixed_degree,
    render_with_bins,
    selectors,
    soft_bin,
)


def main():
    rng = np.random.default_rng(3)
    grid = RenderGrid.uniform(9)
    pts = rng.normal(size=(10, 2))
    poly = ControlPolygon(pts)

    print("== fixed-degree rendering vs de Casteljau ==")
    for degree in (1, 3, 5):
        curve = render_fixed_degree(pts[: degree + 1], degree, grid)
        oracle = np.array([de_casteljau(pts[: degree + 1], t) for t in grid.ts])
        print(f"degree {degree}: max |matrix - de Casteljau| = "
              f"{np.abs(curve - oracle).max():.2e}")

    print()
    print("== soft degree selection ==")
    # raw is unconstrained; sigmoid squashes it, bins split (0, 1) into N slots
    for raw in (-2.0, 0.0, 2.0):
        d = DegreeParam(raw)
        bins = soft_bin(d, 9, 0.1)
        mask = selectors(bins).point_mask
        print(f"raw {raw:+.1f} -> value {d.value:.3f}, hard degree "
              f"{hard_degree(d, 9)}, soft point count {mask.sum():.2f}")

    print()
    print("== one-hot bins reproduce the fixed-degree curve ==")
    blended = render_with_bins(poly, one_hot_bins(4, 9), grid)
    direct = render_fixed_degree(pts[:5], 4, grid)
    print(f"max abs difference at degree 4: {np.abs(blended - direct).max():.2e}")


if __name__ == "__main__":
    main()

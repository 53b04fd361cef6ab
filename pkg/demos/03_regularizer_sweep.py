"""Sweep the two regularizer weights on a fixed stroke.

Raising the degree weight trades fit quality for fewer stored points.
Raising the cohesion weight pulls the masked control polygon tighter.
"""

import numpy as np

from curvecloud.bezier import RenderGrid, render_fixed_degree, selectors, soft_bin
from curvecloud.fitting import FitConfig, fit_stroke
from curvecloud.losses import LossConfig
from curvecloud.prep import StrokeCloud


def line_stroke():
    ends = np.random.default_rng(42).uniform(-1, 1, (2, 2))
    pts = render_fixed_degree(ends, 1, RenderGrid.uniform(128))
    return StrokeCloud(pts - pts[0], pts[0])


def wavy_stroke():
    t = np.linspace(0.0, 1.0, 128)
    pts = np.stack([2 * t - 1, 0.4 * np.sin(3 * np.pi * t)], axis=1)
    return StrokeCloud(pts - pts[0], pts[0])


def cfg_with(lambda_d, lambda_c):
    return FitConfig(
        max_degree=9,
        granularity=128,
        loss=LossConfig(loss_kind="swd", lambda_d=lambda_d, lambda_c=lambda_c, tau=0.1),
        iters=500,
        lr=0.02,
        seed=0,
    )


def masked_length(res):
    bins = soft_bin(res.degree_param, res.control_points.max_degree, 0.1)
    mask = selectors(bins).point_mask
    seg = np.linalg.norm(np.diff(res.control_points.points, axis=0), axis=1)
    return float((seg * mask[1:]).sum())


def main():
    line = line_stroke()
    print("degree pressure on a straight stroke (lambda_c fixed at 5e-2):")
    for lam in (0.0, 1e-3, 1e-2, 1e-1):
        res = fit_stroke(line, cfg_with(lam, 5e-2))
        print(f"  lambda_d={lam:<6g} degree {res.degree}, stored points "
              f"{res.degree + 1}, fit {res.final_loss.fit_term:.3e}")

    wave = wavy_stroke()
    print()
    print("cohesion on a wavy stroke (lambda_d fixed at 1e-3):")
    for lam in (0.0, 5e-2):
        res = fit_stroke(wave, cfg_with(1e-3, lam))
        print(f"  lambda_c={lam:<6g} masked polygon length {masked_length(res):.3f}, "
              f"fit {res.final_loss.fit_term:.3e}")


if __name__ == "__main__":
    main()

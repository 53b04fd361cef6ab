"""Fitting objectives: sliced transport distance, sequential MSE, and the
degree / control-point regularizers, combined into one breakdown."""

from dataclasses import dataclass

import numpy as np

from .bezier import (
    ControlPolygon,
    DegreeParam,
    RenderGrid,
    masked_basis,
    selectors,
    soft_bin,
)
from .prep import StrokeCloud

LOSS_KINDS = ("swd", "mse", "swd+mse", "none")


@dataclass(frozen=True)
class SliceSet:
    """Bundle of unit projection directions for the sliced distance."""

    dirs: np.ndarray  # (L, 2)
    seed: int | None = None

    def __post_init__(self):
        dirs = np.asarray(self.dirs, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] != 2 or dirs.shape[0] < 1:
            raise ValueError("slice directions must form an (L, 2) array, L >= 1")
        norms = np.linalg.norm(dirs, axis=1)
        if np.abs(norms - 1.0).max() > 1e-12:
            raise ValueError("slice directions must be unit vectors")
        object.__setattr__(self, "dirs", dirs)

    def __len__(self) -> int:
        return self.dirs.shape[0]

    @classmethod
    def from_seed(cls, seed: int, count: int) -> "SliceSet":
        if count < 1:
            raise ValueError("need at least one slice direction")
        rng = np.random.default_rng(seed)
        angles = rng.uniform(0.0, 2.0 * np.pi, count)
        return cls(np.column_stack([np.cos(angles), np.sin(angles)]), seed)


@dataclass(frozen=True)
class LossConfig:
    loss_kind: str = "swd"
    lambda_d: float = 1e-3
    lambda_c: float = 5e-2
    mse_weight: float = 1.0
    slices: int = 64
    tau: float = 0.1
    resample_slices: bool = False

    def __post_init__(self):
        if self.loss_kind not in LOSS_KINDS:
            raise ValueError(
                f"loss_kind must be one of {LOSS_KINDS}, got {self.loss_kind!r}"
            )
        if self.lambda_d < 0 or self.lambda_c < 0 or self.mse_weight < 0:
            raise ValueError("loss weights must be non-negative")
        if self.slices < 1:
            raise ValueError("slices must be at least 1")
        if self.tau <= 0:
            raise ValueError("binning temperature must be positive")

    @property
    def needs_slices(self) -> bool:
        return self.loss_kind in ("swd", "swd+mse")


@dataclass(frozen=True)
class LossBreakdown:
    """One objective evaluation split into its terms; total is their sum."""

    fit_term: float
    degree_term: float
    ctrl_term: float
    total: float

    def __post_init__(self):
        parts = self.fit_term + self.degree_term + self.ctrl_term
        if abs(parts - self.total) > 1e-12 * max(1.0, abs(self.total)):
            raise ValueError("loss total does not equal the sum of its terms")

    @classmethod
    def of_parts(cls, fit_term, degree_term, ctrl_term) -> "LossBreakdown":
        return cls(
            float(fit_term),
            float(degree_term),
            float(ctrl_term),
            float(fit_term + degree_term + ctrl_term),
        )


def swd(points_a: np.ndarray, points_b: np.ndarray, slices: SliceSet) -> float:
    """Sliced squared transport distance: project both clouds on each
    direction, sort, and average the squared coordinate differences."""
    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("point clouds must share one (G, 2) shape")
    proj_a = np.sort(a @ slices.dirs.T, axis=0, kind="stable")
    proj_b = np.sort(b @ slices.dirs.T, axis=0, kind="stable")
    diffs = proj_a - proj_b
    return float(np.mean(diffs**2))


def mse_seq(curve: np.ndarray, target: np.ndarray) -> float:
    """Index-aligned mean squared distance between two point sequences."""
    a = np.asarray(curve, dtype=float)
    b = np.asarray(target, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("point sequences must share one (G, 2) shape")
    return float(np.mean(((a - b) ** 2).sum(axis=1)))


def degree_reg(d: DegreeParam, lambda_d: float) -> float:
    """Penalty pushing the squashed degree parameter toward low degrees."""
    return float(lambda_d * d.value)


def ctrl_reg(polygon: ControlPolygon, point_mask: np.ndarray, lambda_c: float) -> float:
    """Penalty on control polygon edge lengths, each edge gated by the soft
    selection weight of the later of its two control points."""
    mask = np.asarray(point_mask, dtype=float)
    if mask.shape != (polygon.max_degree + 1,):
        raise ValueError("point mask length must match the control polygon")
    seg_lengths = np.linalg.norm(np.diff(polygon.points, axis=0), axis=1)
    return float(lambda_c * np.sum(seg_lengths * mask[1:]))


def objective(
    polygon: ControlPolygon,
    d: DegreeParam,
    stroke: StrokeCloud,
    grid: RenderGrid,
    cfg: LossConfig,
    slices: SliceSet | None = None,
) -> LossBreakdown:
    """Full fitting objective for one stroke at the given parameters."""
    if len(stroke.points) != len(grid):
        raise ValueError(
            f"stroke has {len(stroke.points)} points but the render grid "
            f"expects {len(grid)}"
        )
    if cfg.needs_slices and slices is None:
        raise ValueError("this loss kind projects onto slices; pass a SliceSet")
    bins = soft_bin(d, polygon.max_degree, cfg.tau)
    sel = selectors(bins)
    curve = masked_basis(bins, grid) @ polygon.points

    if cfg.loss_kind == "swd":
        fit = swd(curve, stroke.points, slices)
    elif cfg.loss_kind == "mse":
        fit = mse_seq(curve, stroke.points)
    elif cfg.loss_kind == "swd+mse":
        fit = swd(curve, stroke.points, slices) + cfg.mse_weight * mse_seq(
            curve, stroke.points
        )
    else:
        fit = 0.0

    return LossBreakdown.of_parts(
        fit,
        degree_reg(d, cfg.lambda_d),
        ctrl_reg(polygon, sel.point_mask, cfg.lambda_c),
    )


def exact_wasserstein_oracle(points_a: np.ndarray, points_b: np.ndarray) -> float:
    """Exact squared transport cost between two equal-size point clouds via
    optimal assignment, averaged over points.  Reference implementation for
    testing; capped at 64 points per side."""
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[1] != 2:
        raise ValueError("point clouds must share one (G, 2) shape")
    if a.shape[0] > 64:
        raise ValueError("oracle is capped at 64 points per cloud")
    cost = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() / a.shape[0])

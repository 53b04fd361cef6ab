"""Variable-degree Bezier curves: Bernstein matrices, soft degree binning,
selector masks and masked matrix rendering.

A curve is held as a full control polygon of ``max_degree + 1`` points plus a
continuous degree parameter in (0, 1).  Binning the parameter against the cut
points ``i / max_degree`` picks how many control points actually participate;
the soft (temperature-relaxed) version of that binning keeps the whole render
differentiable in the degree parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class ControlPolygon:
    """Candidate control points of one stroke's curve, shape (max_degree+1, 2)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise ValueError(f"control polygon must be (n+1, 2) with n >= 1, got {pts.shape}")
        if not np.isfinite(pts).all():
            raise ValueError("control polygon has non-finite coordinates")
        object.__setattr__(self, "points", pts)

    @property
    def max_degree(self) -> int:
        return self.points.shape[0] - 1


@dataclass(frozen=True)
class DegreeParam:
    """Continuous degree control: unconstrained ``raw`` squashed to (0, 1)."""

    raw: float

    def __post_init__(self):
        if not math.isfinite(self.raw):
            raise ValueError("degree parameter must be finite")

    @property
    def value(self) -> float:
        """Sigmoid of the raw parameter; always strictly inside (0, 1)."""
        return 1.0 / (1.0 + math.exp(-self.raw))


@dataclass(frozen=True)
class RenderGrid:
    """Uniform interpolation values t in [0, 1], endpoints included."""

    ts: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.ts, dtype=float)
        if ts.ndim != 1 or ts.size < 2:
            raise ValueError("grid needs at least two interpolation values")
        if ts[0] != 0.0 or ts[-1] != 1.0 or (np.diff(ts) <= 0).any():
            raise ValueError("grid must increase strictly from 0 to 1")
        gaps = np.diff(ts)
        if not np.allclose(gaps, gaps[0], rtol=0, atol=1e-12):
            raise ValueError("grid must be uniformly spaced")
        object.__setattr__(self, "ts", ts)

    @classmethod
    def uniform(cls, granularity: int) -> "RenderGrid":
        if granularity < 2:
            raise ValueError("granularity must be >= 2")
        return cls(np.linspace(0.0, 1.0, granularity))

    def __len__(self) -> int:
        return self.ts.size


@dataclass(frozen=True)
class BinVector:
    """Distribution over effective degrees 0..max_degree (degree 0 always 0)."""

    weights: np.ndarray
    temperature: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if w.ndim != 1 or w.size < 2:
            raise ValueError("bin vector needs entries for degrees 0..max_degree")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("bin weights must be a distribution")
        if w[0] != 0.0:
            raise ValueError("degree 0 must carry zero weight")
        object.__setattr__(self, "weights", w)

    @property
    def max_degree(self) -> int:
        return self.weights.size - 1


@dataclass(frozen=True)
class SelectorPair:
    """Degree mix and its reversed cumulative sum gating control points."""

    degree_mix: np.ndarray
    point_mask: np.ndarray = field(default=None)

    def __post_init__(self):
        mix = np.asarray(self.degree_mix, dtype=float)
        mask = self.point_mask
        if mask is None:
            mask = np.cumsum(mix[::-1])[::-1]
        mask = np.asarray(mask, dtype=float)
        if (np.diff(mask) > 1e-12).any():
            raise ValueError("point mask must be non-increasing")
        if not (1.0 - 1e-9 <= mask[0] <= 1.0 + 1e-9):
            raise ValueError("point mask must start at 1")
        object.__setattr__(self, "degree_mix", mix)
        object.__setattr__(self, "point_mask", mask)


@lru_cache(maxsize=64)
def _bernstein_matrix_cached(degree: int) -> np.ndarray:
    m = np.zeros((degree + 1, degree + 1))
    for i in range(degree + 1):
        for j in range(i + 1):
            m[i, j] = (-1.0) ** (i - j) * math.comb(degree, j) * math.comb(degree - j, i - j)
    m.setflags(write=False)
    return m


def bernstein_matrix(degree: int) -> np.ndarray:
    """Coefficient matrix mapping the monomial basis [1, t, ..., t^n] to the
    Bernstein basis of the given degree.  Read-only (cached)."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    return _bernstein_matrix_cached(degree)


def de_casteljau(points, t: float) -> np.ndarray:
    """Evaluate a Bezier curve by repeated linear interpolation.

    Independent of the matrix renderer; used as its test oracle.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("need at least one control point")
    work = pts.copy()
    while work.shape[0] > 1:
        work = (1.0 - t) * work[:-1] + t * work[1:]
    return work[0]


def render_fixed_degree(points, degree: int, grid: RenderGrid) -> np.ndarray:
    """Instantiate a fixed-degree Bezier curve on the grid: T @ M @ P."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] != degree + 1:
        raise ValueError(f"degree {degree} needs {degree + 1} control points, got {pts.shape[0]}")
    powers = grid.ts[:, None] ** np.arange(degree + 1)[None, :]
    return powers @ bernstein_matrix(degree) @ pts


def _bin_logits(value: float, max_degree: int, tau: float):
    # Monotone-logit binning against cut points [i / max_degree]: slopes are the
    # integer ramp 1..n_bins, intercepts the negated cumulative cut points.
    cuts = np.arange(max_degree + 1) / max_degree
    slopes = np.arange(1, max_degree + 3, dtype=float)
    intercepts = np.concatenate(([0.0], -np.cumsum(cuts)))
    return (slopes * value + intercepts) / tau, slopes


def soft_bin_weights(value: float, max_degree: int, tau: float) -> np.ndarray:
    """Soft distribution over effective degrees 0..max_degree for a degree
    parameter in (0, 1).

    The two outer bins of the underlying binning are unreachable once the
    parameter is squashed into (0, 1), so their relaxed mass is folded into
    degrees 1 and max_degree; degree 0 (a one-point curve) stays at zero.
    """
    if tau <= 0:
        raise ValueError("temperature must be positive")
    logits, _ = _bin_logits(value, max_degree, tau)
    logits = logits - logits.max()
    raw = np.exp(logits)
    raw /= raw.sum()
    weights = np.zeros(max_degree + 1)
    weights[1:] = raw[1:-1]
    weights[1] += raw[0]
    weights[max_degree] += raw[-1]
    return weights


def soft_bin_jacobian(value: float, max_degree: int, tau: float) -> np.ndarray:
    """Derivative of soft_bin_weights with respect to the degree parameter."""
    logits, slopes = _bin_logits(value, max_degree, tau)
    logits = logits - logits.max()
    s = np.exp(logits)
    s /= s.sum()
    ds = s * (slopes - s @ slopes) / tau
    grad = np.zeros(max_degree + 1)
    grad[1:] = ds[1:-1]
    grad[1] += ds[0]
    grad[max_degree] += ds[-1]
    return grad


def soft_bin(d: DegreeParam, max_degree: int, tau: float) -> BinVector:
    """Differentiable binning of the degree parameter into a BinVector."""
    return BinVector(soft_bin_weights(d.value, max_degree, tau), tau)


def hard_degree(d: DegreeParam, max_degree: int) -> int:
    """Effective degree by hard binning: the bin holding the parameter value."""
    return int(min(max(math.ceil(d.value * max_degree), 1), max_degree))


def selectors(bins: BinVector) -> SelectorPair:
    """Pair the degree mix with its reversed cumulative sum: entry i of the
    mask is the total weight of degrees >= i, gating control point i."""
    return SelectorPair(bins.weights)


def one_hot_bins(degree: int, max_degree: int) -> BinVector:
    """Exact (zero-temperature limit) bin vector for a known degree."""
    if not 1 <= degree <= max_degree:
        raise ValueError("degree must be in [1, max_degree]")
    w = np.zeros(max_degree + 1)
    w[degree] = 1.0
    return BinVector(w, temperature=1.0)


@lru_cache(maxsize=64)
def _padded_bernstein_stack(max_degree: int) -> np.ndarray:
    # stack[n] embeds the degree-n Bernstein matrix in the top-left of an
    # (N+1)x(N+1) zero matrix
    n1 = max_degree + 1
    stack = np.zeros((n1, n1, n1))
    for n in range(n1):
        stack[n, : n + 1, : n + 1] = bernstein_matrix(n)
    stack.setflags(write=False)
    return stack


def blended_bernstein(bins: BinVector) -> np.ndarray:
    """Mix of padded Bernstein matrices weighted by the degree distribution."""
    stack = _padded_bernstein_stack(bins.max_degree)
    return np.tensordot(bins.weights, stack, axes=1)


def masked_basis(bins: BinVector, grid: RenderGrid) -> np.ndarray:
    """Composite rendering basis A with curve = A @ control_points.

    Both the monomial columns and the control-point rows are gated by the
    point mask, the Bernstein mix sits in between.
    """
    sel = selectors(bins)
    powers = grid.ts[:, None] ** np.arange(bins.max_degree + 1)[None, :]
    return (powers * sel.point_mask) @ blended_bernstein(bins) * sel.point_mask


@dataclass(frozen=True)
class VariableBasis:
    """Composite rendering basis at one degree-parameter value, with the
    derivatives (w.r.t. the squashed value, not the raw parameter) needed to
    backpropagate through the degree."""

    basis: np.ndarray  # (G, N+1), curve = basis @ control_points
    dbasis: np.ndarray
    degree_mix: np.ndarray
    point_mask: np.ndarray
    dmask: np.ndarray


def masked_basis_gradient(
    d: DegreeParam, max_degree: int, grid: RenderGrid, tau: float
) -> VariableBasis:
    """Composite basis A and its derivative dA/dvalue at the given degree
    parameter, plus the selector masks the regularizers need."""
    value = d.value
    weights = soft_bin_weights(value, max_degree, tau)
    dweights = soft_bin_jacobian(value, max_degree, tau)
    mask = np.cumsum(weights[::-1])[::-1]
    dmask = np.cumsum(dweights[::-1])[::-1]

    stack = _padded_bernstein_stack(max_degree)
    blend = np.tensordot(weights, stack, axes=1)
    dblend = np.tensordot(dweights, stack, axes=1)

    powers = grid.ts[:, None] ** np.arange(max_degree + 1)[None, :]
    basis = (powers * mask) @ blend * mask
    dbasis = (
        (powers * dmask) @ blend * mask
        + (powers * mask) @ dblend * mask
        + (powers * mask) @ blend * dmask
    )
    return VariableBasis(basis, dbasis, weights, mask, dmask)


def render_variable_degree(
    P: ControlPolygon, d: DegreeParam, grid: RenderGrid, tau: float
) -> np.ndarray:
    """Render a curve whose effective degree follows the degree parameter.

    With a one-hot degree mix this reproduces render_fixed_degree on the
    first degree+1 control points exactly; soft mixes interpolate between
    neighbouring degrees.
    """
    bins = soft_bin(d, P.max_degree, tau)
    return masked_basis(bins, grid) @ P.points


def render_with_bins(P: ControlPolygon, bins: BinVector, grid: RenderGrid) -> np.ndarray:
    """Render with an explicit bin vector (for example a one-hot from
    one_hot_bins); the degree-parameter route calls this after soft binning."""
    return masked_basis(bins, grid) @ P.points

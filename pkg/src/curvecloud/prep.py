"""Point-cloud and raster preprocessing ahead of curve fitting.

Polylines come in as (n, 2) float arrays in drawing order.  Everything here
normalizes, resamples, splits and (for rasters) skeletonizes them into
position-independent stroke clouds that the fitting layer consumes.
"""

from dataclasses import dataclass, field

import numpy as np

_ANCHOR_TOL = 1e-12


def _as_points(arr, name="points"):
    pts = np.asarray(arr, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"{name} must be an (n, 2) array, got shape {pts.shape}")
    return pts


@dataclass(frozen=True)
class StrokeCloud:
    """One stroke, stored relative to its start point.

    points: (g, 2) array whose first row is the origin.
    offset: absolute position of that first point in sketch coordinates.
    ordered: whether row order reflects drawing order (raster-derived strokes
        are chained heuristically and stay unordered).
    """

    points: np.ndarray
    offset: np.ndarray = field(default_factory=lambda: np.zeros(2))
    ordered: bool = True

    def __post_init__(self):
        pts = _as_points(self.points)
        off = np.asarray(self.offset, dtype=float).reshape(2)
        if pts.shape[0] < 1:
            raise ValueError("stroke needs at least one point")
        if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(off)):
            raise ValueError("stroke contains non-finite values")
        if np.abs(pts[0]).max() > _ANCHOR_TOL:
            raise ValueError("stroke points must start at the origin")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "offset", off)

    @classmethod
    def from_polyline(cls, polyline, granularity: int, ordered: bool = True) -> "StrokeCloud":
        pts = resample_uniform(polyline, granularity)
        start = pts[0].copy()
        return cls(pts - start, start, ordered)

    def absolute(self) -> np.ndarray:
        return self.points + self.offset


@dataclass(frozen=True)
class SketchFrame:
    """Similarity transform mapping raw sketch coordinates into the unit
    disc (centroid at the origin, max radius 1)."""

    center: np.ndarray
    scale: float
    degenerate: bool = False

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float).reshape(2)
        if not np.all(np.isfinite(center)) or not np.isfinite(self.scale):
            raise ValueError("frame parameters must be finite")
        if self.scale <= 0:
            raise ValueError("frame scale must be positive")
        object.__setattr__(self, "center", center)

    def apply(self, points: np.ndarray) -> np.ndarray:
        return (_as_points(points) - self.center) * self.scale

    def invert(self, points: np.ndarray) -> np.ndarray:
        return _as_points(points) / self.scale + self.center


@dataclass(frozen=True)
class RasterImage:
    """8-bit grayscale image, row-major, row 0 at the top."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be positive")
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width):
            raise ValueError(
                f"pixel buffer shape {px.shape} does not match "
                f"{self.height}x{self.width}"
            )
        if px.dtype != np.uint8:
            if px.min() < 0 or px.max() > 255:
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)


def resample_uniform(polyline, granularity: int) -> np.ndarray:
    """Resample a polyline to `granularity` points equally spaced in arc
    length.  Endpoints are preserved exactly."""
    pts = _as_points(polyline, "polyline")
    if pts.shape[0] < 2:
        raise ValueError("polyline needs at least two points to resample")
    if granularity < 2:
        raise ValueError("granularity must be at least 2")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    arc = np.concatenate(([0.0], np.cumsum(seg)))
    total = arc[-1]
    if total <= 0:
        raise ValueError("polyline has zero arc length")
    targets = np.linspace(0.0, total, granularity)
    out = np.column_stack(
        [np.interp(targets, arc, pts[:, 0]), np.interp(targets, arc, pts[:, 1])]
    )
    out[0] = pts[0]
    out[-1] = pts[-1]
    return out


def normalize_sketch(strokes) -> tuple:
    """Translate the sketch centroid to the origin and scale so the farthest
    point sits on the unit circle.  Returns (normalized strokes, frame)."""
    if not strokes:
        raise ValueError("sketch has no strokes")
    arrs = [_as_points(s, "stroke") for s in strokes]
    everything = np.vstack(arrs)
    center = everything.mean(axis=0)
    radius = float(np.linalg.norm(everything - center, axis=1).max())
    if radius <= 0:
        frame = SketchFrame(center, 1.0, degenerate=True)
    else:
        frame = SketchFrame(center, 1.0 / radius)
    return [frame.apply(a) for a in arrs], frame


def _turning_angles(pts: np.ndarray) -> np.ndarray:
    """Interior turning angles in degrees; zero-length segments turn by 0."""
    a = np.diff(pts, axis=0)
    na = np.linalg.norm(a, axis=1)
    cosang = np.einsum("ij,ij->i", a[:-1], a[1:])
    denom = na[:-1] * na[1:]
    angles = np.zeros(len(denom))
    ok = denom > 0
    angles[ok] = np.degrees(np.arccos(np.clip(cosang[ok] / denom[ok], -1.0, 1.0)))
    return angles


def split_strokes(polyline, angle_thresh: float = 60.0, max_points: int = 100) -> list:
    """Split a polyline at sharp corners, then chop any remaining piece that
    exceeds max_points into chunks sharing endpoints."""
    pts = _as_points(polyline, "polyline")
    if pts.shape[0] < 2:
        raise ValueError("polyline needs at least two points to split")
    if not 0 < angle_thresh <= 180:
        raise ValueError("angle threshold must lie in (0, 180] degrees")
    if max_points < 2:
        raise ValueError("max points per stroke must be at least 2")

    if pts.shape[0] > 2:
        angles = _turning_angles(pts)
        cuts = np.nonzero(angles > angle_thresh)[0] + 1
    else:
        cuts = np.empty(0, dtype=int)
    bounds = [0, *cuts.tolist(), pts.shape[0] - 1]
    pieces = [pts[a : b + 1] for a, b in zip(bounds[:-1], bounds[1:])]

    out = []
    for piece in pieces:
        n = piece.shape[0]
        if n <= max_points:
            out.append(piece)
            continue
        start = 0
        while start < n - 1:
            stop = min(start + max_points, n)
            out.append(piece[start:stop])
            start = stop - 1
    return out


def add_noise(stroke: StrokeCloud, sigma: float, seed: int) -> StrokeCloud:
    """Perturb every point with isotropic Gaussian noise, re-anchoring so the
    first point stays at the origin (its noise moves into the offset)."""
    if sigma < 0:
        raise ValueError("noise sigma must be non-negative")
    rng = np.random.default_rng(seed)
    noisy = stroke.points + rng.normal(0.0, sigma, stroke.points.shape)
    start = noisy[0].copy()
    return StrokeCloud(noisy - start, stroke.offset + start, stroke.ordered)


def _thin(mask: np.ndarray) -> np.ndarray:
    """Iterative two-pass morphological thinning to a 1-pixel skeleton."""
    img = mask.astype(bool).copy()
    while True:
        changed = False
        for step in (0, 1):
            p = np.pad(img, 1, constant_values=False)
            n = p[:-2, 1:-1]
            ne = p[:-2, 2:]
            e = p[1:-1, 2:]
            se = p[2:, 2:]
            s = p[2:, 1:-1]
            sw = p[2:, :-2]
            w = p[1:-1, :-2]
            nw = p[:-2, :-2]
            ring = [n, ne, e, se, s, sw, w, nw, n]
            count = sum(x.astype(np.int8) for x in ring[:8])
            rises = sum((~ring[i] & ring[i + 1]).astype(np.int8) for i in range(8))
            if step == 0:
                open1 = ~(n & e & s)
                open2 = ~(e & s & w)
            else:
                open1 = ~(n & e & w)
                open2 = ~(n & s & w)
            kill = img & (count >= 2) & (count <= 6) & (rises == 1) & open1 & open2
            if kill.any():
                img[kill] = False
                changed = True
        if not changed:
            return img


def binarize_thin(img: RasterImage, thresh: int = 128, ink: str = "dark") -> np.ndarray:
    """Threshold a grayscale image and thin the ink to a 1-pixel skeleton.

    Returns skeleton pixel centers as (k, 2) float points, x right and y up
    (row 0 maps to y = height - 1).  Empty ink yields an empty (0, 2) array.
    """
    if ink not in ("dark", "light"):
        raise ValueError("ink must be 'dark' or 'light'")
    if not 0 <= thresh <= 255:
        raise ValueError("threshold must lie in [0, 255]")
    level = img.pixels.astype(np.int16)
    inkness = 255 - level if ink == "dark" else level
    mask = inkness >= thresh
    if not mask.any():
        return np.empty((0, 2), dtype=float)
    skel = _thin(mask)
    rows, cols = np.nonzero(skel)
    return np.column_stack([cols.astype(float), (img.height - 1 - rows).astype(float)])


_NEIGHBOR_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1))


def _trace_segments(coords: np.ndarray) -> list:
    """Walk 8-connected pixel chains, stopping where the continuation is
    ambiguous (a branch), so each arm of a forking skeleton becomes its own
    polyline.  Every input point lands in exactly one output segment."""
    index = {(int(x), int(y)): i for i, (x, y) in enumerate(coords)}
    n = len(coords)

    def neighbors(i):
        x, y = int(coords[i, 0]), int(coords[i, 1])
        out = []
        for dx, dy in _NEIGHBOR_STEPS:
            j = index.get((x + dx, y + dy))
            if j is not None:
                out.append(j)
        return out

    nb = [neighbors(i) for i in range(n)]
    # endpoints first so open chains start from their tips, then stable
    # lexicographic order for determinism
    order = sorted(range(n), key=lambda i: (len(nb[i]) != 1, coords[i, 0], coords[i, 1]))
    visited = np.zeros(n, dtype=bool)
    segments = []
    for start in order:
        if visited[start]:
            continue
        path = [start]
        visited[start] = True
        cur = start
        while True:
            open_steps = [j for j in nb[cur] if not visited[j]]
            if not open_steps:
                break
            if len(open_steps) > 1 and len(path) > 1:
                break  # fork: leave the remaining arms to later walks
            path.append(open_steps[0])
            visited[open_steps[0]] = True
            cur = path[-1]
        segments.append(coords[path].astype(float))
    return segments


def _kmeans(rows: np.ndarray, k: int, iters: int = 100) -> np.ndarray:
    """Plain Lloyd iteration with farthest-first seeding; deterministic."""
    n = rows.shape[0]
    centers = [0]
    dist = np.linalg.norm(rows - rows[0], axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(dist))
        centers.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(rows - rows[nxt], axis=1))
    mu = rows[centers].copy()
    labels = np.full(n, -1, dtype=int)
    for _ in range(iters):
        d2 = ((rows[:, None, :] - mu[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            sel = labels == c
            if sel.any():
                mu[c] = rows[sel].mean(axis=0)
    return labels


def _chain_order(pts: np.ndarray) -> np.ndarray:
    """Greedy nearest-neighbor ordering starting from the point farthest
    from the cluster centroid."""
    n = pts.shape[0]
    if n <= 2:
        return pts
    start = int(np.argmax(np.linalg.norm(pts - pts.mean(axis=0), axis=1)))
    remaining = list(range(n))
    order = [start]
    remaining.remove(start)
    cur = pts[start]
    while remaining:
        rem = np.array(remaining)
        d = np.linalg.norm(pts[rem] - cur, axis=1)
        pick = rem[int(np.argmin(d))]
        order.append(int(pick))
        remaining.remove(int(pick))
        cur = pts[pick]
    return pts[order]


def _spectral_clusters(pts: np.ndarray, k: int) -> list:
    from scipy.spatial import cKDTree

    n = pts.shape[0]
    if k >= n:
        return [pts[i : i + 1].copy() for i in range(n)]
    tree = cKDTree(pts)
    nn = min(9, n)
    dist, idx = tree.query(pts, k=nn)
    sigma = float(np.median(dist[:, 1:])) or 1.0
    weights = np.zeros((n, n))
    for i in range(n):
        for d, j in zip(dist[i, 1:], idx[i, 1:]):
            wij = np.exp(-(d * d) / (2.0 * sigma * sigma))
            weights[i, j] = max(weights[i, j], wij)
            weights[j, i] = max(weights[j, i], wij)
    deg = weights.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(np.maximum(deg, 1e-12))
    lap = np.eye(n) - inv_sqrt[:, None] * weights * inv_sqrt[None, :]
    vals, vecs = np.linalg.eigh(lap)
    emb = vecs[:, :k]
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    emb = emb / np.maximum(norms, 1e-12)
    labels = _kmeans(emb, k)
    clusters = []
    for c in range(k):
        sel = pts[labels == c]
        if sel.shape[0]:
            clusters.append(_chain_order(sel))
    return clusters


def cluster_strokes(points, method: str = "components", k_hint: int | None = None) -> list:
    """Group a raster-derived point set into stroke polylines.

    'components' walks 8-connected pixel chains and splits at branch
    points; 'spectral' embeds a k-nearest-neighbor graph Laplacian and
    k-means the rows (k taken from k_hint, else from the components count).
    The output polylines partition the input points exactly.
    """
    pts = _as_points(points)
    if pts.shape[0] == 0:
        return []
    if method == "components":
        return _trace_segments(np.round(pts).astype(int))
    if method == "spectral":
        if k_hint is None:
            k = len(_trace_segments(np.round(pts).astype(int)))
        else:
            if k_hint < 1:
                raise ValueError("k_hint must be at least 1")
            k = k_hint
        k = min(k, pts.shape[0])
        return _spectral_clusters(pts, k)
    raise ValueError(f"unknown clustering method: {method!r}")

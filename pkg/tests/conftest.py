"""Shared fixtures: frozen stroke/sketch corpora and a tiny raster glyph.

The corpora below are frozen test data.  Their construction (seeds, shapes,
counts) must not change, or every downstream regression baseline shifts.
"""

import numpy as np
import pytest

from curvecloud.bezier import RenderGrid, render_fixed_degree
from curvecloud.prep import StrokeCloud


def anchored(points: np.ndarray) -> StrokeCloud:
    pts = np.asarray(points, dtype=float)
    return StrokeCloud(pts - pts[0], pts[0])


def _primitive_strokes(rng: np.random.Generator, grid: RenderGrid):
    """5 lines, 5 quadratics, 5 cubics, 5 sine traces; 20 strokes total."""
    strokes = []
    for _ in range(5):
        strokes.append(render_fixed_degree(rng.uniform(-1, 1, (2, 2)), 1, grid))
    for _ in range(5):
        strokes.append(render_fixed_degree(rng.uniform(-1, 1, (3, 2)), 2, grid))
    for _ in range(5):
        strokes.append(render_fixed_degree(rng.uniform(-1, 1, (4, 2)), 3, grid))
    t = np.linspace(0.0, 1.0, len(grid))
    for i in range(5):
        strokes.append(
            np.stack([2 * t - 1, (0.3 + 0.1 * i) * np.sin((2 + i) * np.pi * t)], axis=1)
        )
    return strokes


@pytest.fixture(scope="session")
def stroke_corpus20():
    """20 anchored strokes of mixed primitive shapes, seed 42."""
    rng = np.random.default_rng(42)
    grid = RenderGrid.uniform(128)
    return [anchored(s) for s in _primitive_strokes(rng, grid)]


@pytest.fixture(scope="session")
def sketch_corpus20():
    """20 sketches of 2..4 strokes each, seed 4242.

    Strokes are random low-degree curves scattered over a 4x4 canvas so the
    sketch-level normalization has real work to do.
    """
    rng = np.random.default_rng(4242)
    grid = RenderGrid.uniform(128)
    sketches = []
    for _ in range(20):
        k = int(rng.integers(2, 5))
        strokes = []
        for _ in range(k):
            degree = int(rng.integers(1, 4))
            ctrl = rng.uniform(-0.8, 0.8, (degree + 1, 2)) + rng.uniform(-2, 2, (1, 2))
            strokes.append(anchored(render_fixed_degree(ctrl, degree, grid)))
        sketches.append(strokes)
    return sketches


@pytest.fixture(scope="session")
def heldout_corpus():
    """10 held-out strokes, seed 7: 3 lines, 3 quadratics, 2 cubics, 2 sines.

    Returned as raw (128, 2) polylines in absolute coordinates.
    """
    rng = np.random.default_rng(7)
    grid = RenderGrid.uniform(128)
    strokes = []
    for _ in range(3):
        strokes.append(render_fixed_degree(rng.uniform(-1, 1, (2, 2)), 1, grid))
    for _ in range(3):
        strokes.append(render_fixed_degree(rng.uniform(-1, 1, (3, 2)), 2, grid))
    for _ in range(2):
        strokes.append(render_fixed_degree(rng.uniform(-1, 1, (4, 2)), 3, grid))
    t = np.linspace(0.0, 1.0, 128)
    for i in range(2):
        strokes.append(
            np.stack([2 * t - 1, (0.35 + 0.15 * i) * np.sin((3 + i) * np.pi * t)], axis=1)
        )
    return strokes


@pytest.fixture(scope="session")
def t_glyph_pgm(tmp_path_factory):
    """16x16 binary PGM of a 'T': one horizontal bar, one vertical stem.

    Components-based segmentation sees three strokes: the bar splits at the
    stem into left and right halves plus the stem itself.
    """
    px = np.full((16, 16), 255, dtype=np.uint8)
    px[2:5, 2:14] = 0
    px[5:14, 7:10] = 0
    path = tmp_path_factory.mktemp("glyph") / "tee.pgm"
    header = b"P5\n16 16\n255\n"
    path.write_bytes(header + px.tobytes())
    return path

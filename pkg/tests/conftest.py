import math

import numpy as np
import pytest
from hypothesis import strategies as st

from src.func.geom_core import ConvexPolygon, SimplePolygon


def square(side: float, center=(0.0, 0.0)) -> ConvexPolygon:
    h = side / 2.0
    cx, cy = center
    return ConvexPolygon([(cx - h, cy - h), (cx + h, cy - h), (cx + h, cy + h), (cx - h, cy + h)])


def rectangle(w: float, h: float) -> ConvexPolygon:
    return ConvexPolygon([(-w / 2, -h / 2), (w / 2, -h / 2), (w / 2, h / 2), (-w / 2, h / 2)])


def regular_polygon(n: int, radius: float = 1.0, phase: float = 0.0) -> ConvexPolygon:
    ang = phase + 2.0 * math.pi * np.arange(n) / n
    return ConvexPolygon(np.stack([radius * np.cos(ang), radius * np.sin(ang)], axis=1))


def l_shape() -> SimplePolygon:
    # 2x2 square without its upper-right quadrant
    return SimplePolygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])


@st.composite
def convex_polygons(draw, max_vertices: int = 8, max_radius: float = 4.0, min_radius: float = 0.3):
    """Strictly convex polygons: points on an ellipse, then rotated and shifted."""

    n = draw(st.integers(min_value=3, max_value=max_vertices))
    weights = np.asarray(draw(st.lists(st.floats(min_value=1.0, max_value=3.0), min_size=n, max_size=n)))
    # half of each gap is uniform, so gaps stay in [pi/n, pi - 0.2]
    gaps = 2.0 * math.pi * (0.5 / n + 0.5 * weights / weights.sum())
    start = draw(st.floats(min_value=0.0, max_value=2.0 * math.pi, exclude_max=True))
    angles = start + np.concatenate([[0.0], np.cumsum(gaps[:-1])])
    rx = draw(st.floats(min_value=min_radius, max_value=max_radius))
    ry = draw(st.floats(min_value=min_radius, max_value=max_radius))
    turn = draw(st.floats(min_value=0.0, max_value=math.pi))
    shift = draw(st.tuples(st.floats(-5, 5), st.floats(-5, 5)))
    pts = np.stack([rx * np.cos(angles), ry * np.sin(angles)], axis=1)
    c, s = math.cos(turn), math.sin(turn)
    pts = pts @ np.array([[c, s], [-s, c]]) + np.asarray(shift)
    return ConvexPolygon(pts)


@st.composite
def star_polygons(draw, max_vertices: int = 10):
    """Simple polygons star-shaped around the origin."""

    n = draw(st.integers(min_value=4, max_value=max_vertices))
    jitter = draw(st.lists(st.floats(-0.3, 0.3), min_size=n, max_size=n))
    radii = draw(st.lists(st.floats(0.5, 3.0), min_size=n, max_size=n))
    ang = 2.0 * math.pi * (np.arange(n) + np.asarray(jitter)) / n
    pts = np.stack([np.asarray(radii) * np.cos(ang), np.asarray(radii) * np.sin(ang)], axis=1)
    return SimplePolygon(pts)


@pytest.fixture
def unit_square() -> ConvexPolygon:
    return square(1.0)


@pytest.fixture
def square10() -> ConvexPolygon:
    return square(10.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)

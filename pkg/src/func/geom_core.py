"""Planar primitives: polygons, support and width functions, Minkowski sums.

All geometry is carried out in double precision with the single tolerance
``CONFIG.tolerances.eps`` for incidence decisions. Polygons are immutable
values normalized on construction (repeated and collinear vertices dropped,
counter-clockwise orientation enforced), so every function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Union

import numpy as np

from config import CONFIG
from .errors import DegenerateInput, NoUniquePoint, NotConvex, NotSimple


class Point2(NamedTuple):
    x: float
    y: float


class Circle(NamedTuple):
    center: Point2
    radius: float


class Intersection(NamedTuple):
    """Result of :func:`segment_intersect`; ``at_endpoint`` flags touching contacts."""

    point: Point2
    at_endpoint: bool


def canonical_angle(theta: float) -> float:
    """Return the representative of ``theta`` in ``[0, 2*pi)``."""

    value = math.fmod(float(theta), 2.0 * math.pi)
    if value < 0.0:
        value += 2.0 * math.pi
    if value >= 2.0 * math.pi:
        value = 0.0
    return value


def _as_points(points: Union[Iterable[Sequence[float]], np.ndarray]) -> np.ndarray:
    arr = np.asarray(list(points) if not isinstance(points, np.ndarray) else points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DegenerateInput(f"expected a list of (x, y) pairs, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInput("coordinates must be finite")
    return arr


def _signed_area(arr: np.ndarray) -> float:
    x, y = arr[:, 0], arr[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _normalize_ring(arr: np.ndarray, eps: float) -> np.ndarray:
    """Drop repeated and collinear vertices and orient counter-clockwise."""

    ring = [p for p in arr]
    # Repeated vertices (cyclic)
    out: List[np.ndarray] = []
    for p in ring:
        if not out or np.hypot(*(p - out[-1])) > eps:
            out.append(p)
    while len(out) > 1 and np.hypot(*(out[0] - out[-1])) <= eps:
        out.pop()
    if len(out) >= 3 and _signed_area(np.array(out)) < 0.0:
        out.reverse()

    # Collinear vertices: |a x b| <= eps * |a| * |b|
    changed = True
    while changed and len(out) >= 3:
        changed = False
        n = len(out)
        for i in range(n):
            prev, cur, nxt = out[i - 1], out[i], out[(i + 1) % n]
            a, b = cur - prev, nxt - cur
            if abs(_cross(a, b)) <= eps * np.hypot(*a) * np.hypot(*b):
                del out[i]
                changed = True
                break
    if len(out) < 3:
        raise DegenerateInput("polygon needs at least three non-collinear vertices")
    return np.array(out, dtype=float)


def _segments_cross(p1, p2, q1, q2, eps: float) -> bool:
    """True if closed segments p1p2 and q1q2 share a point."""

    d1 = _cross(p2 - p1, q1 - p1)
    d2 = _cross(p2 - p1, q2 - p1)
    d3 = _cross(q2 - q1, p1 - q1)
    d4 = _cross(q2 - q1, p2 - q1)
    if ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    ):
        return True

    def on_segment(a, b, c, d) -> bool:
        return abs(d) <= eps and (
            min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps
            and min(a[1], b[1]) - eps <= c[1] <= max(a[1], b[1]) + eps
        )

    return (
        on_segment(p1, p2, q1, d1)
        or on_segment(p1, p2, q2, d2)
        or on_segment(q1, q2, p1, d3)
        or on_segment(q1, q2, p2, d4)
    )


@dataclass(frozen=True, eq=False)
class SimplePolygon:
    """Simple (non self-intersecting) polygon with counter-clockwise vertices.

    Parameters
    ----------
    vertices
        Sequence of ``(x, y)`` pairs. Repeated and collinear vertices are
        removed and the orientation is made counter-clockwise.

    Raises
    ------
    DegenerateInput
        Fewer than three non-collinear vertices.
    NotSimple
        Two non-adjacent edges share a point.
    """

    vertices: np.ndarray

    def __post_init__(self) -> None:
        eps = CONFIG.tolerances.eps
        arr = _normalize_ring(_as_points(self.vertices), eps)
        n = len(arr)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_cross(arr[i], arr[(i + 1) % n], arr[j], arr[(j + 1) % n], eps):
                    raise NotSimple(f"edges {i} and {j} intersect")
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def points(self) -> List[Point2]:
        return [Point2(float(x), float(y)) for x, y in self.vertices]

    def edges(self) -> np.ndarray:
        """Return edges as an ``(n, 2, 2)`` array of (start, end) pairs."""

        return np.stack([self.vertices, np.roll(self.vertices, -1, axis=0)], axis=1)

    def is_convex(self) -> bool:
        v = self.vertices
        a = np.roll(v, -1, axis=0) - v
        b = np.roll(a, -1, axis=0)
        return bool(np.all(_cross(a, b) > 0.0))

    def to_convex(self) -> "ConvexPolygon":
        """Return the same polygon as a :class:`ConvexPolygon`.

        Raises
        ------
        NotConvex
            If any vertex is reflex.
        """

        if not self.is_convex():
            raise NotConvex("polygon has a reflex vertex")
        return ConvexPolygon(self.vertices)


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Strictly convex polygon with counter-clockwise vertices.

    Parameters
    ----------
    vertices
        Sequence of ``(x, y)`` pairs, already in convex position. Repeated and
        collinear vertices are dropped and the orientation is made
        counter-clockwise; use :func:`convex_hull` for arbitrary point sets.

    Raises
    ------
    DegenerateInput
        Fewer than three non-collinear vertices.
    NotConvex
        The ring has a reflex vertex.
    """

    vertices: np.ndarray

    def __post_init__(self) -> None:
        arr = _normalize_ring(_as_points(self.vertices), CONFIG.tolerances.eps)
        a = np.roll(arr, -1, axis=0) - arr
        b = np.roll(a, -1, axis=0)
        if np.any(_cross(a, b) <= 0.0):
            raise NotConvex("polygon has a reflex vertex")
        arr.setflags(write=False)
        object.__setattr__(self, "vertices", arr)

    @classmethod
    def _trusted(cls, arr: np.ndarray) -> "ConvexPolygon":
        # Isometries of a valid polygon stay valid; skip re-normalization.
        poly = object.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(poly, "vertices", arr)
        return poly

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def points(self) -> List[Point2]:
        return [Point2(float(x), float(y)) for x, y in self.vertices]

    def edges(self) -> np.ndarray:
        """Return edges as an ``(n, 2, 2)`` array of (start, end) pairs."""

        return np.stack([self.vertices, np.roll(self.vertices, -1, axis=0)], axis=1)

    def normals(self) -> np.ndarray:
        """Unit outward normals of the edges, ``(n, 2)``."""

        d = np.roll(self.vertices, -1, axis=0) - self.vertices
        n = np.stack([d[:, 1], -d[:, 0]], axis=1)
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def offsets(self) -> np.ndarray:
        """Support values along :meth:`normals` (edge line ``u . x = s``)."""

        return np.einsum("ij,ij->i", self.normals(), self.vertices)

    def bounds(self) -> np.ndarray:
        """Bounding box ``[xmin, ymin, xmax, ymax]``."""

        return np.concatenate([self.vertices.min(axis=0), self.vertices.max(axis=0)])


Polygon = Union[ConvexPolygon, SimplePolygon]


def convex_hull(points: Iterable[Sequence[float]]) -> ConvexPolygon:
    """Return the convex hull of a point set (monotone chain).

    Parameters
    ----------
    points
        At least three non-collinear points.

    Returns
    -------
    ConvexPolygon
        Minimal counter-clockwise convex polygon containing all inputs.

    Raises
    ------
    DegenerateInput
        If all points are collinear.
    """

    arr = _as_points(points)
    pts = np.unique(arr, axis=0)
    if len(pts) < 3:
        raise DegenerateInput("convex hull needs at least three distinct points")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]

    def half(seq: np.ndarray) -> List[np.ndarray]:
        chain: List[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-1] - chain[-2], p - chain[-2]) <= 0.0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear")
    return ConvexPolygon(hull)


def area(poly: Polygon) -> float:
    """Shoelace area (positive for counter-clockwise polygons)."""

    return abs(_signed_area(poly.vertices))


def perimeter(poly: Polygon) -> float:
    d = np.roll(poly.vertices, -1, axis=0) - poly.vertices
    return float(np.linalg.norm(d, axis=1).sum())


def centroid(poly: Polygon) -> Point2:
    """Area centroid of the polygon."""

    v = poly.vertices
    nxt = np.roll(v, -1, axis=0)
    cr = _cross(v, nxt)
    a = cr.sum() / 2.0
    cx = ((v[:, 0] + nxt[:, 0]) * cr).sum() / (6.0 * a)
    cy = ((v[:, 1] + nxt[:, 1]) * cr).sum() / (6.0 * a)
    return Point2(float(cx), float(cy))


def support(poly: ConvexPolygon, phi: float) -> float:
    """Support function ``h(phi) = max_v v . (cos phi, sin phi)``."""

    u = np.array([math.cos(phi), math.sin(phi)])
    return float(np.max(poly.vertices @ u))


def width(poly: ConvexPolygon, theta: float) -> float:
    """Width ``w(theta) = h(theta) + h(theta + pi)``."""

    u = np.array([math.cos(theta), math.sin(theta)])
    proj = poly.vertices @ u
    return float(proj.max() - proj.min())


def diameter(poly: Polygon) -> float:
    """Maximal pairwise vertex distance."""

    v = poly.vertices
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=-1)).max())


def _circle_two(a: np.ndarray, b: np.ndarray) -> Circle:
    c = (a + b) / 2.0
    return Circle(Point2(float(c[0]), float(c[1])), float(np.hypot(*(a - c))))


def _circle_three(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> Circle:
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        # Collinear support points: the farthest pair spans the circle.
        pairs = [(a, b), (a, c), (b, c)]
        return max((_circle_two(p, q) for p, q in pairs), key=lambda circ: circ.radius)
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    r = max(float(np.hypot(x - p[0], y - p[1])) for p in (a, b, c))
    return Circle(Point2(float(x), float(y)), r)


def _inside(circle: Circle, p: np.ndarray, slack: float) -> bool:
    return math.hypot(p[0] - circle.center.x, p[1] - circle.center.y) <= circle.radius + slack


def min_enclosing_circle(shape: Union[Polygon, Iterable[Sequence[float]]]) -> Circle:
    """Smallest circle containing all vertices (randomized incremental Welzl).

    Parameters
    ----------
    shape
        A polygon or a non-empty sequence of points.

    Returns
    -------
    Circle
        Circle determined by at most three support points.
    """

    pts = shape.vertices if isinstance(shape, (ConvexPolygon, SimplePolygon)) else _as_points(shape)
    if len(pts) == 0:
        raise DegenerateInput("enclosing circle of an empty point set")
    # Fixed seed keeps the result deterministic.
    pts = pts[np.random.default_rng(0).permutation(len(pts))]
    slack = CONFIG.tolerances.eps * max(1.0, float(np.abs(pts).max()))
    circle = Circle(Point2(float(pts[0, 0]), float(pts[0, 1])), 0.0)
    for i in range(1, len(pts)):
        p = pts[i]
        if _inside(circle, p, slack):
            continue
        circle = Circle(Point2(float(p[0]), float(p[1])), 0.0)
        for j in range(i):
            q = pts[j]
            if _inside(circle, q, slack):
                continue
            circle = _circle_two(p, q)
            for k in range(j):
                r = pts[k]
                if not _inside(circle, r, slack):
                    circle = _circle_three(p, q, r)
    return circle


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotate(poly: Polygon, theta: float) -> Polygon:
    """Rotate counter-clockwise by ``theta`` about the origin."""

    arr = poly.vertices @ _rotation(theta).T
    if isinstance(poly, ConvexPolygon):
        return ConvexPolygon._trusted(arr)
    return SimplePolygon(arr)


def reflect_origin(poly: Polygon) -> Polygon:
    """Point reflection through the origin (rotation by pi, keeps CCW order)."""

    arr = -poly.vertices
    if isinstance(poly, ConvexPolygon):
        return ConvexPolygon._trusted(arr)
    return SimplePolygon(arr)


def translate(poly: Polygon, v: Sequence[float]) -> Polygon:
    arr = poly.vertices + np.asarray(v, dtype=float)
    if isinstance(poly, ConvexPolygon):
        return ConvexPolygon._trusted(arr)
    return SimplePolygon(arr)


def minkowski_sum_convex(p: ConvexPolygon, q: Union[ConvexPolygon, Point2]) -> ConvexPolygon:
    """Minkowski sum of two convex polygons by merging edges in angular order.

    Parameters
    ----------
    p, q
        Convex counter-clockwise polygons. ``q`` may also be a single point,
        in which case the sum is a translate of ``p``.

    Returns
    -------
    ConvexPolygon
        The sum, with at most ``len(p) + len(q)`` vertices.
    """

    if not isinstance(p, ConvexPolygon):
        raise DegenerateInput("minkowski_sum_convex expects a ConvexPolygon")
    if not isinstance(q, ConvexPolygon):
        return translate(p, q)

    def from_lowest(v: np.ndarray) -> np.ndarray:
        start = int(np.lexsort((v[:, 0], v[:, 1]))[0])
        return np.roll(v, -start, axis=0)

    a, b = from_lowest(p.vertices), from_lowest(q.vertices)
    na, nb = len(a), len(b)
    a = np.vstack([a, a[:2]])
    b = np.vstack([b, b[:2]])
    out: List[np.ndarray] = []
    i = j = 0
    while i < na or j < nb:
        out.append(a[i] + b[j])
        cr = _cross(a[i + 1] - a[i], b[j + 1] - b[j]) if (i < na and j < nb) else (1.0 if i < na else -1.0)
        if cr >= 0.0 and i < na:
            i += 1
        if cr <= 0.0 and j < nb:
            j += 1
    return ConvexPolygon(np.array(out))


def point_in_convex(p: Sequence[float], poly: ConvexPolygon, mode: str = "interior", eps: Optional[float] = None) -> bool:
    """Membership test against the edge half-planes.

    Parameters
    ----------
    p
        Query point.
    poly
        Convex polygon.
    mode
        ``"interior"`` requires inside distance ``> eps`` to every edge;
        ``"closed"`` allows ``>= -eps``.
    eps
        Tolerance; defaults to ``CONFIG.tolerances.eps``.
    """

    eps = CONFIG.tolerances.eps if eps is None else eps
    outside = poly.normals() @ np.asarray(p, dtype=float) - poly.offsets()
    if mode == "interior":
        return bool(np.all(outside < -eps))
    if mode == "closed":
        return bool(np.all(outside <= eps))
    raise ValueError(f"unknown mode: {mode}")


def segment_intersect(s1: Sequence[Sequence[float]], s2: Sequence[Sequence[float]]) -> Optional[Intersection]:
    """Intersection point of two closed segments.

    Returns
    -------
    Intersection or None
        The common point; ``at_endpoint`` is set when the contact involves an
        endpoint of either segment.

    Raises
    ------
    NoUniquePoint
        If the segments are collinear and overlap along a positive length.
    """

    eps = CONFIG.tolerances.eps
    p1, p2 = (np.asarray(v, dtype=float) for v in s1)
    q1, q2 = (np.asarray(v, dtype=float) for v in s2)
    r, s = p2 - p1, q2 - q1
    denom = float(_cross(r, s))
    qp = q1 - p1
    scale = max(np.hypot(*r) * np.hypot(*s), eps)
    if abs(denom) <= eps * scale:
        if abs(float(_cross(qp, r))) > eps * max(np.hypot(*r), eps):
            return None
        rr = float(r @ r)
        t0 = float(qp @ r) / rr
        t1 = t0 + float(s @ r) / rr
        lo, hi = max(min(t0, t1), 0.0), min(max(t0, t1), 1.0)
        if hi < lo - eps:
            return None
        if hi - lo > eps:
            raise NoUniquePoint("segments overlap along a common piece")
        pt = p1 + lo * r
        return Intersection(Point2(float(pt[0]), float(pt[1])), True)
    t = float(_cross(qp, s)) / denom
    u = float(_cross(qp, r)) / denom
    tol = eps
    if -tol <= t <= 1.0 + tol and -tol <= u <= 1.0 + tol:
        pt = p1 + t * r
        endpoint = min(abs(t), abs(t - 1.0), abs(u), abs(u - 1.0)) <= tol
        return Intersection(Point2(float(pt[0]), float(pt[1])), endpoint)
    return None


def polygons_intersect(p: ConvexPolygon, q: ConvexPolygon, eps: Optional[float] = None) -> bool:
    """Separating-axis test for closed convex polygons."""

    eps = CONFIG.tolerances.eps if eps is None else eps
    for axes in (p.normals(), q.normals()):
        pa = p.vertices @ axes.T
        qa = q.vertices @ axes.T
        if np.any(pa.min(axis=0) > qa.max(axis=0) + eps) or np.any(qa.min(axis=0) > pa.max(axis=0) + eps):
            return False
    return True


def clip_convex(subject: Union[Polygon, np.ndarray], clip: ConvexPolygon) -> np.ndarray:
    """Clip a polygon against a convex window (Sutherland-Hodgman).

    Returns
    -------
    numpy.ndarray
        Vertices of the clipped ring, possibly empty.
    """

    out = np.asarray(subject.vertices if hasattr(subject, "vertices") else subject, dtype=float)
    for u, s in zip(clip.normals(), clip.offsets()):
        if len(out) == 0:
            break
        dist = out @ u - s
        nxt = np.roll(out, -1, axis=0)
        dnext = np.roll(dist, -1)
        kept: List[np.ndarray] = []
        for cur, d0, nx, d1 in zip(out, dist, nxt, dnext):
            if d0 <= 0.0:
                kept.append(cur)
            if (d0 < 0.0 < d1) or (d1 < 0.0 < d0):
                kept.append(cur + (nx - cur) * (d0 / (d0 - d1)))
        out = np.array(kept).reshape(-1, 2)
    return out


def contains_points(poly: Polygon, pts: np.ndarray) -> np.ndarray:
    """Even-odd inclusion test for many points (boundary points may go either way)."""

    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    x, y = pts[:, 0:1], pts[:, 1:2]
    crosses = (v[:, 1] > y) != (w[:, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = v[:, 0] + (y - v[:, 1]) * (w[:, 0] - v[:, 0]) / (w[:, 1] - v[:, 1])
    return (np.count_nonzero(crosses & (x < xint), axis=1) % 2) == 1


def sample_boundary(poly: Polygon, n: int) -> np.ndarray:
    """``n`` points equally spaced by arc length along the boundary (vertices included)."""

    v = poly.vertices
    seg = np.roll(v, -1, axis=0) - v
    lengths = np.linalg.norm(seg, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(lengths)])
    s = np.linspace(0.0, cum[-1], max(n, 1), endpoint=False)
    idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(v) - 1)
    frac = (s - cum[idx]) / lengths[idx]
    pts = v[idx] + seg[idx] * frac[:, None]
    return np.vstack([pts, v])


def sample_interior(poly: Polygon, spacing: float) -> np.ndarray:
    """Points of a triangular grid with the given spacing lying inside the polygon."""

    xmin, ymin = poly.vertices.min(axis=0)
    xmax, ymax = poly.vertices.max(axis=0)
    dy = spacing * math.sqrt(3.0) / 2.0
    rows = np.arange(ymin, ymax + dy, dy)
    cols = np.arange(xmin, xmax + spacing, spacing)
    gx, gy = np.meshgrid(cols, rows)
    gx = gx + (np.arange(len(rows))[:, None] % 2) * spacing / 2.0
    pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
    return pts[contains_points(poly, pts)]

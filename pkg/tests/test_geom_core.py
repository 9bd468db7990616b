import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import convex_polygons, l_shape, regular_polygon, square
from src.func.errors import DegenerateInput, NotConvex, NotSimple, NoUniquePoint
from src.func.geom_core import (
    ConvexPolygon,
    Point2,
    SimplePolygon,
    area,
    centroid,
    clip_convex,
    contains_points,
    convex_hull,
    diameter,
    min_enclosing_circle,
    minkowski_sum_convex,
    perimeter,
    point_in_convex,
    polygons_intersect,
    reflect_origin,
    rotate,
    sample_boundary,
    sample_interior,
    segment_intersect,
    support,
    translate,
    width,
)
from src.func.hex_lattice import canonical_hexagon

SQRT3 = math.sqrt(3.0)
TRIANGLE = ConvexPolygon([(0, 0), (4, 0), (0, 3)])


def _as_set(vertices):
    return {(round(float(x), 9), round(float(y), 9)) for x, y in vertices}


def _brute_force_radius(v: np.ndarray) -> float:
    """Smallest over pair midpoints and triple circumcenters of the farthest-vertex distance."""

    centers = []
    for i, j in itertools.combinations(range(len(v)), 2):
        centers.append((v[i] + v[j]) / 2.0)
    for i, j, k in itertools.combinations(range(len(v)), 3):
        a, b, c = v[i], v[j], v[k]
        d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
        if abs(d) < 1e-12:
            continue
        sa, sb, sc = a @ a, b @ b, c @ c
        ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
        uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
        centers.append(np.array([ux, uy]))
    return min(float(np.hypot(*(v - center).T).max()) for center in centers)


class TestConstruction:
    def test_normalizes_orientation_and_collinear_vertices(self):
        poly = ConvexPolygon([(0, 0), (0, 1), (1, 1), (1, 0.5), (1, 0)])
        assert len(poly) == 4
        assert area(poly) == pytest.approx(1.0)

    def test_repeated_vertices_dropped(self):
        poly = ConvexPolygon([(0, 0), (1, 0), (1, 0), (1, 1), (0, 1), (0, 0)])
        assert len(poly) == 4

    def test_degenerate_rejected(self):
        with pytest.raises(DegenerateInput):
            ConvexPolygon([(0, 0), (1, 0), (2, 0)])

    def test_reflex_vertex_rejected(self):
        with pytest.raises(NotConvex):
            ConvexPolygon(l_shape().vertices)
        with pytest.raises(NotConvex):
            l_shape().to_convex()

    def test_bowtie_not_simple(self):
        with pytest.raises(NotSimple):
            SimplePolygon([(0, 0), (1, 1), (1, 0), (0, 1)])

    def test_convex_simple_polygon_converts(self):
        poly = SimplePolygon([(0, 0), (2, 0), (2, 2), (0, 2)])
        assert poly.is_convex()
        assert area(poly.to_convex()) == pytest.approx(4.0)


class TestHull:
    def test_triangle_kept(self):
        hull = convex_hull([(0, 0), (1, 0), (0, 1)])
        assert _as_set(hull.vertices) == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}

    def test_interior_point_dropped(self):
        hull = convex_hull([(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)])
        assert _as_set(hull.vertices) == {(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)}

    def test_random_points_inside_hull(self, rng):
        r = np.sqrt(rng.uniform(0, 1, 100))
        t = rng.uniform(0, 2 * math.pi, 100)
        pts = np.stack([r * np.cos(t), r * np.sin(t)], axis=1)
        hull = convex_hull(pts)
        assert _as_set(hull.vertices) <= _as_set(pts)
        assert all(point_in_convex(p, hull, "closed") for p in pts)

    def test_collinear_points(self):
        with pytest.raises(DegenerateInput):
            convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])


class TestMeasures:
    @pytest.mark.parametrize(
        "poly, expected_area, expected_perimeter",
        [(square(1.0), 1.0, 4.0), (square(10.0), 100.0, 40.0), (TRIANGLE, 6.0, 12.0)],
    )
    def test_area_and_perimeter(self, poly, expected_area, expected_perimeter):
        assert area(poly) == pytest.approx(expected_area)
        assert perimeter(poly) == pytest.approx(expected_perimeter)

    def test_support(self, unit_square):
        assert support(unit_square, 0.0) == pytest.approx(0.5)
        assert support(unit_square, math.pi / 4) == pytest.approx(math.sqrt(2) / 2)
        assert support(ConvexPolygon([(0, 0), (1, 0), (0, 1)]), math.pi / 2) == pytest.approx(1.0)

    def test_width(self, unit_square):
        assert width(unit_square, 0.0) == pytest.approx(1.0)
        assert width(unit_square, math.pi / 4) == pytest.approx(math.sqrt(2))
        thin = ConvexPolygon([(0, 0), (1, 0), (1, 1e-6), (0, 1e-6)])
        assert width(thin, math.pi / 2) == pytest.approx(1e-6, rel=1e-6)

    def test_diameter(self, unit_square, square10):
        assert diameter(unit_square) == pytest.approx(math.sqrt(2))
        assert diameter(square10) == pytest.approx(10 * math.sqrt(2))
        assert diameter(canonical_hexagon()) == pytest.approx(2.0)

    def test_centroid(self):
        c = centroid(square(2.0, center=(3.0, -1.0)))
        assert c.x == pytest.approx(3.0) and c.y == pytest.approx(-1.0)

    @given(convex_polygons())
    @settings(deadline=None, max_examples=50)
    def test_width_is_pi_periodic(self, poly):
        for t in (0.1, 1.3, 2.9):
            assert width(poly, t) == pytest.approx(width(poly, t + math.pi), abs=1e-9)
            assert width(poly, t) == pytest.approx(support(poly, t) + support(poly, t + math.pi), abs=1e-9)


class TestEnclosingCircle:
    def test_unit_square(self, unit_square):
        c = min_enclosing_circle(unit_square)
        assert c.center.x == pytest.approx(0.0, abs=1e-12)
        assert c.center.y == pytest.approx(0.0, abs=1e-12)
        assert c.radius == pytest.approx(math.sqrt(2) / 2)

    def test_single_point(self):
        c = min_enclosing_circle([(3.0, 4.0)])
        assert c.center == Point2(3.0, 4.0)
        assert c.radius == 0.0

    def test_flat_triangle_uses_diameter_pair(self):
        pts = np.array([(0, 0), (2, 0), (1, 0.1)], dtype=float)
        c = min_enclosing_circle(pts)
        assert c.radius == pytest.approx(1.0)
        assert np.all(np.hypot(pts[:, 0] - c.center.x, pts[:, 1] - c.center.y) <= c.radius + 1e-9)

    @given(convex_polygons())
    @settings(deadline=None, max_examples=50)
    def test_minimal_against_brute_force(self, poly):
        c = min_enclosing_circle(poly)
        v = poly.vertices
        tol = 1e-9 * max(1.0, float(np.abs(v).max()))
        assert np.all(np.hypot(v[:, 0] - c.center.x, v[:, 1] - c.center.y) <= c.radius + tol)
        assert abs(c.radius - _brute_force_radius(v)) <= tol


class TestIsometries:
    def test_full_turn(self, unit_square):
        np.testing.assert_allclose(rotate(unit_square, 2 * math.pi).vertices, unit_square.vertices, atol=1e-12)

    def test_reflection(self):
        tri = ConvexPolygon([(0, 0), (1, 0), (0, 1)])
        assert _as_set(reflect_origin(tri).vertices) == {(0.0, 0.0), (-1.0, 0.0), (0.0, -1.0)}
        assert area(reflect_origin(tri)) == pytest.approx(0.5)

    def test_translate_back(self, unit_square):
        moved = translate(translate(unit_square, (3, 4)), (-3, -4))
        np.testing.assert_allclose(moved.vertices, unit_square.vertices, atol=1e-12)

    def test_rotate_keeps_simple_polygon_type(self):
        assert isinstance(rotate(l_shape(), 0.3), SimplePolygon)


class TestMinkowski:
    def test_squares(self, unit_square):
        total = minkowski_sum_convex(unit_square, unit_square)
        assert area(total) == pytest.approx(4.0)
        assert _as_set(total.vertices) == {(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)}

    def test_point(self, unit_square):
        total = minkowski_sum_convex(unit_square, Point2(2.0, -1.0))
        np.testing.assert_allclose(total.vertices, unit_square.vertices + [2.0, -1.0])

    def test_square_plus_hexagon(self, unit_square):
        total = minkowski_sum_convex(unit_square, canonical_hexagon())
        expected = 1.0 + 3.0 * SQRT3 / 2.0 + 2.0 + SQRT3
        assert area(total) == pytest.approx(expected, abs=1e-9)
        assert area(total) == pytest.approx(7.33013, abs=1e-5)

    @given(convex_polygons(), convex_polygons())
    @settings(deadline=None, max_examples=60)
    def test_mixed_area_nonnegative(self, p, q):
        total = minkowski_sum_convex(p, q)
        assert len(total) <= len(p) + len(q)
        assert area(total) >= area(p) + area(q) - 1e-9

    @given(convex_polygons(), convex_polygons())
    @settings(deadline=None, max_examples=40)
    def test_vertices_are_sums(self, p, q):
        total = minkowski_sum_convex(p, q)
        sums = (p.vertices[:, None, :] + q.vertices[None, :, :]).reshape(-1, 2)
        for v in total.vertices:
            assert np.min(np.hypot(*(sums - v).T)) < 1e-9


class TestPredicates:
    @given(convex_polygons())
    @settings(deadline=None, max_examples=50)
    def test_centroid_and_vertices(self, poly):
        assert point_in_convex(centroid(poly), poly, "interior", 1e-9)
        v = poly.vertices[0]
        assert not point_in_convex(v, poly, "interior", 1e-9)
        assert point_in_convex(v, poly, "closed", 1e-9)

    def test_unknown_mode(self, unit_square):
        with pytest.raises(ValueError):
            point_in_convex((0, 0), unit_square, "open")

    def test_crossing_segments(self):
        hit = segment_intersect(((0, 0), (1, 1)), ((0, 1), (1, 0)))
        assert hit.point.x == pytest.approx(0.5) and hit.point.y == pytest.approx(0.5)
        assert not hit.at_endpoint

    def test_disjoint_segments(self):
        assert segment_intersect(((0, 0), (1, 0)), ((2, 0), (3, 0))) is None

    def test_touching_segments(self):
        hit = segment_intersect(((0, 0), (1, 0)), ((0, 0), (0, 1)))
        assert hit.point == Point2(0.0, 0.0)
        assert hit.at_endpoint

    def test_overlapping_segments(self):
        with pytest.raises(NoUniquePoint):
            segment_intersect(((0, 0), (2, 0)), ((1, 0), (3, 0)))

    def test_polygons_intersect(self, unit_square):
        assert polygons_intersect(unit_square, translate(unit_square, (1.0, 0.0)))
        assert not polygons_intersect(unit_square, translate(unit_square, (1.1, 0.0)))


class TestClippingAndSampling:
    def test_clip_inside_window(self, unit_square):
        ring = clip_convex(unit_square, square(4.0))
        assert area(ConvexPolygon(ring)) == pytest.approx(1.0)

    def test_clip_to_hexagon(self):
        ring = clip_convex(square(4.0), canonical_hexagon())
        assert area(ConvexPolygon(ring)) == pytest.approx(3.0 * SQRT3 / 2.0)

    def test_clip_disjoint(self, unit_square):
        assert len(clip_convex(unit_square, translate(unit_square, (5.0, 0.0)))) == 0

    def test_contains_points_nonconvex(self):
        inside = contains_points(l_shape(), np.array([[0.5, 0.5], [1.5, 1.5], [1.5, 0.5], [3.0, 0.0]]))
        assert inside.tolist() == [True, False, True, False]

    def test_boundary_samples(self, unit_square):
        pts = sample_boundary(unit_square, 400)
        assert len(pts) == 404
        d = np.minimum(np.abs(np.abs(pts[:, 0]) - 0.5), np.abs(np.abs(pts[:, 1]) - 0.5))
        assert d.max() < 1e-12

    def test_interior_samples(self):
        pts = sample_interior(regular_polygon(6, 2.0), 0.1)
        assert len(pts) > 0
        assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= 2.0 + 1e-12)

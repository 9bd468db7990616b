import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import convex_polygons, regular_polygon, square
from src.func.errors import DegenerateInput
from src.func.geom_core import ConvexPolygon, area, convex_hull, minkowski_sum_convex, perimeter, width
from src.func.hex_lattice import canonical_hexagon
from src.func.orientation import (
    expected_hexagons,
    hexagon_count_estimate,
    minimize_f,
    minkowski_identity_gap,
    objective_f,
    reflect_rotate,
    width_profile,
)

SQRT3 = math.sqrt(3.0)
THIN = ConvexPolygon([(-0.5, -5e-7), (0.5, -5e-7), (0.5, 5e-7), (-0.5, 5e-7)])


class TestWidthProfile:
    def test_unit_square(self, unit_square):
        profile = width_profile(unit_square)
        assert sorted(np.round(profile.breakpoints, 12).tolist()) == [0.0, round(math.pi / 2, 12)]
        for t in np.linspace(0, 2 * math.pi, 73):
            assert profile(t) == pytest.approx(abs(math.cos(t)) + abs(math.sin(t)), abs=1e-12)

    def test_hexagon(self):
        hexagon = regular_polygon(6)
        profile = width_profile(hexagon)
        grid = np.linspace(0, math.pi, 181)
        values = np.array([profile(t) for t in grid])
        np.testing.assert_allclose(values, [width(hexagon, t) for t in grid], atol=1e-12)
        assert values.max() - values.min() < 0.27

    def test_thin_rectangle(self):
        profile = width_profile(THIN)
        for t in np.linspace(0, math.pi, 31):
            assert profile(t) == pytest.approx(abs(math.cos(t)), abs=1e-6)

    def test_rejects_non_polygon(self):
        with pytest.raises(DegenerateInput):
            width_profile([(0, 0), (1, 0), (0, 1)])

    @given(convex_polygons(), st.floats(min_value=0.0, max_value=2 * math.pi))
    @settings(deadline=None, max_examples=60)
    def test_matches_width(self, poly, t):
        assert width_profile(poly)(t) == pytest.approx(width(poly, t), abs=1e-9)


class TestObjective:
    def test_unit_square(self, unit_square):
        assert objective_f(unit_square, 0.0) == pytest.approx(2.0 + SQRT3)
        assert objective_f(unit_square, math.pi / 12) == pytest.approx(3.86370, abs=1e-5)

    def test_thin_rectangle(self):
        assert objective_f(THIN, 0.0) == pytest.approx(2.0, abs=1e-5)

    @given(convex_polygons(), st.floats(min_value=-10, max_value=10))
    @settings(deadline=None, max_examples=100)
    def test_period(self, poly, t):
        assert objective_f(poly, t) == pytest.approx(objective_f(poly, t + math.pi / 3), abs=1e-9)

    @given(convex_polygons())
    @settings(deadline=None, max_examples=30)
    def test_average_is_three_perimeters_over_pi(self, poly):
        # mean over one period equals 3L/pi by Cauchy's formula
        grid = (np.arange(1000) + 0.5) * (math.pi / 3) / 1000
        mean = np.mean([objective_f(poly, t) for t in grid])
        assert mean == pytest.approx(3 * perimeter(poly) / math.pi, rel=1e-5)


class TestMinimize:
    def test_unit_square(self, unit_square):
        report = minimize_f(unit_square)
        assert report.f_min == pytest.approx(2.0 + SQRT3)
        assert report.theta_star == pytest.approx(0.0, abs=1e-12)

    def test_thin_rectangle(self):
        report = minimize_f(THIN)
        assert report.f_min == pytest.approx(SQRT3, abs=1e-5)
        assert report.theta_star == pytest.approx(math.pi / 6, abs=1e-6)

    def test_nearly_constant_width(self):
        poly = regular_polygon(101)
        grid = np.linspace(0, math.pi / 3, 600)
        values = [objective_f(poly, t) for t in grid]
        assert max(values) - min(values) < 1e-3
        assert minimize_f(poly).f_min <= min(values) + 1e-12

    @given(convex_polygons())
    @settings(deadline=None, max_examples=60)
    def test_beats_grid(self, poly):
        report = minimize_f(poly)
        assert 0.0 <= report.theta_star < math.pi / 3
        assert report.f_min == pytest.approx(objective_f(poly, report.theta_star), abs=1e-12)
        grid = np.linspace(0, math.pi / 3, 721)
        assert report.f_min <= min(objective_f(poly, t) for t in grid) + 1e-9


class TestExpectedHexagons:
    def test_unit_square(self, unit_square):
        assert expected_hexagons(unit_square, 0.0) == pytest.approx(2.82137, abs=1e-4)

    def test_ten_square(self, square10):
        assert expected_hexagons(square10, 0.0) == pytest.approx(53.854, abs=1e-3)

    def test_point_region(self):
        assert hexagon_count_estimate(0.0, 0.0) == 1.0

    @given(convex_polygons(), st.floats(min_value=0.0, max_value=math.pi / 3))
    @settings(deadline=None, max_examples=100)
    def test_minkowski_identity(self, poly, t):
        assert minkowski_identity_gap(poly, t) < 1e-7
        total = area(minkowski_sum_convex(reflect_rotate(poly, t), canonical_hexagon()))
        assert expected_hexagons(poly, t) == pytest.approx(total / (3 * SQRT3 / 2), abs=1e-8)

    def test_identity_on_seeded_corpus(self, rng):
        for _ in range(100):
            pts = rng.uniform(-4, 4, size=(rng.integers(3, 11), 2))
            try:
                poly = convex_hull(pts)
            except DegenerateInput:
                continue
            assert minkowski_identity_gap(poly, rng.uniform(0, 2 * math.pi)) < 1e-7

    def test_reflect_rotate_area(self):
        poly = square(2.0, center=(1.0, 1.0))
        assert area(reflect_rotate(poly, 0.7)) == pytest.approx(4.0)

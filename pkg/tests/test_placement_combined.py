import math

import numpy as np
import pytest

from conftest import l_shape, rectangle, square
from src.func.bench import random_convex_polygon
from src.func.bounds import Pose, oracle_grid_search, verify_coverage
from src.func.errors import BudgetExceeded, DegenerateInput, NotSimple
from src.func.geom_core import ConvexPolygon, SimplePolygon, centroid, convex_hull, minkowski_sum_convex, translate
from src.func.hex_lattice import HEX_LATTICE, canonical_hexagon
from src.func.orientation import minimize_f, reflect_rotate
from src.func.placement_combined import (
    PRISM,
    Candidate3D,
    SurfaceKind,
    build_surfaces,
    count_at,
    cover_combined,
    cover_nonconvex,
    cover_sweep,
    enumerate_candidates,
    optimal_pose,
    optimal_pose_nonconvex,
    sweep_baseline,
    triple_intersection,
)
from src.func.placement_fixed import build_regions, centered, count_interior, cover_fixed, optimal_translation
from src.func.triangulation import triangulate


def random_hexagon_points(rng, n: int) -> np.ndarray:
    hexagon = canonical_hexagon()
    pts = rng.uniform(-1.0, 1.0, size=(4 * n, 2))
    inside = np.all(pts @ hexagon.normals().T - hexagon.offsets() < 0.0, axis=1)
    return pts[inside][:n]


class TestPrism:
    def test_faces(self):
        faces = PRISM.faces()
        assert len(faces) == 8
        assert sum(f.kind is SurfaceKind.PRISM_SIDE for f in faces) == 6
        caps = [f for f in faces if f.is_cap]
        assert [c.theta_lo for c in caps] == [0.0, pytest.approx(math.pi / 3)]

    def test_contains(self):
        assert PRISM.contains(0.0, 0.0, 0.5)
        assert not PRISM.contains(0.0, 0.0, 1.1)
        assert not PRISM.contains(0.9, 0.0, 0.5)

    def test_corner_from_cap_pair(self):
        faces = PRISM.faces()
        found = triple_intersection(faces[0], faces[1], faces[6], ids=(0, 1, 6))
        assert len(found) == 1
        corner = PRISM.base.vertices[1]
        assert found[0].x == pytest.approx(corner[0]) and found[0].y == pytest.approx(corner[1])
        assert found[0].theta == 0.0
        assert found[0].provenance == (0, 1, 6)

    def test_two_caps_meet_nowhere(self):
        faces = PRISM.faces()
        assert triple_intersection(faces[0], faces[6], faces[7]) == []

    def test_duplicate_surfaces(self):
        faces = PRISM.faces()
        with pytest.raises(DegenerateInput):
            triple_intersection(faces[0], faces[0], faces[1])

    def test_prism_only_candidates(self):
        found, diag = enumerate_candidates(PRISM.faces())
        assert len(found) == 12
        assert diag.surfaces == 8
        corners = {(round(c.x, 9), round(c.y, 9)) for c in found}
        assert len(corners) == 6
        assert sorted({round(c.theta, 12) for c in found}) == [0.0, round(math.pi / 3, 12)]


class TestSurfaces:
    def test_rejects_non_polygon(self):
        with pytest.raises(DegenerateInput):
            build_surfaces([(0, 0), (1, 0), (0, 1)])

    def test_endpoints_are_minkowski_vertices(self, unit_square):
        hexagon = canonical_hexagon()
        for s in build_surfaces(unit_square, include_prism=False):
            theta = s.theta_lo + 0.37 * (s.theta_hi - s.theta_lo)
            region = minkowski_sum_convex(reflect_rotate(unit_square, theta), hexagon)
            verts = region.vertices + np.asarray(HEX_LATTICE.point(s.index))
            for t in (0.0, 1.0):
                p = s.point(theta, t)
                assert np.min(np.hypot(*(verts - p).T)) < 1e-9, (s.kind, s.feature, theta)

    def test_line_contains_facet(self, unit_square):
        for s in build_surfaces(unit_square, include_prism=False)[:40]:
            theta = s.theta_lo + 0.3 * (s.theta_hi - s.theta_lo)
            a, b, c = s.line_at(theta)
            for t in (0.0, 0.5, 1.0):
                x, y = s.point(theta, t)
                assert a * x + b * y == pytest.approx(c, abs=1e-9)

    def test_slope_intercept(self, unit_square):
        theta = 0.4
        s = next(
            s
            for s in build_surfaces(unit_square, include_prism=False)
            if s.theta_lo <= theta <= s.theta_hi and abs(s.line_at(theta)[1]) > 0.1
        )
        f, h = s.slope_intercept(theta)
        x, y = s.point(theta, 0.5)
        assert y == pytest.approx(f * x + h, abs=1e-9)


class TestCounting:
    def test_count_at_matches_fixed(self, rng):
        body, _ = centered(ConvexPolygon([(0, 0), (2.2, 0.3), (1.7, 1.6), (0.2, 1.1)]))
        regions = build_regions(body, 0.0)
        for x, y in random_hexagon_points(rng, 50):
            assert count_at(Candidate3D(x, y, 0.0, ()), body) == count_interior((x, y), regions)

    def test_triangles_count_like_the_whole(self, rng):
        body = square(2.0)
        pieces = list(triangulate(body.vertices).triangles)
        for x, y in random_hexagon_points(rng, 30):
            c = Candidate3D(float(x), float(y), 0.4, ())
            assert count_at(c, pieces) == count_at(c, body)


class TestOptimalPose:
    def test_unit_square_fits_one_cell(self, unit_square):
        result = optimal_pose(unit_square)
        assert result.count == 1

    def test_rejects_simple_polygon(self):
        with pytest.raises(DegenerateInput):
            optimal_pose(l_shape())

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as err:
            optimal_pose(rectangle(2.0, 0.5), budget=1)
        assert err.value.budget == 1

    @pytest.mark.slow
    def test_never_worse_than_fixed_or_sweep(self):
        poly = rectangle(2.0, 0.5)
        result = optimal_pose(poly)
        assert result.count <= cover_fixed(poly).count
        assert result.count <= sweep_baseline(poly, 8).count
        assert 0.0 <= result.theta <= math.pi / 3
        assert result.diagnostics["candidates"] > 0

    @pytest.mark.slow
    def test_cover_combined_verifies(self):
        poly = translate(ConvexPolygon([(0, 0), (2.4, 0.2), (2.0, 1.2), (0.3, 0.9)]), (5.0, -2.0))
        covering = cover_combined(poly)
        assert covering.algorithm == "combined"
        pose = Pose(covering.theta, covering.translation, covering.origin)
        assert verify_coverage(poly, covering.centers, pose=pose).valid


class TestSweep:
    def test_single_angle_is_fixed_at_zero(self, square10):
        assert sweep_baseline(square10, 1).count == optimal_translation(square10, 0.0).count

    def test_more_angles_never_worse(self):
        poly = rectangle(3.0, 0.7)
        assert sweep_baseline(poly, 8).count <= sweep_baseline(poly, 4).count

    def test_needs_an_angle(self, unit_square):
        with pytest.raises(DegenerateInput):
            sweep_baseline(unit_square, 0)

    def test_cover_sweep(self, square10):
        covering = cover_sweep(square10, 6)
        assert covering.algorithm == "sweep"
        assert covering.count == len(covering.centers)
        assert covering.count <= cover_fixed(square10).count


class TestNonconvex:
    def test_bowtie(self):
        with pytest.raises(NotSimple):
            optimal_pose_nonconvex([(0, 0), (1, 1), (1, 0), (0, 1)])

    def test_small_l_shape_fits_one_cell(self):
        small = [(0, 0), (0.8, 0), (0.8, 0.4), (0.4, 0.4), (0.4, 0.8), (0, 0.8)]
        result = optimal_pose_nonconvex(small)
        assert result.count == 1

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            optimal_pose_nonconvex(l_shape(), budget=1)

    @pytest.mark.slow
    def test_l_shape_against_hull(self):
        gamma = l_shape()
        result = optimal_pose_nonconvex(gamma)
        hull = convex_hull(gamma.vertices)
        theta_hull = minimize_f(centered(hull)[0]).theta_star
        assert 1 <= result.count <= optimal_translation(hull, theta_hull).count
        assert result.diagnostics["triangles"] == 4
        covering = cover_nonconvex(gamma)
        pose = Pose(covering.theta, covering.translation, covering.origin)
        assert verify_coverage(gamma, covering.centers, pose=pose).valid

    @pytest.mark.slow
    def test_convex_input_agrees_with_convex_search(self):
        poly = rectangle(2.0, 0.5)
        assert optimal_pose_nonconvex(poly).count == optimal_pose(poly).count


QUAD = centered(ConvexPolygon([(0, 0), (1.1, 0.1), (0.9, 0.8), (0.1, 0.7)]))[0]


@pytest.fixture(scope="module")
def quad_candidates():
    surfaces = build_surfaces(QUAD)
    found, _ = enumerate_candidates(surfaces)
    return surfaces, found


def _concurrency(group, theta: float) -> float:
    rows = np.stack([s.line_at(theta) for s in group])
    return float(np.linalg.det(rows) / np.prod(np.hypot(rows[:, 0], rows[:, 1])))


def _meeting_point(group, theta: float) -> np.ndarray:
    rows = np.stack([s.line_at(theta) for s in group])
    return np.linalg.lstsq(rows[:, :2], rows[:, 2], rcond=None)[0]


def _scan_roots(group, steps: int = 4000):
    """Sign changes of the concurrency determinant, refined by bisection."""

    lo = max(s.theta_lo for s in group)
    hi = min(s.theta_hi for s in group)
    if hi - lo < 1e-6:
        return []
    grid = np.linspace(lo, hi, steps + 1)
    values = np.array([_concurrency(group, t) for t in grid])
    if np.abs(values).max() < 1e-9:
        return []
    roots = []
    for k in np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0):
        a, b, fa = grid[k], grid[k + 1], values[k]
        for _ in range(60):
            m = (a + b) / 2.0
            fm = _concurrency(group, m)
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        roots.append((a + b) / 2.0)
    return roots


def _well_inside(group, theta: float, xy: np.ndarray, margin: float = 1e-4) -> bool:
    hexagon = canonical_hexagon()
    rows = np.stack([s.line_at(theta) for s in group])
    if np.max(np.abs(rows[:, :2] @ xy - rows[:, 2]) / np.hypot(rows[:, 0], rows[:, 1])) > 1e-7:
        return False
    if np.max(hexagon.normals() @ xy - hexagon.offsets()) > -margin:
        return False
    if not all(s.theta_lo + margin <= theta <= s.theta_hi - margin for s in group):
        return False
    return all(margin <= s.param(theta, xy) <= 1.0 - margin for s in group)


class TestTripleIntersection:
    def test_candidates_lie_on_their_surfaces(self, quad_candidates):
        surfaces, found = quad_candidates
        assert found
        hexagon = canonical_hexagon()
        for c in found:
            xy = np.array([c.x, c.y])
            assert -1e-9 <= c.theta <= math.pi / 3 + 1e-9
            assert np.max(hexagon.normals() @ xy - hexagon.offsets()) <= 1e-7
            for sid in c.provenance:
                s = surfaces[sid]
                if s.is_cap:
                    assert c.theta == s.theta_lo
                    continue
                a, b, rhs = s.line_at(c.theta)
                assert abs(a * c.x + b * c.y - rhs) / math.hypot(a, b) <= 1e-7
                assert s.theta_lo - 1e-9 <= c.theta <= s.theta_hi + 1e-9
                assert -1e-7 <= s.param(c.theta, xy) <= 1.0 + 1e-7

    def test_matches_theta_scan(self, quad_candidates):
        surfaces, found = quad_candidates
        triples = sorted(
            {
                c.provenance
                for c in found
                if not any(surfaces[i].is_cap for i in c.provenance)
                and any(surfaces[i].kind is SurfaceKind.POLY_VERTEX_HEX_EDGE for i in c.provenance)
            }
        )
        assert triples
        matched = 0
        for ids in triples[:25]:
            group = [surfaces[i] for i in ids]
            solved = triple_intersection(*group, ids=ids)
            assert len(solved) <= 6
            for c in solved:
                assert abs(_concurrency(group, c.theta)) <= 1e-7
            for theta in _scan_roots(group):
                xy = _meeting_point(group, theta)
                if not _well_inside(group, theta, xy):
                    continue
                matched += 1
                assert any(
                    abs(c.theta - theta) < 1e-6 and math.hypot(c.x - xy[0], c.y - xy[1]) < 1e-5 for c in solved
                ), (ids, theta)
        assert matched > 0


class TestPieceCounts:
    def test_union_between_largest_and_total(self):
        gamma = SimplePolygon(l_shape().vertices * 0.6)
        g = np.asarray(centroid(gamma))
        pieces = list(triangulate(SimplePolygon(gamma.vertices - g)).triangles)
        surfaces = []
        for layer, t in enumerate(pieces):
            surfaces.extend(build_surfaces(t, layer=layer, include_prism=False))
        surfaces.extend(PRISM.faces())
        found, _ = enumerate_candidates(surfaces)
        assert found
        for c in found[:200]:
            per_piece = [count_at(c, [t]) for t in pieces]
            whole = count_at(c, pieces)
            assert max(per_piece) <= whole <= sum(per_piece)


def _random_polygons(count: int, k: float, n_points: int = 6):
    return [random_convex_polygon(np.random.default_rng(seed), k, n_points) for seed in range(count)]


@pytest.mark.slow
class TestAcceptance:
    @pytest.mark.parametrize("poly", _random_polygons(10, 3.0), ids=[f"seed{s}" for s in range(10)])
    def test_dominates_fine_orientation_grid(self, poly):
        assert optimal_pose(poly).count <= sweep_baseline(poly, 720).count

    @pytest.mark.parametrize("poly", _random_polygons(3, 3.0), ids=[f"seed{s}" for s in range(3)])
    def test_dominates_pose_grid(self, poly):
        assert optimal_pose(poly).count <= oracle_grid_search(poly, 30, 30).count

    @pytest.mark.parametrize("poly", _random_polygons(5, 2.5), ids=[f"seed{s}" for s in range(5)])
    def test_nonconvex_agrees_on_convex_input(self, poly):
        assert optimal_pose_nonconvex(poly).count == optimal_pose(poly).count

"""Closed-form disc-count bounds, coverage certificates and a brute-force oracle.

Upper bounds
    ``toth_upper``: ``floor(2A/(3*sqrt3) + 2L/(pi*sqrt3) + 1)``.
    ``improved_upper``: ``floor`` of the expected number of cells met at a
    given orientation.

Lower bounds
    ``max{2A/(3*sqrt3), L/4}`` asymptotically, and with the explicit
    constants ``max{2(A - 2*pi^3/3)/(3*sqrt3), L/4 - pi}`` clamped at zero.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from config import CONFIG, SQRT3, THETA_PERIOD
from .errors import FrameMismatch
from .geom_core import (
    ConvexPolygon,
    Point2,
    SimplePolygon,
    area,
    centroid,
    clip_convex,
    convex_hull,
    diameter,
    minkowski_sum_convex,
    perimeter,
    sample_boundary,
    sample_interior,
)
from .hex_lattice import (
    HEX_LATTICE,
    HexLattice,
    LatticeIndex,
    canonical_hexagon,
    cell_containing,
    cell_polygon,
    cells_intersecting,
)
from .orientation import expected_hexagons, reflect_rotate
from .placement_fixed import RegionSet, centered, place
from .triangulation import triangulate

log = logging.getLogger(__name__)

RATIO_BOUND = 1.0 + 8.0 / (math.pi * SQRT3)
AREA_CONSTANT = 2.0 * math.pi**3 / 3.0


@dataclass(frozen=True)
class BoundsReport:
    """Bounds on the number of unit discs needed for a region."""

    toth_upper: int
    improved_upper: int
    lower_asymptotic: float
    lower_explicit: float
    ratio_bound: float = RATIO_BOUND

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class CoverageReport:
    valid: bool
    max_violation_distance: float
    uncovered_witness: Optional[Point2]
    cells_checked: int
    samples_checked: int


class Pose(NamedTuple):
    """Pose of a lattice covering: ``placed = rotate(poly - origin, -theta) + translation``."""

    theta: float
    translation: Point2
    origin: Point2


class OracleResult(NamedTuple):
    theta: float
    translation: Point2
    count: int


def toth_upper(a: float, length: float) -> int:
    return int(math.floor(2.0 * a / (3.0 * SQRT3) + 2.0 * length / (math.pi * SQRT3) + 1.0))


def improved_upper(poly: ConvexPolygon, theta: float) -> int:
    """``floor`` of the expected number of cells met at orientation ``theta``."""

    return int(math.floor(expected_hexagons(poly, theta) + 1e-12))


def lower_bound(a: float, length: float, explicit: bool = True) -> float:
    """Lower bound on the optimal number of unit discs.

    Parameters
    ----------
    a, length
        Area and perimeter of the region.
    explicit
        Use the explicit constants (``2*pi^3/3`` in the area term, ``pi`` in
        the perimeter term) instead of the asymptotic form.
    """

    if not explicit:
        return max(2.0 * a / (3.0 * SQRT3), length / 4.0)
    return max(2.0 * (a - AREA_CONSTANT) / (3.0 * SQRT3), length / 4.0 - math.pi, 0.0)


def approximation_ratio(n: int, a: float, length: float) -> float:
    lb = lower_bound(a, length, explicit=True)
    return math.inf if lb <= 0.0 else n / lb


def bounds_report(poly: Union[ConvexPolygon, SimplePolygon], theta: float) -> BoundsReport:
    """All bounds for ``poly`` with the improved upper bound taken at ``theta``.

    For a non-convex polygon the improved bound is taken from its convex hull.
    """

    a, length = area(poly), perimeter(poly)
    hull = poly if isinstance(poly, ConvexPolygon) else convex_hull(poly.vertices)
    return BoundsReport(
        toth_upper=toth_upper(a, length),
        improved_upper=improved_upper(hull, theta),
        lower_asymptotic=lower_bound(a, length, explicit=False),
        lower_explicit=lower_bound(a, length, explicit=True),
    )


def cauchy_residual(poly: ConvexPolygon, n: int = 10_000) -> float:
    """``|integral of the width over [0, pi] - perimeter|`` by the midpoint rule."""

    theta = (np.arange(n) + 0.5) * math.pi / n
    proj = poly.vertices @ np.stack([np.cos(theta), np.sin(theta)])
    widths = proj.max(axis=0) - proj.min(axis=0)
    return abs(float(widths.sum()) * math.pi / n - perimeter(poly))


# --- coverage verification -------------------------------------------------------


def _pieces(poly: Union[ConvexPolygon, SimplePolygon]) -> List[ConvexPolygon]:
    if isinstance(poly, ConvexPolygon):
        return [poly]
    if poly.is_convex():
        return [poly.to_convex()]
    return list(triangulate(poly).triangles)


def _to_pose(pts: np.ndarray, pose: Pose) -> np.ndarray:
    c, s = math.cos(-pose.theta), math.sin(-pose.theta)
    d = pts - np.asarray(pose.origin)
    return np.stack([c * d[:, 0] - s * d[:, 1], s * d[:, 0] + c * d[:, 1]], axis=1) + np.asarray(pose.translation)


def _from_pose(pts: np.ndarray, pose: Pose) -> np.ndarray:
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    d = pts - np.asarray(pose.translation)
    return np.stack([c * d[:, 0] - s * d[:, 1], s * d[:, 0] + c * d[:, 1]], axis=1) + np.asarray(pose.origin)


def _lattice_indices(pts: np.ndarray, lattice: HexLattice) -> Optional[List[LatticeIndex]]:
    out = []
    for p in pts:
        idx = cell_containing(p, lattice)
        if np.hypot(*(p - np.asarray(lattice.point(idx)))) > 1e-6:
            return None
        out.append(idx)
    return out


def _distance_to_cells(p: np.ndarray, indices: Sequence[LatticeIndex], lattice: HexLattice) -> float:
    if not indices:
        return math.inf
    hexagon = canonical_hexagon()
    centers = lattice.points(indices)
    # distance to each closed hexagon, zero inside
    rel = p[None, :] - centers
    edges = hexagon.edges()
    a, b = edges[:, 0, :], edges[:, 1, :]
    ab = b - a
    t = np.clip(np.einsum("kid,id->ki", rel[:, None, :] - a[None], ab) / np.einsum("id,id->i", ab, ab), 0.0, 1.0)
    closest = a[None] + t[..., None] * ab[None]
    dist = np.linalg.norm(rel[:, None, :] - closest, axis=2).min(axis=1)
    inside = np.all(rel @ hexagon.normals().T - hexagon.offsets() <= 0.0, axis=1)
    dist[inside] = 0.0
    return float(dist.min())


def _check_frame(poly: Union[ConvexPolygon, SimplePolygon], centers: np.ndarray) -> None:
    g = np.asarray(centroid(poly))
    half = diameter(poly) + 3.0
    if len(centers) and np.any(np.abs(centers - g).max(axis=1) > half):
        raise FrameMismatch(
            f"centers lie outside the window of half extent {half:.6g} around the polygon; "
            "centers and polygon are probably in different frames"
        )


def verify_coverage(
    poly: Union[ConvexPolygon, SimplePolygon],
    centers: Sequence[Sequence[float]],
    pose: Optional[Pose] = None,
    samples: Optional[int] = None,
    lattice: HexLattice = HEX_LATTICE,
) -> CoverageReport:
    """Certify that unit discs at ``centers`` cover ``poly``.

    Two tiers are run. When a ``pose`` is given and every center maps to a
    lattice point under it, every closed cell met by the placed polygon must
    be among the centers (exact). Independently, boundary samples and a
    triangular interior grid must lie within ``1 + slack`` of some center.

    Parameters
    ----------
    poly
        Region in the same frame as ``centers``.
    centers
        Disc centers.
    pose
        Pose under which the centers are lattice points.
    samples
        Number of boundary samples (default ``CONFIG.verification.boundary_samples``).

    Raises
    ------
    FrameMismatch
        Centers far outside the search window around the polygon.
    """

    cfg = CONFIG.verification
    samples = cfg.boundary_samples if samples is None else samples
    centers_arr = np.asarray(centers, dtype=float).reshape(-1, 2)
    _check_frame(poly, centers_arr)

    violation = 0.0
    witness: Optional[np.ndarray] = None
    cells_checked = 0

    if pose is not None and len(centers_arr):
        chosen = _lattice_indices(_to_pose(centers_arr, pose), lattice)
        if chosen is not None:
            chosen_set = set(chosen)
            chosen_list = sorted(chosen_set)
            for piece in _pieces(poly):
                moved = _to_pose(piece.vertices, pose)
                placed = ConvexPolygon._trusted(moved)
                met = cells_intersecting(placed, lattice)
                cells_checked += len(met)
                for idx in sorted(met - chosen_set):
                    ring = clip_convex(placed, cell_polygon(idx, lattice))
                    if len(ring) == 0:
                        ring = np.asarray(lattice.point(idx))[None, :]
                    probes = np.vstack([ring, ring.mean(axis=0, keepdims=True)])
                    dists = [_distance_to_cells(q, chosen_list, lattice) for q in probes]
                    k = int(np.argmax(dists))
                    if dists[k] > violation:
                        violation = dists[k]
                        witness = _from_pose(probes[k][None, :], pose)[0]

    pts = np.vstack([sample_boundary(poly, samples), sample_interior(poly, cfg.interior_spacing)])
    if len(centers_arr):
        nearest = np.full(len(pts), np.inf)
        for lo in range(0, len(centers_arr), 256):
            block = centers_arr[lo : lo + 256]
            d = np.linalg.norm(pts[:, None, :] - block[None, :, :], axis=2).min(axis=1)
            nearest = np.minimum(nearest, d)
    else:
        nearest = np.full(len(pts), np.inf)
    excess = nearest - 1.0
    k = int(np.argmax(excess))
    if excess[k] > violation:
        violation = float(excess[k])
        witness = pts[k]

    valid = violation <= cfg.slack
    if not valid:
        log.info("verify_coverage: violation %.3g at %s", violation, witness)
    return CoverageReport(
        valid=valid,
        max_violation_distance=float(max(violation, 0.0)),
        uncovered_witness=None if witness is None or valid else Point2(float(witness[0]), float(witness[1])),
        cells_checked=cells_checked,
        samples_checked=len(pts),
    )


# --- brute-force oracle -----------------------------------------------------------


def oracle_grid_search(
    poly: ConvexPolygon, theta_grid: int, trans_grid: int, lattice: HexLattice = HEX_LATTICE
) -> OracleResult:
    """Fewest cells over a grid of orientations and translations.

    Orientations are ``theta_grid`` equispaced angles in ``[0, pi/3)``;
    translations are a ``trans_grid x trans_grid`` grid over the fundamental
    parallelogram of the lattice. The count at a translation is the number of
    closed Minkowski regions containing it, and the winning pose is recounted
    with the exact cell test.
    """

    body, _ = centered(poly)
    s = (np.arange(trans_grid) + 0.5) / trans_grid
    ss, tt = np.meshgrid(s, s, indexing="ij")
    grid = np.stack([ss.ravel(), tt.ravel()], axis=1) @ lattice.matrix.T
    radius = float(np.linalg.norm(body.vertices, axis=1).max()) + 1.0 + float(np.linalg.norm(grid, axis=1).max())
    reach = int(math.ceil(radius / 1.5)) + 2
    indices = [
        LatticeIndex(m, n)
        for m in range(-2 * reach, 2 * reach + 1)
        for n in range(-reach, reach + 1)
        if np.hypot(*lattice.point((m, n))) <= radius + 1e-9
    ]
    hexagon = canonical_hexagon()
    best: Optional[Tuple[int, float, np.ndarray]] = None
    for k in range(theta_grid):
        theta = k * THETA_PERIOD / theta_grid
        base = minkowski_sum_convex(reflect_rotate(body, theta), hexagon)
        counts = RegionSet([base], indices, lattice, theta).closed_counts(grid)
        j = int(np.argmin(counts))
        if best is None or counts[j] < best[0]:
            best = (int(counts[j]), theta, grid[j])
    assert best is not None
    _, theta, translation = best
    exact = len(cells_intersecting(place(body, theta, translation), lattice))
    log.debug("oracle_grid_search: %d x %d^2 poses, best=%d", theta_grid, trans_grid, exact)
    return OracleResult(theta, Point2(float(translation[0]), float(translation[1])), exact)

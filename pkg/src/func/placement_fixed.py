"""Optimal translation of a convex region at a fixed lattice orientation.

For a region ``K`` placed at orientation ``theta`` the set of translations at
which it meets the cell of lattice point ``c`` is the Minkowski region
``T_c = reflect_rotate(K, theta) + hexagon + c``. The number of cells met at a
translation ``p`` is the number of regions containing ``p``. By periodicity
only translations in the central hexagon matter, and the minimum over the
arrangement of region boundaries is attained next to one of finitely many
candidate points (pairwise boundary crossings, crossings with the hexagon,
region corners inside the hexagon and the hexagon corners).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np

from config import CONFIG, SQRT3
from .errors import DegenerateInput
from .geom_core import (
    ConvexPolygon,
    Point2,
    centroid,
    min_enclosing_circle,
    minkowski_sum_convex,
    rotate,
    translate,
)
from .hex_lattice import (
    HEX_LATTICE,
    HexLattice,
    LatticeIndex,
    Window,
    canonical_hexagon,
    cell_containing,
    cells_intersecting,
    indices_in_window,
)
from .orientation import minimize_f, reflect_rotate

log = logging.getLogger(__name__)

# Bounding box of the central hexagon.
HEX_BOX = np.array([-SQRT3 / 2.0, -1.0, SQRT3 / 2.0, 1.0])
COMPASS = np.array(
    [[math.cos(k * math.pi / 4.0), math.sin(k * math.pi / 4.0)] for k in range(8)]
)


class MinkowskiRegion(NamedTuple):
    index: LatticeIndex
    polygon: ConvexPolygon


class RegionSet:
    """Translates of one or more base regions by a common list of lattice points.

    With a single base this is the family ``T_c`` of a convex region. With
    several bases (one per triangle of a non-convex region) a lattice index is
    counted once if any of its regions contains the query point.

    Parameters
    ----------
    bases
        Base Minkowski regions at the origin.
    indices
        Retained lattice indices.
    lattice
        Lattice providing the translation of each index.
    theta
        Orientation the regions were built for.
    """

    def __init__(
        self,
        bases: Sequence[ConvexPolygon],
        indices: Sequence[LatticeIndex],
        lattice: HexLattice = HEX_LATTICE,
        theta: float = 0.0,
    ) -> None:
        self.bases: Tuple[ConvexPolygon, ...] = tuple(bases)
        self.indices: List[LatticeIndex] = list(indices)
        self.centers = lattice.points(self.indices)
        self.theta = theta
        self._halfplanes = [(b.normals(), b.offsets()) for b in self.bases]

    def __len__(self) -> int:
        return len(self.indices) * len(self.bases)

    def __iter__(self) -> Iterator[MinkowskiRegion]:
        for base in self.bases:
            for idx, c in zip(self.indices, self.centers):
                yield MinkowskiRegion(idx, translate(base, c))

    def __getitem__(self, i: int) -> MinkowskiRegion:
        b, r = divmod(i, len(self.indices))
        return MinkowskiRegion(self.indices[r], translate(self.bases[b], self.centers[r]))

    def outside_distance(self, pts: np.ndarray) -> np.ndarray:
        """Signed distance of each point to each index's regions, ``(P, R)``.

        Negative values are inside. For several bases the smallest value over
        the bases is reported.
        """

        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.full((len(pts), len(self.indices)), np.inf)
        for normals, offsets in self._halfplanes:
            uc = self.centers @ normals.T
            for lo in range(0, len(pts), 512):
                up = pts[lo : lo + 512] @ normals.T
                d = (up[:, None, :] - uc[None, :, :] - offsets).max(axis=2)
                out[lo : lo + 512] = np.minimum(out[lo : lo + 512], d)
        return out

    def interior_counts(self, pts: np.ndarray, eps: Optional[float] = None) -> np.ndarray:
        eps = CONFIG.tolerances.eps if eps is None else eps
        return np.count_nonzero(self.outside_distance(pts) < -eps, axis=1)

    def closed_counts(self, pts: np.ndarray, eps: Optional[float] = None) -> np.ndarray:
        eps = CONFIG.tolerances.eps if eps is None else eps
        return np.count_nonzero(self.outside_distance(pts) <= eps, axis=1)

    def segments(self) -> Tuple[np.ndarray, np.ndarray]:
        """All region edges ``(k, 2, 2)`` with their owner ids ``(k,)``."""

        segs, owners = [], []
        n = len(self.indices)
        for b, base in enumerate(self.bases):
            e = base.edges()
            s = e[None, :, :, :] + self.centers[:, None, None, :]
            segs.append(s.reshape(-1, 2, 2))
            owners.append(np.repeat(np.arange(n) + b * n, len(e)))
        return np.concatenate(segs), np.concatenate(owners)

    def vertices(self) -> np.ndarray:
        out = [(b.vertices[None, :, :] + self.centers[:, None, :]).reshape(-1, 2) for b in self.bases]
        return np.concatenate(out)


class Provenance(Enum):
    REGION_REGION = "region-region"
    REGION_HEX_EDGE = "region-hex-edge"
    REGION_CORNER = "region-corner"
    HEX_CORNER = "hex-corner"


class CandidatePoint(NamedTuple):
    point: Point2
    provenance: Provenance
    source: Tuple[int, ...]


@dataclass
class PlacementResult:
    """Pose and covering indices found by a placement algorithm.

    ``translation`` and ``theta`` refer to the region translated so that its
    centroid ``origin`` sits at the origin; the placed region is
    ``rotate(region - origin, -theta) + translation``.
    """

    translation: Point2
    theta: float
    count: int
    indices: Set[LatticeIndex]
    origin: Point2 = Point2(0.0, 0.0)
    candidates_evaluated: int = 0
    diagnostics: Dict[str, float] = field(default_factory=dict)


@dataclass
class Covering:
    """Final answer: disc centers in the caller's coordinates plus the pose."""

    theta: float
    translation: Point2
    origin: Point2
    centers: List[Point2]
    count: int
    lattice: bool
    algorithm: str
    indices: List[LatticeIndex] = field(default_factory=list)
    bounds: Optional[object] = None
    diagnostics: Dict[str, float] = field(default_factory=dict)


def centered(poly: ConvexPolygon) -> Tuple[ConvexPolygon, Point2]:
    """Translate a polygon so that its centroid is the origin."""

    g = centroid(poly)
    return translate(poly, (-g.x, -g.y)), g


def place(poly: ConvexPolygon, theta: float, translation: Sequence[float]) -> ConvexPolygon:
    """Region (already centered) placed at orientation ``theta`` and ``translation``."""

    return translate(rotate(poly, -theta), translation)


def _box_overlap(boxes: np.ndarray, box: np.ndarray, margin: float) -> np.ndarray:
    return (
        (boxes[:, 0] <= box[2] + margin)
        & (boxes[:, 2] >= box[0] - margin)
        & (boxes[:, 1] <= box[3] + margin)
        & (boxes[:, 3] >= box[1] - margin)
    )


def build_regions(
    poly: ConvexPolygon,
    theta: float,
    lattice: HexLattice = HEX_LATTICE,
    window: Optional[Window] = None,
) -> RegionSet:
    """Minkowski regions of every lattice index in the window that can reach the hexagon.

    Parameters
    ----------
    poly
        Convex region with its centroid at the origin.
    theta
        Lattice orientation.
    lattice, window
        Lattice and search window; the window defaults to ``D + 3``.
    """

    if not isinstance(poly, ConvexPolygon):
        raise DegenerateInput("build_regions expects a ConvexPolygon")
    window = window or Window.for_polygon(poly)
    base = minkowski_sum_convex(reflect_rotate(poly, theta), canonical_hexagon())
    indices = indices_in_window(window, lattice)
    centers = lattice.points(indices)
    lo, hi = base.vertices.min(axis=0), base.vertices.max(axis=0)
    boxes = np.hstack([centers + lo, centers + hi])
    keep = _box_overlap(boxes, HEX_BOX, margin=1e-3)
    kept = [idx for idx, k in zip(indices, keep) if k]
    log.debug("build_regions: theta=%.6f kept %d of %d indices", theta, len(kept), len(indices))
    return RegionSet([base], kept, lattice, theta)


def _crossings(a: np.ndarray, b: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Proper or touching intersections between segment sets ``a`` and ``b``."""

    p, r = a[:, None, 0, :], (a[:, 1, :] - a[:, 0, :])[:, None, :]
    q, s = b[None, :, 0, :], (b[:, 1, :] - b[:, 0, :])[None, :, :]
    denom = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    qp = q - p
    scale = np.linalg.norm(r, axis=-1) * np.linalg.norm(s, axis=-1)
    ok = np.abs(denom) > 1e-12 * np.maximum(scale, 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / denom
        u = (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0]) / denom
    ok &= (t >= -tol) & (t <= 1.0 + tol) & (u >= -tol) & (u <= 1.0 + tol)
    i, j = np.nonzero(ok)
    pts = a[i, 0, :] + t[i, j, None] * (a[i, 1, :] - a[i, 0, :])
    return pts, i, j


def _in_hexagon(pts: np.ndarray, tol: float) -> np.ndarray:
    hexagon = canonical_hexagon()
    return np.all(pts @ hexagon.normals().T - hexagon.offsets() <= tol, axis=1)


def candidate_points(regions: RegionSet, hexagon: Optional[ConvexPolygon] = None) -> List[CandidatePoint]:
    """Points of the closed central hexagon at which the minimal count is attained.

    Contains all pairwise boundary crossings of regions, crossings of region
    boundaries with hexagon edges, region corners inside the hexagon and the
    six hexagon corners, deduplicated on a grid of ``CONFIG.tolerances.dedup``.
    """

    tol = CONFIG.tolerances
    hexagon = hexagon or canonical_hexagon()
    found: List[Tuple[np.ndarray, Provenance, np.ndarray]] = []
    found.append((hexagon.vertices, Provenance.HEX_CORNER, np.arange(6)[:, None]))

    if len(regions):
        segs, owners = regions.segments()
        boxes = np.hstack([segs.min(axis=1), segs.max(axis=1)])
        near = _box_overlap(boxes, HEX_BOX, margin=1e-6)
        segs, owners = segs[near], owners[near]

        verts = regions.vertices()
        inside = _in_hexagon(verts, tol.eps * 10)
        found.append((verts[inside], Provenance.REGION_CORNER, np.flatnonzero(inside)[:, None]))

        pts, i, j = _crossings(segs, hexagon.edges(), tol.eps)
        found.append((pts, Provenance.REGION_HEX_EDGE, np.stack([owners[i], j], axis=1)))

        for lo in range(0, len(segs), 256):
            block = segs[lo : lo + 256]
            pts, i, j = _crossings(block, segs, tol.eps)
            i = i + lo
            keep = owners[i] < owners[j]
            found.append((pts[keep], Provenance.REGION_REGION, np.stack([owners[i][keep], owners[j][keep]], axis=1)))

    out: List[CandidatePoint] = []
    seen: Set[Tuple[int, int]] = set()
    for pts, kind, src in found:
        if len(pts) == 0:
            continue
        inside = _in_hexagon(pts, tol.eps * 10)
        keys = np.round(pts / tol.dedup).astype(np.int64)
        for p, key, s, ok in zip(pts, keys, src, inside):
            k = (int(key[0]), int(key[1]))
            if not ok or k in seen:
                continue
            seen.add(k)
            out.append(CandidatePoint(Point2(float(p[0]), float(p[1])), kind, tuple(int(v) for v in s)))
    return out


def count_interior(p: Sequence[float], regions: RegionSet) -> int:
    """Number of lattice indices whose region contains ``p`` in its interior."""

    return int(regions.interior_counts(np.asarray(p, dtype=float))[0])


def count_closed(p: Sequence[float], regions: RegionSet) -> int:
    return int(regions.closed_counts(np.asarray(p, dtype=float))[0])


def _point_segment_distance(p: np.ndarray, segs: np.ndarray) -> np.ndarray:
    a, b = segs[:, 0, :], segs[:, 1, :]
    ab = b - a
    denom = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    return np.linalg.norm(a + t[:, None] * ab - p, axis=1)


def probe_points(p: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Points inside every open arrangement cell that has ``p`` on its boundary.

    Rays of the boundary pieces through ``p`` split a small disc around it into
    wedges; one probe is placed on each wedge bisector at half the distance to
    the nearest boundary not through ``p``. The eight compass offsets of
    magnitude ``CONFIG.tolerances.nudge`` are always included.
    """

    tol = CONFIG.tolerances
    p = np.asarray(p, dtype=float)
    probes = [p, p + tol.nudge * COMPASS]
    if len(segs) == 0:
        return np.vstack([probes[0][None, :], probes[1]])
    dist = _point_segment_distance(p, segs)
    incident = dist <= tol.eps
    other = dist[~incident]
    step = min(1e-4, 0.5 * float(other.min())) if len(other) else 1e-4
    step = max(step, tol.nudge)
    rays: List[float] = []
    for a, b in segs[incident]:
        da, db = np.hypot(*(p - a)), np.hypot(*(p - b))
        if da > tol.eps:
            rays.append(math.atan2(a[1] - p[1], a[0] - p[0]))
        if db > tol.eps:
            rays.append(math.atan2(b[1] - p[1], b[0] - p[0]))
    if rays:
        ang = np.unique(np.round(np.mod(rays, 2.0 * math.pi), 12))
        gaps = np.diff(np.concatenate([ang, [ang[0] + 2.0 * math.pi]]))
        mids = ang + gaps / 2.0
        probes.append(p + step * np.stack([np.cos(mids), np.sin(mids)], axis=1))
    return np.vstack([probes[0][None, :]] + probes[1:])


def probe_count(p: Sequence[float], regions: RegionSet, segs: Optional[np.ndarray] = None) -> Tuple[int, np.ndarray]:
    """Smallest closed count over the open cells touching ``p`` and the probe realizing it."""

    if segs is None:
        segs, _ = regions.segments()
    probes = probe_points(np.asarray(p, dtype=float), segs)
    counts = regions.closed_counts(probes)
    k = int(np.argmin(counts))
    return int(counts[k]), probes[k]


def fold_into_cell(p: Sequence[float], lattice: HexLattice = HEX_LATTICE) -> np.ndarray:
    """Translate ``p`` by a lattice vector into the closed central hexagon."""

    idx = cell_containing(p, lattice)
    return np.asarray(p, dtype=float) - np.asarray(lattice.point(idx))


def best_translation(
    regions: RegionSet, candidates: Sequence[CandidatePoint]
) -> Tuple[int, np.ndarray, int]:
    """Branch over candidates in increasing interior count.

    The interior count at a candidate is a lower bound for the count of every
    open cell touching it, so the scan stops once it reaches the best probed
    count. Ties keep the lexicographically smallest candidate.

    Returns
    -------
    tuple
        ``(count, probe point, candidates evaluated)``.
    """

    pts = np.array([c.point for c in candidates], dtype=float).reshape(-1, 2)
    interior = regions.interior_counts(pts)
    order = np.lexsort((pts[:, 1], pts[:, 0], interior))
    segs, _ = regions.segments()
    best_count: Optional[int] = None
    best_probe = pts[order[0]]
    evaluated = 0
    for k in order:
        if best_count is not None and interior[k] >= best_count:
            break
        evaluated += 1
        count, probe = probe_count(pts[k], regions, segs)
        if best_count is None or count < best_count:
            best_count, best_probe = count, probe
    assert best_count is not None
    return best_count, best_probe, evaluated


def optimal_translation(
    poly: ConvexPolygon, theta: float, lattice: HexLattice = HEX_LATTICE
) -> PlacementResult:
    """Translation minimizing the number of lattice cells met at orientation ``theta``.

    Parameters
    ----------
    poly
        Convex region in any position; it is centered at its centroid first.
    theta
        Lattice orientation.

    Returns
    -------
    PlacementResult
        Pose and the exact set of closed cells met by the placed region.
    """

    if not isinstance(poly, ConvexPolygon):
        raise DegenerateInput("optimal_translation expects a ConvexPolygon")
    body, g = centered(poly)
    regions = build_regions(body, theta, lattice)
    candidates = candidate_points(regions)
    probed, probe, evaluated = best_translation(regions, candidates)
    translation = fold_into_cell(probe, lattice)
    indices = cells_intersecting(place(body, theta, translation), lattice)
    log.info(
        "optimal_translation: theta=%.6f regions=%d candidates=%d evaluated=%d count=%d",
        theta, len(regions), len(candidates), evaluated, len(indices),
    )
    if len(indices) != probed:
        log.debug("probed count %d differs from exact recount %d", probed, len(indices))
    return PlacementResult(
        translation=Point2(float(translation[0]), float(translation[1])),
        theta=theta,
        count=len(indices),
        indices=indices,
        origin=g,
        candidates_evaluated=len(candidates),
    )


def to_input_frame(result: PlacementResult, lattice: HexLattice = HEX_LATTICE) -> List[Point2]:
    """Lattice centers of ``result`` mapped back to the caller's coordinates."""

    if not result.indices:
        return []
    idx = sorted(result.indices)
    c = lattice.points(idx) - np.asarray(result.translation)
    cs, sn = math.cos(result.theta), math.sin(result.theta)
    x = cs * c[:, 0] - sn * c[:, 1] + result.origin.x
    y = sn * c[:, 0] + cs * c[:, 1] + result.origin.y
    return [Point2(float(a), float(b)) for a, b in zip(x, y)]


def shortcut_covering(poly, algorithm: str) -> Optional[Covering]:
    """Single disc at the minimum enclosing circle when its radius is at most one."""

    circle = min_enclosing_circle(poly)
    if circle.radius > CONFIG.solver.shortcut_radius:
        return None
    g = centroid(poly)
    return Covering(
        theta=0.0,
        translation=Point2(0.0, 0.0),
        origin=g,
        centers=[circle.center],
        count=1,
        lattice=False,
        algorithm=algorithm,
    )


def covering_from_result(result: PlacementResult, algorithm: str, lattice: HexLattice = HEX_LATTICE) -> Covering:
    return Covering(
        theta=result.theta,
        translation=result.translation,
        origin=result.origin,
        centers=to_input_frame(result, lattice),
        count=result.count,
        lattice=True,
        algorithm=algorithm,
        indices=sorted(result.indices),
        diagnostics={"candidates_evaluated": result.candidates_evaluated, **result.diagnostics},
    )


def cover_fixed(poly: ConvexPolygon, lattice: HexLattice = HEX_LATTICE) -> Covering:
    """Orientation from the width objective, then the optimal translation.

    Regions whose minimum enclosing circle has radius at most one are covered
    by a single disc at the circle's center.
    """

    shortcut = shortcut_covering(poly, "fixed")
    if shortcut is not None:
        return shortcut
    body, _ = centered(poly)
    report = minimize_f(body)
    result = optimal_translation(poly, report.theta_star, lattice)
    return covering_from_result(result, "fixed", lattice)

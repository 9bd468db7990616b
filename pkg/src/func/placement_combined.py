"""Joint optimization of orientation and translation.

Sweeping the orientation over one period turns every boundary edge of every
Minkowski region ``T_c(theta)`` into a ruled surface in ``(x, y, theta)``
space. The count of regions containing a translation is constant on the open
cells of the arrangement of these surfaces inside the prism
``hexagon x [0, pi/3]``, and every cell has a vertex where three surfaces (or
two surfaces and a prism cap) meet. Those vertices are the candidates.

Surface geometry
----------------
At orientation ``theta`` the reflected, rotated region maps a vertex ``p`` to
``q(theta) = (-p.x*cos - p.y*sin, p.x*sin - p.y*cos)``. Each boundary facet of
``T_c(theta)`` is the segment ``anchor(theta) + t * direction(theta)``,
``t`` in ``[0, 1]``, and lies on the line ``A x + B y = C``. All of these
quantities are trig-linear, ``k0 + kc*cos(theta) + ks*sin(theta)``, and are
stored as coefficient triples. Substituting ``z = sin(theta)`` (injective on
``[0, pi/3]``) turns the concurrency condition of three lines into
``P(z) + sqrt(1 - z^2) Q(z) = 0``; squaring gives a polynomial of degree at
most six whose real roots are found in :mod:`src.func.polyroots`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Set, Tuple, Union

import numpy as np

from config import CONFIG, SQRT3, THETA_PERIOD
from .errors import BudgetExceeded, DegenerateInput
from .geom_core import (
    ConvexPolygon,
    Point2,
    SimplePolygon,
    centroid,
    convex_hull,
    min_enclosing_circle,
    minkowski_sum_convex,
)
from .hex_lattice import (
    HEX_LATTICE,
    HexLattice,
    LatticeIndex,
    Window,
    canonical_hexagon,
    cells_intersecting,
    hex_support_many,
    indices_in_window,
)
from .orientation import minimize_f, reflect_rotate
from .placement_fixed import (
    HEX_BOX,
    Covering,
    PlacementResult,
    RegionSet,
    _box_overlap,
    _crossings,
    _in_hexagon,
    _point_segment_distance,
    best_translation,
    candidate_points,
    centered,
    count_interior,
    covering_from_result,
    fold_into_cell,
    optimal_translation,
    place,
    probe_count,
    shortcut_covering,
)
from .polyroots import batch_polyadd, batch_polymul, real_roots
from .triangulation import Triangulation, triangulate

log = logging.getLogger(__name__)

Z_MAX = math.sin(THETA_PERIOD)
ONE_MINUS_Z2 = np.array([1.0, 0.0, -1.0])

__all__ = [
    "SurfaceKind",
    "SweptSurface",
    "Prism",
    "PRISM",
    "Candidate3D",
    "Diagnostics",
    "Triangulation",
    "build_surfaces",
    "triple_intersection",
    "enumerate_candidates",
    "count_at",
    "optimal_pose",
    "sweep_baseline",
    "triangulate",
    "optimal_pose_nonconvex",
    "cover_combined",
    "cover_nonconvex",
    "cover_sweep",
]


class SurfaceKind(Enum):
    POLY_EDGE_HEX_VERTEX = "poly-edge/hex-vertex"
    POLY_VERTEX_HEX_EDGE = "poly-vertex/hex-edge"
    PRISM_SIDE = "prism-side"
    PRISM_CAP = "prism-cap"


def _basis(theta: Union[float, np.ndarray]) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.ones_like(theta), np.cos(theta), np.sin(theta)], axis=-1)


@dataclass(frozen=True, eq=False)
class SweptSurface:
    """One boundary facet of a Minkowski region swept over an orientation range.

    Attributes
    ----------
    kind
        Which pair of features generates the facet.
    index
        Lattice index of the region; ``None`` for prism faces.
    feature
        ``(polygon edge, hexagon vertex)``, ``(polygon vertex, hexagon edge)``,
        ``(hexagon edge,)`` or ``(cap,)`` depending on ``kind``.
    line
        ``(3, 3)`` trig-linear coefficients of ``A``, ``B`` and ``C`` in
        ``A x + B y = C``.
    anchor, direction
        ``(2, 3)`` trig-linear coefficients of the segment start and its
        direction.
    theta_lo, theta_hi
        Orientation range on which the facet is part of the region boundary.
    box
        ``[xmin, ymin, xmax, ymax]`` of the swept facet.
    layer
        Triangle the facet belongs to (non-convex inputs).
    """

    kind: SurfaceKind
    index: Optional[LatticeIndex]
    feature: Tuple[int, ...]
    line: np.ndarray
    anchor: np.ndarray
    direction: np.ndarray
    theta_lo: float
    theta_hi: float
    box: np.ndarray
    layer: int = 0

    @property
    def is_cap(self) -> bool:
        return self.kind is SurfaceKind.PRISM_CAP

    def line_at(self, theta: float) -> np.ndarray:
        """``(A, B, C)`` at ``theta``."""

        return self.line @ _basis(theta)

    def point(self, theta: float, t: float) -> np.ndarray:
        b = _basis(theta)
        return self.anchor @ b + t * (self.direction @ b)

    def param(self, theta: float, xy: Sequence[float]) -> float:
        """Segment parameter of the projection of ``xy`` onto the facet line."""

        b = _basis(theta)
        a, d = self.anchor @ b, self.direction @ b
        return float((np.asarray(xy, dtype=float) - a) @ d / (d @ d))

    def rational_coefficients(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficients of ``y = f x + h`` in the basis ``(z, sqrt(1 - z^2), 1)``.

        Returns ``(num_f, num_h, den)``; ``f = num_f . basis / den . basis`` and
        likewise for ``h``, both sharing the denominator ``B``.
        """

        reorder = [2, 1, 0]
        a, b, c = self.line
        return -a[reorder], c[reorder], b[reorder]

    def slope_intercept(self, theta: float) -> Tuple[float, float]:
        z = math.sin(theta)
        basis = np.array([z, math.sqrt(max(0.0, 1.0 - z * z)), 1.0])
        num_f, num_h, den = self.rational_coefficients()
        d = float(den @ basis)
        return float(num_f @ basis) / d, float(num_h @ basis) / d


class Candidate3D(NamedTuple):
    x: float
    y: float
    theta: float
    provenance: Tuple[int, ...]


@dataclass
class Diagnostics:
    """Counters reported by the joint search."""

    surfaces: int = 0
    triples: int = 0
    cap_pairs: int = 0
    ill_conditioned: int = 0
    spurious_roots: int = 0
    candidates: int = 0
    evaluated: int = 0
    budget_hit: bool = False

    def as_dict(self) -> Dict[str, float]:
        return {k: (int(v) if not isinstance(v, bool) else v) for k, v in asdict(self).items()}


def _zeros23() -> np.ndarray:
    return np.zeros((2, 3))


def _surface_box(anchor: np.ndarray, direction: np.ndarray, lo: float, hi: float, radius: float) -> np.ndarray:
    steps = CONFIG.solver.grid_resolution
    theta = np.linspace(lo, hi, steps + 1)
    b = _basis(theta)
    a = b @ anchor.T
    e = a + b @ direction.T
    pts = np.vstack([a, e])
    delta = (hi - lo) / steps
    pad = radius * delta * delta / 8.0 + 1e-9
    return np.concatenate([pts.min(axis=0) - pad, pts.max(axis=0) + pad])


def _theta_window(start: float, length: float) -> Optional[Tuple[float, float]]:
    """Intersection of the arc ``start + [0, length]`` (mod 2 pi) with ``[0, pi/3]``."""

    a = math.fmod(start, 2.0 * math.pi)
    if a < 0.0:
        a += 2.0 * math.pi
    for shift in (0.0, -2.0 * math.pi):
        lo, hi = max(a + shift, 0.0), min(a + shift + length, THETA_PERIOD)
        if hi - lo > 1e-12:
            return lo, hi
    return None


@dataclass(frozen=True)
class Prism:
    """Translation/orientation search domain ``hexagon x [0, pi/3]``."""

    base: ConvexPolygon = field(default_factory=canonical_hexagon)
    theta_range: Tuple[float, float] = (0.0, THETA_PERIOD)

    def contains(self, x: float, y: float, theta: float, tol: float = 1e-7) -> bool:
        lo, hi = self.theta_range
        inside = bool(_in_hexagon(np.array([[x, y]]), tol)[0])
        return inside and lo - tol <= theta <= hi + tol

    def faces(self) -> List[SweptSurface]:
        """Six side faces (hexagon edges swept in ``theta``) and the two caps."""

        out: List[SweptSurface] = []
        lo, hi = self.theta_range
        verts = self.base.vertices
        for j in range(len(verts)):
            v, g = verts[j], verts[(j + 1) % len(verts)] - verts[j]
            line = np.array([[-g[1], 0.0, 0.0], [g[0], 0.0, 0.0], [-g[1] * v[0] + g[0] * v[1], 0.0, 0.0]])
            anchor = np.array([[v[0], 0.0, 0.0], [v[1], 0.0, 0.0]])
            direction = np.array([[g[0], 0.0, 0.0], [g[1], 0.0, 0.0]])
            box = np.concatenate([np.minimum(v, v + g), np.maximum(v, v + g)])
            out.append(SweptSurface(SurfaceKind.PRISM_SIDE, None, (j,), line, anchor, direction, lo, hi, box))
        for k, cap in enumerate((lo, hi)):
            out.append(
                SweptSurface(
                    SurfaceKind.PRISM_CAP, None, (k,), np.zeros((3, 3)), _zeros23(), _zeros23(),
                    cap, cap, HEX_BOX.copy(),
                )
            )
        return out


PRISM = Prism()


def _retained_indices(radius: float, lattice: HexLattice, window: Window) -> List[LatticeIndex]:
    # T_c(theta) stays inside the disc of radius r + 1 around c
    indices = indices_in_window(window, lattice)
    if not indices:
        return []
    centers = lattice.points(indices)
    keep = np.linalg.norm(centers, axis=1) <= radius + 2.0 + 1e-6
    return [idx for idx, k in zip(indices, keep) if k]


def build_surfaces(
    poly: ConvexPolygon,
    lattice: HexLattice = HEX_LATTICE,
    window: Optional[Window] = None,
    layer: int = 0,
    include_prism: bool = True,
) -> List[SweptSurface]:
    """Swept boundary facets of every region that can reach the central hexagon.

    Parameters
    ----------
    poly
        Convex region with its centroid at the origin (a triangle of a
        non-convex region shares the parent's origin).
    lattice, window
        Lattice and search window.
    layer
        Tag stored on every facet.
    include_prism
        Append the eight prism faces.
    """

    if not isinstance(poly, ConvexPolygon) or len(poly) < 3:
        raise DegenerateInput("build_surfaces expects a convex polygon")
    window = window or Window.for_polygon(poly)
    verts = poly.vertices
    n = len(verts)
    radius = float(np.linalg.norm(verts, axis=1).max())
    normals = poly.normals()
    alpha = np.arctan2(normals[:, 1], normals[:, 0])
    hexagon = canonical_hexagon()
    hv = hexagon.vertices

    edge_windows: List[Tuple[int, int, Tuple[float, float]]] = []
    vertex_windows: List[Tuple[int, int, Tuple[float, float]]] = []
    for i in range(n):
        exterior = math.fmod(alpha[i] - alpha[i - 1], 2.0 * math.pi) % (2.0 * math.pi)
        for j in range(6):
            w = _theta_window(alpha[i] + math.pi - (j + 1) * math.pi / 3.0, math.pi / 3.0)
            if w is not None:
                edge_windows.append((i, j, w))
            w = _theta_window(alpha[i - 1] + math.pi - (j + 1) * math.pi / 3.0, exterior)
            if w is not None:
                vertex_windows.append((i, j, w))

    surfaces: List[SweptSurface] = []
    for idx in _retained_indices(radius, lattice, window):
        c = np.asarray(lattice.point(idx))
        for i, j, (lo, hi) in edge_windows:
            p, e = verts[i], verts[(i + 1) % n] - verts[i]
            w = c + hv[j]
            line = np.array(
                [
                    [0.0, e[1], -e[0]],
                    [0.0, -e[0], -e[1]],
                    [-e[1] * p[0] + e[0] * p[1], e[1] * w[0] - e[0] * w[1], -e[0] * w[0] - e[1] * w[1]],
                ]
            )
            anchor = np.array([[w[0], -p[0], -p[1]], [w[1], -p[1], p[0]]])
            direction = np.array([[0.0, -e[0], -e[1]], [0.0, -e[1], e[0]]])
            box = _surface_box(anchor, direction, lo, hi, radius)
            if _box_overlap(box[None, :], HEX_BOX, 1e-6)[0]:
                surfaces.append(
                    SweptSurface(SurfaceKind.POLY_EDGE_HEX_VERTEX, idx, (i, j), line, anchor, direction, lo, hi, box, layer)
                )
        for i, j, (lo, hi) in vertex_windows:
            p, g = verts[i], hv[(j + 1) % 6] - hv[j]
            w = c + hv[j]
            line = np.array(
                [
                    [-g[1], 0.0, 0.0],
                    [g[0], 0.0, 0.0],
                    [-g[1] * w[0] + g[0] * w[1], g[1] * p[0] - g[0] * p[1], g[0] * p[0] + g[1] * p[1]],
                ]
            )
            anchor = np.array([[w[0], -p[0], -p[1]], [w[1], -p[1], p[0]]])
            direction = np.array([[g[0], 0.0, 0.0], [g[1], 0.0, 0.0]])
            box = _surface_box(anchor, direction, lo, hi, radius)
            if _box_overlap(box[None, :], HEX_BOX, 1e-6)[0]:
                surfaces.append(
                    SweptSurface(SurfaceKind.POLY_VERTEX_HEX_EDGE, idx, (i, j), line, anchor, direction, lo, hi, box, layer)
                )
    if include_prism:
        surfaces.extend(PRISM.faces())
    log.debug("build_surfaces: layer=%d surfaces=%d", layer, len(surfaces))
    return surfaces


# --- polynomial algebra in the ring R[z] + sqrt(1 - z^2) R[z] -------------------


def _cz(entry: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Trig-linear ``(..., 3)`` coefficients as ``(P, Q)`` with ``P + sqrt(1-z^2) Q``."""

    return entry[..., [0, 2]], entry[..., 1:2]


def _cz_mul(a: Tuple[np.ndarray, np.ndarray], b: Tuple[np.ndarray, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    pa, qa = a
    pb, qb = b
    p = batch_polyadd(batch_polymul(pa, pb), batch_polymul(batch_polymul(qa, qb), ONE_MINUS_Z2))
    q = batch_polyadd(batch_polymul(pa, qb), batch_polymul(qa, pb))
    return p, q


def _cz_sub(a: Tuple[np.ndarray, np.ndarray], b: Tuple[np.ndarray, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    return batch_polyadd(a[0], -b[0]), batch_polyadd(a[1], -b[1])


def _concurrency_polynomial(lines: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Determinant of three trig-linear lines ``(T, 3, 3, 3)`` as ``(P, Q)``."""

    m = [[_cz(lines[:, r, k]) for k in range(3)] for r in range(3)]

    def minor(r1: int, r2: int, k1: int, k2: int):
        return _cz_sub(_cz_mul(m[r1][k1], m[r2][k2]), _cz_mul(m[r1][k2], m[r2][k1]))

    t0 = _cz_mul(m[0][0], minor(1, 2, 1, 2))
    t1 = _cz_mul(m[0][1], minor(1, 2, 0, 2))
    t2 = _cz_mul(m[0][2], minor(1, 2, 0, 1))
    p, q = _cz_sub(t0, t1)
    return batch_polyadd(p, t2[0]), batch_polyadd(q, t2[1])


def _accept(
    surfaces: Sequence[SweptSurface], ids: np.ndarray, xy: np.ndarray, theta: np.ndarray, lines: np.ndarray
) -> np.ndarray:
    """Filter intersection points: residual, facet extent, orientation range, prism."""

    tol = CONFIG.tolerances
    ok = _in_hexagon(xy, 1e-7) & (theta >= -1e-9) & (theta <= THETA_PERIOD + 1e-9)
    b = _basis(theta)
    for col in range(ids.shape[1]):
        s_ids = ids[:, col]
        a, bb, c = lines[:, col, 0], lines[:, col, 1], lines[:, col, 2]
        norm = np.hypot(a, bb)
        resid = np.abs(a * xy[:, 0] + bb * xy[:, 1] - c) / np.where(norm > 0, norm, 1.0)
        ok &= resid <= tol.candidate_residual
        lo = np.array([surfaces[s].theta_lo for s in s_ids])
        hi = np.array([surfaces[s].theta_hi for s in s_ids])
        ok &= (theta >= lo - 1e-9) & (theta <= hi + 1e-9)
        anchor = np.stack([surfaces[s].anchor for s in s_ids])
        direction = np.stack([surfaces[s].direction for s in s_ids])
        a0 = np.einsum("kij,kj->ki", anchor, b)
        d0 = np.einsum("kij,kj->ki", direction, b)
        t = np.einsum("ki,ki->k", xy - a0, d0) / np.einsum("ki,ki->k", d0, d0)
        ok &= (t >= -1e-7) & (t <= 1.0 + 1e-7)
    return ok


def _solve_triples(
    surfaces: Sequence[SweptSurface], lines: np.ndarray, triples: np.ndarray, diag: Diagnostics
) -> List[Candidate3D]:
    if len(triples) == 0:
        return []
    tol = CONFIG.tolerances
    sub = lines[triples]
    p, q = _concurrency_polynomial(sub)
    squared = batch_polyadd(batch_polymul(p, p), -batch_polymul(batch_polymul(q, q), ONE_MINUS_Z2))
    scale = np.abs(sub).reshape(len(triples), -1).max(axis=1)
    flat = np.abs(squared).max(axis=1) <= 1e-18 * scale**6
    diag.ill_conditioned += int(flat.sum())
    live = np.flatnonzero(~flat)
    rows, z = real_roots(squared[live], 0.0, Z_MAX)
    if len(z) == 0:
        return []
    rows = live[rows]

    # undo the squaring: keep roots of P + sqrt(1 - z^2) Q
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    pv = np.polynomial.polynomial.polyval(z, p[rows].T, tensor=False)
    qv = np.polynomial.polynomial.polyval(z, q[rows].T, tensor=False)
    pq_scale = np.maximum(np.abs(p[rows]).max(axis=1), np.abs(q[rows]).max(axis=1))
    genuine = np.abs(pv + r * qv) <= tol.back_substitution * np.maximum(pq_scale, 1e-300)
    diag.spurious_roots += int((~genuine).sum())
    rows, z = rows[genuine], z[genuine]
    if len(z) == 0:
        return []
    theta = np.arcsin(z)

    at = np.einsum("kscj,kj->ksc", sub[rows], _basis(theta))
    best_d = np.zeros(len(rows))
    xy = np.zeros((len(rows), 2))
    for a_, b_ in ((0, 1), (0, 2), (1, 2)):
        la, lb = at[:, a_], at[:, b_]
        d = la[:, 0] * lb[:, 1] - lb[:, 0] * la[:, 1]
        dn = np.abs(d) / np.maximum(np.hypot(la[:, 0], la[:, 1]) * np.hypot(lb[:, 0], lb[:, 1]), 1e-300)
        better = dn > best_d
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (la[:, 2] * lb[:, 1] - lb[:, 2] * la[:, 1]) / d
            y = (la[:, 0] * lb[:, 2] - lb[:, 0] * la[:, 2]) / d
        xy[better] = np.stack([x, y], axis=1)[better]
        best_d = np.where(better, dn, best_d)
    parallel = best_d < 1e-9
    diag.ill_conditioned += int(parallel.sum())
    keep = ~parallel
    live_k = np.flatnonzero(keep)
    keep[live_k] = _accept(surfaces, triples[rows[live_k]], xy[live_k], theta[live_k], at[live_k])
    return [
        Candidate3D(float(x), float(y), float(t), tuple(int(s) for s in triples[k]))
        for (x, y), t, k in zip(xy[keep], theta[keep], rows[keep])
    ]


def _solve_cap_pairs(
    surfaces: Sequence[SweptSurface], lines: np.ndarray, pairs: np.ndarray, cap_id: int, theta0: float
) -> List[Candidate3D]:
    if len(pairs) == 0:
        return []
    at = np.einsum("kscj,j->ksc", lines[pairs], _basis(theta0))
    la, lb = at[:, 0], at[:, 1]
    d = la[:, 0] * lb[:, 1] - lb[:, 0] * la[:, 1]
    dn = np.abs(d) / np.maximum(np.hypot(la[:, 0], la[:, 1]) * np.hypot(lb[:, 0], lb[:, 1]), 1e-300)
    ok = dn > 1e-9
    with np.errstate(divide="ignore", invalid="ignore"):
        xy = np.stack(
            [(la[:, 2] * lb[:, 1] - lb[:, 2] * la[:, 1]) / d, (la[:, 0] * lb[:, 2] - lb[:, 0] * la[:, 2]) / d], axis=1
        )
    theta = np.full(len(pairs), theta0)
    live_k = np.flatnonzero(ok)
    ok[live_k] = _accept(surfaces, pairs[live_k], xy[live_k], theta[live_k], at[live_k])
    return [
        Candidate3D(float(x), float(y), theta0, (int(a), int(b), cap_id))
        for (x, y), (a, b) in zip(xy[ok], pairs[ok])
    ]


def triple_intersection(
    s1: SweptSurface, s2: SweptSurface, s3: SweptSurface, ids: Tuple[int, int, int] = (0, 1, 2)
) -> List[Candidate3D]:
    """Points where three facets meet inside the prism.

    Parameters
    ----------
    s1, s2, s3
        Distinct surfaces; at most one may be a prism cap.
    ids
        Surface ids recorded as provenance.

    Returns
    -------
    list of Candidate3D
        At most six points.
    """

    group = [s1, s2, s3]
    if len({id(s) for s in group}) < 3:
        raise DegenerateInput("triple_intersection needs three distinct surfaces")
    diag = Diagnostics()
    caps = [k for k, s in enumerate(group) if s.is_cap]
    lines = np.stack([s.line for s in group])
    if len(caps) > 1:
        return []
    if caps:
        k = caps[0]
        rest = [i for i in range(3) if i != k]
        found = _solve_cap_pairs(group, lines, np.array([rest]), k, group[k].theta_lo)
        return [Candidate3D(c.x, c.y, c.theta, (ids[rest[0]], ids[rest[1]], ids[k])) for c in found]
    found = _solve_triples(group, lines, np.array([[0, 1, 2]]), diag)
    return [Candidate3D(c.x, c.y, c.theta, ids) for c in found]


def _overlaps(surfaces: Sequence[SweptSurface]) -> np.ndarray:
    boxes = np.stack([s.box for s in surfaces])
    lo = np.array([s.theta_lo for s in surfaces])
    hi = np.array([s.theta_hi for s in surfaces])
    o = (
        (boxes[:, None, 0] <= boxes[None, :, 2] + 1e-9)
        & (boxes[None, :, 0] <= boxes[:, None, 2] + 1e-9)
        & (boxes[:, None, 1] <= boxes[None, :, 3] + 1e-9)
        & (boxes[None, :, 1] <= boxes[:, None, 3] + 1e-9)
        & (lo[:, None] <= hi[None, :] + 1e-9)
        & (lo[None, :] <= hi[:, None] + 1e-9)
    )
    np.fill_diagonal(o, False)
    return o


def enumerate_candidates(
    surfaces: Sequence[SweptSurface], budget: Optional[int] = None
) -> Tuple[List[Candidate3D], Diagnostics]:
    """All surface-triple and cap-pair intersections inside the prism.

    Triples are pruned to those whose bounding boxes and orientation ranges
    overlap pairwise.

    Raises
    ------
    BudgetExceeded
        More pruned triples than ``budget`` (default ``CONFIG.solver.budget``).
    """

    budget = CONFIG.solver.budget if budget is None else budget
    diag = Diagnostics(surfaces=len(surfaces))
    body = [k for k, s in enumerate(surfaces) if not s.is_cap]
    caps = [k for k, s in enumerate(surfaces) if s.is_cap]
    lines = np.stack([s.line for s in surfaces])
    sub = [surfaces[k] for k in body]
    body_ids = np.asarray(body, dtype=int)
    overlap = _overlaps(sub) if sub else np.zeros((0, 0), dtype=bool)

    pairs_per_cap: List[Tuple[int, np.ndarray]] = []
    for cap in caps:
        theta0 = surfaces[cap].theta_lo
        valid = np.array([s.theta_lo - 1e-9 <= theta0 <= s.theta_hi + 1e-9 for s in sub], dtype=bool)
        o = overlap & valid[:, None] & valid[None, :]
        a, b = np.nonzero(np.triu(o, 1))
        pairs_per_cap.append((cap, np.stack([body_ids[a], body_ids[b]], axis=1)))
        diag.cap_pairs += len(a)

    chunks: List[np.ndarray] = []
    total = diag.cap_pairs
    for i in range(len(sub)):
        nb = np.flatnonzero(overlap[i, i + 1 :]) + i + 1
        if len(nb) < 2:
            continue
        a, b = np.nonzero(np.triu(overlap[np.ix_(nb, nb)], 1))
        if len(a) == 0:
            continue
        total += len(a)
        if total > budget:
            diag.budget_hit = True
            log.warning("enumerate_candidates: triple budget %d exceeded", budget)
            raise BudgetExceeded(total, budget)
        chunks.append(np.stack([np.full(len(a), i), nb[a], nb[b]], axis=1))
    triples = body_ids[np.concatenate(chunks)] if chunks else np.zeros((0, 3), dtype=int)
    diag.triples = len(triples)

    found: List[Candidate3D] = []
    for lo in range(0, len(triples), 20_000):
        found.extend(_solve_triples(surfaces, lines, triples[lo : lo + 20_000], diag))
    for cap, pairs in pairs_per_cap:
        found.extend(_solve_cap_pairs(surfaces, lines, pairs, cap, surfaces[cap].theta_lo))

    dedup = CONFIG.tolerances.dedup
    seen: Set[Tuple[int, int, int]] = set()
    out: List[Candidate3D] = []
    for c in found:
        key = (round(c.x / dedup), round(c.y / dedup), round(c.theta / dedup))
        if key not in seen:
            seen.add(key)
            out.append(c)
    diag.candidates = len(out)
    log.info(
        "enumerate_candidates: surfaces=%d triples=%d cap_pairs=%d candidates=%d ill_conditioned=%d",
        diag.surfaces, diag.triples, diag.cap_pairs, diag.candidates, diag.ill_conditioned,
    )
    return out, diag


# --- counting ------------------------------------------------------------------


Bodies = Union[ConvexPolygon, Sequence[ConvexPolygon]]


def _as_bodies(poly: Bodies) -> List[ConvexPolygon]:
    return [poly] if isinstance(poly, ConvexPolygon) else list(poly)


def _radius(bodies: Sequence[ConvexPolygon]) -> float:
    return max(float(np.linalg.norm(b.vertices, axis=1).max()) for b in bodies)


def _window(bodies: Sequence[ConvexPolygon]) -> Window:
    return Window(2.0 * _radius(bodies) + 3.0)


def regions_at(
    bodies: Bodies, theta: float, indices: Sequence[LatticeIndex], lattice: HexLattice = HEX_LATTICE
) -> RegionSet:
    hexagon = canonical_hexagon()
    bases = [minkowski_sum_convex(reflect_rotate(b, theta), hexagon) for b in _as_bodies(bodies)]
    return RegionSet(bases, indices, lattice, theta)


def count_at(
    candidate: Candidate3D,
    poly: Bodies,
    lattice: HexLattice = HEX_LATTICE,
    window: Optional[Window] = None,
) -> int:
    """Interior count of the regions at the candidate's orientation.

    ``poly`` is the centered region (or its triangles) the surfaces were built
    from.
    """

    bodies = _as_bodies(poly)
    window = window or _window(bodies)
    indices = _retained_indices(_radius(bodies), lattice, window)
    regions = regions_at(bodies, candidate.theta, indices, lattice)
    return count_interior((candidate.x, candidate.y), regions)


def _support_planes(body: ConvexPolygon, thetas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Unit facet normals ``(k, M, 2)`` and offsets ``(k, M)`` of ``K(theta) + hexagon``."""

    hexagon = canonical_hexagon()
    ang = math.pi - thetas
    c, s = np.cos(ang)[:, None], np.sin(ang)[:, None]
    n, h = body.normals(), body.offsets()
    un = np.stack([c * n[:, 0] - s * n[:, 1], s * n[:, 0] + c * n[:, 1]], axis=-1)
    off_n = h[None, :] + hex_support_many(un)
    v = body.vertices
    kv = np.stack([c * v[:, 0] - s * v[:, 1], s * v[:, 0] + c * v[:, 1]], axis=-1)
    m = hexagon.normals()
    off_m = np.einsum("md,kvd->kmv", m, kv).max(axis=2) + hexagon.offsets()[None, :]
    normals = np.concatenate([un, np.broadcast_to(m, (len(thetas),) + m.shape)], axis=1)
    return normals, np.concatenate([off_n, off_m], axis=1)


def interior_counts_3d(
    bodies: Bodies, pts: np.ndarray, thetas: np.ndarray, centers: np.ndarray, eps: Optional[float] = None
) -> np.ndarray:
    """Vectorized interior counts at points that each carry their own orientation."""

    eps = CONFIG.tolerances.eps if eps is None else eps
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    thetas = np.asarray(thetas, dtype=float)
    out = np.zeros(len(pts), dtype=int)
    for lo in range(0, len(pts), 256):
        sl = slice(lo, lo + 256)
        dist = np.full((len(pts[sl]), len(centers)), np.inf)
        for body in _as_bodies(bodies):
            normals, offsets = _support_planes(body, thetas[sl])
            up = np.einsum("kmd,kd->km", normals, pts[sl])
            uc = np.einsum("kmd,cd->kmc", normals, centers)
            d = (up[:, :, None] - uc - offsets[:, :, None]).max(axis=1)
            dist = np.minimum(dist, d)
        out[sl] = np.count_nonzero(dist < -eps, axis=1)
    return out


def _local_vertices(p: np.ndarray, segs: np.ndarray, rho: float) -> np.ndarray:
    near = segs[_point_segment_distance(p, segs) <= rho]
    pts = [p[None, :]]
    if len(near) > 1:
        x, i, j = _crossings(near, near, CONFIG.tolerances.eps)
        pts.append(x[i < j])
    if len(near):
        pts.append(near.reshape(-1, 2))
    allpts = np.vstack(pts)
    return allpts[np.linalg.norm(allpts - p, axis=1) <= rho]


def probe_3d(
    x: float,
    y: float,
    theta: float,
    bodies: Bodies,
    indices: Sequence[LatticeIndex],
    lattice: HexLattice = HEX_LATTICE,
) -> Tuple[int, np.ndarray, float]:
    """Smallest closed count over the open 3D cells touching ``(x, y, theta)``.

    Probes the open 2D cells around the point at ``theta`` and, at
    ``theta -/+ CONFIG.tolerances.theta_nudge``, around every nearby
    arrangement vertex.
    """

    bodies = _as_bodies(bodies)
    delta = CONFIG.tolerances.theta_nudge
    rho = 10.0 * (_radius(bodies) + 3.0) * delta
    p = np.array([x, y])
    best: Optional[Tuple[int, np.ndarray, float]] = None
    for th in (theta, theta - delta, theta + delta):
        if th < 0.0 or th > THETA_PERIOD:
            continue
        regions = regions_at(bodies, th, indices, lattice)
        segs, _ = regions.segments()
        locals_ = p[None, :] if th == theta else _local_vertices(p, segs, rho)
        for q in locals_:
            count, probe = probe_count(q, regions, segs)
            if best is None or count < best[0]:
                best = (count, probe, th)
    assert best is not None
    return best


def _recount(bodies: Sequence[ConvexPolygon], theta: float, translation: np.ndarray, lattice: HexLattice) -> Set[LatticeIndex]:
    out: Set[LatticeIndex] = set()
    for b in bodies:
        out |= cells_intersecting(place(b, theta, translation), lattice)
    return out


def _fixed_seed(
    bodies: Sequence[ConvexPolygon], theta: float, indices: Sequence[LatticeIndex], lattice: HexLattice
) -> Tuple[int, np.ndarray]:
    regions = regions_at(bodies, theta, indices, lattice)
    _, probe, _ = best_translation(regions, candidate_points(regions))
    translation = fold_into_cell(probe, lattice)
    return len(_recount(bodies, theta, translation, lattice)), translation


def _joint_search(
    bodies: Sequence[ConvexPolygon],
    surfaces: Sequence[SweptSurface],
    seeds: Sequence[float],
    lattice: HexLattice,
    budget: Optional[int],
) -> Tuple[float, np.ndarray, Set[LatticeIndex], Diagnostics]:
    indices = _retained_indices(_radius(bodies), lattice, _window(bodies))
    centers = lattice.points(indices)

    # best pose so far: (count, theta, x, y) plus the exact translation
    best_key: Optional[Tuple[int, float, float, float]] = None
    best_pose: Tuple[float, np.ndarray] = (0.0, np.zeros(2))
    for th in seeds:
        count, translation = _fixed_seed(bodies, th, indices, lattice)
        key = (count, th, float(translation[0]), float(translation[1]))
        if best_key is None or key < best_key:
            best_key, best_pose = key, (th, translation)
    assert best_key is not None

    candidates, diag = enumerate_candidates(surfaces, budget)
    if candidates:
        pts = np.array([[c.x, c.y] for c in candidates])
        thetas = np.array([c.theta for c in candidates])
        interior = interior_counts_3d(bodies, pts, thetas, centers)
        order = np.lexsort((pts[:, 1], pts[:, 0], thetas, interior))
        for k in order:
            key = (int(interior[k]), float(thetas[k]), float(pts[k, 0]), float(pts[k, 1]))
            if key >= best_key:
                break
            diag.evaluated += 1
            _, probe, th = probe_3d(pts[k, 0], pts[k, 1], thetas[k], bodies, indices, lattice)
            translation = fold_into_cell(probe, lattice)
            count = len(_recount(bodies, th, translation, lattice))
            cand_key = (count, float(thetas[k]), float(pts[k, 0]), float(pts[k, 1]))
            if cand_key < best_key:
                best_key, best_pose = cand_key, (th, translation)
    theta, translation = best_pose
    indices_out = _recount(bodies, theta, translation, lattice)
    log.info(
        "joint search: candidates=%d evaluated=%d count=%d theta=%.9f",
        diag.candidates, diag.evaluated, len(indices_out), theta,
    )
    return theta, translation, indices_out, diag


def _lattice_shortcut(body_shape, bodies: Sequence[ConvexPolygon], lattice: HexLattice) -> Optional[Tuple[np.ndarray, Set[LatticeIndex]]]:
    # fits inside the inscribed circle of a cell
    circle = min_enclosing_circle(body_shape)
    if circle.radius >= SQRT3 / 2.0 - CONFIG.tolerances.eps:
        return None
    translation = -np.asarray(circle.center, dtype=float)
    found = _recount(bodies, 0.0, translation, lattice)
    return (translation, found) if len(found) == 1 else None


def optimal_pose(
    poly: ConvexPolygon, lattice: HexLattice = HEX_LATTICE, budget: Optional[int] = None
) -> PlacementResult:
    """Orientation and translation minimizing the number of cells met.

    The orientation found by the width objective seeds the search, so the
    result never uses more cells than the fixed-orientation placement.

    Raises
    ------
    DegenerateInput
        For non-convex input.
    BudgetExceeded
        When the pruned triple count exceeds the budget.
    """

    if not isinstance(poly, ConvexPolygon):
        raise DegenerateInput("optimal_pose expects a ConvexPolygon")
    body, g = centered(poly)
    shortcut = _lattice_shortcut(body, [body], lattice)
    if shortcut is not None:
        translation, found = shortcut
        return PlacementResult(Point2(*map(float, translation)), 0.0, 1, found, origin=g)
    surfaces = build_surfaces(body, lattice, _window([body]))
    theta_star = minimize_f(body).theta_star
    theta, translation, found, diag = _joint_search([body], surfaces, [theta_star], lattice, budget)
    return PlacementResult(
        translation=Point2(float(translation[0]), float(translation[1])),
        theta=float(theta),
        count=len(found),
        indices=found,
        origin=g,
        candidates_evaluated=diag.evaluated,
        diagnostics=diag.as_dict(),
    )


def sweep_baseline(poly: ConvexPolygon, k: int, lattice: HexLattice = HEX_LATTICE) -> PlacementResult:
    """Best optimal translation over ``k`` equispaced orientations in ``[0, pi/3)``."""

    if k < 1:
        raise DegenerateInput(f"sweep needs at least one angle, got {k}")
    best: Optional[PlacementResult] = None
    evaluated = 0
    for step in range(k):
        result = optimal_translation(poly, step * THETA_PERIOD / k, lattice)
        evaluated += result.candidates_evaluated
        if best is None or result.count < best.count:
            best = result
    assert best is not None
    best.candidates_evaluated = evaluated
    best.diagnostics = {"angles": k}
    log.info("sweep_baseline: k=%d count=%d theta=%.6f", k, best.count, best.theta)
    return best


def optimal_pose_nonconvex(
    gamma: Union[SimplePolygon, ConvexPolygon], lattice: HexLattice = HEX_LATTICE, budget: Optional[int] = None
) -> PlacementResult:
    """Joint search for a simple polygon, counting distinct lattice indices.

    The polygon is triangulated; a lattice index counts once if any triangle's
    region contains the translation.

    Raises
    ------
    NotSimple
        Self-intersecting boundary.
    BudgetExceeded
        When the pruned triple count exceeds the budget.
    """

    if isinstance(gamma, ConvexPolygon):
        gamma = SimplePolygon(gamma.vertices)
    elif not isinstance(gamma, SimplePolygon):
        gamma = SimplePolygon(gamma)
    g = centroid(gamma)
    shape = SimplePolygon(gamma.vertices - np.asarray(g))
    tri = triangulate(shape)
    bodies = list(tri.triangles)
    shortcut = _lattice_shortcut(shape, bodies, lattice)
    if shortcut is not None:
        translation, found = shortcut
        return PlacementResult(Point2(*map(float, translation)), 0.0, 1, found, origin=g)
    window = _window(bodies)
    surfaces: List[SweptSurface] = []
    for layer, t in enumerate(bodies):
        surfaces.extend(build_surfaces(t, lattice, window, layer=layer, include_prism=False))
    surfaces.extend(PRISM.faces())
    theta_hull = minimize_f(convex_hull(shape.vertices)).theta_star
    theta, translation, found, diag = _joint_search(bodies, surfaces, [0.0, theta_hull], lattice, budget)
    diagnostics = diag.as_dict()
    diagnostics["triangles"] = len(bodies)
    return PlacementResult(
        translation=Point2(float(translation[0]), float(translation[1])),
        theta=float(theta),
        count=len(found),
        indices=found,
        origin=g,
        candidates_evaluated=diag.evaluated,
        diagnostics=diagnostics,
    )


def cover_combined(poly: ConvexPolygon, lattice: HexLattice = HEX_LATTICE, budget: Optional[int] = None) -> Covering:
    shortcut = shortcut_covering(poly, "combined")
    if shortcut is not None:
        return shortcut
    return covering_from_result(optimal_pose(poly, lattice, budget), "combined", lattice)


def cover_nonconvex(gamma: SimplePolygon, lattice: HexLattice = HEX_LATTICE, budget: Optional[int] = None) -> Covering:
    shortcut = shortcut_covering(gamma, "nonconvex")
    if shortcut is not None:
        return shortcut
    return covering_from_result(optimal_pose_nonconvex(gamma, lattice, budget), "nonconvex", lattice)


def cover_sweep(poly: ConvexPolygon, k: Optional[int] = None, lattice: HexLattice = HEX_LATTICE) -> Covering:
    shortcut = shortcut_covering(poly, "sweep")
    if shortcut is not None:
        return shortcut
    k = CONFIG.solver.sweep_angles if k is None else k
    return covering_from_result(sweep_baseline(poly, k, lattice), "sweep", lattice)

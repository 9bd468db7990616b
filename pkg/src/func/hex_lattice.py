"""The hexagonal lattice, its search window and its Voronoi cells.

Lattice points are ``m * (sqrt(3), 0) + n * (sqrt(3)/2, 3/2)``. Their Voronoi
cells are regular hexagons of circumradius 1 with vertices at angles
``pi/6 + k*pi/3``; any covering by cells is therefore a covering by unit
discs centered at the same lattice points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, NamedTuple, Set, Tuple

import numpy as np

from config import CONFIG, LATTICE_BASIS, VORONOI_PHASE
from .errors import DegenerateInput, UnsupportedPhase
from .geom_core import ConvexPolygon, Point2, diameter


class LatticeIndex(NamedTuple):
    m: int
    n: int


@dataclass(frozen=True)
class HexLattice:
    """Hexagonal lattice spanned by two basis vectors of length sqrt(3)."""

    basis1: Point2 = field(default_factory=lambda: Point2(*LATTICE_BASIS[0]))
    basis2: Point2 = field(default_factory=lambda: Point2(*LATTICE_BASIS[1]))

    @property
    def matrix(self) -> np.ndarray:
        """Columns are the basis vectors."""

        return np.array([[self.basis1.x, self.basis2.x], [self.basis1.y, self.basis2.y]])

    def point(self, idx: Tuple[int, int]) -> Point2:
        m, n = idx
        return Point2(m * self.basis1.x + n * self.basis2.x, m * self.basis1.y + n * self.basis2.y)

    def points(self, indices: Iterable[Tuple[int, int]]) -> np.ndarray:
        """Vectorized :meth:`point`, returns an ``(k, 2)`` array."""

        idx = np.asarray(list(indices), dtype=float).reshape(-1, 2)
        return idx @ self.matrix.T


HEX_LATTICE = HexLattice()


@dataclass(frozen=True)
class Window:
    """Square search window ``[-h, h]^2`` with ``h = D + 3``."""

    half_extent: float

    def __post_init__(self) -> None:
        if not self.half_extent >= 3.0:
            raise DegenerateInput(f"window half extent must be >= 3, got {self.half_extent}")

    @classmethod
    def for_polygon(cls, poly) -> "Window":
        return cls(diameter(poly) + 3.0)


def lattice_point(idx: Tuple[int, int], lattice: HexLattice = HEX_LATTICE) -> Point2:
    return lattice.point(idx)


def canonical_hexagon(phase: float = VORONOI_PHASE) -> ConvexPolygon:
    """Regular hexagon of circumradius 1 centered at the origin.

    Parameters
    ----------
    phase
        Angle of the first vertex: ``0`` (textbook support-function
        convention) or ``pi/6`` (Voronoi cell of the lattice, the default).

    Raises
    ------
    UnsupportedPhase
        For any other phase.
    """

    if not (abs(phase) < 1e-12 or abs(phase - math.pi / 6.0) < 1e-12):
        raise UnsupportedPhase(f"phase must be 0 or pi/6, got {phase}")
    k = np.arange(6)
    ang = phase + k * math.pi / 3.0
    return ConvexPolygon._trusted(np.stack([np.cos(ang), np.sin(ang)], axis=1))


def hex_support(phi: float, phase: float = VORONOI_PHASE) -> float:
    """Support function of the canonical hexagon, ``max_k cos(phi - phase - k*pi/3)``."""

    if not (abs(phase) < 1e-12 or abs(phase - math.pi / 6.0) < 1e-12):
        raise UnsupportedPhase(f"phase must be 0 or pi/6, got {phase}")
    k = np.arange(6)
    return float(np.max(np.cos(phi - phase - k * math.pi / 3.0)))


def hex_support_many(u: np.ndarray) -> np.ndarray:
    """Support of the tiling hexagon along each row of ``u`` (not necessarily unit)."""

    verts = canonical_hexagon().vertices
    return np.max(np.asarray(u, dtype=float) @ verts.T, axis=-1)


def cell_polygon(idx: Tuple[int, int], lattice: HexLattice = HEX_LATTICE) -> ConvexPolygon:
    """Closed Voronoi hexagon of a lattice index."""

    return ConvexPolygon._trusted(canonical_hexagon().vertices + np.asarray(lattice.point(idx)))


def cell_containing(p: Tuple[float, float], lattice: HexLattice = HEX_LATTICE) -> LatticeIndex:
    """Index of the lattice point whose closed Voronoi cell contains ``p``.

    Rounds in lattice coordinates, then checks the nearby centers; ties are
    broken toward the lexicographically smallest ``(m, n)``.
    """

    x, y = float(p[0]), float(p[1])
    coords = np.linalg.solve(lattice.matrix, np.array([x, y]))
    m0, n0 = int(round(coords[0])), int(round(coords[1]))
    nearby = []
    for dm in (-1, 0, 1):
        for dn in (-1, 0, 1):
            idx = (m0 + dm, n0 + dn)
            c = lattice.point(idx)
            nearby.append((math.hypot(x - c.x, y - c.y), idx))
    closest = min(d for d, _ in nearby)
    tol = CONFIG.tolerances.eps
    return LatticeIndex(*min(idx for d, idx in nearby if d <= closest + tol))


def _indices_in_box(xmin: float, ymin: float, xmax: float, ymax: float, lattice: HexLattice) -> List[LatticeIndex]:
    b1, b2 = lattice.basis1, lattice.basis2
    n_lo, n_hi = math.floor(ymin / b2.y) - 1, math.ceil(ymax / b2.y) + 1
    out: List[LatticeIndex] = []
    for n in range(n_lo, n_hi + 1):
        y = n * b2.y
        if y < ymin or y > ymax:
            continue
        shift = n * b2.x
        m_lo = math.floor((xmin - shift) / b1.x) - 1
        m_hi = math.ceil((xmax - shift) / b1.x) + 1
        for m in range(m_lo, m_hi + 1):
            x = m * b1.x + shift
            if xmin <= x <= xmax:
                out.append(LatticeIndex(m, n))
    return sorted(out)


def indices_in_window(w: Window, lattice: HexLattice = HEX_LATTICE) -> List[LatticeIndex]:
    """All indices whose lattice point lies in ``[-w, w]^2``, sorted."""

    h = w.half_extent
    return _indices_in_box(-h, -h, h, h, lattice)


def cells_intersecting(poly: ConvexPolygon, lattice: HexLattice = HEX_LATTICE) -> Set[LatticeIndex]:
    """Indices whose closed hexagon meets the closed (placed) polygon.

    Candidates come from the polygon's bounding box inflated by one cell; each
    is decided by an exact separating-axis test.
    """

    eps = CONFIG.tolerances.eps
    xmin, ymin, xmax, ymax = poly.bounds()
    candidates = _indices_in_box(xmin - 1.0, ymin - 1.0, xmax + 1.0, ymax + 1.0, lattice)
    if not candidates:
        return set()
    centers = lattice.points(candidates)
    hexagon = canonical_hexagon()
    axes = np.vstack([poly.normals(), hexagon.normals()[:3]])
    proj = poly.vertices @ axes.T
    pmin, pmax = proj.min(axis=0), proj.max(axis=0)
    reach = hex_support_many(axes)
    cproj = centers @ axes.T
    hit = np.all((cproj - reach <= pmax + eps) & (cproj + reach >= pmin - eps), axis=1)
    return {idx for idx, ok in zip(candidates, hit) if ok}

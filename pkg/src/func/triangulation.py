"""Ear-clipping triangulation of simple polygons."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from config import CONFIG
from .geom_core import ConvexPolygon, SimplePolygon, area

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Triangulation:
    """Interior-disjoint triangles whose union is the source polygon."""

    triangles: Tuple[ConvexPolygon, ...]
    corners: Tuple[Tuple[int, int, int], ...]

    def __len__(self) -> int:
        return len(self.triangles)

    def total_area(self) -> float:
        return float(sum(area(t) for t in self.triangles))


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _in_triangle(a: np.ndarray, b: np.ndarray, c: np.ndarray, pts: np.ndarray, eps: float) -> np.ndarray:
    """Closed point-in-triangle test for a CCW triangle."""

    def side(u, v):
        return (v[0] - u[0]) * (pts[:, 1] - u[1]) - (v[1] - u[1]) * (pts[:, 0] - u[0])

    return (side(a, b) >= -eps) & (side(b, c) >= -eps) & (side(c, a) >= -eps)


def triangulate(gamma: Union[SimplePolygon, np.ndarray, List]) -> Triangulation:
    """Triangulate a simple polygon by clipping ears.

    Parameters
    ----------
    gamma
        Simple polygon, or a vertex list that is validated as one.

    Returns
    -------
    Triangulation
        ``N - 2`` triangles for an ``N``-gon in general position. Collinear
        leftovers produced while clipping are dropped without a triangle.

    Raises
    ------
    NotSimple
        If the boundary intersects itself.
    """

    if not isinstance(gamma, SimplePolygon):
        gamma = SimplePolygon(gamma)
    eps = CONFIG.tolerances.eps
    verts = gamma.vertices
    ring: List[int] = list(range(len(verts)))
    scale = max(1.0, float(np.abs(verts).max()))
    tol = eps * scale * scale
    triangles: List[ConvexPolygon] = []
    corners: List[Tuple[int, int, int]] = []

    while len(ring) > 3:
        n = len(ring)
        clipped = False
        for k in range(n):
            i, j, l = ring[k - 1], ring[k], ring[(k + 1) % n]
            a, b, c = verts[i], verts[j], verts[l]
            turn = _orient(a, b, c)
            if abs(turn) <= tol:
                # collinear leftover, nothing to cover
                ring.pop(k)
                clipped = True
                break
            if turn < 0.0:
                continue
            others = [v for v in ring if v not in (i, j, l)]
            if others and np.any(_in_triangle(a, b, c, verts[others], tol)):
                continue
            triangles.append(ConvexPolygon._trusted(np.array([a, b, c])))
            corners.append((i, j, l))
            ring.pop(k)
            clipped = True
            break
        if not clipped:
            # numerically stuck: clip the most convex vertex
            turns = [_orient(verts[ring[k - 1]], verts[ring[k]], verts[ring[(k + 1) % len(ring)]]) for k in range(len(ring))]
            k = int(np.argmax(turns))
            i, j, l = ring[k - 1], ring[k], ring[(k + 1) % len(ring)]
            log.warning("triangulate: no clean ear among %d vertices, clipping vertex %d", len(ring), j)
            triangles.append(ConvexPolygon._trusted(verts[[i, j, l]]))
            corners.append((i, j, l))
            ring.pop(k)

    if len(ring) == 3 and _orient(*verts[ring]) > tol:
        triangles.append(ConvexPolygon._trusted(verts[ring]))
        corners.append(tuple(ring))
    log.debug("triangulate: %d vertices -> %d triangles", len(verts), len(triangles))
    return Triangulation(tuple(triangles), tuple(corners))

"""Orientation objective of the lattice covering.

The expected number of lattice cells met by a randomly translated region
depends on the orientation only through

    f(theta) = w(theta) + w(theta + pi/3) + w(theta + 2*pi/3),

where ``w`` is the width function of the region. ``f`` has period pi/3 and is
piecewise sinusoidal, so its minimum over one period is found exactly by
evaluating a finite candidate set.

Orientation convention: ``theta`` is the rotation of the lattice relative to
the region, i.e. placing a region at orientation ``theta`` rotates it by
``-theta``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from config import HEX_AREA, SQRT3, THETA_PERIOD
from .errors import DegenerateInput
from .geom_core import ConvexPolygon, area, minkowski_sum_convex, reflect_origin, rotate
from .hex_lattice import canonical_hexagon

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WidthProfile:
    """Piecewise description of the width function on ``[0, pi)``.

    Attributes
    ----------
    breakpoints
        Sorted angles in ``[0, pi)`` where the active vertex pair changes.
    pairs
        For each piece ``[breakpoints[i], breakpoints[i+1])`` (the last piece
        wraps around to ``pi``), the vertex indices attaining ``h(theta)`` and
        ``h(theta + pi)``.
    vertices
        Polygon vertices the pairs refer to.
    """

    breakpoints: np.ndarray
    pairs: Tuple[Tuple[int, int], ...]
    vertices: np.ndarray

    def piece_of(self, theta: float) -> int:
        t = math.fmod(theta, math.pi)
        if t < 0.0:
            t += math.pi
        return (int(np.searchsorted(self.breakpoints, t, side="right")) - 1) % len(self.breakpoints)

    def chord(self, theta: float) -> np.ndarray:
        """Vector ``v - u`` of the active pair, so that ``w(theta) = (v - u) . e(theta)``.

        The pair is defined on ``[0, pi)``; angles in ``[pi, 2*pi)`` use the
        swapped pair.
        """

        v, u = self.pairs[self.piece_of(theta)]
        d = self.vertices[v] - self.vertices[u]
        if math.fmod(theta, 2.0 * math.pi) % (2.0 * math.pi) >= math.pi:
            d = -d
        return d

    def __call__(self, theta: float) -> float:
        return float(self.chord(theta) @ np.array([math.cos(theta), math.sin(theta)]))


def reflect_rotate(poly: ConvexPolygon, theta: float) -> ConvexPolygon:
    """The region as it enters the Minkowski sums at lattice orientation ``theta``.

    Equals the point reflection of the region rotated by ``-theta``.
    """

    return reflect_origin(rotate(poly, -theta))


def _edge_normal_angles(poly: ConvexPolygon) -> np.ndarray:
    n = poly.normals()
    return np.arctan2(n[:, 1], n[:, 0])


def width_profile(poly: ConvexPolygon) -> WidthProfile:
    """Build the piecewise width profile of a convex polygon.

    Breakpoints are the outward edge-normal angles of the polygon and of its
    reflection, reduced modulo pi.
    """

    if not isinstance(poly, ConvexPolygon) or len(poly) < 3:
        raise DegenerateInput("width profile needs a convex polygon")
    bp = np.unique(np.round(np.mod(_edge_normal_angles(poly), math.pi), 15))
    bp = bp[bp < math.pi]
    if bp[0] > 0.0:
        bp = np.concatenate([[0.0], bp])
    ends = np.concatenate([bp[1:], [math.pi]])
    pairs: List[Tuple[int, int]] = []
    for lo, hi in zip(bp, ends):
        mid = 0.5 * (lo + hi)
        proj = poly.vertices @ np.array([math.cos(mid), math.sin(mid)])
        pairs.append((int(np.argmax(proj)), int(np.argmin(proj))))
    return WidthProfile(bp, tuple(pairs), poly.vertices)


def objective_f(poly: ConvexPolygon, theta: float) -> float:
    """``f(theta) = w(theta) + w(theta + pi/3) + w(theta + 2*pi/3)``."""

    k = np.arange(3) * THETA_PERIOD + theta
    u = np.stack([np.cos(k), np.sin(k)], axis=1)
    proj = poly.vertices @ u.T
    return float((proj.max(axis=0) - proj.min(axis=0)).sum())


@dataclass(frozen=True)
class ObjectiveReport:
    """Minimizer of ``f`` over one period ``[0, pi/3)``."""

    theta_star: float
    f_min: float
    evaluated_candidates: int


def minimize_f(poly: ConvexPolygon) -> ObjectiveReport:
    """Global minimum of the orientation objective.

    On every piece between consecutive breakpoints of the three shifted width
    profiles, ``f`` is a single sinusoid ``a*cos(theta) + b*sin(theta)``; the
    candidate set is all breakpoints plus each piece's interior critical point.
    Ties are broken toward the smallest angle.
    """

    profile = width_profile(poly)
    shifts = np.arange(3) * THETA_PERIOD
    bp = np.unique(np.round(np.mod(np.concatenate([profile.breakpoints - s for s in shifts]), THETA_PERIOD), 15))
    bp = bp[bp < THETA_PERIOD]
    if len(bp) == 0 or bp[0] > 0.0:
        bp = np.concatenate([[0.0], bp])
    ends = np.concatenate([bp[1:], [THETA_PERIOD]])
    candidates: List[float] = list(bp)
    for lo, hi in zip(bp, ends):
        mid = 0.5 * (lo + hi)
        coeff = np.zeros(2)
        for s in shifts:
            d = profile.chord(mid + s)
            c, sn = math.cos(s), math.sin(s)
            # d . e(theta + s) = (R(-s) d) . e(theta)
            coeff += np.array([c * d[0] + sn * d[1], -sn * d[0] + c * d[1]])
        crit = math.atan2(coeff[1], coeff[0])
        for t in (crit, crit + math.pi):
            t = math.fmod(t, 2.0 * math.pi)
            t = t + 2.0 * math.pi if t < 0.0 else t
            for k in range(7):
                cand = t - k * THETA_PERIOD
                if lo < cand < hi:
                    candidates.append(cand)
    values = np.array([objective_f(poly, t) for t in candidates])
    order = np.argsort(candidates, kind="stable")
    cand_sorted = np.asarray(candidates)[order]
    val_sorted = values[order]
    best = float(val_sorted.min())
    tol = 1e-12 * max(1.0, best)
    pick = int(np.flatnonzero(val_sorted <= best + tol)[0])
    log.debug("minimize_f: %d candidates, f_min=%.12g", len(candidates), best)
    return ObjectiveReport(float(cand_sorted[pick]), float(val_sorted[pick]), len(candidates))


def hexagon_count_estimate(area_value: float, f_value: float) -> float:
    """Expected number of cells met by a random translate: ``2A/(3*sqrt3) + 2f/(3*sqrt3) + 1``."""

    return 2.0 * area_value / (3.0 * SQRT3) + 2.0 * f_value / (3.0 * SQRT3) + 1.0


def expected_hexagons(poly: ConvexPolygon, theta: float) -> float:
    return hexagon_count_estimate(area(poly), objective_f(poly, theta))


def minkowski_identity_gap(poly: ConvexPolygon, theta: float) -> float:
    """``|area(K + H) - (A + 3*sqrt3/2 + f(theta))|`` for ``K = reflect_rotate(poly, theta)``."""

    total = area(minkowski_sum_convex(reflect_rotate(poly, theta), canonical_hexagon()))
    return abs(total - (area(poly) + HEX_AREA + objective_f(poly, theta)))

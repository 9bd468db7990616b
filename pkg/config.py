"""Global configuration for the hexagonal disc-covering toolkit.

This module centralizes defaults and user-tunable settings for:
- numerical tolerances used by incidence decisions and root finding
- solver budgets and sweep resolution
- coverage verification sampling
- the benchmark harness and SVG rendering

All values can be overridden via CLI flags or direct imports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Tuple


# Geometry of the hexagonal lattice. The basis vectors have length sqrt(3), so
# the Voronoi cells are regular hexagons inscribed in the unit circle.
SQRT3 = math.sqrt(3.0)
LATTICE_BASIS: Tuple[Tuple[float, float], Tuple[float, float]] = (
    (SQRT3, 0.0),
    (SQRT3 / 2.0, 1.5),
)
HEX_AREA = 3.0 * SQRT3 / 2.0

# Phase of the tiling hexagon (vertex offset). The alternative phase 0 is only
# used to reproduce textbook support-function values.
VORONOI_PHASE = math.pi / 6.0
THETA_PERIOD = math.pi / 3.0


@dataclass
class Tolerances:
    """Numerical tolerances.

    Attributes
    ----------
    eps
        Single global tolerance for incidence decisions (point-in-polygon,
        collinearity, repeated vertices).
    dedup
        Grid spacing used to merge clustered candidate points.
    nudge
        Magnitude of the compass offsets used to step into an open cell.
    root_residual
        Target residual of polished polynomial roots (relative to the
        coefficient scale).
    back_substitution
        Tolerance for accepting a root of the squared polynomial as a root of
        the original radical equation.
    candidate_residual
        Maximal residual of the three surface equations at an accepted 3D
        candidate.
    theta_nudge
        Orientation offset used to probe the open 3D cells around a candidate.
    root_imag
        Imaginary part below which a companion-matrix eigenvalue is treated
        as real.
    """

    eps: float = 1e-9
    dedup: float = 1e-8
    nudge: float = 1e-8
    root_residual: float = 1e-10
    back_substitution: float = 1e-8
    candidate_residual: float = 1e-7
    theta_nudge: float = 1e-6
    root_imag: float = 1e-6


@dataclass
class Solver:
    """Solver behavior.

    Attributes
    ----------
    budget
        Maximal number of surface triples the joint orientation/translation
        search may examine before raising ``BudgetExceeded``.
    sweep_angles
        Default number of equispaced orientations for the sweep baseline.
    shortcut_radius
        A region whose minimum enclosing circle has at most this radius is
        covered by a single disc at the circle's center.
    grid_resolution
        Number of samples per sweep when bounding swept surfaces.
    """

    budget: int = 10**7
    sweep_angles: int = 360
    shortcut_radius: float = 1.0
    grid_resolution: int = 16


@dataclass
class Verification:
    """Coverage verification defaults.

    Attributes
    ----------
    boundary_samples
        Number of equally spaced samples along the polygon boundary.
    interior_spacing
        Spacing of the triangular interior sample grid.
    slack
        Distance slack allowed beyond the unit radius.
    """

    boundary_samples: int = 10_000
    interior_spacing: float = 0.05
    slack: float = 1e-9


@dataclass
class Bench:
    """Benchmark harness defaults.

    Attributes
    ----------
    points
        Number of uniform points whose convex hull forms a random polygon.
    sweep_angles
        Orientations tried by the sweep algorithm inside the bench.
    sizes
        Default box sizes ``k`` (polygons are drawn in a k-by-k box).
    trials
        Default number of polygons per size.
    """

    points: int = 12
    sweep_angles: int = 12
    sizes: Tuple[int, ...] = (5, 10, 20)
    trials: int = 3


@dataclass
class Render:
    """SVG rendering style.

    Attributes
    ----------
    polygon_fill, polygon_stroke
        Colors used for the covered region.
    cell_stroke
        Color of the chosen hexagonal cells.
    disc_stroke
        Color of the unit discs.
    stroke_width
        Line width in document units.
    margin
        Extra space around the window, in document units.
    """

    polygon_fill: str = "#f4a26155"
    polygon_stroke: str = "#e76f51"
    cell_stroke: str = "#264653"
    disc_stroke: str = "#2a9d8f"
    stroke_width: float = 0.03
    margin: float = 0.5


@dataclass
class ProjectConfig:
    """Top-level configuration container.

    Attributes
    ----------
    tolerances
        Numerical tolerances.
    solver
        Budgets and sweep resolution of the covering algorithms.
    verification
        Sampling density of the coverage certificate.
    bench
        Benchmark harness defaults.
    render
        SVG output style.
    """

    tolerances: Tolerances = field(default_factory=Tolerances)
    solver: Solver = field(default_factory=Solver)
    verification: Verification = field(default_factory=Verification)
    bench: Bench = field(default_factory=Bench)
    render: Render = field(default_factory=Render)


# Default singleton-style config instance used by CLI unless overridden
CONFIG = ProjectConfig()

"""Benchmark harness: random convex regions, disc counts and bounds.

Each row covers one random polygon (convex hull of uniform points in a
``k x k`` box) with the fixed-orientation and the sweep algorithms and lists
the closed-form bounds next to the counts. The report is deterministic for a
given seed unless per-row timings are requested.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from config import CONFIG
from .bounds import approximation_ratio, bounds_report
from .geom_core import ConvexPolygon, area, convex_hull, perimeter
from .io_utils import ensure_dir
from .placement_combined import cover_sweep
from .placement_fixed import centered, cover_fixed

log = logging.getLogger(__name__)

HEADER = ("k", "trial", "N", "A", "L", "count_fixed", "count_sweep", "toth", "improved", "lower", "ratio")


def random_convex_polygon(rng: np.random.Generator, k: float, n_points: Optional[int] = None) -> ConvexPolygon:
    """Convex hull of uniform points in a ``k x k`` box, centered at its centroid."""

    n_points = CONFIG.bench.points if n_points is None else n_points
    for _ in range(100):
        pts = rng.uniform(0.0, k, size=(n_points, 2))
        try:
            hull = convex_hull(pts)
        except ValueError:
            continue
        return centered(hull)[0]
    raise RuntimeError("could not draw a non-degenerate polygon")


@dataclass
class BenchRow:
    k: int
    trial: int
    n: int
    area: float
    perimeter: float
    count_fixed: int
    count_sweep: int
    toth: int
    improved: int
    lower: float
    ratio: float
    runtime_ms: Optional[float] = None

    def cells(self) -> List[str]:
        ratio = "inf" if math.isinf(self.ratio) else f"{self.ratio:.6f}"
        out = [
            str(self.k),
            str(self.trial),
            str(self.n),
            f"{self.area:.6f}",
            f"{self.perimeter:.6f}",
            str(self.count_fixed),
            str(self.count_sweep),
            str(self.toth),
            str(self.improved),
            f"{self.lower:.6f}",
            ratio,
        ]
        if self.runtime_ms is not None:
            out.append(f"{self.runtime_ms:.1f}")
        return out


def bench_row(k: int, trial: int, poly: ConvexPolygon, sweep_angles: int, timing: bool = False) -> BenchRow:
    start = time.perf_counter()
    fixed = cover_fixed(poly)
    elapsed = (time.perf_counter() - start) * 1000.0
    sweep = cover_sweep(poly, sweep_angles)
    a, length = area(poly), perimeter(poly)
    report = bounds_report(poly, fixed.theta)
    return BenchRow(
        k=k,
        trial=trial,
        n=len(poly),
        area=a,
        perimeter=length,
        count_fixed=fixed.count,
        count_sweep=sweep.count,
        toth=report.toth_upper,
        improved=report.improved_upper,
        lower=report.lower_explicit,
        ratio=approximation_ratio(fixed.count, a, length),
        runtime_ms=elapsed if timing else None,
    )


def run_bench(
    seed: int,
    sizes: Sequence[int],
    trials: int,
    sweep_angles: Optional[int] = None,
    timing: bool = False,
) -> List[BenchRow]:
    """Rows for ``trials`` random polygons per size, drawn from one seeded generator."""

    sweep_angles = CONFIG.bench.sweep_angles if sweep_angles is None else sweep_angles
    rng = np.random.default_rng(seed)
    rows: List[BenchRow] = []
    for k in sizes:
        for trial in range(trials):
            poly = random_convex_polygon(rng, k)
            row = bench_row(k, trial, poly, sweep_angles, timing)
            log.info("bench: k=%d trial=%d count_fixed=%d count_sweep=%d", k, trial, row.count_fixed, row.count_sweep)
            rows.append(row)
    return rows


def mean_ratios(rows: Sequence[BenchRow]) -> Dict[int, float]:
    """Mean finite approximation ratio per size."""

    out: Dict[int, float] = {}
    for k in sorted({r.k for r in rows}):
        vals = [r.ratio for r in rows if r.k == k and math.isfinite(r.ratio)]
        out[k] = float(np.mean(vals)) if vals else math.inf
    return out


def format_report(rows: Sequence[BenchRow]) -> str:
    header = list(HEADER)
    if rows and rows[0].runtime_ms is not None:
        header.append("runtime_ms")
    lines = [",".join(header)]
    lines.extend(",".join(r.cells()) for r in rows)
    lines.append("")
    for k, ratio in mean_ratios(rows).items():
        value = "inf" if math.isinf(ratio) else f"{ratio:.6f}"
        lines.append(f"# mean_ratio k={k} {value}")
    return "\n".join(lines) + "\n"


def write_report(path: Union[str, Path], rows: Sequence[BenchRow]) -> None:
    path = Path(path)
    ensure_dir(path.parent)
    path.write_text(format_report(rows), encoding="utf-8")

"""CLI for hexagonal-lattice disc coverings of polygonal regions.

Commands:
  - cover: Cover a polygon with unit discs placed on a rotated, shifted lattice
  - bounds: Print upper and lower bounds on the number of discs
  - verify: Check that a covering file covers a polygon
  - bench: Run the random-polygon benchmark and write a report

Exit codes: 0 success, 1 verification failure, 2 input or validation error,
3 work budget exceeded.
"""

from __future__ import annotations

import functools
import logging
import time
from pathlib import Path
from typing import Callable, Optional, Tuple

import click
from config import CONFIG
from src.func.bench import run_bench, write_report
from src.func.bounds import Pose, bounds_report, verify_coverage
from src.func.errors import BudgetExceeded, CoverError
from src.func.geom_core import Point2, convex_hull
from src.func.io_utils import CoveringFile, read_covering, read_polygon, write_covering
from src.func.orientation import minimize_f
from src.func.placement_combined import cover_combined, cover_nonconvex, cover_sweep
from src.func.placement_fixed import cover_fixed
from src.func.render_svg import render_svg

log = logging.getLogger("main")

ALGORITHMS = ("fixed", "combined", "nonconvex", "sweep")
BOUNDS_FIELDS = ("toth_upper", "improved_upper", "lower_asymptotic", "lower_explicit", "ratio_bound")


def _exit_codes(func: Callable) -> Callable:
    """Translate library errors into the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except CoverError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            raise click.exceptions.Exit(2)
        except BudgetExceeded as exc:
            click.echo(f"error: {exc}", err=True)
            raise click.exceptions.Exit(3)

    return wrapper


def _parse_sizes(ctx: click.Context, param: click.Parameter, value: str) -> Tuple[int, ...]:
    try:
        sizes = tuple(int(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{value}'")
    if not sizes or any(k <= 0 for k in sizes):
        raise click.BadParameter("sizes must be positive integers")
    return sizes


@click.group()
@click.option("--verbose", is_flag=True, default=False, help="Log solver stages (DEBUG)")
@click.option("--quiet", is_flag=True, default=False, help="Only log warnings")
def cli(verbose: bool, quiet: bool) -> None:
    """Hexagonal-lattice unit-disc covering toolkit."""

    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@cli.command(name="cover")
@click.option(
    "--input",
    "input_path",
    type=click.Path(path_type=Path, exists=True, dir_okay=False),
    required=True,
    help="Polygon JSON file",
)
@click.option(
    "--algorithm",
    type=click.Choice(ALGORITHMS, case_sensitive=False),
    default="fixed",
    show_default=True,
)
@click.option("--sweep-angles", type=int, default=CONFIG.solver.sweep_angles, show_default=True)
@click.option("--output", "output_path", type=click.Path(path_type=Path), required=True, help="Covering JSON file")
@click.option("--svg", "svg_path", type=click.Path(path_type=Path), default=None, help="Optional SVG drawing")
@click.option("--budget", type=int, default=None, help="Maximal surface triples for the joint search")
@_exit_codes
def cmd_cover(
    input_path: Path,
    algorithm: str,
    sweep_angles: int,
    output_path: Path,
    svg_path: Optional[Path],
    budget: Optional[int],
) -> None:
    """Cover a polygon with unit discs and write the covering file."""

    polygon = read_polygon(input_path)
    algorithm = algorithm.lower()

    start = time.perf_counter()
    if algorithm == "nonconvex":
        poly = polygon.to_polygon()
        covering = cover_nonconvex(poly, budget=budget)
    else:
        poly = polygon.to_convex()
        if algorithm == "fixed":
            covering = cover_fixed(poly)
        elif algorithm == "combined":
            covering = cover_combined(poly, budget=budget)
        else:
            covering = cover_sweep(poly, sweep_angles)
    runtime_ms = (time.perf_counter() - start) * 1000.0

    covering.bounds = bounds_report(poly, covering.theta)
    pose = Pose(covering.theta, covering.translation, covering.origin) if covering.lattice else None
    report = verify_coverage(poly, covering.centers, pose=pose)
    if not report.valid:
        log.error("cover: covering failed verification (violation %.3g)", report.max_violation_distance)
        click.echo(f"error: covering failed verification, nothing written to {output_path}", err=True)
        raise click.exceptions.Exit(1)
    out = CoveringFile.from_covering(
        covering,
        {
            "runtime_ms": runtime_ms,
            "budget_hit": bool(covering.diagnostics.get("budget_hit", False)),
            "verified": report.valid,
        },
    )
    write_covering(output_path, out)
    if svg_path is not None:
        render_svg(poly, out, svg_path)
    click.echo(f"{algorithm}: {out.count} discs, theta={out.theta:.6f} -> {output_path}")


@cli.command(name="bounds")
@click.option(
    "--input",
    "input_path",
    type=click.Path(path_type=Path, exists=True, dir_okay=False),
    required=True,
    help="Polygon JSON file",
)
@_exit_codes
def cmd_bounds(input_path: Path) -> None:
    """Print the bounds on the number of unit discs needed for a polygon."""

    poly = read_polygon(input_path).to_polygon()
    theta = minimize_f(convex_hull(poly.vertices)).theta_star
    values = bounds_report(poly, theta).as_dict()
    click.echo(f"theta_star: {theta:.17g}")
    for name in BOUNDS_FIELDS:
        click.echo(f"{name}: {values[name]:.17g}" if isinstance(values[name], float) else f"{name}: {values[name]}")


@cli.command(name="verify")
@click.option(
    "--input",
    "input_path",
    type=click.Path(path_type=Path, exists=True, dir_okay=False),
    required=True,
    help="Polygon JSON file",
)
@click.option(
    "--covering",
    "covering_path",
    type=click.Path(path_type=Path, exists=True, dir_okay=False),
    required=True,
    help="Covering JSON file",
)
@click.option("--samples", type=int, default=CONFIG.verification.boundary_samples, show_default=True)
@_exit_codes
def cmd_verify(input_path: Path, covering_path: Path, samples: int) -> None:
    """Check that the discs of a covering file cover the polygon."""

    poly = read_polygon(input_path).to_polygon()
    covering = read_covering(covering_path)
    pose = None
    if covering.lattice:
        pose = Pose(covering.theta, Point2(*covering.translation), Point2(*covering.origin))
    report = verify_coverage(poly, covering.centers, pose=pose, samples=samples)
    click.echo(f"valid: {str(report.valid).lower()}")
    click.echo(f"max_violation_distance: {report.max_violation_distance:.17g}")
    click.echo(f"cells_checked: {report.cells_checked}")
    click.echo(f"samples_checked: {report.samples_checked}")
    if not report.valid:
        w = report.uncovered_witness
        if w is not None:
            click.echo(f"uncovered_witness: {w.x:.17g} {w.y:.17g}")
        raise click.exceptions.Exit(1)


@cli.command(name="bench")
@click.option("--seed", type=int, default=1, show_default=True)
@click.option(
    "--sizes",
    type=str,
    default=",".join(str(k) for k in CONFIG.bench.sizes),
    show_default=True,
    callback=_parse_sizes,
    help="Comma-separated box sizes",
)
@click.option("--trials", type=int, default=CONFIG.bench.trials, show_default=True)
@click.option("--report", "report_path", type=click.Path(path_type=Path), required=True)
@click.option("--sweep-angles", type=int, default=CONFIG.bench.sweep_angles, show_default=True)
@click.option("--timing/--no-timing", default=False, help="Add a per-row runtime column")
@_exit_codes
def cmd_bench(
    seed: int,
    sizes: Tuple[int, ...],
    trials: int,
    report_path: Path,
    sweep_angles: int,
    timing: bool,
) -> None:
    """Benchmark the fixed and sweep algorithms on random convex polygons."""

    rows = run_bench(seed, sizes, trials, sweep_angles=sweep_angles, timing=timing)
    write_report(report_path, rows)
    click.echo(f"{len(rows)} rows -> {report_path}")


if __name__ == "__main__":
    cli()

"""SVG rendering of a region and its disc covering."""

from __future__ import annotations

import logging
import math
import xml.etree.ElementTree as etree
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from config import CONFIG
from .geom_core import ConvexPolygon, SimplePolygon, centroid, diameter
from .hex_lattice import HEX_LATTICE, HexLattice, canonical_hexagon
from .io_utils import CoveringFile, ensure_dir, format_float

log = logging.getLogger(__name__)


def _points_attr(pts: Iterable) -> str:
    return " ".join(f"{format_float(x)},{format_float(y)}" for x, y in pts)


def build_svg(
    poly: Union[ConvexPolygon, SimplePolygon],
    covering: Optional[CoveringFile],
    lattice: HexLattice = HEX_LATTICE,
) -> etree.Element:
    """SVG element tree with the polygon, chosen cells and unit circles.

    Everything is drawn in the polygon's own coordinates; the view box is the
    search window around the polygon's centroid. The y axis points up.
    """

    style = CONFIG.render
    g = np.asarray(centroid(poly))
    half = diameter(poly) + 3.0 + style.margin
    x0, y0 = g[0] - half, -(g[1] + half)
    root = etree.Element(
        "svg",
        {
            "xmlns": "http://www.w3.org/2000/svg",
            "viewBox": " ".join(format_float(v) for v in (x0, y0, 2 * half, 2 * half)),
            "width": "800",
            "height": "800",
        },
    )
    layer = etree.SubElement(root, "g", {"transform": "scale(1,-1)", "stroke-width": format_float(style.stroke_width)})
    etree.SubElement(
        layer,
        "polygon",
        {"class": "region", "points": _points_attr(poly.vertices), "fill": style.polygon_fill, "stroke": style.polygon_stroke},
    )
    if covering is None:
        return root

    if covering.lattice and covering.indices:
        c, s = math.cos(covering.theta), math.sin(covering.theta)
        rot = np.array([[c, -s], [s, c]])
        hexagon = canonical_hexagon().vertices
        for idx in covering.indices:
            cell = hexagon + np.asarray(lattice.point(idx)) - np.asarray(covering.translation)
            cell = cell @ rot.T + np.asarray(covering.origin)
            etree.SubElement(
                layer, "polygon", {"class": "cell", "points": _points_attr(cell), "fill": "none", "stroke": style.cell_stroke}
            )
    for x, y in covering.centers:
        etree.SubElement(
            layer,
            "circle",
            {"class": "disc", "cx": format_float(x), "cy": format_float(y), "r": "1", "fill": "none", "stroke": style.disc_stroke},
        )
    return root


def render_svg(
    poly: Union[ConvexPolygon, SimplePolygon],
    covering: Optional[CoveringFile],
    path: Union[str, Path],
    lattice: HexLattice = HEX_LATTICE,
) -> None:
    """Write the drawing of ``poly`` and ``covering`` to ``path``."""

    root = build_svg(poly, covering, lattice)
    path = Path(path)
    ensure_dir(path.parent)
    etree.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
    log.info("render_svg: wrote %s", path)

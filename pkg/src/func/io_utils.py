"""I/O utilities for polygon and covering files.

Both formats are small JSON documents. Floats are written with 17 significant
digits so a covering read back and written again is byte-identical.

Polygon file::

    {"name": "square-10", "vertices": [[-5, -5], [5, -5], [5, 5], [-5, 5]]}

Covering file fields, in order: ``algorithm``, ``count``, ``theta``,
``translation``, ``origin``, ``lattice``, ``indices``, ``centers``,
``bounds``, ``diagnostics``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .errors import MalformedFile
from .geom_core import ConvexPolygon, Point2, SimplePolygon

COVERING_FIELDS = (
    "algorithm",
    "count",
    "theta",
    "translation",
    "origin",
    "lattice",
    "indices",
    "centers",
    "bounds",
    "diagnostics",
)


def ensure_dir(path: Path) -> None:
    """Create a directory if it does not exist.

    Parameters
    ----------
    path
        Directory path to create.
    """

    Path(path).mkdir(parents=True, exist_ok=True)


def format_float(x: float) -> str:
    """17 significant digits, '.' separator; integral values keep a trailing ``.0``."""

    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    text = format(float(x), ".17g")
    if "e" not in text and "." not in text:
        text += ".0"
    return text


def _dump(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_dump(v, indent + 1) for v in obj) + "]"
        items = [inner + _dump(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _load_json(path: Path) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedFile("<document>", f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(data, dict):
        raise MalformedFile("<document>", "top level must be an object")
    return data


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedFile(name, f"expected a finite number, got {value!r}")
    return float(value)


def _scalar(value: Any, name: str) -> Union[int, float]:
    # integers stay integers so a re-dump is byte-identical
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    return _number(value, name)


def _pair(value: Any, name: str) -> Tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise MalformedFile(name, f"expected an [x, y] pair, got {value!r}")
    return _number(value[0], name), _number(value[1], name)


def _pairs(value: Any, name: str) -> List[Tuple[float, float]]:
    if not isinstance(value, list):
        raise MalformedFile(name, "expected a list of [x, y] pairs")
    return [_pair(v, f"{name}[{k}]") for k, v in enumerate(value)]


@dataclass
class PolygonFile:
    """Vertex list of an input region, optionally named."""

    vertices: List[Tuple[float, float]]
    name: Optional[str] = None

    def to_polygon(self) -> SimplePolygon:
        return SimplePolygon(np.asarray(self.vertices, dtype=float))

    def to_convex(self) -> ConvexPolygon:
        """Raises ``NotConvex`` when the polygon has a reflex vertex."""

        return self.to_polygon().to_convex()


def read_polygon(path: Union[str, Path]) -> PolygonFile:
    data = _load_json(Path(path))
    if "vertices" not in data:
        raise MalformedFile("vertices", "missing")
    vertices = _pairs(data["vertices"], "vertices")
    if len(vertices) < 3:
        raise MalformedFile("vertices", f"need at least 3 vertices, got {len(vertices)}")
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise MalformedFile("name", "expected a string")
    return PolygonFile(vertices, name)


def write_polygon(path: Union[str, Path], polygon: PolygonFile) -> None:
    doc: Dict[str, Any] = {}
    if polygon.name is not None:
        doc["name"] = polygon.name
    doc["vertices"] = [list(map(float, v)) for v in polygon.vertices]
    path = Path(path)
    ensure_dir(path.parent)
    path.write_text(_dump(doc) + "\n", encoding="utf-8")


@dataclass
class CoveringFile:
    """Serialized covering; ``count`` always equals ``len(centers)``."""

    algorithm: str
    count: int
    theta: float
    translation: Tuple[float, float]
    origin: Tuple[float, float]
    lattice: bool
    indices: List[Tuple[int, int]]
    centers: List[Tuple[float, float]]
    bounds: Optional[Dict[str, float]] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.count != len(self.centers):
            raise MalformedFile("count", f"{self.count} does not match {len(self.centers)} centers")

    @classmethod
    def from_covering(cls, covering, diagnostics: Optional[Dict[str, Any]] = None) -> "CoveringFile":
        """Build from a :class:`~src.func.placement_fixed.Covering`."""

        bounds = covering.bounds.as_dict() if covering.bounds is not None else None
        diag = dict(covering.diagnostics)
        diag.update(diagnostics or {})
        return cls(
            algorithm=covering.algorithm,
            count=covering.count,
            theta=float(covering.theta),
            translation=(float(covering.translation[0]), float(covering.translation[1])),
            origin=(float(covering.origin[0]), float(covering.origin[1])),
            lattice=bool(covering.lattice),
            indices=[(int(m), int(n)) for m, n in covering.indices],
            centers=[(float(x), float(y)) for x, y in covering.centers],
            bounds=bounds,
            diagnostics=diag,
        )

    @property
    def center_points(self) -> List[Point2]:
        return [Point2(x, y) for x, y in self.centers]

    def to_document(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "count": self.count,
            "theta": self.theta,
            "translation": list(self.translation),
            "origin": list(self.origin),
            "lattice": self.lattice,
            "indices": [list(i) for i in self.indices],
            "centers": [list(c) for c in self.centers],
            "bounds": self.bounds,
            "diagnostics": self.diagnostics,
        }


def dumps_covering(covering: CoveringFile) -> str:
    return _dump(covering.to_document()) + "\n"


def write_covering(path: Union[str, Path], covering: CoveringFile) -> None:
    path = Path(path)
    ensure_dir(path.parent)
    path.write_text(dumps_covering(covering), encoding="utf-8")


def parse_covering(data: Dict[str, Any]) -> CoveringFile:
    missing = [f for f in COVERING_FIELDS if f not in data]
    if missing:
        raise MalformedFile(missing[0], "missing")
    algorithm = data["algorithm"]
    if not isinstance(algorithm, str):
        raise MalformedFile("algorithm", "expected a string")
    count = data["count"]
    if isinstance(count, bool) or not isinstance(count, int) or count < 0:
        raise MalformedFile("count", f"expected a non-negative integer, got {count!r}")
    if not isinstance(data["lattice"], bool):
        raise MalformedFile("lattice", "expected true or false")
    indices = data["indices"]
    if not isinstance(indices, list) or not all(
        isinstance(i, list) and len(i) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in i)
        for i in indices
    ):
        raise MalformedFile("indices", "expected a list of [m, n] integer pairs")
    bounds = data["bounds"]
    if bounds is not None:
        if not isinstance(bounds, dict):
            raise MalformedFile("bounds", "expected an object or null")
        bounds = {str(k): _scalar(v, f"bounds.{k}") for k, v in bounds.items()}
    diagnostics = data["diagnostics"]
    if not isinstance(diagnostics, dict):
        raise MalformedFile("diagnostics", "expected an object")
    return CoveringFile(
        algorithm=algorithm,
        count=count,
        theta=_number(data["theta"], "theta"),
        translation=_pair(data["translation"], "translation"),
        origin=_pair(data["origin"], "origin"),
        lattice=data["lattice"],
        indices=[(int(m), int(n)) for m, n in indices],
        centers=_pairs(data["centers"], "centers"),
        bounds=bounds,
        diagnostics=diagnostics,
    )


def read_covering(path: Union[str, Path]) -> CoveringFile:
    return parse_covering(_load_json(Path(path)))

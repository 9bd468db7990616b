import json

import pytest

from src.func.bounds import bounds_report
from src.func.errors import MalformedFile, NotConvex
from src.func.io_utils import (
    CoveringFile,
    PolygonFile,
    dumps_covering,
    format_float,
    parse_covering,
    read_covering,
    read_polygon,
    write_covering,
    write_polygon,
)
from src.func.placement_fixed import cover_fixed


def _covering_file(square10) -> CoveringFile:
    covering = cover_fixed(square10)
    covering.bounds = bounds_report(square10, covering.theta)
    return CoveringFile.from_covering(covering, {"runtime_ms": 12.5, "budget_hit": False})


class TestFormatFloat:
    @pytest.mark.parametrize(
        "value, text",
        [(1.0, "1.0"), (-3.0, "-3.0"), (0.5, "0.5"), (0.1, "0.10000000000000001"), (1e-20, "9.9999999999999995e-21")],
    )
    def test_values(self, value, text):
        assert format_float(value) == text

    def test_parses_back_exactly(self):
        x = 0.1 + 0.2
        assert float(format_float(x)) == x

    def test_non_finite(self):
        with pytest.raises(ValueError):
            format_float(float("inf"))


class TestCovering:
    def test_roundtrip_is_byte_identical(self, square10, tmp_path):
        path = tmp_path / "out" / "covering.json"
        write_covering(path, _covering_file(square10))
        first = path.read_text(encoding="utf-8")
        again = read_covering(path)
        assert dumps_covering(again) == first
        assert again.bounds["toth_upper"] == 54
        assert isinstance(again.bounds["toth_upper"], int)

    def test_field_order(self, square10):
        doc = json.loads(dumps_covering(_covering_file(square10)))
        assert list(doc) == [
            "algorithm", "count", "theta", "translation", "origin",
            "lattice", "indices", "centers", "bounds", "diagnostics",
        ]
        assert doc["count"] == len(doc["centers"])
        assert doc["diagnostics"]["runtime_ms"] == 12.5

    def test_center_points(self, square10):
        cov = _covering_file(square10)
        assert cov.center_points[0].x == cov.centers[0][0]

    def test_count_mismatch(self):
        with pytest.raises(MalformedFile) as err:
            CoveringFile("fixed", 2, 0.0, (0.0, 0.0), (0.0, 0.0), True, [(0, 0)], [(0.0, 0.0)])
        assert err.value.field == "count"

    def test_missing_field(self, square10):
        doc = json.loads(dumps_covering(_covering_file(square10)))
        del doc["theta"]
        with pytest.raises(MalformedFile) as err:
            parse_covering(doc)
        assert err.value.field == "theta"

    @pytest.mark.parametrize(
        "key, value",
        [("count", -1), ("count", True), ("lattice", "yes"), ("indices", [[0, 0.5]]), ("translation", [1.0]), ("bounds", [])],
    )
    def test_bad_values(self, square10, key, value):
        doc = json.loads(dumps_covering(_covering_file(square10)))
        doc[key] = value
        with pytest.raises(MalformedFile) as err:
            parse_covering(doc)
        assert err.value.field == key

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(MalformedFile) as err:
            read_covering(path)
        assert err.value.field == "<document>"


class TestPolygon:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "square.json"
        write_polygon(path, PolygonFile([(-5.0, -5.0), (5.0, -5.0), (5.0, 5.0), (-5.0, 5.0)], "square-10"))
        poly = read_polygon(path)
        assert poly.name == "square-10"
        assert poly.vertices[2] == (5.0, 5.0)
        assert len(poly.to_convex()) == 4

    def test_integer_vertices(self, tmp_path):
        path = tmp_path / "tri.json"
        path.write_text('{"vertices": [[0, 0], [4, 0], [0, 3]]}', encoding="utf-8")
        assert read_polygon(path).vertices == [(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]

    @pytest.mark.parametrize(
        "text, field",
        [
            ('{"vertices": [[0, 0], [1]]}', "vertices[1]"),
            ('{"vertices": [[0, 0], [1, "a"], [0, 1]]}', "vertices[1]"),
            ('{"vertices": [[0, 0], [1, 0]]}', "vertices"),
            ('{"name": "x"}', "vertices"),
            ('{"vertices": [[0, 0], [1, 0], [0, 1]], "name": 3}', "name"),
            ("[1, 2]", "<document>"),
        ],
    )
    def test_malformed(self, tmp_path, text, field):
        path = tmp_path / "bad.json"
        path.write_text(text, encoding="utf-8")
        with pytest.raises(MalformedFile) as err:
            read_polygon(path)
        assert err.value.field == field

    def test_reflex_vertex(self):
        l_shape = PolygonFile([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
        assert len(l_shape.to_polygon()) == 6
        with pytest.raises(NotConvex):
            l_shape.to_convex()

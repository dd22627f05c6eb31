"""Geometry kernel: construction, buffer, area, distance, JSON encoding."""

import math

import pytest

from histogeocode import geometry as geom
from histogeocode.geometry import CrsMismatchError, GeometryError


class TestConstruction:
    def test_point(self):
        p = geom.point(1, 2)
        assert p.kind == "point"
        assert p.coordinates == (1.0, 2.0)

    def test_polyline_needs_two_vertices(self):
        with pytest.raises(GeometryError):
            geom.polyline([(0, 0)])

    def test_polygon_must_close(self):
        with pytest.raises(GeometryError, match="not closed"):
            geom.polygon([(0, 0), (1, 0), (1, 1), (0, 1)])

    def test_polygon_needs_three_distinct(self):
        with pytest.raises(GeometryError, match="three distinct"):
            geom.polygon([(0, 0), (1, 0), (0, 0)])

    def test_polygon_rejects_bowtie(self):
        with pytest.raises(GeometryError, match="self-intersecting|invalid"):
            geom.polygon([(0, 0), (1, 1), (1, 0), (0, 1), (0, 0)])

    def test_unknown_kind(self):
        with pytest.raises(GeometryError):
            geom.Geometry("blob", (0.0, 0.0))

    def test_immutable(self):
        p = geom.point(1, 2)
        with pytest.raises(AttributeError):
            p.kind = "polyline"


class TestBuffer:
    def test_point_buffer_area(self):
        b = geom.buffer(geom.point(0, 0), 10)
        assert b.kind == "polygon"
        assert geom.area(b) == pytest.approx(math.pi * 100, rel=0.01)

    def test_zero_radius_returns_input(self):
        square = geom.polygon([(0, 0), (2, 0), (2, 2), (0, 2), (0, 0)])
        assert geom.buffer(square, 0) is square
        assert geom.area(geom.buffer(square, 0)) == pytest.approx(4.0)

    def test_segment_buffer_area(self):
        seg = geom.polyline([(0, 0), (100, 0)])
        b = geom.buffer(seg, 5)
        assert geom.area(b) == pytest.approx(1000 + math.pi * 25, rel=0.01)

    def test_negative_radius(self):
        with pytest.raises(GeometryError):
            geom.buffer(geom.point(0, 0), -1)

    def test_monotone_in_radius(self):
        g = geom.polyline([(0, 0), (50, 10), (80, -5)])
        areas = [geom.area(geom.buffer(g, r)) for r in (1, 2, 5, 10, 20)]
        assert areas == sorted(areas)

    def test_64_segment_circle_error_below_point_2_percent(self):
        b = geom.buffer(geom.point(0, 0), 1)
        assert abs(geom.area(b) - math.pi) / math.pi < 0.002


class TestArea:
    def test_unit_square(self):
        assert geom.area(geom.polygon([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)])) == 1.0

    def test_point_and_line_are_zero(self):
        assert geom.area(geom.point(3, 4)) == 0.0
        assert geom.area(geom.polyline([(0, 0), (10, 10)])) == 0.0

    def test_triangle_shoelace(self):
        assert geom.area(geom.polygon([(0, 0), (4, 0), (0, 3), (0, 0)])) == 6.0

    def test_hole_subtracted(self):
        g = geom.polygon(
            [
                [(0, 0), (10, 0), (10, 10), (0, 10), (0, 0)],
                [(4, 4), (6, 4), (6, 6), (4, 6), (4, 4)],
            ]
        )
        assert geom.area(g) == pytest.approx(96.0)


class TestDistance:
    def test_three_four_five(self):
        assert geom.distance(geom.point(0, 0), geom.point(3, 4)) == 5.0

    def test_self_distance(self):
        g = geom.polyline([(0, 0), (10, 0)])
        assert geom.distance(g, g) == 0.0

    def test_point_to_segment(self):
        assert geom.distance(geom.point(0, 5), geom.polyline([(-10, 0), (10, 0)])) == 5.0

    def test_crs_mismatch(self):
        with pytest.raises(CrsMismatchError):
            geom.distance(geom.point(0, 0, "a"), geom.point(0, 0, "b"))

    def test_symmetry_and_triangle_inequality(self, rng):
        for _ in range(50):
            pts = [geom.point(*rng.uniform(-100, 100, 2)) for _ in range(3)]
            d01 = geom.distance(pts[0], pts[1])
            d10 = geom.distance(pts[1], pts[0])
            d02 = geom.distance(pts[0], pts[2])
            d21 = geom.distance(pts[2], pts[1])
            assert d01 == d10
            assert d01 <= d02 + d21 + 1e-9


class TestJsonEncoding:
    def test_round_trip(self):
        shapes = [
            geom.point(1.5, -2.25),
            geom.polyline([(0, 0), (10, 5), (20, 0)]),
            geom.polygon([(0, 0), (4, 0), (0, 3), (0, 0)]),
            geom.multi("multipoint", [(0, 0), (1, 1)]),
        ]
        for g in shapes:
            assert geom.from_json(geom.to_json(g)) == g

    def test_encoding_shape(self):
        doc = geom.to_json(geom.point(1, 2))
        assert doc == {"kind": "point", "coordinates": [1.0, 2.0]}

    def test_malformed(self):
        with pytest.raises(GeometryError):
            geom.from_json({"coordinates": [1, 2]})
        with pytest.raises(GeometryError):
            geom.from_json({"kind": "point"})


class TestRepresentativePoint:
    def test_point_is_itself(self):
        assert geom.representative_point(geom.point(7, 8)) == (7.0, 8.0)

    def test_on_geometry(self):
        line = geom.polyline([(0, 0), (10, 0)])
        x, y = geom.representative_point(line)
        assert 0 <= x <= 10 and y == 0

    def test_bounds(self):
        g = geom.polyline([(0, -5), (10, 3)])
        assert geom.bounds(g) == (0.0, -5.0, 10.0, 3.0)

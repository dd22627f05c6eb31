"""Minimal planar geometry kernel for the matching metrics.

Everything lives in one projected reference system with meter units; the
crs_id string only guards against accidentally mixing sessions.  Points,
polylines and polygons (plus their multi- variants) are immutable nested
tuples.  Buffering and point-set distance are delegated to shapely (GEOS),
the same engine the usual geospatial stores run on; polygon area is the
shoelace formula.

JSON interchange encoding (documented in docs/formats.md):

    {"kind": "point",    "coordinates": [x, y]}
    {"kind": "polyline", "coordinates": [[x, y], ...]}
    {"kind": "polygon",  "coordinates": [[[x, y], ...ring...], ...]}

multi* kinds nest one level deeper. Polygon rings are closed (first ==
last); the first ring is the outer boundary, the rest are holes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import shapely
import shapely.geometry as _sg

KINDS = ("point", "polyline", "polygon", "multipoint", "multipolyline", "multipolygon")

DEFAULT_CRS = "local-meters"


class GeometryError(ValueError):
    pass


class CrsMismatchError(GeometryError):
    pass


def _freeze(coords):
    if isinstance(coords, (list, tuple)):
        if coords and isinstance(coords[0], (int, float)):
            x, y = coords
            return (float(x), float(y))
        return tuple(_freeze(c) for c in coords)
    raise GeometryError(f"malformed coordinates: {coords!r}")


@dataclass(frozen=True)
class Geometry:
    kind: str
    coordinates: tuple
    crs_id: str = DEFAULT_CRS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GeometryError(f"unknown geometry kind: {self.kind!r}")
        object.__setattr__(self, "coordinates", _freeze(self.coordinates))


def point(x: float, y: float, crs_id: str = DEFAULT_CRS) -> Geometry:
    return Geometry("point", (float(x), float(y)), crs_id)


def polyline(coords, crs_id: str = DEFAULT_CRS) -> Geometry:
    if len(coords) < 2:
        raise GeometryError("polyline needs at least two vertices")
    return Geometry("polyline", coords, crs_id)


def polygon(rings, crs_id: str = DEFAULT_CRS) -> Geometry:
    """Build a polygon from one ring or a list of rings (outer first).

    Rings must close (first == last) and the outer ring must have at least
    three distinct vertices and no self-intersection.
    """
    if rings and isinstance(rings[0][0], (int, float)):
        rings = [rings]
    checked = []
    for ring in rings:
        ring = [_freeze(v) for v in ring]
        if ring[0] != ring[-1]:
            raise GeometryError("polygon ring is not closed (first vertex != last)")
        if len(set(ring)) < 3:
            raise GeometryError("polygon ring needs at least three distinct vertices")
        checked.append(ring)
    g = Geometry("polygon", checked, crs_id)
    if not shapely.is_valid(_to_shapely(g)):
        raise GeometryError("polygon outer ring is self-intersecting or invalid")
    return g


def multi(kind: str, parts, crs_id: str = DEFAULT_CRS) -> Geometry:
    if kind not in ("multipoint", "multipolyline", "multipolygon"):
        raise GeometryError(f"not a multi kind: {kind!r}")
    return Geometry(kind, parts, crs_id)


def _to_shapely(g: Geometry):
    k, c = g.kind, g.coordinates
    if k == "point":
        return _sg.Point(c)
    if k == "polyline":
        return _sg.LineString(c)
    if k == "polygon":
        return _sg.Polygon(c[0], c[1:])
    if k == "multipoint":
        return _sg.MultiPoint(list(c))
    if k == "multipolyline":
        return _sg.MultiLineString([list(p) for p in c])
    return _sg.MultiPolygon([(p[0], list(p[1:])) for p in c])


def _from_shapely(sh, crs_id: str) -> Geometry:
    t = sh.geom_type
    if t == "Point":
        return Geometry("point", (sh.x, sh.y), crs_id)
    if t == "LineString":
        return Geometry("polyline", tuple(sh.coords), crs_id)
    if t == "Polygon":
        rings = [tuple(sh.exterior.coords)] + [tuple(r.coords) for r in sh.interiors]
        return Geometry("polygon", rings, crs_id)
    if t == "MultiPolygon":
        parts = []
        for p in sh.geoms:
            parts.append([tuple(p.exterior.coords)] + [tuple(r.coords) for r in p.interiors])
        return Geometry("multipolygon", parts, crs_id)
    if t == "MultiPoint":
        return Geometry("multipoint", tuple((p.x, p.y) for p in sh.geoms), crs_id)
    if t == "MultiLineString":
        return Geometry("multipolyline", tuple(tuple(l.coords) for l in sh.geoms), crs_id)
    raise GeometryError(f"unsupported shapely type {t}")


def buffer(g: Geometry, radius: float) -> Geometry:
    """All points within ``radius`` meters of ``g``; arcs are approximated
    with 64 segments per full circle.  radius == 0 returns ``g`` unchanged."""
    if radius < 0:
        raise GeometryError(f"negative buffer radius: {radius}")
    if radius == 0:
        return g
    return _from_shapely(_to_shapely(g).buffer(radius, quad_segs=16), g.crs_id)


def _ring_shoelace(ring) -> float:
    s = 0.0
    for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
        s += x0 * y1 - x1 * y0
    return abs(s) / 2.0


def area(g: Geometry) -> float:
    """Shoelace area in m^2 for polygons (holes subtracted); 0 for points
    and polylines."""
    if g.kind == "polygon":
        rings = g.coordinates
        return _ring_shoelace(rings[0]) - sum(_ring_shoelace(r) for r in rings[1:])
    if g.kind == "multipolygon":
        total = 0.0
        for rings in g.coordinates:
            total += _ring_shoelace(rings[0]) - sum(_ring_shoelace(r) for r in rings[1:])
        return total
    return 0.0


def distance(g1: Geometry, g2: Geometry) -> float:
    """Minimal Euclidean distance between the two point sets; 0 on overlap."""
    if g1.crs_id != g2.crs_id:
        raise CrsMismatchError(f"crs mismatch: {g1.crs_id!r} vs {g2.crs_id!r}")
    return float(_to_shapely(g1).distance(_to_shapely(g2)))


def sqrt_buffered_area(g: Geometry, radius: float) -> float:
    """sqrt(area(buffer(g, radius))): the spatial-scale measure of a
    feature once its positional accuracy is accounted for."""
    return math.sqrt(area(buffer(g, radius)))


def bounds(g: Geometry) -> tuple[float, float, float, float]:
    """(minx, miny, maxx, maxy) of all vertices."""
    xs: list[float] = []
    ys: list[float] = []

    def walk(c):
        if isinstance(c[0], float):
            xs.append(c[0])
            ys.append(c[1])
        else:
            for part in c:
                walk(part)

    walk(g.coordinates)
    return (min(xs), min(ys), max(xs), max(ys))


def representative_point(g: Geometry) -> tuple[float, float]:
    """A point representing the geometry (on it for lines/polygons);
    results are commonly rendered as this single point."""
    if g.kind == "point":
        return g.coordinates
    p = _to_shapely(g).representative_point()
    return (p.x, p.y)


def to_json(g: Geometry) -> dict:
    def unfreeze(c):
        if isinstance(c[0], float):
            return [c[0], c[1]]
        return [unfreeze(p) for p in c]

    return {"kind": g.kind, "coordinates": unfreeze(g.coordinates)}


def from_json(obj: dict, crs_id: str = DEFAULT_CRS) -> Geometry:
    try:
        kind = obj["kind"]
        coords = obj["coordinates"]
    except (KeyError, TypeError):
        raise GeometryError(f"malformed geometry object: {obj!r}") from None
    return Geometry(kind, coords, crs_id)

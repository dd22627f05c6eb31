"""Loading gazetteers from files and generating derived address points.

Two input shapes are supported: delimited text (header row, UTF-8, comma
separated) and JSON feature files (see docs/formats.md).  A mapping config
names which columns/properties hold each object field; rows that fail
validation land in a rejects report instead of aborting the load.

Also here: building-number generation along street segments (numbers known
only at segment ends are interpolated and offset to the street side), and
the adapter that projects modern longitude/latitude extracts into the
registry's planar meters.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

from . import geometry as geom
from . import text as textmod
from .fuzzy_time import FuzzyPeriod, parse_fuzzy_date
from .gazetteer import GazetteerRegistry, GeoHistoricalObject

EARTH_RADIUS_M = 6_371_000.0

MAPPING_KEYS = ("historical_name", "normalized_name", "geometry", "x", "y", "period", "accuracy")


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class RejectedRow:
    row_index: int
    row: dict
    reason: str


@dataclass(frozen=True)
class IngestReport:
    inserted: int
    rejects: tuple[RejectedRow, ...]

    @property
    def total(self) -> int:
        return self.inserted + len(self.rejects)


def parse_mapping(path) -> dict[str, str]:
    """key=value mapping config; '#' comments and blank lines ignored."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise IngestError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in MAPPING_KEYS:
                raise IngestError(f"{path}:{lineno}: unknown mapping key {key!r}")
            mapping[key] = value.strip()
    return mapping


def _check_mapping(mapping: dict[str, str]) -> None:
    if "historical_name" not in mapping:
        raise IngestError("mapping must name the historical_name column")
    if "geometry" not in mapping and not ("x" in mapping and "y" in mapping):
        raise IngestError("mapping must name either a geometry column or x and y columns")


def _row_to_object(
    row: dict,
    mapping: dict[str, str],
    registry: GazetteerRegistry,
    source_ref: int,
    process_ref: int,
) -> GeoHistoricalObject:
    def cell(key, required=False):
        column = mapping.get(key)
        if column is None:
            return None
        value = row.get(column)
        if value is None and required:
            raise IngestError(f"missing column {column!r}")
        return value

    historical = str(cell("historical_name", required=True) or "").strip()
    if not historical:
        raise IngestError("empty historical name")

    normalized = cell("normalized_name")
    if normalized is None or not str(normalized).strip():
        normalized = textmod.normalize(historical, registry.abbreviations).normalized
    else:
        normalized = str(normalized).strip()
    if not normalized:
        raise IngestError(f"name {historical!r} normalizes to the empty string")

    if "geometry" in mapping:
        raw_geom = cell("geometry", required=True)
        if isinstance(raw_geom, str):
            raw_geom = json.loads(raw_geom)
        geometry = geom.from_json(raw_geom, registry.crs_id)
    else:
        geometry = geom.point(
            float(cell("x", required=True)), float(cell("y", required=True)), registry.crs_id
        )

    period = None
    raw_period = cell("period")
    if raw_period is not None and str(raw_period).strip():
        period = parse_fuzzy_date(str(raw_period))

    accuracy = None
    raw_accuracy = cell("accuracy")
    if raw_accuracy is not None and str(raw_accuracy).strip():
        accuracy = float(raw_accuracy)

    return GeoHistoricalObject(
        historical_name=historical,
        normalized_name=normalized,
        source_ref=source_ref,
        process_ref=process_ref,
        geometry=geometry,
        period=period,
        accuracy=accuracy,
    )


def _iter_rows(path, file_format: str):
    if file_format == "delimited":
        with open(path, encoding="utf-8", newline="") as fh:
            yield from csv.DictReader(fh)
    elif file_format == "json-features":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        for feature in doc.get("features", []):
            row = dict(feature.get("properties", {}))
            row["__geometry__"] = feature.get("geometry")
            yield row
    else:
        raise IngestError(f"unknown format {file_format!r} (use delimited or json-features)")


def load_objects_file(
    target,
    gazetteer: str,
    path,
    file_format: str,
    mapping: dict[str, str],
    source_ref: int,
    process_ref: int,
    rejects_path=None,
) -> IngestReport:
    """Load a file into a gazetteer; bad rows go to the rejects report.

    ``target`` is a GazetteerRegistry or anything wrapping one behind the
    same insert_objects contract (e.g. the journaled service engine).
    """
    registry: GazetteerRegistry = getattr(target, "registry", target)
    if file_format == "json-features":
        mapping = dict(mapping, geometry="__geometry__")
    _check_mapping(mapping)
    objects = []
    rejects: list[RejectedRow] = []
    for index, row in enumerate(_iter_rows(path, file_format)):
        try:
            objects.append(_row_to_object(row, mapping, registry, source_ref, process_ref))
        except (IngestError, ValueError) as e:
            rejects.append(RejectedRow(index, {k: v for k, v in row.items() if k != "__geometry__"}, str(e)))
    inserted = target.insert_objects(gazetteer, objects) if objects else 0
    report = IngestReport(inserted, tuple(rejects))
    if rejects_path is not None:
        write_rejects(rejects_path, report.rejects)
    return report


def write_rejects(path, rejects) -> None:
    """Delimited rejects report: original row cells + the reason."""
    rejects = list(rejects)
    columns: list[str] = []
    for r in rejects:
        for key in r.row:
            if key not in columns:
                columns.append(key)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row_index", *columns, "reason"])
        for r in rejects:
            writer.writerow([r.row_index, *[r.row.get(c, "") for c in columns], r.reason])


def export_objects(registry: GazetteerRegistry, gazetteer: str, path) -> int:
    """Write a gazetteer back out as a JSON feature file (round-trips
    through load_objects_file)."""
    g = registry.gazetteer(gazetteer)
    features = []
    for oid in g.object_ids:
        obj = registry.object(oid)
        properties = {
            "historical_name": obj.historical_name,
            "normalized_name": obj.normalized_name,
        }
        if obj.period is not None:
            properties["period"] = ";".join(str(v) for v in obj.period.as_tuple())
        if obj.accuracy is not None:
            properties["accuracy"] = str(obj.accuracy)
        features.append({"geometry": geom.to_json(obj.geometry), "properties": properties})
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"crs_id": registry.crs_id, "features": features}, fh, indent=1)
    return len(features)


# ----------------------------------------------------------------------
# building-number interpolation

def interpolate_building_numbers(
    segment,
    side: str,
    first_number: int,
    last_number: int,
    road_width: float = 10.0,
) -> list[tuple[int, tuple[float, float]]]:
    """Place numbers first, first+2, ... last along one side of a street.

    The k-th of n numbers sits at curvilinear fraction (k + 0.5)/n of the
    segment length (midpoints of equal spans, so shared junctions never get
    double-placed), offset perpendicular by road_width/2.  Left is 90
    degrees counterclockwise from the digitization travel direction.
    """
    if side not in ("left", "right"):
        raise IngestError(f"side must be left or right, got {side!r}")
    if first_number > last_number:
        raise IngestError(f"reversed numbers: first {first_number} > last {last_number}")
    if (last_number - first_number) % 2 != 0:
        raise IngestError(
            f"parity mismatch: {first_number} and {last_number} must share parity"
        )
    if road_width < 0:
        raise IngestError("road_width must be >= 0")
    coords = segment.coordinates if isinstance(segment, geom.Geometry) else [tuple(p) for p in segment]
    if len(coords) < 2:
        raise IngestError("segment needs at least two vertices")
    lengths = []
    for (x0, y0), (x1, y1) in zip(coords, coords[1:]):
        lengths.append(math.hypot(x1 - x0, y1 - y0))
    total = sum(lengths)
    if total <= 0:
        raise IngestError("segment has zero length")

    n = (last_number - first_number) // 2 + 1
    offset_sign = 1.0 if side == "left" else -1.0
    pieces = [
        (p0, p1, piece)
        for p0, p1, piece in zip(coords, coords[1:], lengths)
        if piece > 0
    ]
    placed = []
    for k in range(n):
        s = (k + 0.5) / n * total
        acc = 0.0
        for index, ((x0, y0), (x1, y1), piece) in enumerate(pieces):
            if acc + piece >= s or index == len(pieces) - 1:
                t = min(1.0, (s - acc) / piece)
                px, py = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
                ux, uy = (x1 - x0) / piece, (y1 - y0) / piece
                nx, ny = -uy * offset_sign, ux * offset_sign
                placed.append(
                    (first_number + 2 * k, (px + nx * road_width / 2.0, py + ny * road_width / 2.0))
                )
                break
            acc += piece
    return placed


# ----------------------------------------------------------------------
# modern data adapter

def equirectangular_project(
    lon: float, lat: float, lon0: float, lat0: float, radius: float = EARTH_RADIUS_M
) -> tuple[float, float]:
    """Longitude/latitude degrees -> planar meters around (lon0, lat0)."""
    if not -90.0 <= lat <= 90.0:
        raise IngestError(f"latitude out of range: {lat}")
    if not -180.0 <= lon - lon0 <= 180.0:
        raise IngestError(f"longitude {lon} too far from projection origin {lon0}")
    x = math.radians(lon - lon0) * math.cos(math.radians(lat0)) * radius
    y = math.radians(lat - lat0) * radius
    return (x, y)


def import_modern_addresses(
    target,
    gazetteer: str,
    path,
    lon0: float,
    lat0: float,
    period: FuzzyPeriod,
    accuracy: float,
    source_ref: int,
    process_ref: int,
    name_property: str = "name",
    rejects_path=None,
) -> IngestReport:
    """Project a lon/lat JSON feature file into the registry's planar crs
    and insert it as one more gazetteer with the given period/accuracy."""
    registry: GazetteerRegistry = getattr(target, "registry", target)
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    objects = []
    rejects: list[RejectedRow] = []
    for index, feature in enumerate(doc.get("features", [])):
        properties = feature.get("properties", {})
        try:
            raw = feature.get("geometry")
            if not raw or raw.get("kind") != "point":
                raise IngestError("modern import expects point features")
            lon, lat = raw["coordinates"]
            x, y = equirectangular_project(lon, lat, lon0, lat0)
            name = str(properties.get(name_property, "")).strip()
            if not name:
                raise IngestError(f"empty {name_property!r} property")
            objects.append(
                GeoHistoricalObject(
                    historical_name=name,
                    normalized_name=textmod.normalize(name, registry.abbreviations).normalized,
                    source_ref=source_ref,
                    process_ref=process_ref,
                    geometry=geom.point(x, y, registry.crs_id),
                    period=period,
                    accuracy=accuracy,
                )
            )
        except (IngestError, ValueError, KeyError, TypeError) as e:
            rejects.append(RejectedRow(index, dict(properties), str(e)))
    inserted = target.insert_objects(gazetteer, objects) if objects else 0
    report = IngestReport(inserted, tuple(rejects))
    if rejects_path is not None:
        write_rejects(rejects_path, report.rejects)
    return report

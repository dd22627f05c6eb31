"""Geohistorical object model and the multi-gazetteer registry.

A gazetteer is a named collection of geohistorical objects tagged either
"precise" (postal-address-level entries) or "rough" (streets,
neighbourhoods and other coarse features).  The registry unifies all
gazetteers of a class behind one candidate store, so a query observes
every registered collection at once.  Redundant or conflicting objects
across gazetteers are allowed by design; ranking sorts them out later.

Candidate generation is trigram-first: normalized names are indexed in an
inverted trigram index (compiled kernel with NumPy fallback), bounding
boxes post-filter when a spatial window is given.

Concurrency: many readers, one writer.  Writers mutate under a lock and
publish an immutable compiled snapshot at the end of each batch; readers
only ever see fully published batches.
"""

from __future__ import annotations

import threading
from array import array
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry as geom
from . import text as textmod
from ._kernels import match_candidates
from .fuzzy_time import FuzzyPeriod
from .geometry import Geometry

SCALE_CLASSES = ("precise", "rough")


class GazetteerError(ValueError):
    pass


class DuplicateNameError(GazetteerError):
    pass


class ReferentialIntegrityError(GazetteerError):
    pass


class CrsMismatchError(GazetteerError):
    pass


@dataclass(frozen=True)
class HistoricalSource:
    """A primary historical document (e.g. one atlas) objects come from."""

    name: str
    default_period: FuzzyPeriod
    default_accuracy: float
    description: str = ""
    id: int | None = None

    def __post_init__(self):
        if not self.name:
            raise GazetteerError("source name must be non-empty")
        if self.default_accuracy <= 0:
            raise GazetteerError("default_accuracy must be > 0")


@dataclass(frozen=True)
class NumericalOriginProcess:
    """How objects were digitized from their source."""

    name: str
    digitizing_precision: float
    description: str = ""
    id: int | None = None

    def __post_init__(self):
        if not self.name:
            raise GazetteerError("process name must be non-empty")
        if self.digitizing_precision < 0:
            raise GazetteerError("digitizing_precision must be >= 0")


@dataclass(frozen=True)
class GeoHistoricalObject:
    historical_name: str
    normalized_name: str
    source_ref: int
    process_ref: int
    geometry: Geometry
    period: FuzzyPeriod | None = None
    accuracy: float | None = None
    scale_class: str | None = None
    id: int | None = None


@dataclass
class Gazetteer:
    name: str
    scale_class: str
    object_ids: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class Candidate:
    object: GeoHistoricalObject
    gazetteer: str
    scale_class: str
    string_distance: float


class _TrigramStore:
    """Inverted trigram index over one scale class.

    Mutations happen under the registry's writer lock; ``publish`` swaps in
    an immutable compiled snapshot that readers use lock-free.
    """

    def __init__(self):
        self._vocab: dict[str, int] = {}
        self._postings: list[array] = []
        self._sizes = array("i")
        self._object_ids: list[int] = []
        self._bboxes: list[tuple[float, float, float, float]] = []
        self._compiled = None

    def add(self, object_id: int, trigrams: frozenset[str], bbox) -> None:
        slot = len(self._sizes)
        for gram in trigrams:
            tid = self._vocab.get(gram)
            if tid is None:
                tid = len(self._postings)
                self._vocab[gram] = tid
                self._postings.append(array("i"))
            self._postings[tid].append(slot)
        self._sizes.append(len(trigrams))
        self._object_ids.append(object_id)
        self._bboxes.append(bbox)

    def publish(self) -> None:
        nvocab = len(self._postings)
        counts = np.fromiter((len(p) for p in self._postings), dtype=np.int64, count=nvocab)
        indptr = np.zeros(nvocab + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if nvocab:
            ids = np.concatenate(
                [np.frombuffer(p, dtype=np.int32) if len(p) else np.empty(0, np.int32) for p in self._postings]
            )
        else:
            ids = np.empty(0, dtype=np.int32)
        sizes = np.frombuffer(self._sizes, dtype=np.int32).copy() if len(self._sizes) else np.empty(0, np.int32)
        object_ids = np.asarray(self._object_ids, dtype=np.int64)
        bboxes = (
            np.asarray(self._bboxes, dtype=np.float64)
            if self._bboxes
            else np.empty((0, 4), dtype=np.float64)
        )
        self._compiled = (indptr, ids, sizes, len(sizes), object_ids, bboxes)

    def match(self, trigrams: frozenset[str], max_distance: float, window=None):
        """(global object ids, distances) in ascending insertion order."""
        comp = self._compiled
        if comp is None:
            return np.empty(0, np.int64), np.empty(0, np.float64)
        indptr, ids, sizes, published, object_ids, bboxes = comp
        nvocab = len(indptr) - 1
        vocab = self._vocab
        tids = sorted(t for t in (vocab.get(g) for g in trigrams) if t is not None and t < nvocab)
        slots, dists = match_candidates(
            indptr,
            ids,
            sizes,
            published,
            np.asarray(tids, dtype=np.int32),
            len(trigrams),
            max_distance,
        )
        if window is not None and len(slots):
            minx, miny, maxx, maxy = window
            bb = bboxes[slots]
            keep = (bb[:, 0] <= maxx) & (bb[:, 2] >= minx) & (bb[:, 1] <= maxy) & (bb[:, 3] >= miny)
            slots, dists = slots[keep], dists[keep]
        return object_ids[slots], dists


class GazetteerRegistry:
    """Catalogs, gazetteers and the unified candidate stores."""

    def __init__(self, crs_id: str = geom.DEFAULT_CRS, abbreviations: dict[str, str] | None = None):
        self.crs_id = crs_id
        self.abbreviations = abbreviations
        self._sources: dict[int, HistoricalSource] = {}
        self._source_ids: dict[str, int] = {}
        self._processes: dict[int, NumericalOriginProcess] = {}
        self._process_ids: dict[str, int] = {}
        self._gazetteers: dict[str, Gazetteer] = {}
        self._objects: list[GeoHistoricalObject] = []
        self._gaz_of: list[str] = []
        self._sqrt_buffered_area: list[float] = []
        self._building_number: list[int | None] = []
        self._period_envelope: list[tuple[float, float]] = []  # effective [a, d] per object
        self._stores = {cls: _TrigramStore() for cls in SCALE_CLASSES}
        self._write_lock = threading.Lock()

    # ------------------------------------------------------------------
    # catalogs

    def register_source(self, source: HistoricalSource) -> int:
        with self._write_lock:
            if source.name in self._source_ids:
                raise DuplicateNameError(f"source name already registered: {source.name!r}")
            sid = len(self._sources)
            self._sources[sid] = replace(source, id=sid)
            self._source_ids[source.name] = sid
            return sid

    def register_process(self, process: NumericalOriginProcess) -> int:
        with self._write_lock:
            if process.name in self._process_ids:
                raise DuplicateNameError(f"process name already registered: {process.name!r}")
            pid = len(self._processes)
            self._processes[pid] = replace(process, id=pid)
            self._process_ids[process.name] = pid
            return pid

    def create_gazetteer(self, name: str, scale_class: str) -> Gazetteer:
        if scale_class not in SCALE_CLASSES:
            raise GazetteerError(f"scale_class must be one of {SCALE_CLASSES}, got {scale_class!r}")
        with self._write_lock:
            if name in self._gazetteers:
                raise DuplicateNameError(f"gazetteer already exists: {name!r}")
            g = Gazetteer(name, scale_class)
            self._gazetteers[name] = g
            return g

    # ------------------------------------------------------------------
    # lookups

    def source(self, ref: int) -> HistoricalSource:
        return self._sources[ref]

    def process(self, ref: int) -> NumericalOriginProcess:
        return self._processes[ref]

    def source_id(self, name: str) -> int | None:
        return self._source_ids.get(name)

    def process_id(self, name: str) -> int | None:
        return self._process_ids.get(name)

    def gazetteer(self, name: str) -> Gazetteer:
        return self._gazetteers[name]

    def gazetteers(self) -> dict[str, Gazetteer]:
        return dict(self._gazetteers)

    def sources(self) -> list[HistoricalSource]:
        return [self._sources[i] for i in sorted(self._sources)]

    def processes(self) -> list[NumericalOriginProcess]:
        return [self._processes[i] for i in sorted(self._processes)]

    def object(self, object_id: int) -> GeoHistoricalObject:
        return self._objects[object_id]

    def object_count(self) -> int:
        return len(self._objects)

    def gazetteer_of(self, object_id: int) -> str:
        return self._gaz_of[object_id]

    def sqrt_buffered_area(self, object_id: int) -> float:
        return self._sqrt_buffered_area[object_id]

    def building_number(self, object_id: int) -> int | None:
        return self._building_number[object_id]

    def period_envelope(self, object_id: int) -> tuple[float, float]:
        """Effective-period support [a, d] captured at insert."""
        return self._period_envelope[object_id]

    def query_period_window(self, start: float, end: float) -> list[int]:
        """Ids of objects whose period support overlaps [start, end].

        Diagnostic/analysis surface over the period envelopes; candidate
        generation itself is text-first and weighs time in scoring."""
        if end < start:
            raise GazetteerError(f"invalid period window ({start}, {end})")
        return [
            oid
            for oid, (a, d) in enumerate(self._period_envelope)
            if a <= end and d >= start
        ]

    def effective_period(self, obj: GeoHistoricalObject) -> FuzzyPeriod:
        return obj.period if obj.period is not None else self._sources[obj.source_ref].default_period

    def effective_accuracy(self, obj: GeoHistoricalObject) -> float:
        base = obj.accuracy if obj.accuracy is not None else self._sources[obj.source_ref].default_accuracy
        return base + self._processes[obj.process_ref].digitizing_precision

    # ------------------------------------------------------------------
    # inserts

    def insert_objects(self, gazetteer, objs) -> int:
        """Validate then append a batch; readers see all of it or none."""
        g = gazetteer if isinstance(gazetteer, Gazetteer) else self._gazetteers[gazetteer]
        objs = list(objs)
        for obj in objs:
            if not obj.normalized_name or not obj.normalized_name.strip():
                raise GazetteerError(f"object {obj.historical_name!r} has empty normalized_name")
            if obj.source_ref not in self._sources:
                raise ReferentialIntegrityError(
                    f"object {obj.historical_name!r}: unknown source_ref {obj.source_ref}"
                )
            if obj.process_ref not in self._processes:
                raise ReferentialIntegrityError(
                    f"object {obj.historical_name!r}: unknown process_ref {obj.process_ref}"
                )
            if obj.geometry.crs_id != self.crs_id:
                raise CrsMismatchError(
                    f"object {obj.historical_name!r}: geometry crs {obj.geometry.crs_id!r} "
                    f"!= registry crs {self.crs_id!r}"
                )
            if obj.scale_class is not None and obj.scale_class != g.scale_class:
                raise GazetteerError(
                    f"object {obj.historical_name!r}: scale_class {obj.scale_class!r} conflicts "
                    f"with gazetteer {g.name!r} ({g.scale_class})"
                )
        with self._write_lock:
            store = self._stores[g.scale_class]
            for obj in objs:
                oid = len(self._objects)
                stored = replace(obj, id=oid, scale_class=g.scale_class)
                self._objects.append(stored)
                self._gaz_of.append(g.name)
                g.object_ids.append(oid)
                precision = self.effective_accuracy(stored)
                self._sqrt_buffered_area.append(geom.sqrt_buffered_area(stored.geometry, precision))
                self._building_number.append(
                    textmod.normalize(stored.normalized_name, self.abbreviations).building_number
                )
                period = self.effective_period(stored)
                self._period_envelope.append((period.a, period.d))
                store.add(oid, textmod.trigram_set(stored.normalized_name), geom.bounds(stored.geometry))
            store.publish()
        return len(objs)

    # ------------------------------------------------------------------
    # queries

    def query_candidates(
        self,
        text: str,
        max_string_distance: float,
        scale_filter: str = "both",
        spatial_window: tuple[float, float, float, float] | None = None,
    ) -> list[Candidate]:
        """All objects in the selected stores within the trigram distance
        threshold (and window, when given).  No ranking; ascending id."""
        if not text:
            raise GazetteerError("query text must be non-empty")
        if scale_filter not in ("precise", "rough", "both"):
            raise GazetteerError(f"bad scale_filter: {scale_filter!r}")
        trigrams = textmod.trigram_set(text)
        classes = SCALE_CLASSES if scale_filter == "both" else (scale_filter,)
        found: list[Candidate] = []
        for cls in classes:
            ids, dists = self._stores[cls].match(trigrams, max_string_distance, spatial_window)
            for oid, dist in zip(ids.tolist(), dists.tolist()):
                found.append(Candidate(self._objects[oid], self._gaz_of[oid], cls, dist))
        found.sort(key=lambda c: c.object.id)
        return found

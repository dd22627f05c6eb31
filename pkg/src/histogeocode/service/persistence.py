"""Result persistence, the collaborative-edit loop, and durable state.

State changes flow through one engine: every mutation (catalog
registration, object insert, result persist, edit) is applied in memory
and appended to a checksummed JSON-lines journal.  A snapshot plus journal
replay reproduces the exact state, so the whole artifact runs embedded —
no database server.

Geocoding results can be persisted under a RUID, a random 128-bit
identifier whose possession is the only edit credential.  An edit never
mutates anything: it appends a corrected copy of the matched object to the
built-in "user_edit_added_to_geocoding" gazetteer (original source kept,
origin process set to "collaborative edit"), where subsequent queries find
it as one more candidate.
"""

from __future__ import annotations

import hashlib
import json
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .. import geometry as geom
from ..fuzzy_time import FuzzyPeriod
from ..gazetteer import (
    GazetteerRegistry,
    GeoHistoricalObject,
    HistoricalSource,
    NumericalOriginProcess,
)
from ..geocoder import GeocodeQuery, GeocodeResult, geocode

EDIT_GAZETTEER = "user_edit_added_to_geocoding"
EDIT_PROCESS = "collaborative edit"

JOURNAL_FILE = "journal.ndjson"
SNAPSHOT_FILE = "snapshot.json"


class PersistenceError(ValueError):
    pass


class RuidMismatchError(PersistenceError):
    """Presented ruid does not open the targeted result set."""


class UnknownRecordError(PersistenceError):
    pass


# ----------------------------------------------------------------------
# serialization helpers

def _canonical(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _entry_sha(seq: int, entry_type: str, payload) -> str:
    return hashlib.sha256(f"{seq}|{entry_type}|{_canonical(payload)}".encode()).hexdigest()


def period_to_list(p: FuzzyPeriod | None):
    return None if p is None else [p.a, p.b, p.c, p.d]


def period_from_list(v) -> FuzzyPeriod | None:
    return None if v is None else FuzzyPeriod(*v)


def source_to_dict(s: HistoricalSource) -> dict:
    return {
        "name": s.name,
        "description": s.description,
        "default_period": period_to_list(s.default_period),
        "default_accuracy": s.default_accuracy,
    }


def source_from_dict(d: dict) -> HistoricalSource:
    return HistoricalSource(
        name=d["name"],
        default_period=period_from_list(d["default_period"]),
        default_accuracy=d["default_accuracy"],
        description=d.get("description", ""),
    )


def process_to_dict(p: NumericalOriginProcess) -> dict:
    return {
        "name": p.name,
        "description": p.description,
        "digitizing_precision": p.digitizing_precision,
    }


def process_from_dict(d: dict) -> NumericalOriginProcess:
    return NumericalOriginProcess(
        name=d["name"],
        digitizing_precision=d["digitizing_precision"],
        description=d.get("description", ""),
    )


def object_to_dict(obj: GeoHistoricalObject) -> dict:
    return {
        "historical_name": obj.historical_name,
        "normalized_name": obj.normalized_name,
        "source_ref": obj.source_ref,
        "process_ref": obj.process_ref,
        "geometry": geom.to_json(obj.geometry),
        "period": period_to_list(obj.period),
        "accuracy": obj.accuracy,
    }


def object_from_dict(d: dict, crs_id: str) -> GeoHistoricalObject:
    return GeoHistoricalObject(
        historical_name=d["historical_name"],
        normalized_name=d["normalized_name"],
        source_ref=d["source_ref"],
        process_ref=d["process_ref"],
        geometry=geom.from_json(d["geometry"], crs_id),
        period=period_from_list(d.get("period")),
        accuracy=d.get("accuracy"),
    )


def result_to_dict(result: GeocodeResult, registry: GazetteerRegistry) -> dict:
    """The REST response encoding of one ranked result (docs/formats.md)."""
    obj = result.object
    m = result.metrics
    period = registry.effective_period(obj)
    finite = result.score not in (float("inf"), float("-inf"))
    return {
        "id": obj.id,
        "rank": result.rank,
        "name_historical": obj.historical_name,
        "name_normalized": obj.normalized_name,
        "geometry": geom.to_json(obj.geometry),
        "point": [result.point[0], result.point[1]],
        "score": result.score if finite else None,
        "score_error": result.score_error,
        "metrics": {
            "w_d": m.w_d,
            "t_d": m.t_d,
            "b_d": m.b_d,
            "s_p": m.s_p,
            "s_d": m.s_d,
            "g_d": m.g_d,
        },
        "flags": {
            "t_d_available": m.t_d_available,
            "number_compared": m.number_compared,
            "g_d_available": m.g_d_available,
        },
        "gazetteer": result.gazetteer,
        "source": registry.source(obj.source_ref).name,
        "period": period_to_list(period),
        "accuracy_m": registry.effective_accuracy(obj),
        "precision_class": result.precision_class,
    }


# ----------------------------------------------------------------------
# records

@dataclass
class ResultRecord:
    ruid: str
    record_id: int
    row_index: int
    query: dict
    result: dict
    created_at: str
    edited: bool = False

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "row_index": self.row_index,
            "query": self.query,
            "result": self.result,
            "created_at": self.created_at,
            "edited": self.edited,
        }


@dataclass(frozen=True)
class EditPayload:
    geometry: geom.Geometry | None = None
    period: FuzzyPeriod | None = None
    historical_name: str | None = None
    normalized_name: str | None = None
    note: str | None = None

    def is_empty(self) -> bool:
        return (
            self.geometry is None
            and self.period is None
            and self.historical_name is None
            and self.normalized_name is None
        )

    def to_dict(self) -> dict:
        return {
            "geometry": None if self.geometry is None else geom.to_json(self.geometry),
            "period": period_to_list(self.period),
            "historical_name": self.historical_name,
            "normalized_name": self.normalized_name,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict, crs_id: str) -> "EditPayload":
        return cls(
            geometry=None if d.get("geometry") is None else geom.from_json(d["geometry"], crs_id),
            period=period_from_list(d.get("period")),
            historical_name=d.get("historical_name"),
            normalized_name=d.get("normalized_name"),
            note=d.get("note"),
        )


@dataclass(frozen=True)
class LoadReport:
    snapshot_seq: int
    replayed_entries: int
    corruption: str | None = None


# ----------------------------------------------------------------------
# the engine

class GeocoderService:
    """Registry + result store + append-only journal, as one unit.

    ``data_dir=None`` runs fully in memory (tests, throwaway sessions).
    """

    def __init__(
        self,
        data_dir: str | Path | None = None,
        crs_id: str = geom.DEFAULT_CRS,
        abbreviations: dict[str, str] | None = None,
    ):
        self.registry = GazetteerRegistry(crs_id, abbreviations)
        self.results: dict[str, list[ResultRecord]] = {}
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self._seq = 0
        self._journal_lock = threading.Lock()
        if self.data_dir is not None:
            self.data_dir.mkdir(parents=True, exist_ok=True)

    # -- journaling ----------------------------------------------------

    @property
    def _journal_path(self) -> Path:
        return self.data_dir / JOURNAL_FILE

    @property
    def _snapshot_path(self) -> Path:
        return self.data_dir / SNAPSHOT_FILE

    def _journal(self, entry_type: str, payload: dict) -> None:
        with self._journal_lock:
            self._seq += 1
            if self.data_dir is None:
                return
            entry = {
                "seq": self._seq,
                "type": entry_type,
                "payload": payload,
                "sha": _entry_sha(self._seq, entry_type, payload),
            }
            with open(self._journal_path, "a", encoding="utf-8") as fh:
                fh.write(_canonical(entry) + "\n")
                fh.flush()

    # -- mutations (apply first, then journal) --------------------------

    def register_source(self, source: HistoricalSource) -> int:
        sid = self.registry.register_source(source)
        self._journal("register_source", source_to_dict(source))
        return sid

    def register_process(self, process: NumericalOriginProcess) -> int:
        pid = self.registry.register_process(process)
        self._journal("register_process", process_to_dict(process))
        return pid

    def create_gazetteer(self, name: str, scale_class: str):
        g = self.registry.create_gazetteer(name, scale_class)
        self._journal("create_gazetteer", {"name": name, "scale_class": scale_class})
        return g

    def insert_objects(self, gazetteer, objs) -> int:
        objs = list(objs)
        name = gazetteer if isinstance(gazetteer, str) else gazetteer.name
        count = self.registry.insert_objects(name, objs)
        self._journal(
            "insert_objects",
            {"gazetteer": name, "objects": [object_to_dict(o) for o in objs]},
        )
        return count

    def persist_results(self, query_echo: dict, rows) -> str:
        """Store (row_index, GeocodeResult) pairs under a fresh ruid."""
        ruid = secrets.token_urlsafe(16)
        created_at = datetime.now(timezone.utc).isoformat()
        records = [
            ResultRecord(
                ruid=ruid,
                record_id=i,
                row_index=row_index,
                query=query_echo,
                result=result_to_dict(result, self.registry),
                created_at=created_at,
            )
            for i, (row_index, result) in enumerate(rows)
        ]
        self.results[ruid] = records
        self._journal(
            "persist_results",
            {
                "ruid": ruid,
                "created_at": created_at,
                "query": query_echo,
                "records": [
                    {"record_id": r.record_id, "row_index": r.row_index, "result": r.result}
                    for r in records
                ],
            },
        )
        return ruid

    def _ensure_edit_targets(self) -> tuple[int, str]:
        # raw registry calls: the derived registrations are reproduced by
        # replaying the edit entry itself, so they must not journal
        pid = self.registry.process_id(EDIT_PROCESS)
        if pid is None:
            pid = self.registry.register_process(
                NumericalOriginProcess(
                    name=EDIT_PROCESS,
                    digitizing_precision=0.0,
                    description="corrections contributed through the edit interface",
                )
            )
        if EDIT_GAZETTEER not in self.registry.gazetteers():
            self.registry.create_gazetteer(EDIT_GAZETTEER, "precise")
        return pid, EDIT_GAZETTEER

    def edit_result(self, ruid: str, record_id: int, edits: EditPayload) -> int:
        """Apply a user edit: a brand-new object in the edit gazetteer.

        The presented ruid must open the record (the bouncer rule); source
        data is never touched."""
        records = self.results.get(ruid)
        if records is None:
            raise RuidMismatchError(f"no result set matches ruid {ruid!r}")
        record = next((r for r in records if r.record_id == record_id), None)
        if record is None:
            raise UnknownRecordError(f"no record {record_id} under this ruid")
        if edits.is_empty():
            raise PersistenceError("edit payload must change geometry, period or names")
        created_at = datetime.now(timezone.utc).isoformat()
        new_id = self._apply_edit(record, edits)
        self._journal(
            "edit",
            {
                "ruid": ruid,
                "record_id": record_id,
                "edits": edits.to_dict(),
                "created_at": created_at,
            },
        )
        return new_id

    def _apply_edit(self, record: ResultRecord, edits: EditPayload) -> int:
        process_id, gazetteer = self._ensure_edit_targets()
        original = self.registry.object(record.result["id"])
        new_obj = GeoHistoricalObject(
            historical_name=edits.historical_name or original.historical_name,
            normalized_name=edits.normalized_name or original.normalized_name,
            source_ref=original.source_ref,
            process_ref=process_id,
            geometry=edits.geometry or original.geometry,
            period=edits.period if edits.period is not None else original.period,
            accuracy=original.accuracy,
        )
        self.registry.insert_objects(gazetteer, [new_obj])
        record.edited = True
        return self.registry.object_count() - 1

    # -- reads -----------------------------------------------------------

    def geocode(self, query: GeocodeQuery):
        return geocode(query, self.registry)

    def get_results(self, ruid: str) -> list[ResultRecord]:
        records = self.results.get(ruid)
        if records is None:
            raise UnknownRecordError(f"unknown ruid {ruid!r}")
        return records

    # -- state, snapshot, replay ------------------------------------------

    def state_dict(self) -> dict:
        reg = self.registry
        return {
            "crs_id": reg.crs_id,
            "sources": [source_to_dict(s) for s in reg.sources()],
            "processes": [process_to_dict(p) for p in reg.processes()],
            "gazetteers": [
                {"name": g.name, "scale_class": g.scale_class}
                for g in reg.gazetteers().values()
            ],
            "objects": [
                {"gazetteer": reg.gazetteer_of(obj.id), **object_to_dict(obj)}
                for obj in (reg.object(i) for i in range(reg.object_count()))
            ],
            "results": {
                ruid: [r.to_dict() for r in records] for ruid, records in self.results.items()
            },
        }

    def state_hash(self) -> str:
        return hashlib.sha256(_canonical(self.state_dict()).encode()).hexdigest()

    def object_hashes(self) -> dict[int, str]:
        """Per-object content hashes, for immutability checks."""
        return {
            i: hashlib.sha256(_canonical(object_to_dict(self.registry.object(i))).encode()).hexdigest()
            for i in range(self.registry.object_count())
        }

    def save_snapshot(self) -> None:
        if self.data_dir is None:
            raise PersistenceError("in-memory service has no data dir")
        with self._journal_lock:
            snapshot = {"seq": self._seq, "state": self.state_dict()}
            tmp = self._snapshot_path.with_suffix(".tmp")
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(snapshot, fh)
            tmp.replace(self._snapshot_path)
            open(self._journal_path, "w").close()  # journal folded into snapshot

    def _restore_state(self, state: dict) -> None:
        for s in state["sources"]:
            self.registry.register_source(source_from_dict(s))
        for p in state["processes"]:
            self.registry.register_process(process_from_dict(p))
        for g in state["gazetteers"]:
            self.registry.create_gazetteer(g["name"], g["scale_class"])
        batch: list[GeoHistoricalObject] = []
        batch_gaz: str | None = None
        for od in state["objects"]:
            if od["gazetteer"] != batch_gaz and batch:
                self.registry.insert_objects(batch_gaz, batch)
                batch = []
            batch_gaz = od["gazetteer"]
            batch.append(object_from_dict(od, self.registry.crs_id))
        if batch:
            self.registry.insert_objects(batch_gaz, batch)
        for ruid, records in state["results"].items():
            self.results[ruid] = [
                ResultRecord(
                    ruid=ruid,
                    record_id=r["record_id"],
                    row_index=r["row_index"],
                    query=r["query"],
                    result=r["result"],
                    created_at=r["created_at"],
                    edited=r["edited"],
                )
                for r in records
            ]

    def _replay_entry(self, entry_type: str, payload: dict) -> None:
        if entry_type == "register_source":
            self.registry.register_source(source_from_dict(payload))
        elif entry_type == "register_process":
            self.registry.register_process(process_from_dict(payload))
        elif entry_type == "create_gazetteer":
            self.registry.create_gazetteer(payload["name"], payload["scale_class"])
        elif entry_type == "insert_objects":
            self.registry.insert_objects(
                payload["gazetteer"],
                [object_from_dict(o, self.registry.crs_id) for o in payload["objects"]],
            )
        elif entry_type == "persist_results":
            self.results[payload["ruid"]] = [
                ResultRecord(
                    ruid=payload["ruid"],
                    record_id=r["record_id"],
                    row_index=r["row_index"],
                    query=payload["query"],
                    result=r["result"],
                    created_at=payload["created_at"],
                )
                for r in payload["records"]
            ]
        elif entry_type == "edit":
            records = self.results[payload["ruid"]]
            record = next(r for r in records if r.record_id == payload["record_id"])
            self._apply_edit(record, EditPayload.from_dict(payload["edits"], self.registry.crs_id))
        else:
            raise PersistenceError(f"unknown journal entry type {entry_type!r}")

    @classmethod
    def load(
        cls,
        data_dir: str | Path,
        crs_id: str = geom.DEFAULT_CRS,
        abbreviations: dict[str, str] | None = None,
    ) -> tuple["GeocoderService", LoadReport]:
        """Rebuild state from snapshot + journal.

        Replay stops at the first corrupt entry (bad checksum, bad JSON or
        a sequence gap) and reports it; everything before is kept.
        """
        service = cls(data_dir=None, crs_id=crs_id, abbreviations=abbreviations)
        service.data_dir = Path(data_dir)
        service.data_dir.mkdir(parents=True, exist_ok=True)
        snapshot_seq = 0
        if service._snapshot_path.exists():
            with open(service._snapshot_path, encoding="utf-8") as fh:
                snapshot = json.load(fh)
            snapshot_seq = snapshot["seq"]
            service._restore_state(snapshot["state"])
        service._seq = snapshot_seq
        replayed = 0
        corruption = None
        if service._journal_path.exists():
            with open(service._journal_path, encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        entry = json.loads(line)
                        seq = entry["seq"]
                        if seq != service._seq + 1:
                            raise PersistenceError(
                                f"sequence gap: expected {service._seq + 1}, found {seq}"
                            )
                        if entry["sha"] != _entry_sha(seq, entry["type"], entry["payload"]):
                            raise PersistenceError("checksum mismatch")
                    except (json.JSONDecodeError, KeyError, PersistenceError) as e:
                        corruption = f"journal line {lineno}: {e}"
                        break
                    service._replay_entry(entry["type"], entry["payload"])
                    service._seq = seq
                    replayed += 1
        return service, LoadReport(snapshot_seq, replayed, corruption)

"""HTTP surface: geocoding, batch CSV, result sets and the edit endpoint.

Endpoints (see docs/formats.md for the response schema):

    GET  /health
    GET  /geocoding?address=...&date=...&precision=...&maxresults=...
                   [&maxdist=...&scoring=...&persist=true]
    POST /batch            body: text/csv; column config via query params
    GET  /results/{ruid}
    POST /results/{ruid}/{record_id}/edit
    /ui/...                static web interface, when a bundle dir is configured
"""

from __future__ import annotations

import csv
import io
from dataclasses import replace

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from .. import scoring as scoringmod
from ..fuzzy_time import FuzzyDateError, PeriodOrderingError, parse_fuzzy_date
from ..geocoder import BatchRow, GeocodeError, GeocodeQuery, batch_geocode
from ..geometry import GeometryError, from_json
from ..scoring import ExpressionError
from .config import ServiceConfig
from .persistence import (
    EditPayload,
    GeocoderService,
    PersistenceError,
    RuidMismatchError,
    UnknownRecordError,
    period_from_list,
    result_to_dict,
)

APPENDED_COLUMNS = [
    "matched_name",
    "x",
    "y",
    "score",
    "w_d",
    "t_d",
    "b_d",
    "s_p",
    "s_d",
    "g_d",
    "gazetteer",
    "precision_class",
    "status",
]


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse({"error": message}, status_code=status)


def build_query(
    config: ServiceConfig,
    address: str,
    date: str | None,
    precision: bool,
    maxresults: int,
    maxdist: float | None,
    scoring: str | None,
) -> GeocodeQuery:
    period = parse_fuzzy_date(date) if date else None
    expression = scoringmod.parse_expression(scoring) if scoring else config.scoring_expression()
    return GeocodeQuery(
        raw_address=address,
        period=period,
        max_results=maxresults,
        max_string_distance=maxdist if maxdist is not None else config.default_max_distance,
        allow_rough_fallback=not precision,
        scoring=expression,
    )


def process_batch_csv(
    service: GeocoderService,
    csv_text: str,
    defaults: GeocodeQuery,
    address_column: str = "address",
    date_column: str = "date",
):
    """Geocode a CSV: original columns are preserved, result columns are
    appended, and every row's best result is persisted under one ruid.

    Returns (output_csv_text, ruid, report).
    """
    reader = csv.DictReader(io.StringIO(csv_text))
    fieldnames = reader.fieldnames or []
    if address_column not in fieldnames:
        raise GeocodeError(f"missing address column {address_column!r}")
    in_rows = list(reader)
    rows = [
        BatchRow(
            address=row.get(address_column, ""),
            date_text=(row.get(date_column) or None) if date_column else None,
            passthrough=row,
        )
        for row in in_rows
    ]
    row_results, report = batch_geocode(rows, service.registry, defaults)

    persisted = [
        (i, rr.results[0]) for i, rr in enumerate(row_results) if rr.results
    ]
    echo = {
        "mode": "batch",
        "address_column": address_column,
        "date_column": date_column,
        "rows": len(rows),
    }
    ruid = service.persist_results(echo, persisted)

    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=[*fieldnames, *APPENDED_COLUMNS], lineterminator="\n")
    writer.writeheader()
    for row, rr in zip(in_rows, row_results):
        extra = dict.fromkeys(APPENDED_COLUMNS, "")
        extra["status"] = rr.status
        if rr.results:
            best = rr.results[0]
            m = best.metrics
            extra.update(
                matched_name=best.object.historical_name,
                x=repr(best.point[0]),
                y=repr(best.point[1]),
                score=repr(best.score),
                w_d=repr(m.w_d),
                t_d=repr(m.t_d),
                b_d=repr(m.b_d),
                s_p=repr(m.s_p),
                s_d=repr(m.s_d),
                g_d=repr(m.g_d),
                gazetteer=best.gazetteer,
                precision_class=best.precision_class,
            )
        writer.writerow({**row, **extra})
    return out.getvalue(), ruid, report


def create_app(service: GeocoderService, config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig()
    app = FastAPI(title="histogeocode", docs_url=None, redoc_url=None)

    @app.get("/health")
    def health():
        from .._kernels import BACKEND

        return {
            "status": "ok",
            "objects": service.registry.object_count(),
            "gazetteers": len(service.registry.gazetteers()),
            "kernel": BACKEND,
        }

    @app.get("/geocoding")
    def geocoding(
        address: str = "",
        date: str | None = None,
        precision: bool = False,
        maxresults: int = 1,
        maxdist: float | None = None,
        scoring: str | None = None,
        persist: bool = False,
    ):
        if not address.strip():
            return _error(400, "address parameter is required")
        try:
            query = build_query(config, address, date, precision, maxresults, maxdist, scoring)
            results = service.geocode(query)
        except (FuzzyDateError, PeriodOrderingError) as e:
            return _error(400, f"invalid date: {e}")
        except ExpressionError as e:
            return _error(400, f"invalid scoring expression: {e}")
        except GeocodeError as e:
            return _error(400, str(e))
        payload = {
            "query": {"address": address, "date": date, "precision": precision},
            "results": [result_to_dict(r, service.registry) for r in results],
        }
        if persist:
            payload["ruid"] = service.persist_results(
                {"mode": "single", "address": address, "date": date},
                [(0, r) for r in results],
            )
        return payload

    @app.post("/batch")
    async def batch(
        request: Request,
        address_column: str = "address",
        date_column: str = "date",
        maxdist: float | None = None,
        maxresults: int = 1,
        precision: bool = False,
        scoring: str | None = None,
    ):
        body = (await request.body()).decode("utf-8-sig")
        if not body.strip():
            return _error(400, "empty CSV body")
        try:
            defaults = build_query(config, "-", None, precision, maxresults, maxdist, scoring)
            output, ruid, report = process_batch_csv(
                service, body, defaults, address_column, date_column
            )
        except ExpressionError as e:
            return _error(400, f"invalid scoring expression: {e}")
        except GeocodeError as e:
            return _error(400, str(e))
        return Response(
            content=output,
            media_type="text/csv",
            headers={
                "X-Ruid": ruid,
                "X-Report": (
                    f"total={report.total} matched_precise={report.matched_precise} "
                    f"matched_rough={report.matched_rough} unmatched={report.unmatched} "
                    f"errors={report.errors} secs_per_1000={report.seconds_per_1000:.1f}"
                ),
            },
        )

    @app.get("/results/{ruid}")
    def results(ruid: str):
        try:
            records = service.get_results(ruid)
        except UnknownRecordError:
            return _error(404, f"unknown ruid {ruid!r}")
        return {"ruid": ruid, "records": [r.to_dict() for r in records]}

    @app.post("/results/{ruid}/{record_id}/edit")
    async def edit(ruid: str, record_id: int, request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "body must be JSON")
        try:
            payload = EditPayload(
                geometry=(
                    from_json(body["geometry"], service.registry.crs_id)
                    if body.get("geometry") is not None
                    else None
                ),
                period=_parse_period_field(body.get("period")),
                historical_name=body.get("historical_name"),
                normalized_name=body.get("normalized_name"),
                note=body.get("note"),
            )
        except (GeometryError, FuzzyDateError, PeriodOrderingError, TypeError, ValueError) as e:
            return _error(400, f"invalid edit payload: {e}")
        try:
            new_id = service.edit_result(ruid, record_id, payload)
        except RuidMismatchError as e:
            return _error(403, str(e))
        except UnknownRecordError as e:
            return _error(404, str(e))
        except PersistenceError as e:
            return _error(400, str(e))
        return {"new_object_id": new_id}

    if config.ui_dir:
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

        @app.get("/")
        def index():
            return RedirectResponse("/ui/")

    return app


def _parse_period_field(value):
    if value is None:
        return None
    if isinstance(value, str):
        return parse_fuzzy_date(value)
    if isinstance(value, (list, tuple)) and len(value) == 4:
        return period_from_list([float(v) for v in value])
    raise FuzzyDateError(f"period must be a date string or [a,b,c,d], got {value!r}")

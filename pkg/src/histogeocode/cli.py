"""Command line interface: ingest, geocode, batch, evaluate, georef, serve."""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import georef as georefmod
from . import ingest as ingestmod
from . import text as textmod
from .fuzzy_time import parse_fuzzy_date
from .gazetteer import HistoricalSource, NumericalOriginProcess
from .geocoder import GeocodeResult, evaluate_against_ground_truth
from .scoring import MetricVector
from .service.app import build_query, create_app, process_batch_csv
from .service.config import ServiceConfig, load_config
from .service.persistence import GeocoderService, result_to_dict


def _load_service(args) -> GeocoderService:
    abbreviations = None
    if getattr(args, "abbreviations", None):
        abbreviations = textmod.load_abbreviations(args.abbreviations)
    service, report = GeocoderService.load(args.data_dir, abbreviations=abbreviations)
    if report.corruption:
        print(f"warning: {report.corruption}", file=sys.stderr)
    return service


def _cmd_ingest(args) -> int:
    service = _load_service(args)
    registry = service.registry
    source_id = registry.source_id(args.source_name)
    if source_id is None:
        source_id = service.register_source(
            HistoricalSource(
                name=args.source_name,
                default_period=parse_fuzzy_date(args.source_period),
                default_accuracy=args.source_accuracy,
            )
        )
    process_id = registry.process_id(args.process_name)
    if process_id is None:
        process_id = service.register_process(
            NumericalOriginProcess(
                name=args.process_name, digitizing_precision=args.process_precision
            )
        )
    if args.gazetteer not in registry.gazetteers():
        service.create_gazetteer(args.gazetteer, args.scale)

    mapping = ingestmod.parse_mapping(args.mapping)
    report = ingestmod.load_objects_file(
        service,
        args.gazetteer,
        args.file,
        args.format,
        mapping,
        source_id,
        process_id,
        rejects_path=args.rejects,
    )
    print(json.dumps({"inserted": report.inserted, "rejected": len(report.rejects)}))
    return 0


def _cmd_geocode(args) -> int:
    service = _load_service(args)
    config = ServiceConfig()
    if args.scoring:
        config.scoring = args.scoring
    query = build_query(
        config, args.address, args.date, args.precision, args.maxresults, args.maxdist, args.scoring
    )
    results = service.geocode(query)
    print(json.dumps([result_to_dict(r, service.registry) for r in results], indent=1))
    return 0


def _cmd_batch(args) -> int:
    service = _load_service(args)
    config = ServiceConfig()
    defaults = build_query(config, "-", None, args.precision, args.maxresults, args.maxdist, args.scoring)
    with open(args.infile, encoding="utf-8-sig") as fh:
        csv_text = fh.read()
    output, ruid, report = process_batch_csv(
        service, csv_text, defaults, args.address_column, args.date_column
    )
    with open(args.outfile, "w", encoding="utf-8", newline="") as fh:
        fh.write(output)
    print(report.table_line(dataset=args.infile))
    print(f"ruid: {ruid}")
    return 0


def _cmd_evaluate(args) -> int:
    with open(args.results, encoding="utf-8-sig") as fh:
        result_rows = list(csv.DictReader(fh))
    with open(args.truth, encoding="utf-8-sig") as fh:
        truth_rows = list(csv.DictReader(fh))

    def row_id(row, index):
        return row[args.id_column] if args.id_column else index

    results = []
    truth = []
    for i, row in enumerate(result_rows):
        if row.get("status", "").startswith(("unmatched", "error")):
            continue
        metrics = MetricVector(
            w_d=float(row.get("w_d", 0) or 0),
            t_d=float(row.get("t_d", 0) or 0),
            b_d=0.0,
            s_p=0.0,
            s_d=0.0,
            g_d=0.0,
        )
        results.append(
            (
                row_id(row, i),
                _point_result(float(row["x"]), float(row["y"]), metrics),
            )
        )
    for i, row in enumerate(truth_rows):
        truth.append((row_id(row, i), (float(row["x"]), float(row["y"]))))
    matched_ids = {r[0] for r in results}
    truth = [t for t in truth if t[0] in matched_ids]
    report = evaluate_against_ground_truth(results, truth)
    print(report.table())
    return 0


def _point_result(x: float, y: float, metrics: MetricVector) -> GeocodeResult:
    # evaluation only needs the point and the w_d/t_d averages
    return GeocodeResult(
        object=None,  # type: ignore[arg-type]
        gazetteer="",
        score=0.0,
        metrics=metrics,
        rank=1,
        precision_class="precise",
        point=(x, y),
    )


def _cmd_georef(args) -> int:
    gcps = []
    with open(args.gcps, encoding="utf-8-sig") as fh:
        for row in csv.DictReader(fh):
            gcps.append(
                georefmod.ControlPointPair(
                    (float(row["src_x"]), float(row["src_y"])),
                    (float(row["dst_x"]), float(row["dst_y"])),
                )
            )
    if args.model == "affine":
        transform = georefmod.fit_affine(gcps)
        parameters = {"coefficients": list(transform.coefficients)}
    elif args.model == "polynomial":
        transform = georefmod.fit_polynomial(gcps, args.order)
        parameters = {
            "order": transform.order,
            "exponents": [list(e) for e in transform.exponents],
            "coefficients_x": list(transform.coefficients_x),
            "coefficients_y": list(transform.coefficients_y),
        }
    else:
        transform = georefmod.fit_tps(gcps, args.reg)
        parameters = {
            "centers": [list(c) for c in transform.centers],
            "weights_x": list(transform.weights_x),
            "weights_y": list(transform.weights_y),
            "regularization": transform.regularization,
        }
    errors, rmse = georefmod.residuals(transform, gcps)
    print(
        json.dumps(
            {"model": args.model, "parameters": parameters, "residuals": errors, "rmse": rmse},
            indent=1,
        )
    )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    config = load_config(args.config) if args.config else ServiceConfig()
    if args.data_dir:
        config.data_dir = args.data_dir
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    if args.ui_dir:
        config.ui_dir = args.ui_dir
    if not config.data_dir:
        print("error: a data dir is required (flag --data-dir or config data_dir)", file=sys.stderr)
        return 2
    abbreviations = None
    if config.abbreviations_path:
        abbreviations = textmod.load_abbreviations(config.abbreviations_path)
    service, report = GeocoderService.load(config.data_dir, config.crs_id, abbreviations)
    if report.corruption:
        print(f"warning: {report.corruption}", file=sys.stderr)
    app = create_app(service, config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="histogeocode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load a gazetteer file")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--file", required=True)
    p.add_argument("--format", choices=("delimited", "json-features"), default="delimited")
    p.add_argument("--mapping", required=True, help="key=value mapping config file")
    p.add_argument("--gazetteer", required=True)
    p.add_argument("--scale", choices=("precise", "rough"), default="precise")
    p.add_argument("--source-name", required=True)
    p.add_argument("--source-period", default="1800-1900")
    p.add_argument("--source-accuracy", type=float, default=10.0)
    p.add_argument("--process-name", default="manual digitization")
    p.add_argument("--process-precision", type=float, default=5.0)
    p.add_argument("--rejects", help="write rejected rows to this CSV")
    p.add_argument("--abbreviations")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("geocode", help="geocode one address")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--address", required=True)
    p.add_argument("--date")
    p.add_argument("--maxresults", type=int, default=1)
    p.add_argument("--maxdist", type=float, default=None)
    p.add_argument("--precision", action="store_true", help="precise-scale results only")
    p.add_argument("--scoring")
    p.add_argument("--abbreviations")
    p.set_defaults(func=_cmd_geocode)

    p = sub.add_parser("batch", help="geocode a CSV file")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", dest="outfile", required=True)
    p.add_argument("--address-column", default="address")
    p.add_argument("--date-column", default="date")
    p.add_argument("--maxresults", type=int, default=1)
    p.add_argument("--maxdist", type=float, default=None)
    p.add_argument("--precision", action="store_true")
    p.add_argument("--scoring")
    p.add_argument("--abbreviations")
    p.set_defaults(func=_cmd_batch)

    p = sub.add_parser("evaluate", help="error histogram against ground truth")
    p.add_argument("--results", required=True, help="batch output CSV (x, y, w_d, t_d, status)")
    p.add_argument("--truth", required=True, help="CSV with x, y columns")
    p.add_argument("--id-column", default=None, help="align by this column instead of row order")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("georef", help="fit a GCP transform")
    p.add_argument("--gcps", required=True, help="CSV with src_x, src_y, dst_x, dst_y")
    p.add_argument("--model", choices=("affine", "polynomial", "tps"), default="tps")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--reg", type=float, default=0.0)
    p.set_defaults(func=_cmd_georef)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config")
    p.add_argument("--data-dir")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--ui-dir")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

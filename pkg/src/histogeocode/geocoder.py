"""End-to-end geocoding: candidates, metrics, scores, multiscale fallback.

The pipeline normalizes the raw address, gathers candidates from the
precise stores within the string-distance threshold, falls back to rough
stores when nothing precise matched (flagged so response accounting can
separate the two), scores every candidate with the active expression and
returns the top results.  An empty result list is a valid "no match":
historical gazetteers are incomplete by nature.

The same string threshold gates precise and rough candidates.  Ties are
broken by (smaller w_d, smaller t_d, insertion order) so runs are
deterministic.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

from . import geometry as geom
from . import scoring as scoringmod
from . import text as textmod
from .fuzzy_time import FuzzyPeriod, parse_fuzzy_date
from .gazetteer import Candidate, GazetteerRegistry, GeoHistoricalObject
from .geometry import Geometry
from .scoring import MetricVector, ScoringExpression
from .text import NormalizedAddress


class GeocodeError(ValueError):
    pass


@dataclass
class GeocodeQuery:
    raw_address: str
    period: FuzzyPeriod | None = None
    hint_geometry: Geometry | None = None
    scale_range: tuple[float, float] | None = None
    max_results: int = 1
    max_string_distance: float = 0.3
    allow_rough_fallback: bool = True
    pooled_ranking: bool = False
    scoring: ScoringExpression | None = None
    _normalized: NormalizedAddress | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.max_results < 1:
            raise GeocodeError(f"max_results must be >= 1, got {self.max_results}")
        if not 0.0 <= self.max_string_distance <= 1.0:
            raise GeocodeError(
                f"max_string_distance must be in [0, 1], got {self.max_string_distance}"
            )
        if self.scale_range is not None and self.scale_range[0] > self.scale_range[1]:
            raise GeocodeError(f"invalid scale range {self.scale_range}")

    def normalized(self, registry: GazetteerRegistry) -> NormalizedAddress:
        if self._normalized is None:
            self._normalized = textmod.normalize(self.raw_address, registry.abbreviations)
        return self._normalized


@dataclass(frozen=True)
class GeocodeResult:
    object: GeoHistoricalObject
    gazetteer: str
    score: float
    metrics: MetricVector
    rank: int
    precision_class: str
    point: tuple[float, float]
    score_error: str | None = None


def _score_candidates(query: GeocodeQuery, candidates: list[Candidate], registry: GazetteerRegistry):
    expression = query.scoring if query.scoring is not None else scoringmod.DEFAULT_EXPRESSION
    scored = []
    for cand in candidates:
        metrics = scoringmod.compute_metrics(
            query,
            cand.object,
            registry,
            w_d=cand.string_distance,
            sqrt_buffered_area=registry.sqrt_buffered_area(cand.object.id),
        )
        try:
            score = expression.evaluate(metrics)
            error = None
        except scoringmod.EvaluationError as e:
            score, error = math.inf, str(e)
        scored.append((score, metrics, cand, error))
    scored.sort(key=lambda item: (item[0], item[1].w_d, item[1].t_d, item[2].object.id))
    return scored


def geocode(query: GeocodeQuery, registry: GazetteerRegistry) -> list[GeocodeResult]:
    """Rank the best-matching objects for one query; may return []."""
    if not query.raw_address or not query.raw_address.strip():
        raise GeocodeError("empty address")
    normalized = query.normalized(registry)
    if not normalized.normalized:
        return []

    if query.pooled_ranking:
        candidates = registry.query_candidates(
            normalized.normalized, query.max_string_distance, "both"
        )
    else:
        candidates = registry.query_candidates(
            normalized.normalized, query.max_string_distance, "precise"
        )
        if not candidates and query.allow_rough_fallback:
            candidates = registry.query_candidates(
                normalized.normalized, query.max_string_distance, "rough"
            )
    if not candidates:
        return []

    scored = _score_candidates(query, candidates, registry)
    results = []
    for rank, (score, metrics, cand, error) in enumerate(scored[: query.max_results], start=1):
        results.append(
            GeocodeResult(
                object=cand.object,
                gazetteer=cand.gazetteer,
                score=score,
                metrics=metrics,
                rank=rank,
                precision_class=cand.scale_class,
                point=geom.representative_point(cand.object.geometry),
                score_error=error,
            )
        )
    return results


# ----------------------------------------------------------------------
# batch

@dataclass(frozen=True)
class BatchRow:
    address: str
    date_text: str | None = None
    passthrough: dict | None = None


@dataclass(frozen=True)
class BatchRowResult:
    row: BatchRow
    results: tuple[GeocodeResult, ...]
    status: str  # matched_precise | matched_rough | unmatched | error: ...


@dataclass(frozen=True)
class BatchReport:
    total: int
    matched_precise: int
    matched_rough: int
    unmatched: int
    errors: int
    wall_seconds: float
    seconds_per_1000: float

    def table_line(self, dataset: str = "batch") -> str:
        """One row in the classic results-table shape:
        dataset | input addresses | response rate (rough) | secs/1000."""
        matched = self.matched_precise + self.matched_rough
        return (
            f"{dataset} | {self.total} | {matched} ({self.matched_rough}) | "
            f"{self.seconds_per_1000:.0f}"
        )


def batch_geocode(
    rows,
    registry: GazetteerRegistry,
    defaults: GeocodeQuery | None = None,
) -> tuple[list[BatchRowResult], BatchReport]:
    """Geocode each row with shared defaults; per-row errors never abort."""
    rows = list(rows)
    template = defaults if defaults is not None else GeocodeQuery(raw_address="-")
    out: list[BatchRowResult] = []
    counts = {"matched_precise": 0, "matched_rough": 0, "unmatched": 0, "errors": 0}
    started = time.perf_counter()
    for row in rows:
        try:
            period = template.period
            if row.date_text:
                period = parse_fuzzy_date(row.date_text)
            query = replace(template, raw_address=row.address, period=period, _normalized=None)
            results = geocode(query, registry)
        except (GeocodeError, ValueError) as e:
            out.append(BatchRowResult(row, (), f"error: {e}"))
            counts["errors"] += 1
            continue
        if not results:
            status = "unmatched"
            counts["unmatched"] += 1
        elif results[0].precision_class == "precise":
            status = "matched_precise"
            counts["matched_precise"] += 1
        else:
            status = "matched_rough"
            counts["matched_rough"] += 1
        out.append(BatchRowResult(row, tuple(results), status))
    wall = time.perf_counter() - started
    report = BatchReport(
        total=len(rows),
        matched_precise=counts["matched_precise"],
        matched_rough=counts["matched_rough"],
        unmatched=counts["unmatched"],
        errors=counts["errors"],
        wall_seconds=wall,
        seconds_per_1000=(wall / len(rows) * 1000.0) if rows else 0.0,
    )
    return out, report


# ----------------------------------------------------------------------
# evaluation against ground truth

BIN_EDGES = (0.0, 15.0, 55.0, 155.0)
BIN_LABELS = ("0 - 15", "15 - 55", "55 - 155", "155 +")


@dataclass(frozen=True)
class EvaluationBin:
    label: str
    count: int
    share: float
    mean_w_d: float
    mean_t_d: float


@dataclass(frozen=True)
class EvaluationReport:
    bins: tuple[EvaluationBin, ...]
    total: int

    def table(self) -> str:
        lines = ["dist. (m) | % | avg(sem) | avg(tempo) | count"]
        for b in self.bins:
            lines.append(
                f"{b.label} | {b.share * 100:.0f}% | {b.mean_w_d:.3f} | {b.mean_t_d:.1f} | {b.count}"
            )
        return "\n".join(lines)


def evaluate_against_ground_truth(results, truth) -> EvaluationReport:
    """Histogram of planar errors between geocoded points and ground truth.

    ``results``: iterable of (row_id, GeocodeResult); ``truth``: iterable of
    (row_id, (x, y)).  Lists must align by row id.
    """
    results = list(results)
    truth = list(truth)
    if [r[0] for r in results] != [t[0] for t in truth]:
        raise GeocodeError("results and truth row ids are misaligned")
    bins = [[] for _ in BIN_EDGES]
    for (_, result), (_, (tx, ty)) in zip(results, truth):
        px, py = result.point
        err = math.hypot(px - tx, py - ty)
        idx = 0
        for i, edge in enumerate(BIN_EDGES):
            if err >= edge:
                idx = i
        bins[idx].append(result)
    total = len(results)
    out = []
    for label, members in zip(BIN_LABELS, bins):
        n = len(members)
        out.append(
            EvaluationBin(
                label=label,
                count=n,
                share=(n / total) if total else 0.0,
                mean_w_d=(sum(r.metrics.w_d for r in members) / n) if n else 0.0,
                mean_t_d=(sum(r.metrics.t_d for r in members) / n) if n else 0.0,
            )
        )
    return EvaluationReport(tuple(out), total)

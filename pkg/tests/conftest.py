"""Shared test fixtures and the independent brute-force oracles.

The oracles deliberately avoid the production index/pipeline code paths:
candidate scans walk every object with the plain text-module distance, the
numeric temporal oracle integrates membership curves on a grid, and the
boundary sampler estimates polygon gaps from point pairs.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from histogeocode import geometry as geom
from histogeocode import scoring as scoringmod
from histogeocode import text as textmod
from histogeocode.fuzzy_time import FuzzyPeriod, membership
from histogeocode.gazetteer import (
    GazetteerRegistry,
    GeoHistoricalObject,
    HistoricalSource,
    NumericalOriginProcess,
)
from histogeocode.fuzzy_time import parse_fuzzy_date

# ----------------------------------------------------------------------
# synthetic data

STREET_KINDS = ["rue", "boulevard", "avenue", "place", "impasse", "quai", "passage"]
STREET_NAMES = [
    "du temple", "de la paix", "de la vannerie", "de la tannerie", "saint martin",
    "des archives", "de rivoli", "du faubourg saint antoine", "de vaugirard",
    "montmartre", "de la roquette", "saint denis", "des rosiers", "du bac",
    "de charonne", "lepic", "mouffetard", "de turenne", "de sevres", "oberkampf",
]


def synth_address(rng: np.random.Generator, with_number: bool = True) -> str:
    kind = STREET_KINDS[rng.integers(len(STREET_KINDS))]
    name = STREET_NAMES[rng.integers(len(STREET_NAMES))]
    if with_number:
        return f"{int(rng.integers(1, 120))} {kind} {name}"
    return f"{kind} {name}"


def random_period(rng: np.random.Generator) -> FuzzyPeriod:
    a = float(rng.uniform(1700, 2000))
    ramps = rng.uniform(0, 12, size=3)
    b = a + float(ramps[0])
    c = b + float(ramps[1])
    d = c + float(ramps[2])
    return FuzzyPeriod(a, b, c, d)


def build_registry(
    rng: np.random.Generator,
    n_precise: int,
    n_rough: int = 0,
    crs_id: str = geom.DEFAULT_CRS,
) -> GazetteerRegistry:
    registry = GazetteerRegistry(crs_id)
    sid = registry.register_source(
        HistoricalSource("test atlas", parse_fuzzy_date("1827-1836"), 5.0)
    )
    pid = registry.register_process(NumericalOriginProcess("manual digitization", 5.0))
    if n_precise:
        registry.create_gazetteer("numbers", "precise")
        registry.insert_objects("numbers", synth_objects(rng, n_precise, sid, pid, crs_id))
    if n_rough:
        registry.create_gazetteer("streets", "rough")
        registry.insert_objects(
            "streets", synth_objects(rng, n_rough, sid, pid, crs_id, with_number=False)
        )
    return registry


def synth_objects(rng, n, source_ref, process_ref, crs_id=geom.DEFAULT_CRS, with_number=True):
    objects = []
    for _ in range(n):
        raw = synth_address(rng, with_number)
        objects.append(
            GeoHistoricalObject(
                historical_name=raw,
                normalized_name=textmod.normalize(raw).normalized,
                source_ref=source_ref,
                process_ref=process_ref,
                geometry=geom.point(
                    float(rng.uniform(0, 5000)), float(rng.uniform(0, 5000)), crs_id
                ),
                period=random_period(rng) if rng.random() < 0.7 else None,
                accuracy=float(rng.uniform(2, 30)) if rng.random() < 0.5 else None,
            )
        )
    return objects


# ----------------------------------------------------------------------
# independent oracles

def oracle_trigrams(s: str) -> set[str]:
    """Naive re-statement of the padded word trigram rule."""
    grams = set()
    word = ""
    for ch in s.lower() + "\x00":
        if ch.isalnum() and ch.isascii():
            word += ch
        else:
            if word:
                padded = f"  {word} "
                grams.update(padded[i : i + 3] for i in range(len(padded) - 2))
            word = ""
    return grams


def oracle_string_distance(s1: str, s2: str) -> float:
    t1, t2 = oracle_trigrams(s1), oracle_trigrams(s2)
    if not t1 and not t2:
        return 0.0
    if not t1 or not t2:
        return 1.0
    return 1.0 - len(t1 & t2) / len(t1 | t2)


def oracle_area(p: FuzzyPeriod, step: float = 1e-3) -> float:
    if p.d == p.a:
        return 0.0
    ts = np.arange(p.a, p.d + step, step)
    ys = np.array([membership(p, float(t)) for t in ts])
    return float(np.trapezoid(ys, ts))


def _membership_grid(p: FuzzyPeriod, ts: np.ndarray) -> np.ndarray:
    ys = np.zeros_like(ts)
    inside = (ts >= p.a) & (ts <= p.d)
    plateau = (ts >= p.b) & (ts <= p.c)
    ys[plateau] = 1.0
    if p.b > p.a:
        ramp = inside & (ts < p.b)
        ys[ramp] = (ts[ramp] - p.a) / (p.b - p.a)
    if p.d > p.c:
        ramp = inside & (ts > p.c)
        ys[ramp] = (p.d - ts[ramp]) / (p.d - p.c)
    return ys


def oracle_intersection_area(p1: FuzzyPeriod, p2: FuzzyPeriod, step: float = 1e-3) -> float:
    lo, hi = max(p1.a, p2.a), min(p1.d, p2.d)
    if hi <= lo:
        return 0.0
    ts = np.arange(lo, hi + step, step)
    return float(np.trapezoid(np.minimum(_membership_grid(p1, ts), _membership_grid(p2, ts)), ts))


def _boundary_samples(p: FuzzyPeriod, per_edge: int = 25) -> np.ndarray:
    ring = [(p.a, 0.0), (p.b, 1.0), (p.c, 1.0), (p.d, 0.0), (p.a, 0.0)]
    pts = []
    for (x0, y0), (x1, y1) in zip(ring, ring[1:]):
        for t in np.linspace(0.0, 1.0, per_edge):
            pts.append((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
    return np.array(pts)


def oracle_gap(p1: FuzzyPeriod, p2: FuzzyPeriod) -> float:
    if max(p1.a, p2.a) <= min(p1.d, p2.d):
        return 0.0
    a = _boundary_samples(p1)
    b = _boundary_samples(p2)
    diff = a[:, None, :] - b[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).min())


def oracle_temporal_distance(q: FuzzyPeriod, c: FuzzyPeriod) -> float:
    return oracle_gap(q, c) + oracle_area(q) - oracle_intersection_area(q, c)


def brute_force_geocode(query, registry: GazetteerRegistry):
    """Scan-everything reference for the full pipeline: same contract as
    geocoder.geocode but no index, no caches."""
    normalized = textmod.normalize(query.raw_address, registry.abbreviations)
    if not normalized.normalized:
        return []

    def scan(scale_class):
        found = []
        for i in range(registry.object_count()):
            obj = registry.object(i)
            if obj.scale_class != scale_class:
                continue
            w = textmod.string_distance(normalized.normalized, obj.normalized_name)
            if w <= query.max_string_distance:
                found.append((obj, w))
        return found

    if query.pooled_ranking:
        candidates = [(o, w, o.scale_class) for o, w in scan("precise") + scan("rough")]
    else:
        candidates = [(o, w, "precise") for o, w in scan("precise")]
        if not candidates and query.allow_rough_fallback:
            candidates = [(o, w, "rough") for o, w in scan("rough")]
    expression = query.scoring if query.scoring is not None else scoringmod.DEFAULT_EXPRESSION
    scored = []
    for obj, w, cls in candidates:
        metrics = scoringmod.compute_metrics(query, obj, registry, w_d=w)
        try:
            score = expression.evaluate(metrics)
            err = None
        except scoringmod.EvaluationError as e:
            score, err = math.inf, str(e)
        scored.append((score, metrics, obj, cls, err))
    scored.sort(key=lambda t: (t[0], t[1].w_d, t[1].t_d, t[2].id))
    return scored[: query.max_results]


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)

"""histogeocode: historical geocoding over coexisting fuzzy-dated gazetteers.

Match free-form address queries (optionally carrying a fuzzy date) against
any number of gazetteers of geohistorical objects, rank candidates with a
customizable multi-metric scoring expression, and fold user corrections
back in as new gazetteer entries — source data is never mutated.
"""

from .fuzzy_time import FuzzyPeriod, parse_fuzzy_date, temporal_distance
from .gazetteer import (
    GazetteerRegistry,
    GeoHistoricalObject,
    HistoricalSource,
    NumericalOriginProcess,
)
from .geocoder import GeocodeQuery, GeocodeResult, batch_geocode, geocode
from .scoring import DEFAULT_SCORING, MetricVector, ScoringExpression, parse_expression
from .text import normalize, string_distance

__version__ = "0.1.0"

__all__ = [
    "FuzzyPeriod",
    "GazetteerRegistry",
    "GeoHistoricalObject",
    "GeocodeQuery",
    "GeocodeResult",
    "HistoricalSource",
    "MetricVector",
    "NumericalOriginProcess",
    "ScoringExpression",
    "DEFAULT_SCORING",
    "batch_geocode",
    "geocode",
    "normalize",
    "parse_expression",
    "parse_fuzzy_date",
    "string_distance",
    "temporal_distance",
    "__version__",
]

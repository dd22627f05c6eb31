"""Service configuration: key=value file with environment overrides.

Recognized keys (env override HISTOGEOCODE_<KEY_UPPERCASED>):

    host, port, data_dir, ui_dir, scoring, maxdist, crs_id, abbreviations
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .. import scoring as scoringmod
from ..scoring import ScoringExpression

_KEYS = ("host", "port", "data_dir", "ui_dir", "scoring", "maxdist", "crs_id", "abbreviations")


class ConfigError(ValueError):
    pass


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    data_dir: str | None = None
    ui_dir: str | None = None
    scoring: str = scoringmod.DEFAULT_SCORING
    default_max_distance: float = 0.3
    crs_id: str = "local-meters"
    abbreviations_path: str | None = None
    _expression: ScoringExpression | None = field(default=None, repr=False)

    def scoring_expression(self) -> ScoringExpression:
        if self._expression is None or self._expression.source != self.scoring:
            self._expression = scoringmod.parse_expression(self.scoring)
        return self._expression


def load_config(path=None) -> ServiceConfig:
    values: dict[str, str] = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _KEYS:
                    raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
                values[key] = value.strip()
    for key in _KEYS:
        env = os.environ.get(f"HISTOGEOCODE_{key.upper()}")
        if env is not None:
            values[key] = env
    config = ServiceConfig()
    if "host" in values:
        config.host = values["host"]
    if "port" in values:
        config.port = int(values["port"])
    if "data_dir" in values:
        config.data_dir = values["data_dir"]
    if "ui_dir" in values:
        config.ui_dir = values["ui_dir"]
    if "scoring" in values:
        config.scoring = values["scoring"]
    if "maxdist" in values:
        config.default_max_distance = float(values["maxdist"])
    if "crs_id" in values:
        config.crs_id = values["crs_id"]
    if "abbreviations" in values:
        config.abbreviations_path = values["abbreviations"]
    return config

"""Pipeline configuration read from an INI file.

All keys are optional; omitted keys keep the defaults shown here::

    [ranking]
    damping = 0.15
    decay = 2.5
    iterations = 30
    # epsilon = 1e-12          (early stop on max score change; off by default)

    [ensembles]
    alpha = 1.2
    beta = 0.3
    gamma = 0.3
    target_mean = 1.0

    [linking]
    lambda = 0.95
    theta = 0.5
    phi = 0.7
    stop_words = on, the, of, in, for, and, a, an, to, at
    common_words = conference, international, proceedings, workshop, annual, symposium

    [evaluation]
    tie_policy = half

    [ingest]
    min_year = 1800
    # max_year defaults to the current year
    strict = false

    [pipeline]
    method = ewpr
    enable_affiliation_ensemble = false
    enable_enrichment = false
    # external = path/to/external.tsv   (used by `rank` when enrichment is enabled)
    emit_ensembles = false
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .ensembles import METHODS, EnsembleWeights
from .errors import ConfigError
from .evaluation import TIE_CREDIT
from .graph import IngestOptions
from .linking import DEFAULT_COMMON_WORDS, DEFAULT_STOP_WORDS, LinkingThresholds
from .ranking import RankingParams


@dataclass
class PipelineConfig:
    ranking: RankingParams = field(default_factory=RankingParams)
    weights: EnsembleWeights = field(default_factory=EnsembleWeights)
    thresholds: LinkingThresholds = field(default_factory=LinkingThresholds)
    ingest: IngestOptions = field(default_factory=IngestOptions)
    stop_words: frozenset[str] = DEFAULT_STOP_WORDS
    common_words: frozenset[str] = DEFAULT_COMMON_WORDS
    tie_policy: str = "half"
    target_mean: float = 1.0
    method: str = "ewpr"
    enable_affiliation_ensemble: bool = False
    enable_enrichment: bool = False
    external: Path | None = None
    emit_ensembles: bool = False

    def __post_init__(self) -> None:
        if self.tie_policy not in TIE_CREDIT:
            raise ConfigError(f"unknown tie_policy {self.tie_policy!r}")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        if not self.target_mean > 0:
            raise ConfigError("target_mean must be positive")
        if self.enable_enrichment and self.external is None:
            raise ConfigError("enable_enrichment requires an external file")

    def effective_method(self) -> str:
        if self.enable_affiliation_ensemble and self.method == "ewpr":
            return "ewpr-all"
        return self.method


def _words(value: str) -> frozenset[str]:
    return frozenset(w.strip().lower() for w in value.split(",") if w.strip())


def load_config(path: str | os.PathLike | None = None, **overrides) -> PipelineConfig:
    """Build a config from an optional INI file, then apply non-``None`` overrides.

    Override keys are ``damping``, ``decay``, ``iterations``, ``epsilon``,
    ``alpha``, ``beta``, ``gamma``, ``lam``, ``theta``, ``phi`` and any
    top-level :class:`PipelineConfig` field.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            parser.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    def get(section: str, key: str, kind=float, default=None):
        if not parser.has_option(section, key):
            return default
        raw = parser.get(section, key).strip()
        if raw == "":
            return default
        try:
            if kind is bool:
                return parser.getboolean(section, key)
            return kind(raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from exc

    base = PipelineConfig.__dataclass_fields__
    pick = {k: v for k, v in overrides.items() if v is not None}

    try:
        ranking = RankingParams(
            damping=pick.pop("damping", get("ranking", "damping", float, 0.15)),
            decay=pick.pop("decay", get("ranking", "decay", float, 2.5)),
            iterations=pick.pop("iterations", get("ranking", "iterations", int, 30)),
            epsilon=pick.pop("epsilon", get("ranking", "epsilon", float, None)),
        )
        weights = EnsembleWeights(
            alpha=pick.pop("alpha", get("ensembles", "alpha", float, 1.2)),
            beta=pick.pop("beta", get("ensembles", "beta", float, 0.3)),
            gamma=pick.pop("gamma", get("ensembles", "gamma", float, 0.3)),
        )
        thresholds = LinkingThresholds(
            lam=pick.pop("lam", get("linking", "lambda", float, 0.95)),
            theta=pick.pop("theta", get("linking", "theta", float, 0.5)),
            phi=pick.pop("phi", get("linking", "phi", float, 0.7)),
        )
        ingest = IngestOptions(min_year=get("ingest", "min_year", int, 1800))
        max_year = get("ingest", "max_year", int, None)
        if max_year is not None:
            ingest = replace(ingest, max_year=max_year)
        ingest.strict = pick.pop("strict", get("ingest", "strict", bool, False))
        stop = get("linking", "stop_words", str, None)
        common = get("linking", "common_words", str, None)
        external = pick.pop("external", get("pipeline", "external", str, None))
        unknown = set(pick) - set(base)
        if unknown:
            raise ConfigError(f"unknown override(s): {', '.join(sorted(unknown))}")
        cfg = PipelineConfig(
            ranking=ranking,
            weights=weights,
            thresholds=thresholds,
            ingest=ingest,
            stop_words=DEFAULT_STOP_WORDS if stop is None else _words(stop),
            common_words=DEFAULT_COMMON_WORDS if common is None else _words(common),
            tie_policy=get("evaluation", "tie_policy", str, "half"),
            target_mean=get("ensembles", "target_mean", float, 1.0),
            method=get("pipeline", "method", str, "ewpr"),
            enable_affiliation_ensemble=get("pipeline", "enable_affiliation_ensemble", bool, False),
            enable_enrichment=get("pipeline", "enable_enrichment", bool, False),
            external=None if external is None else Path(external),
            emit_ensembles=get("pipeline", "emit_ensembles", bool, False),
        )
        return replace(cfg, **pick)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc

"""Dataclass configs for every pipeline stage, with TOML/JSON loading.

A project's live config is persisted inside the project file; config.toml
(or a standalone extract.toml) seeds it at init time and CLI flags override
values for a single invocation.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .prioritize import Dimension, WeightScheme
from .textvec import DEFAULT_STOPWORDS

ROUNDING_RULE = "half-up to 2 decimal places"


def _default_lexicons() -> dict:
    text = resources.files("threadreq.data").joinpath("lexicons.toml").read_text("utf-8")
    return tomllib.loads(text)


_LEX = _default_lexicons()
DEFAULT_MARKERS: tuple[str, ...] = tuple(_LEX["markers"])
DEFAULT_NFR_TERMS: tuple[str, ...] = tuple(_LEX["nfr_terms"])

DEFAULT_DIMENSIONS: tuple[Dimension, ...] = (
    Dimension("Quality", "value", 7),
    Dimension("Effort Required", "value", 8),
    Dimension("User Need", "value", 5),
    Dimension("Technical", "risk", -7),
    Dimension("Business", "risk", -5),
)


@dataclass(frozen=True)
class ExtractConfig:
    markers: tuple[str, ...] = DEFAULT_MARKERS
    nfr_terms: tuple[str, ...] = DEFAULT_NFR_TERMS

    def validate(self) -> "ExtractConfig":
        if not self.markers:
            raise ConfigError("marker lexicon must not be empty")
        if not self.nfr_terms:
            raise ConfigError("nfr term lexicon must not be empty")
        if any(not m.strip() for m in self.markers):
            raise ConfigError("marker lexicon contains a blank entry")
        if any(not t.strip() for t in self.nfr_terms):
            raise ConfigError("nfr term lexicon contains a blank entry")
        return self


@dataclass(frozen=True)
class ClusterConfig:
    theta_link: float = 0.5
    theta_dup: float = 0.9
    stopwords: tuple[str, ...] = DEFAULT_STOPWORDS

    def validate(self) -> "ClusterConfig":
        if not 0.0 <= self.theta_link:
            raise ConfigError("theta_link must be >= 0")
        if self.theta_dup < self.theta_link:
            raise ConfigError("theta_dup must be >= theta_link")
        return self


@dataclass(frozen=True)
class PruneConfig:
    min_score: float = 0.0
    min_relevance: float = 0.0

    def validate(self) -> "PruneConfig":
        if not 0.0 <= self.min_relevance <= 1.0:
            raise ConfigError("min_relevance must be in [0, 1]")
        return self


@dataclass(frozen=True)
class ProjectConfig:
    extract: ExtractConfig = field(default_factory=ExtractConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    prune: PruneConfig = field(default_factory=PruneConfig)
    weights: WeightScheme = field(
        default_factory=lambda: WeightScheme(DEFAULT_DIMENSIONS)
    )
    rounding: str = ROUNDING_RULE

    def validate(self) -> "ProjectConfig":
        self.extract.validate()
        self.cluster.validate()
        self.prune.validate()
        self.weights.validate()
        return self

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "extract": {
                "markers": list(self.extract.markers),
                "nfr_terms": list(self.extract.nfr_terms),
            },
            "cluster": {
                "theta_link": self.cluster.theta_link,
                "theta_dup": self.cluster.theta_dup,
                "stopwords": list(self.cluster.stopwords),
            },
            "prune": {
                "min_score": self.prune.min_score,
                "min_relevance": self.prune.min_relevance,
            },
            "dimensions": [
                {"name": d.name, "kind": d.kind, "weight": d.weight}
                for d in self.weights.dimensions
            ],
            "rounding": self.rounding,
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ProjectConfig":
        cfg = cls()
        ex = doc.get("extract", {})
        cl = doc.get("cluster", {})
        pr = doc.get("prune", {})
        cfg = replace(
            cfg,
            extract=ExtractConfig(
                markers=tuple(ex.get("markers", DEFAULT_MARKERS)),
                nfr_terms=tuple(ex.get("nfr_terms", DEFAULT_NFR_TERMS)),
            ),
            cluster=ClusterConfig(
                theta_link=float(cl.get("theta_link", 0.5)),
                theta_dup=float(cl.get("theta_dup", 0.9)),
                stopwords=tuple(cl.get("stopwords", DEFAULT_STOPWORDS)),
            ),
            prune=PruneConfig(
                min_score=float(pr.get("min_score", 0.0)),
                min_relevance=float(pr.get("min_relevance", 0.0)),
            ),
            rounding=doc.get("rounding", ROUNDING_RULE),
        )
        dims = doc.get("dimensions") or doc.get("dimension")
        if dims:
            cfg = replace(
                cfg,
                weights=WeightScheme(
                    tuple(
                        Dimension(d["name"], d["kind"], d["weight"]) for d in dims
                    )
                ),
            )
        return cfg.validate()

    @classmethod
    def from_toml(cls, path: str | Path) -> "ProjectConfig":
        """Load config.toml; weight dimensions are [[dimension]] entries."""
        try:
            doc = tomllib.loads(Path(path).read_text("utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(doc)


def load_extract_config(path: str | Path) -> ExtractConfig:
    """Load a standalone extract.toml with markers = [...] / nfr_terms = [...]."""
    try:
        doc = tomllib.loads(Path(path).read_text("utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read extract config {path}: {exc}") from exc
    section = doc.get("extract", doc)
    return ExtractConfig(
        markers=tuple(section.get("markers", DEFAULT_MARKERS)),
        nfr_terms=tuple(section.get("nfr_terms", DEFAULT_NFR_TERMS)),
    ).validate()

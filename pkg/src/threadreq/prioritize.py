"""Value/risk prioritization matrix: signed-weight scoring, ranking, pruning.

Each requirement is rated 0-10 against every dimension of a weight scheme.
Value dimensions carry positive weights, risk dimensions negative ones, so a
requirement's score is a single dot product: the sum of its business-value
contributions minus the sum of its anticipated risks.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, MissingRatingError, UndecidedFeasibilityError
from .model import natural_key

RATING_MIN = 0
RATING_MAX = 10


@dataclass(frozen=True)
class Dimension:
    name: str
    kind: str  # "value" | "risk"
    weight: float


@dataclass(frozen=True)
class WeightScheme:
    dimensions: tuple[Dimension, ...]

    def __init__(self, dimensions: Iterable[Dimension]):
        object.__setattr__(self, "dimensions", tuple(dimensions))

    def validate(self) -> "WeightScheme":
        names = [d.name for d in self.dimensions]
        if len(set(names)) != len(names):
            raise ConfigError("dimension names must be unique")
        for d in self.dimensions:
            if d.kind == "value":
                if not d.weight > 0:
                    raise ConfigError(f"value dimension {d.name!r} must have weight > 0")
            elif d.kind == "risk":
                if not d.weight < 0:
                    raise ConfigError(f"risk dimension {d.name!r} must have weight < 0")
            else:
                raise ConfigError(f"dimension {d.name!r} has unknown kind {d.kind!r}")
        if not any(d.kind == "value" for d in self.dimensions):
            raise ConfigError("scheme needs at least one value dimension")
        return self

    def names(self) -> list[str]:
        return [d.name for d in self.dimensions]


@dataclass
class RatingSheet:
    """Per-requirement 0-10 ratings, keyed (candidate id, dimension name)."""

    ratings: dict[tuple[str, str], int] = field(default_factory=dict)

    def set(self, candidate_id: str, dimension: str, rating: int) -> None:
        if not isinstance(rating, int) or isinstance(rating, bool):
            raise ConfigError(
                f"rating must be an integer, got {rating!r} for"
                f" ({candidate_id}, {dimension})"
            )
        if not RATING_MIN <= rating <= RATING_MAX:
            raise ConfigError(
                f"rating must be in [{RATING_MIN}, {RATING_MAX}],"
                f" got {rating} for ({candidate_id}, {dimension})"
            )
        self.ratings[(candidate_id, dimension)] = rating

    def get(self, candidate_id: str, dimension: str) -> int | None:
        return self.ratings.get((candidate_id, dimension))

    def candidate_ids(self) -> list[str]:
        return sorted({cid for cid, _ in self.ratings}, key=natural_key)

    def row(self, candidate_id: str) -> dict[str, int]:
        return {
            dim: r for (cid, dim), r in self.ratings.items() if cid == candidate_id
        }

    # -- CSV interface: header candidate_id,<dim1>,<dim2>,... --------------

    @classmethod
    def from_csv(cls, text: str, scheme: WeightScheme) -> "RatingSheet":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("ratings CSV is empty") from None
        if not header or header[0] != "candidate_id":
            raise ConfigError("ratings CSV must start with a candidate_id column")
        unknown = [h for h in header[1:] if h not in scheme.names()]
        if unknown:
            raise ConfigError(f"ratings CSV has unknown dimensions: {unknown}")
        sheet = cls()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ConfigError(f"ratings CSV line {lineno}: wrong column count")
            cid = row[0]
            for dim, cell in zip(header[1:], row[1:]):
                try:
                    value = int(cell)
                except ValueError:
                    raise ConfigError(
                        f"ratings CSV line {lineno}: {cell!r} is not an integer"
                    ) from None
                sheet.set(cid, dim, value)
        return sheet

    def to_csv(self, scheme: WeightScheme) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        names = scheme.names()
        writer.writerow(["candidate_id"] + names)
        for cid in self.candidate_ids():
            row = self.row(cid)
            writer.writerow([cid] + [row.get(d, "") for d in names])
        return out.getvalue()


@dataclass(frozen=True)
class ScoredRequirement:
    candidate_id: str
    score: float
    rank: int = 0  # assigned by rank(); 1 = best


@dataclass(frozen=True)
class DroppedRequirement:
    candidate_id: str
    score: float
    rank: int
    reason: str  # low_priority | infeasible | off_topic


@dataclass(frozen=True)
class PruneResult:
    final: tuple[ScoredRequirement, ...]
    dropped: tuple[DroppedRequirement, ...]


def score(candidate_id: str, sheet: RatingSheet, scheme: WeightScheme) -> float:
    """Dot product of the candidate's ratings with the signed weights."""
    total = 0.0
    for dim in scheme.dimensions:
        rating = sheet.get(candidate_id, dim.name)
        if rating is None:
            raise MissingRatingError(candidate_id, dim.name)
        total += dim.weight * rating
    return total


def rank(scored: Iterable[ScoredRequirement]) -> list[ScoredRequirement]:
    """Sort by score descending, ties by candidate id ascending (natural key),
    and assign ranks 1..n."""
    items = list(scored)
    seen: set[str] = set()
    for item in items:
        if item.candidate_id in seen:
            raise ConfigError(f"candidate {item.candidate_id!r} scored more than once")
        seen.add(item.candidate_id)
    items.sort(key=lambda s: (-s.score, natural_key(s.candidate_id)))
    return [replace(item, rank=i) for i, item in enumerate(items, start=1)]


def prune(
    ranked: Sequence[ScoredRequirement],
    min_score: float,
    min_relevance: float,
    feasibility: Mapping[str, str],
    relevance: Mapping[str, float],
) -> PruneResult:
    """Reduce the ranked list to requirements worth keeping.

    A requirement survives when its score clears min_score, the moderator
    marked it feasible, and its topic relevance (1 - topic distance of its
    cluster) clears min_relevance. Everything else is dropped with a reason:
    low_priority, infeasible, or off_topic, checked in that order.
    Feasibility still undecided above the score cut is an error; the call
    refuses to guess a decision that belongs to the moderator.
    """
    undecided = [
        item.candidate_id
        for item in ranked
        if item.score >= min_score
        and feasibility.get(item.candidate_id, "undecided") == "undecided"
    ]
    if undecided:
        raise UndecidedFeasibilityError(sorted(undecided, key=natural_key))

    final: list[ScoredRequirement] = []
    dropped: list[DroppedRequirement] = []
    for item in ranked:
        if item.score < min_score:
            reason = "low_priority"
        elif feasibility.get(item.candidate_id) == "no":
            reason = "infeasible"
        elif relevance.get(item.candidate_id, 1.0) < min_relevance:
            reason = "off_topic"
        else:
            final.append(item)
            continue
        dropped.append(
            DroppedRequirement(item.candidate_id, item.score, item.rank, reason)
        )
    return PruneResult(final=tuple(final), dropped=tuple(dropped))

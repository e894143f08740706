"""Turn discussion content into candidate requirements.

A post or comment becomes a candidate when the moderator says so (annotation
override) or, absent an override, when its text carries a marker phrase such
as "should" or "needs to". The moderator keeps final authority: overrides can
force, suppress, rewrite, reclassify, or re-score any item, and can split one
post into several candidates through synthetic sub-ids ("p12#1", "p12#2").
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable

from .config import ExtractConfig
from .errors import SchemaError, UnknownIdError
from .model import Comment, DiscussionExport, Post, natural_key

FEASIBLE_STATES = ("yes", "no", "undecided")
REQ_TYPES = ("functional", "nonfunctional", "unknown")
STATUSES = ("candidate", "final", "dropped")


@dataclass
class CandidateRequirement:
    id: str
    source_refs: tuple[str, ...]
    statement: str
    author_category: str  # expert | ordinary
    req_type: str = "unknown"
    consensus: int = 0
    duplicate_count: int = 0
    feasible: str = "undecided"
    status: str = "candidate"
    marker_fired: bool = False  # heuristic matched the source text

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source_refs": list(self.source_refs),
            "statement": self.statement,
            "author_category": self.author_category,
            "req_type": self.req_type,
            "consensus": self.consensus,
            "duplicate_count": self.duplicate_count,
            "feasible": self.feasible,
            "status": self.status,
            "marker_fired": self.marker_fired,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CandidateRequirement":
        return cls(
            id=doc["id"],
            source_refs=tuple(doc["source_refs"]),
            statement=doc["statement"],
            author_category=doc["author_category"],
            req_type=doc.get("req_type", "unknown"),
            consensus=int(doc.get("consensus", 0)),
            duplicate_count=int(doc.get("duplicate_count", 0)),
            feasible=doc.get("feasible", "undecided"),
            status=doc.get("status", "candidate"),
            marker_fired=bool(doc.get("marker_fired", False)),
        )


@dataclass(frozen=True)
class Annotation:
    is_requirement: bool | None = None
    statement_rewrite: str | None = None
    req_type: str | None = None
    consensus_override: int | None = None
    feasible: str | None = None  # batch-mode moderator feasibility call


@dataclass
class AnnotationSet:
    """Moderator overrides keyed by source id (or source id + '#' sub-id)."""

    overrides: dict[str, Annotation] = field(default_factory=dict)

    def base_ids(self) -> set[str]:
        return {key.split("#", 1)[0] for key in self.overrides}

    def for_source(self, source_id: str) -> tuple[Annotation | None, list[tuple[str, Annotation]]]:
        """The exact-key annotation plus any '#' split annotations, id order."""
        exact = self.overrides.get(source_id)
        subs = sorted(
            (
                (key, ann)
                for key, ann in self.overrides.items()
                if key.startswith(source_id + "#")
            ),
            key=lambda kv: natural_key(kv[0]),
        )
        return exact, subs

    def validate_against(self, export: DiscussionExport) -> None:
        known = {p.id for p in export.posts}
        for p in export.posts:
            known.update(c.id for c in p.comments)
        for base in sorted(self.base_ids()):
            if base not in known:
                raise UnknownIdError("annotation source", base)

    # -- annotations.json -------------------------------------------------

    @classmethod
    def from_json(cls, text: str) -> "AnnotationSet":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}", path="$") from exc
        if not isinstance(doc, dict):
            raise SchemaError("annotations must be an object keyed by source id", path="$")
        overrides = {}
        for key, raw in doc.items():
            if not isinstance(raw, dict):
                raise SchemaError("override must be an object", path=f"$.{key}")
            req_type = raw.get("req_type")
            if req_type is not None and req_type not in REQ_TYPES:
                raise SchemaError(f"bad req_type {req_type!r}", path=f"$.{key}.req_type")
            feasible = raw.get("feasible")
            if feasible is not None and feasible not in FEASIBLE_STATES:
                raise SchemaError(f"bad feasible {feasible!r}", path=f"$.{key}.feasible")
            overrides[key] = Annotation(
                is_requirement=raw.get("is_requirement"),
                statement_rewrite=raw.get("statement_rewrite"),
                req_type=req_type,
                consensus_override=raw.get("consensus_override"),
                feasible=feasible,
            )
        return cls(overrides)

    @classmethod
    def load(cls, path: str | Path) -> "AnnotationSet":
        return cls.from_json(Path(path).read_text("utf-8"))

    def to_dict(self) -> dict:
        out: dict[str, dict] = {}
        for key, ann in self.overrides.items():
            entry = {
                "is_requirement": ann.is_requirement,
                "statement_rewrite": ann.statement_rewrite,
                "req_type": ann.req_type,
                "consensus_override": ann.consensus_override,
                "feasible": ann.feasible,
            }
            out[key] = {k: v for k, v in entry.items() if v is not None}
        return out


# -- marker heuristic -------------------------------------------------------

@lru_cache(maxsize=512)
def _phrase_re(phrase: str) -> re.Pattern:
    return re.compile(r"(?<!\w)" + re.escape(phrase.lower()) + r"(?!\w)")


def markers_fire(text: str, markers: Iterable[str]) -> bool:
    low = text.lower()
    return any(_phrase_re(m).search(low) for m in markers)


def normalize_statement(text: str) -> str:
    return " ".join(text.split())


def consensus(source: Post | Comment) -> int:
    """Like-derived approval: a post adds up its own likes plus the likes on
    every comment under it; a comment counts only its own likes."""
    if isinstance(source, Post):
        return len(source.likes) + sum(len(c.likes) for c in source.comments)
    return len(source.likes)


def classify_req_type(
    candidate: CandidateRequirement,
    nfr_terms: Iterable[str],
    override: str | None = None,
) -> str:
    """Non-functional iff the statement matches a lexicon term (word-boundary,
    case-insensitive); else functional when the marker heuristic fired; else
    unknown. A moderator override wins outright."""
    if override is not None:
        return override
    low = candidate.statement.lower()
    if any(_phrase_re(term).search(low) for term in nfr_terms):
        return "nonfunctional"
    if candidate.marker_fired:
        return "functional"
    return "unknown"


def extract_candidates(
    export: DiscussionExport,
    annotations: AnnotationSet,
    config: ExtractConfig,
) -> list[CandidateRequirement]:
    """One candidate per requirement-bearing post/comment, in thread order.

    Moderator-authored items are never candidates, overrides or not.
    """
    config.validate()
    annotations.validate_against(export)
    moderators = export.moderator_ids

    out: list[CandidateRequirement] = []
    for post in export.posts:
        out.extend(_candidates_for(post, export, annotations, config, moderators))
        for comment in post.comments:
            out.extend(
                _candidates_for(comment, export, annotations, config, moderators)
            )
    return out


def _candidates_for(
    source: Post | Comment,
    export: DiscussionExport,
    annotations: AnnotationSet,
    config: ExtractConfig,
    moderators: frozenset[str],
) -> list[CandidateRequirement]:
    if source.author_id in moderators:
        return []
    exact, subs = annotations.for_source(source.id)

    fired = markers_fire(source.text, config.markers)
    if exact is not None and exact.is_requirement is not None:
        bearing = exact.is_requirement
    else:
        bearing = fired

    author_category = export.participants_by_id[source.author_id].category
    made: list[CandidateRequirement] = []
    if bearing:
        made.append(
            _build(source, source.id, exact, fired, author_category, config)
        )
    for key, ann in subs:
        if ann.is_requirement is False:
            continue
        made.append(_build(source, key, ann, fired, author_category, config))
    return made


def _build(
    source: Post | Comment,
    candidate_id: str,
    ann: Annotation | None,
    fired: bool,
    author_category: str,
    config: ExtractConfig,
) -> CandidateRequirement:
    if ann is not None and ann.statement_rewrite is not None:
        statement = normalize_statement(ann.statement_rewrite)
    else:
        statement = normalize_statement(source.text)
    cand = CandidateRequirement(
        id=candidate_id,
        source_refs=(source.id,),
        statement=statement,
        author_category=author_category,
        marker_fired=fired,
    )
    cand.req_type = classify_req_type(
        cand, config.nfr_terms, override=ann.req_type if ann else None
    )
    base = consensus(source)
    if ann is not None and ann.consensus_override is not None:
        cand.consensus = int(ann.consensus_override)
    else:
        cand.consensus = base
    if ann is not None and ann.feasible is not None:
        cand.feasible = ann.feasible
    return cand

"""Persistent pipeline state: one project file, one writer, a full audit trail.

The project file is the moderator's working document. Every mutation appends
an audit entry, bumps the revision counter, marks downstream artifacts stale,
and is persisted by write-temp-then-rename so a crash at any point leaves
either the old or the new file on disk, never a torn one. Replaying the audit
log against the initial state reproduces the current state exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

from . import pipeline
from .analytics import ElicitationStats
from .cluster import Cluster, duplicate_counts, distance_to, make_cluster, base_priority
from .config import ProjectConfig
from .errors import (
    ConfigError,
    MissingRatingError,
    ProjectError,
    RevisionConflictError,
    UndecidedFeasibilityError,
    UnknownIdError,
)
from .extract import Annotation, AnnotationSet, CandidateRequirement, FEASIBLE_STATES
from .ingest import DiscussionExport, parse_export
from .model import BucketActivity, natural_key
from .prioritize import (
    Dimension,
    DroppedRequirement,
    PruneResult,
    RatingSheet,
    ScoredRequirement,
    WeightScheme,
)
from .textvec import TermVector

FILE_VERSION = 1
PROJECT_FILENAME = "project.json"

MUTATION_ACTIONS = (
    "set_rating",
    "set_weights",
    "set_feasibility",
    "merge_clusters",
    "split_cluster",
    "set_annotation",
    "set_thresholds",
    "import_ratings",
    "import_annotations",
    "recompute",
)

ARTIFACTS = ("candidates", "clusters", "ranking", "stats")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def payload_hash(payload: dict) -> str:
    return sha256_hex(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    )


@dataclass(frozen=True)
class AuditEntry:
    seq: int
    timestamp: str
    actor: str
    action: str
    payload: dict
    payload_sha256: str

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "action": self.action,
            "payload": self.payload,
            "payload_sha256": self.payload_sha256,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AuditEntry":
        return cls(
            seq=doc["seq"],
            timestamp=doc["timestamp"],
            actor=doc["actor"],
            action=doc["action"],
            payload=doc["payload"],
            payload_sha256=doc["payload_sha256"],
        )


@dataclass
class ProjectState:
    config: ProjectConfig
    export_path: str
    export_sha256: str
    annotations: AnnotationSet = field(default_factory=AnnotationSet)
    ratings: RatingSheet = field(default_factory=RatingSheet)
    candidates: list[CandidateRequirement] = field(default_factory=list)
    clusters: list[Cluster] = field(default_factory=list)
    vectors: dict[str, TermVector] = field(default_factory=dict)
    topic_vector: TermVector = field(default_factory=dict)
    base_priorities: dict[str, float] = field(default_factory=dict)
    ranking: list[ScoredRequirement] = field(default_factory=list)
    dropped: list[DroppedRequirement] = field(default_factory=list)
    stats: ElicitationStats | None = None
    stale: dict[str, bool] = field(
        default_factory=lambda: {a: True for a in ARTIFACTS}
    )
    artifact_hashes: dict[str, str] = field(default_factory=dict)
    audit: list[AuditEntry] = field(default_factory=list)
    revision: int = 0
    version: int = FILE_VERSION
    export: DiscussionExport | None = None  # runtime only, never serialized

    # -- staleness ---------------------------------------------------------

    def mark_stale(self, *artifacts: str) -> None:
        for a in artifacts:
            self.stale[a] = True

    def ranking_is_stale(self) -> bool:
        # a ranking derived from stale upstream artifacts is itself stale
        return self.stale["ranking"] or self.stale["clusters"] or self.stale["candidates"]

    def stats_are_stale(self) -> bool:
        return self.stale["stats"] or self.ranking_is_stale()

    def pruned(self) -> PruneResult:
        dropped_ids = {d.candidate_id for d in self.dropped}
        return PruneResult(
            final=tuple(r for r in self.ranking if r.candidate_id not in dropped_ids),
            dropped=tuple(self.dropped),
        )

    def candidate(self, candidate_id: str) -> CandidateRequirement:
        for cand in self.candidates:
            if cand.id == candidate_id:
                return cand
        raise UnknownIdError("candidate", candidate_id)

    def cluster(self, cluster_id: str) -> Cluster:
        for cl in self.clusters:
            if cl.id == cluster_id:
                return cl
        raise UnknownIdError("cluster", cluster_id)

    def refresh_artifact_hashes(self) -> None:
        def h(obj: Any) -> str:
            return payload_hash({"v": obj})

        self.artifact_hashes = {
            "candidates": h([c.to_dict() for c in self.candidates]),
            "clusters": h([c.to_dict() for c in self.clusters]),
            "ranking": h(
                [
                    {"id": r.candidate_id, "score": r.score, "rank": r.rank}
                    for r in self.ranking
                ]
                + [
                    {"id": d.candidate_id, "reason": d.reason}
                    for d in self.dropped
                ]
            ),
            "stats": h(self.stats.to_dict() if self.stats else None),
        }

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "revision": self.revision,
            "config": self.config.to_dict(),
            "export": {"path": self.export_path, "sha256": self.export_sha256},
            "annotations": self.annotations.to_dict(),
            "ratings": [
                {"candidate_id": cid, "dimension": dim, "rating": r}
                for (cid, dim), r in sorted(self.ratings.ratings.items())
            ],
            "candidates": [c.to_dict() for c in self.candidates],
            "clusters": [
                {**c.to_dict(), "centroid": c.centroid} for c in self.clusters
            ],
            "vectors": self.vectors,
            "topic_vector": self.topic_vector,
            "base_priorities": self.base_priorities,
            "ranking": [
                {"candidate_id": r.candidate_id, "score": r.score, "rank": r.rank}
                for r in self.ranking
            ],
            "dropped": [
                {
                    "candidate_id": d.candidate_id,
                    "score": d.score,
                    "rank": d.rank,
                    "reason": d.reason,
                }
                for d in self.dropped
            ],
            "stats": self.stats.to_dict() if self.stats else None,
            "stale": dict(self.stale),
            "artifact_hashes": dict(self.artifact_hashes),
            "audit": [entry.to_dict() for entry in self.audit],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ProjectState":
        if doc.get("version") != FILE_VERSION:
            raise ProjectError(
                f"project file version {doc.get('version')!r} unsupported"
                f" (expected {FILE_VERSION})"
            )
        annotations = AnnotationSet(
            {
                key: Annotation(
                    is_requirement=raw.get("is_requirement"),
                    statement_rewrite=raw.get("statement_rewrite"),
                    req_type=raw.get("req_type"),
                    consensus_override=raw.get("consensus_override"),
                    feasible=raw.get("feasible"),
                )
                for key, raw in doc.get("annotations", {}).items()
            }
        )
        ratings = RatingSheet()
        for row in doc.get("ratings", []):
            ratings.set(row["candidate_id"], row["dimension"], row["rating"])
        stats_doc = doc.get("stats")
        return cls(
            config=ProjectConfig.from_dict(doc["config"]),
            export_path=doc["export"]["path"],
            export_sha256=doc["export"]["sha256"],
            annotations=annotations,
            ratings=ratings,
            candidates=[
                CandidateRequirement.from_dict(c) for c in doc.get("candidates", [])
            ],
            clusters=[
                Cluster(
                    id=c["id"],
                    member_ids=tuple(c["member_ids"]),
                    centroid=c.get("centroid", {}),
                    topic_distance=c["topic_distance"],
                    label=c.get("label", ""),
                )
                for c in doc.get("clusters", [])
            ],
            vectors=doc.get("vectors", {}),
            topic_vector=doc.get("topic_vector", {}),
            base_priorities=doc.get("base_priorities", {}),
            ranking=[
                ScoredRequirement(r["candidate_id"], r["score"], r["rank"])
                for r in doc.get("ranking", [])
            ],
            dropped=[
                DroppedRequirement(
                    d["candidate_id"], d["score"], d["rank"], d["reason"]
                )
                for d in doc.get("dropped", [])
            ],
            stats=_stats_from_dict(stats_doc) if stats_doc else None,
            stale={a: bool(doc.get("stale", {}).get(a, True)) for a in ARTIFACTS},
            artifact_hashes=doc.get("artifact_hashes", {}),
            audit=[AuditEntry.from_dict(e) for e in doc.get("audit", [])],
            revision=doc.get("revision", 0),
            version=FILE_VERSION,
        )


def _stats_from_dict(doc: dict) -> ElicitationStats:
    timeline = {
        int(b["day"]): BucketActivity(
            posts=b["posts"],
            comments=b["comments"],
            likes=b["likes"],
            active_users=b["active_users"],
        )
        for b in doc.get("timeline", [])
    }
    return ElicitationStats(
        invited=doc["invited"],
        active=doc["active"],
        participation_rate=doc["participation_rate"],
        total_posts=doc["total_posts"],
        posts_per_active_user=doc["posts_per_active_user"],
        candidate_count=doc["candidate_count"],
        nfr_count=doc["nfr_count"],
        nfr_ratio=doc["nfr_ratio"],
        candidates_per_active_user=doc["candidates_per_active_user"],
        final_count=doc["final_count"],
        final_ratio=doc["final_ratio"],
        expert_final=doc["expert_final"],
        ordinary_final=doc["ordinary_final"],
        expert_final_ratio=doc["expert_final_ratio"],
        ordinary_final_ratio=doc["ordinary_final_ratio"],
        timeline=timeline,
    )


# -- disk I/O -----------------------------------------------------------------

def save_project(state: ProjectState, project_dir: str | Path) -> Path:
    """Atomic write: temp file in the same directory, then rename over."""
    project_dir = Path(project_dir)
    project_dir.mkdir(parents=True, exist_ok=True)
    target = project_dir / PROJECT_FILENAME
    data = json.dumps(state.to_dict(), indent=2, sort_keys=True).encode("utf-8")
    fd, tmp_name = tempfile.mkstemp(
        dir=project_dir, prefix=".project-", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
    return target


def load_project(project_dir: str | Path) -> ProjectState:
    """Load project.json, then load and verify the referenced export."""
    project_dir = Path(project_dir)
    target = project_dir / PROJECT_FILENAME
    try:
        doc = json.loads(target.read_text("utf-8"))
    except OSError as exc:
        raise ProjectError(f"cannot read project file {target}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProjectError(f"corrupt project file {target}: {exc}") from exc
    state = ProjectState.from_dict(doc)
    state.export = _load_export(project_dir, state)
    return state


def _load_export(project_dir: Path, state: ProjectState) -> DiscussionExport:
    export_path = Path(state.export_path)
    if not export_path.is_absolute():
        export_path = project_dir / export_path
    try:
        raw = export_path.read_bytes()
    except OSError as exc:
        raise ProjectError(f"cannot read export {export_path}: {exc}") from exc
    digest = sha256_hex(raw)
    if digest != state.export_sha256:
        raise ProjectError(
            f"export {export_path} changed since the project was created"
            f" (hash {digest[:12]} != recorded {state.export_sha256[:12]})"
        )
    return parse_export(raw)


def init_project(
    project_dir: str | Path,
    export_path: str | Path,
    config: ProjectConfig | None = None,
    actor: str = "moderator",
) -> ProjectState:
    """Create a fresh project referencing (not copying) the export file."""
    project_dir = Path(project_dir)
    export_path = Path(export_path)
    raw = export_path.read_bytes()
    export = parse_export(raw)

    try:
        stored_path = str(export_path.resolve().relative_to(project_dir.resolve()))
    except ValueError:
        stored_path = str(export_path.resolve())

    state = ProjectState(
        config=(config or ProjectConfig()).validate(),
        export_path=stored_path,
        export_sha256=sha256_hex(raw),
        export=export,
    )
    _append_audit(state, actor, "init", {"export": stored_path})
    state.revision = 1
    save_project(state, project_dir)
    return state


# -- mutations ----------------------------------------------------------------

def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _append_audit(
    state: ProjectState,
    actor: str,
    action: str,
    payload: dict,
    entry: AuditEntry | None = None,
) -> AuditEntry:
    if entry is None:
        entry = AuditEntry(
            seq=len(state.audit) + 1,
            timestamp=_now(),
            actor=actor,
            action=action,
            payload=payload,
            payload_sha256=payload_hash(payload),
        )
    state.audit.append(entry)
    return entry


def apply_mutation(
    state: ProjectState,
    action: str,
    payload: dict,
    actor: str = "moderator",
    expected_revision: int | None = None,
    project_dir: str | Path | None = None,
    _replayed: AuditEntry | None = None,
) -> dict:
    """Apply one mutation: revision check, dispatch, audit, bump, persist.

    Returns a summary of what changed. Raises RevisionConflictError when the
    client's last-seen revision is behind.
    """
    if action not in MUTATION_ACTIONS:
        raise ConfigError(f"unknown mutation action {action!r}")
    if expected_revision is not None and expected_revision != state.revision:
        raise RevisionConflictError(expected_revision, state.revision)

    summary = _MUTATIONS[action](state, payload)
    _append_audit(state, actor, action, payload, entry=_replayed)
    state.revision += 1
    if project_dir is not None:
        save_project(state, project_dir)
    return {"revision": state.revision, "action": action, **summary}


def replay_audit(
    initial: ProjectState, entries: list[AuditEntry]
) -> ProjectState:
    """Re-apply an audit log against a copy of the initial state."""
    state = ProjectState.from_dict(initial.to_dict())
    state.export = initial.export
    for entry in entries:
        if entry.action == "init":
            continue
        apply_mutation(
            state,
            entry.action,
            entry.payload,
            actor=entry.actor,
            _replayed=entry,
        )
    return state


def _mut_set_rating(state: ProjectState, payload: dict) -> dict:
    cand = state.candidate(payload["candidate_id"])
    names = state.config.weights.names()
    ratings = payload["ratings"]
    # validate everything before touching the sheet
    scratch = RatingSheet()
    for dim, value in ratings.items():
        if dim not in names:
            raise UnknownIdError("dimension", dim)
        scratch.set(cand.id, dim, value)
    for dim, value in ratings.items():
        state.ratings.set(cand.id, dim, value)
    state.mark_stale("ranking", "stats")
    return {"candidate_id": cand.id, "rated": sorted(ratings)}


def _mut_import_ratings(state: ProjectState, payload: dict) -> dict:
    sheet = RatingSheet.from_csv(payload["csv"], state.config.weights)
    state.ratings = sheet
    state.mark_stale("ranking", "stats")
    return {"ratings": len(sheet.ratings)}


def _mut_set_weights(state: ProjectState, payload: dict) -> dict:
    scheme = WeightScheme(
        tuple(
            Dimension(d["name"], d["kind"], d["weight"])
            for d in payload["dimensions"]
        )
    ).validate()
    state.config = replace(state.config, weights=scheme)
    state.mark_stale("ranking", "stats")
    return {"dimensions": scheme.names()}


def _mut_set_feasibility(state: ProjectState, payload: dict) -> dict:
    cand = state.candidate(payload["candidate_id"])
    feasible = payload["feasible"]
    if feasible not in FEASIBLE_STATES:
        raise ConfigError(f"feasible must be one of {FEASIBLE_STATES}")
    cand.feasible = feasible
    # record in annotations so the decision survives a re-extract
    prior = state.annotations.overrides.get(cand.id) or Annotation()
    state.annotations.overrides[cand.id] = replace(prior, feasible=feasible)
    state.mark_stale("ranking", "stats")
    return {"candidate_id": cand.id, "feasible": feasible}


def _mut_set_annotation(state: ProjectState, payload: dict) -> dict:
    source_id = payload["source_id"]
    raw = payload.get("annotation") or {}
    annotation = Annotation(
        is_requirement=raw.get("is_requirement"),
        statement_rewrite=raw.get("statement_rewrite"),
        req_type=raw.get("req_type"),
        consensus_override=raw.get("consensus_override"),
        feasible=raw.get("feasible"),
    )
    updated = AnnotationSet(dict(state.annotations.overrides))
    updated.overrides[source_id] = annotation
    if state.export is not None:
        updated.validate_against(state.export)
    state.annotations = updated
    state.mark_stale("candidates", "clusters", "ranking", "stats")
    return {"source_id": source_id}


def _mut_import_annotations(state: ProjectState, payload: dict) -> dict:
    annotations = AnnotationSet.from_json(payload["json"])
    if state.export is not None:
        annotations.validate_against(state.export)
    state.annotations = annotations
    state.mark_stale("candidates", "clusters", "ranking", "stats")
    return {"annotations": len(annotations.overrides)}


def _mut_merge_clusters(state: ProjectState, payload: dict) -> dict:
    ids = list(payload["cluster_ids"])
    if len(set(ids)) < 2:
        raise ConfigError("merge needs at least two distinct clusters")
    merged_members: list[str] = []
    for cid in ids:
        merged_members.extend(state.cluster(cid).member_ids)
    keep = [c for c in state.clusters if c.id not in set(ids)]
    merged = make_cluster(merged_members, state.vectors)
    merged = replace(
        merged, topic_distance=distance_to(merged, state.topic_vector)
    )
    state.clusters = sorted(keep + [merged], key=lambda c: natural_key(c.id))
    _refresh_duplicates(state, merged.id)
    state.mark_stale("ranking", "stats")
    return {"cluster_id": merged.id, "members": len(merged.member_ids)}


def _mut_split_cluster(state: ProjectState, payload: dict) -> dict:
    source = state.cluster(payload["cluster_id"])
    moving = list(payload["member_ids"])
    if not moving:
        raise ConfigError("split needs at least one member to move")
    unknown = [m for m in moving if m not in source.member_ids]
    if unknown:
        raise UnknownIdError("cluster member", unknown[0])
    staying = [m for m in source.member_ids if m not in set(moving)]
    if not staying:
        raise ConfigError("split cannot move every member out of a cluster")
    keep = [c for c in state.clusters if c.id != source.id]
    part_a = make_cluster(staying, state.vectors)
    part_b = make_cluster(moving, state.vectors)
    part_a = replace(part_a, topic_distance=distance_to(part_a, state.topic_vector))
    part_b = replace(part_b, topic_distance=distance_to(part_b, state.topic_vector))
    state.clusters = sorted(
        keep + [part_a, part_b], key=lambda c: natural_key(c.id)
    )
    _refresh_duplicates(state, part_a.id, part_b.id)
    state.mark_stale("ranking", "stats")
    return {"cluster_ids": [part_a.id, part_b.id]}


def _refresh_duplicates(state: ProjectState, *cluster_ids: str) -> None:
    by_id = {c.id: c for c in state.candidates}
    for cid in cluster_ids:
        counts = duplicate_counts(
            state.cluster(cid), state.vectors, state.config.cluster.theta_dup
        )
        for member, count in counts.items():
            if member in by_id:
                by_id[member].duplicate_count = count
    _refresh_base_priorities(state)


def _refresh_base_priorities(state: ProjectState) -> None:
    distance = pipeline.cluster_distance_by_member(state.clusters)
    state.base_priorities = {
        c.id: base_priority(c.consensus, c.duplicate_count, distance.get(c.id, 1.0))
        for c in state.candidates
    }


def _mut_set_thresholds(state: ProjectState, payload: dict) -> dict:
    cluster_cfg = state.config.cluster
    prune_cfg = state.config.prune
    changed: list[str] = []
    if "theta_link" in payload:
        cluster_cfg = replace(cluster_cfg, theta_link=float(payload["theta_link"]))
        changed.append("theta_link")
    if "theta_dup" in payload:
        cluster_cfg = replace(cluster_cfg, theta_dup=float(payload["theta_dup"]))
        changed.append("theta_dup")
    if "min_score" in payload:
        prune_cfg = replace(prune_cfg, min_score=float(payload["min_score"]))
        changed.append("min_score")
    if "min_relevance" in payload:
        prune_cfg = replace(prune_cfg, min_relevance=float(payload["min_relevance"]))
        changed.append("min_relevance")
    if not changed:
        raise ConfigError("set_thresholds payload names no threshold")
    cluster_cfg.validate()
    prune_cfg.validate()
    state.config = replace(state.config, cluster=cluster_cfg, prune=prune_cfg)
    if "theta_link" in changed or "theta_dup" in changed:
        state.mark_stale("clusters", "ranking", "stats")
    else:
        state.mark_stale("ranking", "stats")
    return {"changed": changed}


def _mut_recompute(state: ProjectState, payload: dict) -> dict:
    scope = payload.get("scope", "all")
    if scope not in RECOMPUTE_SCOPES:
        raise ConfigError(f"unknown recompute scope {scope!r}")
    return recompute(state, scope, overrides=payload.get("overrides"))


_MUTATIONS: dict[str, Callable[[ProjectState, dict], dict]] = {
    "set_rating": _mut_set_rating,
    "set_weights": _mut_set_weights,
    "set_feasibility": _mut_set_feasibility,
    "merge_clusters": _mut_merge_clusters,
    "split_cluster": _mut_split_cluster,
    "set_annotation": _mut_set_annotation,
    "set_thresholds": _mut_set_thresholds,
    "import_ratings": _mut_import_ratings,
    "import_annotations": _mut_import_annotations,
    "recompute": _mut_recompute,
}


# -- recompute ----------------------------------------------------------------

RECOMPUTE_SCOPES = ("all", "extract", "cluster", "ranking_only")

_THRESHOLD_KEYS = ("theta_link", "theta_dup", "min_score", "min_relevance")


def _effective_config(config: ProjectConfig, overrides: dict | None) -> ProjectConfig:
    """Apply invocation-only threshold overrides without touching the stored
    config; the overrides travel in the audited recompute payload, so replay
    stays exact."""
    if not overrides:
        return config
    unknown = [k for k in overrides if k not in _THRESHOLD_KEYS]
    if unknown:
        raise ConfigError(f"unknown recompute overrides: {unknown}")
    cluster_cfg = config.cluster
    prune_cfg = config.prune
    if "theta_link" in overrides:
        cluster_cfg = replace(cluster_cfg, theta_link=float(overrides["theta_link"]))
    if "theta_dup" in overrides:
        cluster_cfg = replace(cluster_cfg, theta_dup=float(overrides["theta_dup"]))
    if "min_score" in overrides:
        prune_cfg = replace(prune_cfg, min_score=float(overrides["min_score"]))
    if "min_relevance" in overrides:
        prune_cfg = replace(prune_cfg, min_relevance=float(overrides["min_relevance"]))
    cluster_cfg.validate()
    prune_cfg.validate()
    return replace(config, cluster=cluster_cfg, prune=prune_cfg)


def recompute(
    state: ProjectState, scope: str = "all", overrides: dict | None = None
) -> dict:
    """Rerun stale stages in dependency order and clear their stale flags.

    Scopes: "all" runs whatever is stale end to end; "extract" and "cluster"
    stop after that stage (the CLI's per-stage commands); "ranking_only"
    re-ranks from the current candidates/clusters even when upstream is stale
    (the served ranking then still reports stale=true, transitively).

    Rank/stats refusals (missing ratings, undecided feasibility) do not throw
    away the completed stages: they come back in the summary under "blocked",
    the affected artifacts stay stale, and the whole outcome is audited so
    replay reproduces it. With an entirely empty rating sheet the ranking is
    skipped quietly; rating simply hasn't started yet.
    """
    if state.export is None:
        raise ProjectError("project has no export loaded")
    export = state.export
    config = _effective_config(state.config, overrides)
    if overrides:
        # an override must take effect even on a fully fresh project
        if "theta_link" in overrides or "theta_dup" in overrides:
            state.mark_stale("clusters", "ranking", "stats")
        if "min_score" in overrides or "min_relevance" in overrides:
            state.mark_stale("ranking", "stats")
    ran: list[str] = []
    summary: dict = {}

    if scope in ("all", "extract", "cluster"):
        if state.stale["candidates"]:
            state.candidates = pipeline.stage_extract(
                export, state.annotations, config
            )
            state.stale["candidates"] = False
            state.mark_stale("clusters", "ranking", "stats")
            ran.append("extract")
    if scope in ("all", "cluster"):
        if state.stale["clusters"]:
            clustered = pipeline.stage_cluster(export, state.candidates, config)
            state.clusters = clustered.clusters
            state.vectors = clustered.vectors
            state.topic_vector = clustered.topic_vector
            state.base_priorities = clustered.base_priorities
            state.stale["clusters"] = False
            state.mark_stale("ranking", "stats")
            ran.append("cluster")

    if scope in ("all", "ranking_only") and (
        state.stale["ranking"] or scope == "ranking_only"
    ):
        if state.candidates and not state.ratings.ratings:
            summary["skipped"] = ["rank", "stats"]
            summary["skip_reason"] = "no ratings yet"
        else:
            try:
                ranking = pipeline.stage_rank(state.candidates, state.ratings, config)
                pruned = pipeline.stage_prune(
                    ranking, state.candidates, state.clusters, config
                )
            except (MissingRatingError, UndecidedFeasibilityError) as exc:
                summary["blocked"] = {
                    "code": exc.code,
                    "message": str(exc),
                    "details": exc.details(),
                }
            else:
                state.ranking = ranking
                state.dropped = list(pruned.dropped)
                state.stale["ranking"] = False
                ran.append("rank")

    if (
        scope in ("all", "ranking_only")
        and state.stale["stats"]
        and not state.ranking_is_stale()
    ):
        state.stats = pipeline.stage_stats(export, state.candidates, state.pruned())
        state.stale["stats"] = False
        ran.append("stats")

    state.refresh_artifact_hashes()
    summary.update({"ran": ran, "stale": dict(state.stale)})
    return summary

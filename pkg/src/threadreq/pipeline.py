"""Stage orchestration shared by the CLI and the triage service.

Each stage is a pure function of its inputs; run_pipeline chains them:
extract -> vectorize -> cluster -> topic distances -> duplicate counts ->
score -> rank -> prune -> stats.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .analytics import ElicitationStats, compute_stats
from .cluster import (
    Cluster,
    base_priority,
    cluster_candidates,
    duplicate_counts,
    with_topic_distances,
)
from .config import ProjectConfig
from .extract import AnnotationSet, CandidateRequirement, extract_candidates
from .ingest import DiscussionExport
from .prioritize import (
    PruneResult,
    RatingSheet,
    ScoredRequirement,
    prune,
    rank,
    score,
)
from .textvec import CorpusModel, TermVector, fit_corpus


@dataclass
class ClusterStage:
    clusters: list[Cluster]
    vectors: dict[str, TermVector]
    topic_vector: TermVector
    base_priorities: dict[str, float]


@dataclass
class PipelineResult:
    export: DiscussionExport
    candidates: list[CandidateRequirement] = field(default_factory=list)
    clusters: list[Cluster] = field(default_factory=list)
    vectors: dict[str, TermVector] = field(default_factory=dict)
    topic_vector: TermVector = field(default_factory=dict)
    base_priorities: dict[str, float] = field(default_factory=dict)
    ranking: list[ScoredRequirement] = field(default_factory=list)
    pruned: PruneResult = field(default_factory=lambda: PruneResult((), ()))
    stats: ElicitationStats | None = None


def stage_extract(
    export: DiscussionExport, annotations: AnnotationSet, config: ProjectConfig
) -> list[CandidateRequirement]:
    return extract_candidates(export, annotations, config.extract)


def stage_cluster(
    export: DiscussionExport,
    candidates: list[CandidateRequirement],
    config: ProjectConfig,
) -> ClusterStage:
    """Vectorize, link, measure topic distance, and fill duplicate counts
    (written back onto the candidates) plus the review-ordering signal."""
    if not candidates:
        return ClusterStage([], {}, {}, {})
    stopwords = config.cluster.stopwords
    corpus: CorpusModel = fit_corpus([c.statement for c in candidates], stopwords)
    vectors = {c.id: corpus.vectorize(c.statement) for c in candidates}
    clusters = cluster_candidates(vectors, config.cluster.theta_link)
    clusters = with_topic_distances(clusters, export.topic_statement, corpus)
    topic_vector = corpus.vectorize_topic(export.topic_statement)

    dup: dict[str, int] = {}
    for cl in clusters:
        dup.update(duplicate_counts(cl, vectors, config.cluster.theta_dup))
    distance = cluster_distance_by_member(clusters)
    priorities: dict[str, float] = {}
    for cand in candidates:
        cand.duplicate_count = dup.get(cand.id, 0)
        priorities[cand.id] = base_priority(
            cand.consensus, cand.duplicate_count, distance.get(cand.id, 1.0)
        )
    return ClusterStage(clusters, vectors, topic_vector, priorities)


def cluster_distance_by_member(clusters: list[Cluster]) -> dict[str, float]:
    return {
        member: cl.topic_distance for cl in clusters for member in cl.member_ids
    }


def stage_rank(
    candidates: list[CandidateRequirement],
    sheet: RatingSheet,
    config: ProjectConfig,
) -> list[ScoredRequirement]:
    scheme = config.weights
    return rank(
        ScoredRequirement(c.id, score(c.id, sheet, scheme)) for c in candidates
    )


def stage_prune(
    ranking: list[ScoredRequirement],
    candidates: list[CandidateRequirement],
    clusters: list[Cluster],
    config: ProjectConfig,
) -> PruneResult:
    distance = cluster_distance_by_member(clusters)
    result = prune(
        ranking,
        min_score=config.prune.min_score,
        min_relevance=config.prune.min_relevance,
        feasibility={c.id: c.feasible for c in candidates},
        relevance={cid: 1.0 - d for cid, d in distance.items()},
    )
    final_ids = {item.candidate_id for item in result.final}
    dropped_ids = {item.candidate_id for item in result.dropped}
    for cand in candidates:
        if cand.id in final_ids:
            cand.status = "final"
        elif cand.id in dropped_ids:
            cand.status = "dropped"
    return result


def stage_stats(
    export: DiscussionExport,
    candidates: list[CandidateRequirement],
    pruned: PruneResult,
) -> ElicitationStats:
    final_ids = {item.candidate_id for item in pruned.final}
    return compute_stats(export, candidates, final_ids)


def run_pipeline(
    export: DiscussionExport,
    annotations: AnnotationSet,
    config: ProjectConfig,
    sheet: RatingSheet,
) -> PipelineResult:
    """Run every stage once over immutable inputs."""
    result = PipelineResult(export=export)
    result.candidates = stage_extract(export, annotations, config)
    clustered = stage_cluster(export, result.candidates, config)
    result.clusters = clustered.clusters
    result.vectors = clustered.vectors
    result.topic_vector = clustered.topic_vector
    result.base_priorities = clustered.base_priorities
    result.ranking = stage_rank(result.candidates, sheet, config)
    result.pruned = stage_prune(
        result.ranking, result.candidates, result.clusters, config
    )
    result.stats = stage_stats(export, result.candidates, result.pruned)
    return result

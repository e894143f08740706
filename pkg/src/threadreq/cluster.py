"""Group related candidates and order them against the discussion topic.

Clusters are the connected components of the similarity graph: an edge joins
two candidates whenever the cosine of their TF-IDF vectors reaches the link
threshold (single-link semantics, so the result is independent of input
order). Each cluster carries its centroid's distance to the topic statement;
nearer the topic means higher priority. Duplicated opinions inside a cluster
raise priority further via per-candidate duplicate counts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .model import natural_key
from .textvec import CorpusModel, TermVector, centroid, cosine

BASE_PRIORITY_EPSILON = 0.01


@dataclass(frozen=True)
class Cluster:
    id: str
    member_ids: tuple[str, ...]
    centroid: TermVector
    topic_distance: float = 1.0
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "label": self.label,
            "topic_distance": self.topic_distance,
            "member_ids": list(self.member_ids),
        }


def make_cluster(member_ids: Sequence[str], vectors: Mapping[str, TermVector]) -> Cluster:
    """Build a cluster from members: id from the smallest member id, centroid
    as the arithmetic mean of member vectors, label from the top-3 terms."""
    members = tuple(sorted(member_ids, key=natural_key))
    if not members:
        raise ValueError("cluster needs at least one member")
    centre = centroid([vectors[m] for m in members])
    top = sorted(centre.items(), key=lambda kv: (-kv[1], kv[0]))[:3]
    return Cluster(
        id=f"cl-{members[0]}",
        member_ids=members,
        centroid=centre,
        label="+".join(t for t, _ in top),
    )


def cluster_candidates(
    vectors: Mapping[str, TermVector], theta_link: float = 0.5
) -> list[Cluster]:
    """Connected components of the cosine >= theta_link graph.

    Candidates whose statements tokenized to nothing (zero vectors) never
    link to anything, whatever the threshold; they surface as singletons
    for moderator review instead of erroring or glomming at theta 0.
    """
    ids = sorted(vectors, key=natural_key)
    if not ids:
        return []
    parent = {i: i for i in ids}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            # keep the natural-order smallest id as the root
            if natural_key(rb) < natural_key(ra):
                ra, rb = rb, ra
            parent[rb] = ra

    for i, a in enumerate(ids):
        va = vectors[a]
        if not va:
            continue
        for b in ids[i + 1 :]:
            vb = vectors[b]
            if vb and cosine(va, vb) >= theta_link:
                union(a, b)

    groups: dict[str, list[str]] = {}
    for cid in ids:
        groups.setdefault(find(cid), []).append(cid)
    clusters = [make_cluster(members, vectors) for members in groups.values()]
    clusters.sort(key=lambda c: natural_key(c.id))
    return clusters


def topic_distance(cluster: Cluster, topic_statement: str, corpus: CorpusModel) -> float:
    """1 - cosine(centroid, topic vector), clamped to [0, 1]; the topic is
    vectorized with the candidate corpus' IDF table."""
    topic_vec = corpus.vectorize_topic(topic_statement)
    return distance_to(cluster, topic_vec)


def distance_to(cluster: Cluster, topic_vec: TermVector) -> float:
    d = 1.0 - cosine(cluster.centroid, topic_vec)
    return min(max(d, 0.0), 1.0)


def with_topic_distances(
    clusters: Sequence[Cluster], topic_statement: str, corpus: CorpusModel
) -> list[Cluster]:
    topic_vec = corpus.vectorize_topic(topic_statement)
    return [replace(c, topic_distance=distance_to(c, topic_vec)) for c in clusters]


def duplicate_counts(
    cluster: Cluster, vectors: Mapping[str, TermVector], theta_dup: float = 0.9
) -> dict[str, int]:
    """How many same-cluster peers each member near-duplicates
    (cosine >= theta_dup)."""
    if theta_dup < 0:
        raise ValueError("theta_dup must be non-negative")
    counts = {m: 0 for m in cluster.member_ids}
    members = cluster.member_ids
    for i, a in enumerate(members):
        va = vectors[a]
        if not va:
            continue
        for b in members[i + 1 :]:
            vb = vectors[b]
            if vb and cosine(va, vb) >= theta_dup:
                counts[a] += 1
                counts[b] += 1
    return counts


def base_priority(
    consensus: int, duplicate_count: int, topic_distance: float
) -> float:
    """Pre-matrix ordering signal for moderator review.

    Strictly increasing in consensus and duplicate count, strictly decreasing
    in topic distance; the epsilon keeps fully off-topic items above zero so
    they still sort deterministically.
    """
    return (
        (1 + consensus)
        * (1 + duplicate_count)
        * (1 - topic_distance + BASE_PRIORITY_EPSILON)
    )

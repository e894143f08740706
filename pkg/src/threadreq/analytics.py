"""Elicitation metrics and the final report bundle.

Every ratio is recomputable from the numerator/denominator fields next to it,
and every percentage is rounded half-up to 2 decimal places (one rule for the
whole report, stated in its footer). Ratios with a zero denominator are
reported as absent, never NaN.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

from .cluster import Cluster
from .config import ProjectConfig
from .extract import CandidateRequirement
from .ingest import activity_timeline
from .errors import EmptyTimelineError
from .model import BucketActivity, DiscussionExport
from .prioritize import (
    DroppedRequirement,
    PruneResult,
    RatingSheet,
    ScoredRequirement,
    WeightScheme,
)

TOPIC_ORDER_ASSUMPTION = (
    "Clusters nearer the discussion topic rank higher (smaller topic distance "
    "= higher priority)."
)


def round_half_up(value: float, places: int = 2) -> float:
    q = Decimal(1).scaleb(-places)
    return float(Decimal(str(value)).quantize(q, rounding=ROUND_HALF_UP))


def _pct(numerator: float, denominator: float) -> float | None:
    if denominator == 0:
        return None
    return round_half_up(100.0 * numerator / denominator)


def _ratio(numerator: float, denominator: float) -> float | None:
    if denominator == 0:
        return None
    return round_half_up(numerator / denominator)


@dataclass(frozen=True)
class ElicitationStats:
    invited: int
    active: int
    participation_rate: float | None  # percent
    total_posts: int
    posts_per_active_user: float | None
    candidate_count: int
    nfr_count: int
    nfr_ratio: float | None  # percent
    candidates_per_active_user: float | None
    final_count: int
    final_ratio: float | None  # percent
    expert_final: int
    ordinary_final: int
    expert_final_ratio: float | None  # percent
    ordinary_final_ratio: float | None  # percent
    timeline: dict[int, BucketActivity]

    def to_dict(self) -> dict:
        return {
            "invited": self.invited,
            "active": self.active,
            "participation_rate": self.participation_rate,
            "total_posts": self.total_posts,
            "posts_per_active_user": self.posts_per_active_user,
            "candidate_count": self.candidate_count,
            "nfr_count": self.nfr_count,
            "nfr_ratio": self.nfr_ratio,
            "candidates_per_active_user": self.candidates_per_active_user,
            "final_count": self.final_count,
            "final_ratio": self.final_ratio,
            "expert_final": self.expert_final,
            "ordinary_final": self.ordinary_final,
            "expert_final_ratio": self.expert_final_ratio,
            "ordinary_final_ratio": self.ordinary_final_ratio,
            "timeline": [
                {
                    "day": day,
                    "posts": b.posts,
                    "comments": b.comments,
                    "likes": b.likes,
                    "active_users": b.active_users,
                }
                for day, b in sorted(self.timeline.items())
            ],
        }


def compute_stats(
    export: DiscussionExport,
    candidates: Sequence[CandidateRequirement],
    final_ids: set[str] | frozenset[str],
) -> ElicitationStats:
    """Fold the pipeline's outputs into the participation/funnel metrics.

    Active = distinct non-moderator participants with at least one post,
    comment, or like anywhere in the room.
    """
    moderators = export.moderator_ids
    active_ids: set[str] = set()
    for post in export.posts:
        active_ids.add(post.author_id)
        active_ids.update(post.likes)
        for comment in post.comments:
            active_ids.add(comment.author_id)
            active_ids.update(comment.likes)
    active_ids -= moderators

    invited = len(export.participants)
    active = len(active_ids)
    total_posts = len(export.posts)
    candidate_count = len(candidates)
    nfr_count = sum(1 for c in candidates if c.req_type == "nonfunctional")
    final_count = len(final_ids)
    expert_final = sum(
        1 for c in candidates if c.id in final_ids and c.author_category == "expert"
    )
    ordinary_final = sum(
        1 for c in candidates if c.id in final_ids and c.author_category == "ordinary"
    )

    try:
        timeline = activity_timeline(export)
    except EmptyTimelineError:
        timeline = {}

    return ElicitationStats(
        invited=invited,
        active=active,
        participation_rate=_pct(active, invited),
        total_posts=total_posts,
        posts_per_active_user=_ratio(total_posts, active),
        candidate_count=candidate_count,
        nfr_count=nfr_count,
        nfr_ratio=_pct(nfr_count, candidate_count),
        candidates_per_active_user=_ratio(candidate_count, active),
        final_count=final_count,
        final_ratio=_pct(final_count, candidate_count),
        expert_final=expert_final,
        ordinary_final=ordinary_final,
        expert_final_ratio=_pct(expert_final, final_count),
        ordinary_final_ratio=_pct(ordinary_final, final_count),
        timeline=timeline,
    )


# -- report rendering -------------------------------------------------------

def _fmt_num(x: float) -> str:
    return f"{x:g}"


def _fmt_pct(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.2f}%"


def _fmt_val(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.2f}"


def _cell(text: str, limit: int = 72) -> str:
    text = text.replace("|", "\\|")
    if len(text) > limit:
        return text[: limit - 1] + "…"
    return text


def render_report(
    export: DiscussionExport,
    stats: ElicitationStats,
    clusters: Sequence[Cluster],
    candidates: Sequence[CandidateRequirement],
    scheme: WeightScheme,
    sheet: RatingSheet,
    pruned: PruneResult,
    config: ProjectConfig,
    generated_at: str | None = None,
) -> str:
    """Deterministic Markdown report; byte-identical for identical inputs.

    No timestamps unless the caller passes generated_at explicitly.
    """
    by_id: Mapping[str, CandidateRequirement] = {c.id: c for c in candidates}
    lines: list[str] = []
    w = lines.append

    w("# Initial User Requirements Report")
    w("")
    w(f"*Assumption: {TOPIC_ORDER_ASSUMPTION}*")
    w("")
    if generated_at:
        w(f"Generated: {generated_at}")
        w("")

    w("## Project Summary")
    w("")
    w(f"- Room: {export.room_title or '(untitled)'}")
    w(f"- Topic: {export.topic_statement}")
    w(f"- Visibility: {export.visibility or '(undeclared)'}")
    w(f"- Opened: {export.created_at.isoformat().replace('+00:00', 'Z')}")
    w("")

    w("## Participation")
    w("")
    w(f"- Invited participants: {stats.invited}")
    w(f"- Active participants: {stats.active} ({_fmt_pct(stats.participation_rate)})")
    w(
        f"- Posts: {stats.total_posts}"
        f" ({_fmt_val(stats.posts_per_active_user)} per active user)"
    )
    w(
        f"- Candidate requirements: {stats.candidate_count}"
        f" ({_fmt_val(stats.candidates_per_active_user)} per active user)"
    )
    w(f"- Non-functional: {stats.nfr_count} ({_fmt_pct(stats.nfr_ratio)})")
    w(
        f"- Final requirements: {stats.final_count}"
        f" ({_fmt_pct(stats.final_ratio)} of candidates)"
    )
    w(
        f"- Final by author category: expert {stats.expert_final}"
        f" ({_fmt_pct(stats.expert_final_ratio)}),"
        f" ordinary {stats.ordinary_final}"
        f" ({_fmt_pct(stats.ordinary_final_ratio)})"
    )
    w("")

    w("## Activity by Day")
    w("")
    w("| Day | Posts | Comments | Likes | Active users |")
    w("| ---: | ---: | ---: | ---: | ---: |")
    for day, b in sorted(stats.timeline.items()):
        w(f"| {day} | {b.posts} | {b.comments} | {b.likes} | {b.active_users} |")
    w("")

    w("## Clusters")
    w("")
    w("| Cluster | Label | Topic distance | Members |")
    w("| --- | --- | ---: | ---: |")
    for c in clusters:
        w(
            f"| {c.id} | {_cell(c.label, 40)} | {c.topic_distance:.4f}"
            f" | {len(c.member_ids)} |"
        )
    w("")

    w("## Prioritization Matrix")
    w("")
    dim_headers = " | ".join(
        f"{d.name} ({_fmt_num(d.weight)})" for d in scheme.dimensions
    )
    w(f"| Rank | Requirement | Category | Statement | {dim_headers} | Score |")
    w(
        "| ---: | --- | --- | --- | "
        + " | ".join("---:" for _ in scheme.dimensions)
        + " | ---: |"
    )
    for item in pruned.final:
        cand = by_id.get(item.candidate_id)
        row = sheet.row(item.candidate_id)
        cells = " | ".join(str(row.get(d.name, "")) for d in scheme.dimensions)
        w(
            f"| {item.rank} | {item.candidate_id}"
            f" | {cand.author_category if cand else ''}"
            f" | {_cell(cand.statement) if cand else ''}"
            f" | {cells} | {_fmt_num(item.score)} |"
        )
    if not pruned.final:
        w("")
        w("0 final requirements.")
    w("")

    w("## Dropped Requirements")
    w("")
    w("| Rank | Requirement | Score | Reason |")
    w("| ---: | --- | ---: | --- |")
    for item in pruned.dropped:
        w(f"| {item.rank} | {item.candidate_id} | {_fmt_num(item.score)} | {item.reason} |")
    w("")

    w("## Methodology")
    w("")
    w(f"- Link threshold (cluster edges): {_fmt_num(config.cluster.theta_link)}")
    w(f"- Duplicate threshold: {_fmt_num(config.cluster.theta_dup)}")
    w(f"- Minimum score kept: {_fmt_num(config.prune.min_score)}")
    w(f"- Minimum topic relevance kept: {_fmt_num(config.prune.min_relevance)}")
    w(f"- Marker lexicon: {len(config.extract.markers)} phrases")
    w(f"- Non-functional lexicon: {len(config.extract.nfr_terms)} terms")
    w(
        "- Score = sum over dimensions of weight x rating"
        " (risk weights negative), ratings 0-10."
    )
    w(f"- {TOPIC_ORDER_ASSUMPTION}")
    w("")
    w(f"*All percentages rounded {config.rounding}.*")
    w("")
    return "\n".join(lines)


# -- artifact bundle --------------------------------------------------------

def ranked_csv(
    ranked: Sequence[ScoredRequirement], dropped: Sequence[DroppedRequirement]
) -> str:
    dropped_by_id = {d.candidate_id: d for d in dropped}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["rank", "candidate_id", "score", "status", "reason"])
    for item in ranked:
        drop = dropped_by_id.get(item.candidate_id)
        status = "dropped" if drop else "final"
        writer.writerow(
            [item.rank, item.candidate_id, _fmt_num(item.score), status,
             drop.reason if drop else ""]
        )
    return out.getvalue()


def timeline_csv(timeline: Mapping[int, BucketActivity]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["day", "posts", "comments", "likes", "active_users"])
    for day, b in sorted(timeline.items()):
        writer.writerow([day, b.posts, b.comments, b.likes, b.active_users])
    return out.getvalue()


def stats_json(stats: ElicitationStats) -> str:
    return json.dumps(stats.to_dict(), indent=2, sort_keys=True) + "\n"

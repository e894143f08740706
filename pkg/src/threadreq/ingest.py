"""Parse, validate, and profile discussion-room export files.

The canonical export is a UTF-8 JSON document:

    {
      "room_title": str,
      "topic_statement": str,
      "visibility": "public" | "private",
      "created_at": ISO-8601 UTC,
      "participants": [{"id", "display_name", "category", "invited_at"?}],
      "posts": [{"id", "author_id", "created_at", "text",
                 "likes": [participant id],
                 "comments": [{"id", "author_id", "created_at", "text", "likes"}]}]
    }

Unknown keys are ignored with a warning. The checklist fields (room_title,
visibility, posts, per-post comments) may be absent; their absence is reported
by validate_capabilities rather than failing the parse.
"""

from __future__ import annotations

import json
import logging
from datetime import datetime, timedelta, timezone
from typing import Any, Mapping

from .errors import (
    DanglingReferenceError,
    DuplicateIdError,
    EmptyTimelineError,
    SchemaError,
)
from .model import (
    CATEGORIES,
    VISIBILITIES,
    BucketActivity,
    Comment,
    DiscussionExport,
    Participant,
    Post,
    Violation,
)

log = logging.getLogger(__name__)

_EXPORT_KEYS = {
    "room_title",
    "topic_statement",
    "visibility",
    "created_at",
    "participants",
    "posts",
}
_PARTICIPANT_KEYS = {"id", "display_name", "category", "invited_at"}
_POST_KEYS = {"id", "author_id", "created_at", "text", "likes", "comments"}
_COMMENT_KEYS = {"id", "author_id", "created_at", "text", "likes"}


def parse_export(raw: bytes | str) -> DiscussionExport:
    """Parse a canonical export document into a fully linked model.

    Raises SchemaError (missing/invalid field, with the path to the offending
    element), DanglingReferenceError (author or like id with no participant),
    or DuplicateIdError. Comments are normalized to created_at order, ties
    broken by id, so the same bytes always yield the same model.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SchemaError(f"not UTF-8: {exc}", path="$") from exc
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}", path="$") from exc
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", path="$")
    _warn_unknown(doc, _EXPORT_KEYS, "$")

    topic = _req_str(doc, "topic_statement", "$")
    if not topic.strip():
        raise SchemaError("must be non-empty", path="$.topic_statement")

    room_title = _opt_str(doc, "room_title", "$") or ""
    visibility = _opt_str(doc, "visibility", "$")
    if visibility is not None and visibility not in VISIBILITIES:
        raise SchemaError(
            f"must be one of {VISIBILITIES}, got {visibility!r}", path="$.visibility"
        )
    created_at = _timestamp(doc, "created_at", "$", required=True)

    participants = _parse_participants(doc.get("participants"))
    known_ids = {p.id for p in participants}

    moderators = sum(1 for p in participants if p.category == "moderator")
    if moderators != 1:
        log.warning("export declares %d moderators, expected exactly 1", moderators)

    posts_declared = "posts" in doc
    posts = _parse_posts(doc.get("posts"), known_ids) if posts_declared else ()

    return DiscussionExport(
        room_title=room_title,
        topic_statement=topic,
        visibility=visibility,
        created_at=created_at,
        participants=participants,
        posts=posts,
        posts_declared=posts_declared,
    )


def _parse_participants(value: Any) -> tuple[Participant, ...]:
    if value is None:
        raise SchemaError("missing required field", path="$.participants")
    if not isinstance(value, list):
        raise SchemaError("must be an array", path="$.participants")
    out = []
    seen: set[str] = set()
    for i, item in enumerate(value):
        path = f"$.participants[{i}]"
        if not isinstance(item, dict):
            raise SchemaError("must be an object", path=path)
        _warn_unknown(item, _PARTICIPANT_KEYS, path)
        pid = _req_str(item, "id", path)
        if pid in seen:
            raise DuplicateIdError("participant", pid)
        seen.add(pid)
        category = _req_str(item, "category", path)
        if category not in CATEGORIES:
            raise SchemaError(
                f"must be one of {CATEGORIES}, got {category!r}", path=f"{path}.category"
            )
        out.append(
            Participant(
                id=pid,
                display_name=_req_str(item, "display_name", path),
                category=category,
                invited_at=_timestamp(item, "invited_at", path, required=False),
            )
        )
    return tuple(out)


def _parse_posts(value: Any, known_ids: set[str]) -> tuple[Post, ...]:
    if not isinstance(value, list):
        raise SchemaError("must be an array", path="$.posts")
    posts = []
    seen: set[str] = set()  # ids shared across posts and comments
    for i, item in enumerate(value):
        path = f"$.posts[{i}]"
        if not isinstance(item, dict):
            raise SchemaError("must be an object", path=path)
        _warn_unknown(item, _POST_KEYS, path)
        pid = _req_str(item, "id", path)
        if pid in seen:
            raise DuplicateIdError("post", pid)
        seen.add(pid)
        comments_declared = "comments" in item
        comments = []
        for j, citem in enumerate(item.get("comments") or []):
            cpath = f"{path}.comments[{j}]"
            if not isinstance(citem, dict):
                raise SchemaError("must be an object", path=cpath)
            _warn_unknown(citem, _COMMENT_KEYS, cpath)
            cid = _req_str(citem, "id", cpath)
            if cid in seen:
                raise DuplicateIdError("comment", cid)
            seen.add(cid)
            comments.append(
                Comment(
                    id=cid,
                    author_id=_author(citem, known_ids, cpath),
                    created_at=_timestamp(citem, "created_at", cpath, required=True),
                    text=_req_str(citem, "text", cpath),
                    likes=_likes(citem, known_ids, cpath),
                )
            )
        comments.sort(key=lambda c: (c.created_at, c.id))
        posts.append(
            Post(
                id=pid,
                author_id=_author(item, known_ids, path),
                created_at=_timestamp(item, "created_at", path, required=True),
                text=_req_str(item, "text", path),
                likes=_likes(item, known_ids, path),
                comments=tuple(comments),
                comments_declared=comments_declared,
            )
        )
    return tuple(posts)


def _author(item: Mapping, known_ids: set[str], path: str) -> str:
    author = _req_str(item, "author_id", path)
    if author not in known_ids:
        raise DanglingReferenceError(author, path=f"{path}.author_id")
    return author


def _likes(item: Mapping, known_ids: set[str], path: str) -> tuple[str, ...]:
    raw = item.get("likes") or []
    if not isinstance(raw, list):
        raise SchemaError("must be an array", path=f"{path}.likes")
    likes: list[str] = []
    for k, ref in enumerate(raw):
        if not isinstance(ref, str):
            raise SchemaError("must be a participant id string", path=f"{path}.likes[{k}]")
        if ref not in known_ids:
            raise DanglingReferenceError(ref, path=f"{path}.likes[{k}]")
        if ref in likes:
            raise DuplicateIdError("like", ref)
        likes.append(ref)
    return tuple(likes)


def _req_str(item: Mapping, key: str, path: str) -> str:
    if key not in item:
        raise SchemaError("missing required field", path=f"{path}.{key}")
    value = item[key]
    if not isinstance(value, str):
        raise SchemaError(f"must be a string, got {type(value).__name__}", path=f"{path}.{key}")
    return value


def _opt_str(item: Mapping, key: str, path: str) -> str | None:
    if key not in item or item[key] is None:
        return None
    value = item[key]
    if not isinstance(value, str):
        raise SchemaError(f"must be a string, got {type(value).__name__}", path=f"{path}.{key}")
    return value


def _timestamp(item: Mapping, key: str, path: str, required: bool) -> datetime | None:
    if key not in item or item[key] is None:
        if required:
            raise SchemaError("missing required field", path=f"{path}.{key}")
        return None
    value = item[key]
    if not isinstance(value, str):
        raise SchemaError("must be an ISO-8601 string", path=f"{path}.{key}")
    try:
        ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError as exc:
        raise SchemaError(f"invalid timestamp: {exc}", path=f"{path}.{key}") from exc
    if ts.tzinfo is None or ts.utcoffset() != timedelta(0):
        raise SchemaError("timestamp must be UTC", path=f"{path}.{key}")
    return ts.astimezone(timezone.utc)


def _warn_unknown(item: Mapping, known: set[str], path: str) -> None:
    for key in item:
        if key not in known:
            log.warning("ignoring unknown key %r at %s", key, path)


# -- capability checklist -------------------------------------------------

def validate_capabilities(export: DiscussionExport) -> list[Violation]:
    """Check the export against the discussion-space capability checklist.

    One Violation per failed item: a titled room, post support, comment
    support on posts, and declared access control. Empty list = compliant.
    """
    violations = []
    if not export.room_title.strip():
        violations.append(Violation("room", "export declares no titled discussion room"))
    if not export.posts_declared:
        violations.append(Violation("posting", "export has no posts field; posting unsupported"))
    undeclared = [p.id for p in export.posts if not p.comments_declared]
    if undeclared:
        violations.append(
            Violation(
                "commenting",
                "posts lack a comments field: " + ", ".join(undeclared[:5]),
            )
        )
    if export.visibility is None:
        violations.append(
            Violation("access_control", "export does not declare room visibility")
        )
    return violations


# -- activity timeline ----------------------------------------------------

def activity_timeline(
    export: DiscussionExport, bucket: timedelta = timedelta(days=1)
) -> dict[int, BucketActivity]:
    """Bucket every post, comment, and like into fixed-width time buckets.

    Bucket 0 contains the earliest post; likes carry no timestamp of their
    own and land in the bucket of the item they are attached to. Buckets with
    no activity between the first and last active bucket are emitted as
    explicit zeros so consumers can plot decay without gap logic.
    """
    if bucket <= timedelta(0):
        raise ValueError("bucket must be a positive duration")
    if not export.posts:
        raise EmptyTimelineError("export has no posts")

    origin = min(p.created_at for p in export.posts)

    def index(ts: datetime) -> int:
        # floor division also handles items before the earliest post
        return (ts - origin) // bucket

    posts: dict[int, int] = {}
    comments: dict[int, int] = {}
    likes: dict[int, int] = {}
    actives: dict[int, set[str]] = {}

    def touch(day: int, user: str) -> None:
        actives.setdefault(day, set()).add(user)

    for post in export.posts:
        d = index(post.created_at)
        posts[d] = posts.get(d, 0) + 1
        touch(d, post.author_id)
        likes[d] = likes.get(d, 0) + len(post.likes)
        for liker in post.likes:
            touch(d, liker)
        for comment in post.comments:
            cd = index(comment.created_at)
            comments[cd] = comments.get(cd, 0) + 1
            touch(cd, comment.author_id)
            likes[cd] = likes.get(cd, 0) + len(comment.likes)
            for liker in comment.likes:
                touch(cd, liker)

    seen = set(posts) | set(comments) | set(likes)
    lo, hi = min(seen), max(seen)
    return {
        d: BucketActivity(
            posts=posts.get(d, 0),
            comments=comments.get(d, 0),
            likes=likes.get(d, 0),
            active_users=len(actives.get(d, ())),
        )
        for d in range(lo, hi + 1)
    }


# -- serialization --------------------------------------------------------

def export_to_dict(export: DiscussionExport) -> dict:
    """Inverse of parse_export; parse(serialize(x)) == x."""
    doc: dict[str, Any] = {
        "room_title": export.room_title,
        "topic_statement": export.topic_statement,
    }
    if export.visibility is not None:
        doc["visibility"] = export.visibility
    doc["created_at"] = _iso(export.created_at)
    doc["participants"] = [
        _strip_none(
            {
                "id": p.id,
                "display_name": p.display_name,
                "category": p.category,
                "invited_at": _iso(p.invited_at) if p.invited_at else None,
            }
        )
        for p in export.participants
    ]
    if export.posts_declared:
        doc["posts"] = [_post_to_dict(p) for p in export.posts]
    return doc


def _post_to_dict(post: Post) -> dict:
    doc: dict[str, Any] = {
        "id": post.id,
        "author_id": post.author_id,
        "created_at": _iso(post.created_at),
        "text": post.text,
        "likes": list(post.likes),
    }
    if post.comments_declared:
        doc["comments"] = [
            {
                "id": c.id,
                "author_id": c.author_id,
                "created_at": _iso(c.created_at),
                "text": c.text,
                "likes": list(c.likes),
            }
            for c in post.comments
        ]
    return doc


def dumps_export(export: DiscussionExport) -> str:
    return json.dumps(export_to_dict(export), ensure_ascii=False, indent=2)


def _iso(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def _strip_none(d: dict) -> dict:
    return {k: v for k, v in d.items() if v is not None}


def total_likes(export: DiscussionExport) -> int:
    return sum(
        len(p.likes) + sum(len(c.likes) for c in p.comments) for p in export.posts
    )


def total_comments(export: DiscussionExport) -> int:
    return sum(len(p.comments) for p in export.posts)

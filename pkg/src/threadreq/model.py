"""In-memory model of a discussion-room export.

A discussion room is the raw material of the pipeline: the topic statement
decided up front, the invited participants, and everything they posted,
commented, and liked while the room was open.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from functools import cached_property

VISIBILITIES = ("public", "private")
CATEGORIES = ("expert", "ordinary", "moderator")


@dataclass(frozen=True)
class Participant:
    id: str
    display_name: str
    category: str  # expert | ordinary | moderator
    invited_at: datetime | None = None


@dataclass(frozen=True)
class Comment:
    id: str
    author_id: str
    created_at: datetime
    text: str
    likes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Post:
    id: str
    author_id: str
    created_at: datetime
    text: str
    likes: tuple[str, ...] = ()
    comments: tuple[Comment, ...] = ()
    # True when the source document carried a "comments" key for this post,
    # even an empty one; the capability checklist needs the distinction.
    comments_declared: bool = True


@dataclass(frozen=True)
class DiscussionExport:
    room_title: str
    topic_statement: str
    visibility: str | None  # None when the export never declared access control
    created_at: datetime
    participants: tuple[Participant, ...]
    posts: tuple[Post, ...]
    posts_declared: bool = True  # source document carried a "posts" key

    @cached_property
    def participants_by_id(self) -> dict[str, Participant]:
        return {p.id: p for p in self.participants}

    @cached_property
    def moderator_ids(self) -> frozenset[str]:
        return frozenset(p.id for p in self.participants if p.category == "moderator")


@dataclass(frozen=True)
class Violation:
    """One failed item of the discussion-space capability checklist."""

    item: str  # room | posting | commenting | access_control
    message: str


@dataclass(frozen=True)
class BucketActivity:
    posts: int = 0
    comments: int = 0
    likes: int = 0
    active_users: int = 0

    @property
    def total(self) -> int:
        return self.posts + self.comments + self.likes


def natural_key(ident: str) -> tuple[int, str]:
    """Normative ordering for ids: length first, then lexicographic.

    Gives "R2" < "R10" and keeps ranked output bit-stable across runs.
    """
    return (len(ident), ident)

"""Exception types shared across the pipeline."""

from __future__ import annotations


class ThreadReqError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def details(self) -> list:
        return []


class SchemaError(ThreadReqError):
    """Export document structurally invalid (missing field, wrong type)."""

    code = "schema_error"

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path

    def details(self) -> list:
        return [{"path": self.path}]


class DanglingReferenceError(ThreadReqError):
    """An author or like id does not resolve to any participant."""

    code = "dangling_reference"

    def __init__(self, ref: str, path: str):
        super().__init__(f"{path}: unknown participant {ref!r}")
        self.ref = ref
        self.path = path

    def details(self) -> list:
        return [{"ref": self.ref, "path": self.path}]


class DuplicateIdError(ThreadReqError):
    """An id occurs more than once where uniqueness is required."""

    code = "duplicate_id"

    def __init__(self, kind: str, value: str):
        super().__init__(f"duplicate {kind} id {value!r}")
        self.kind = kind
        self.value = value

    def details(self) -> list:
        return [{"kind": self.kind, "id": self.value}]


class EmptyTimelineError(ThreadReqError):
    """Timeline requested for an export with no posts."""

    code = "empty_timeline"


class ConfigError(ThreadReqError):
    """Invalid configuration value (empty lexicon, bad threshold, ...)."""

    code = "config_error"


class EmptyVocabularyError(ThreadReqError):
    """Every statement in the corpus tokenized to nothing."""

    code = "empty_vocabulary"


class EmptyTopicError(ThreadReqError):
    """The topic statement tokenized to nothing."""

    code = "empty_topic"


class MissingRatingError(ThreadReqError):
    """A candidate lacks a rating on some scheme dimension."""

    code = "missing_rating"

    def __init__(self, candidate_id: str, dimension: str):
        super().__init__(f"candidate {candidate_id!r} has no rating for {dimension!r}")
        self.candidate_id = candidate_id
        self.dimension = dimension

    def details(self) -> list:
        return [{"candidate_id": self.candidate_id, "dimension": self.dimension}]


class UndecidedFeasibilityError(ThreadReqError):
    """Candidates above the score cut still have feasible=undecided."""

    code = "undecided_feasibility"

    def __init__(self, candidate_ids: list):
        super().__init__(
            "feasibility undecided above the score cut: " + ", ".join(candidate_ids)
        )
        self.candidate_ids = list(candidate_ids)

    def details(self) -> list:
        return [{"candidate_id": c} for c in self.candidate_ids]


class ProjectError(ThreadReqError):
    """Project file unreadable, corrupt, or referencing a changed export."""

    code = "project_error"


class RevisionConflictError(ThreadReqError):
    """A mutation was applied since the client's last-seen revision."""

    code = "revision_conflict"

    def __init__(self, expected: int, actual: int):
        super().__init__(
            f"revision conflict: client saw {expected}, project is at {actual}"
        )
        self.expected = expected
        self.actual = actual

    def details(self) -> list:
        return [{"expected": self.expected, "actual": self.actual}]


class UnknownIdError(ThreadReqError):
    """A candidate/cluster id named in a request does not exist."""

    code = "unknown_id"

    def __init__(self, kind: str, value: str):
        super().__init__(f"unknown {kind} id {value!r}")
        self.kind = kind
        self.value = value

    def details(self) -> list:
        return [{"kind": self.kind, "id": self.value}]

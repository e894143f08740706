import json
from datetime import datetime, timezone
from pathlib import Path

import pytest

from threadreq.config import ProjectConfig
from threadreq.extract import AnnotationSet
from threadreq.ingest import parse_export
from threadreq.prioritize import RatingSheet

FIXTURES = Path(__file__).parent / "fixtures"
CASESTUDY = FIXTURES / "casestudy"


def ts(day: int = 0, hour: int = 8, minute: int = 0) -> str:
    base = datetime(2017, 1, 2, tzinfo=timezone.utc)
    return base.replace(hour=hour, minute=minute).replace(day=2 + day).isoformat().replace(
        "+00:00", "Z"
    )


def make_export_doc(posts=None, participants=None, **overrides) -> dict:
    doc = {
        "room_title": "disaster app room",
        "topic_statement": "disaster management mobile app",
        "visibility": "private",
        "created_at": "2017-01-02T00:00:00Z",
        "participants": participants
        if participants is not None
        else [
            {"id": "mod", "display_name": "Mod", "category": "moderator"},
            {"id": "u1", "display_name": "A", "category": "expert"},
            {"id": "u2", "display_name": "B", "category": "ordinary"},
            {"id": "u3", "display_name": "C", "category": "ordinary"},
        ],
        "posts": posts if posts is not None else [],
    }
    doc.update(overrides)
    return doc


def make_post(pid, author="u1", day=0, text="The app should alert users", likes=(), comments=()):
    return {
        "id": pid,
        "author_id": author,
        "created_at": ts(day),
        "text": text,
        "likes": list(likes),
        "comments": list(comments),
    }


def make_comment(cid, author="u2", day=0, text="good point", likes=()):
    return {
        "id": cid,
        "author_id": author,
        "created_at": ts(day, hour=9),
        "text": text,
        "likes": list(likes),
    }


def parse_doc(doc: dict):
    return parse_export(json.dumps(doc).encode("utf-8"))


@pytest.fixture
def tiny_export():
    return parse_doc(
        make_export_doc(
            posts=[
                make_post(
                    "p1",
                    author="u1",
                    text="The app should notify people near the disaster",
                    likes=["u2", "u3"],
                    comments=[make_comment("c1", author="u2", likes=["u3"])],
                ),
                make_post("p2", author="u2", day=1, text="lol nice idea"),
                make_post(
                    "p3",
                    author="u2",
                    day=2,
                    text="The application should be easy to use",
                    likes=["u1"],
                ),
            ]
        )
    )


@pytest.fixture(scope="session")
def casestudy_export():
    return parse_export((CASESTUDY / "case_study_aggregate.json").read_bytes())


@pytest.fixture(scope="session")
def casestudy_inputs(casestudy_export):
    config = ProjectConfig()
    annotations = AnnotationSet.load(CASESTUDY / "annotations.json")
    sheet = RatingSheet.from_csv((CASESTUDY / "ratings.csv").read_text(), config.weights)
    return casestudy_export, annotations, config, sheet

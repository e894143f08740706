import json
from datetime import timedelta

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from threadreq.errors import (
    DanglingReferenceError,
    DuplicateIdError,
    EmptyTimelineError,
    SchemaError,
)
from threadreq.ingest import (
    activity_timeline,
    dumps_export,
    parse_export,
    total_comments,
    total_likes,
    validate_capabilities,
)

from conftest import CASESTUDY, make_comment, make_export_doc, make_post, parse_doc


class TestParseExport:
    def test_minimal_export_no_posts(self):
        doc = make_export_doc(participants=[{"id": "u1", "display_name": "A", "category": "ordinary"}])
        export = parse_doc(doc)
        assert export.posts == ()
        assert len(export.participants) == 1

    def test_like_referencing_unknown_participant(self):
        doc = make_export_doc(posts=[make_post("p1", likes=["u99"])])
        with pytest.raises(DanglingReferenceError) as err:
            parse_doc(doc)
        assert "u99" in str(err.value)

    def test_dangling_author(self):
        doc = make_export_doc(posts=[make_post("p1", author="ghost")])
        with pytest.raises(DanglingReferenceError) as err:
            parse_doc(doc)
        assert "ghost" in str(err.value)

    def test_case_study_aggregate_counts(self):
        export = parse_export((CASESTUDY / "case_study_aggregate.json").read_bytes())
        assert len(export.participants) == 611
        assert len(export.posts) == 719

    def test_duplicate_post_id(self):
        doc = make_export_doc(posts=[make_post("p1"), make_post("p1")])
        with pytest.raises(DuplicateIdError):
            parse_doc(doc)

    def test_duplicate_comment_id_across_posts(self):
        doc = make_export_doc(
            posts=[
                make_post("p1", comments=[make_comment("c1")]),
                make_post("p2", comments=[make_comment("c1")]),
            ]
        )
        with pytest.raises(DuplicateIdError):
            parse_doc(doc)

    def test_duplicate_like(self):
        doc = make_export_doc(posts=[make_post("p1", likes=["u2", "u2"])])
        with pytest.raises(DuplicateIdError):
            parse_doc(doc)

    def test_missing_topic_statement(self):
        doc = make_export_doc()
        del doc["topic_statement"]
        with pytest.raises(SchemaError) as err:
            parse_doc(doc)
        assert "topic_statement" in str(err.value)

    def test_empty_topic_statement(self):
        with pytest.raises(SchemaError):
            parse_doc(make_export_doc(topic_statement="   "))

    def test_bad_visibility(self):
        with pytest.raises(SchemaError):
            parse_doc(make_export_doc(visibility="secret"))

    def test_schema_error_names_path(self):
        doc = make_export_doc(posts=[{"id": "p1", "author_id": "u1", "created_at": "2017-01-02T08:00:00Z"}])
        with pytest.raises(SchemaError) as err:
            parse_doc(doc)
        assert err.value.path == "$.posts[0].text"

    def test_non_utc_timestamp_rejected(self):
        doc = make_export_doc()
        doc["created_at"] = "2017-01-02T00:00:00+05:00"
        with pytest.raises(SchemaError):
            parse_doc(doc)

    def test_naive_timestamp_rejected(self):
        doc = make_export_doc()
        doc["created_at"] = "2017-01-02T00:00:00"
        with pytest.raises(SchemaError):
            parse_doc(doc)

    def test_unknown_keys_warn_but_parse(self, caplog):
        doc = make_export_doc(extra_field=1)
        with caplog.at_level("WARNING"):
            parse_doc(doc)
        assert "extra_field" in caplog.text

    def test_moderator_count_warning_not_error(self, caplog):
        doc = make_export_doc(
            participants=[{"id": "u1", "display_name": "A", "category": "ordinary"}]
        )
        with caplog.at_level("WARNING"):
            export = parse_doc(doc)
        assert export is not None
        assert "moderator" in caplog.text

    def test_comments_sorted_by_created_at_then_id(self):
        doc = make_export_doc(
            posts=[
                make_post(
                    "p1",
                    comments=[
                        {"id": "c2", "author_id": "u2", "created_at": "2017-01-02T10:00:00Z", "text": "later", "likes": []},
                        {"id": "c1", "author_id": "u2", "created_at": "2017-01-02T09:00:00Z", "text": "earlier", "likes": []},
                    ],
                )
            ]
        )
        export = parse_doc(doc)
        assert [c.id for c in export.posts[0].comments] == ["c1", "c2"]

    def test_deterministic_same_bytes_same_model(self):
        raw = json.dumps(make_export_doc(posts=[make_post("p1", likes=["u2"])])).encode()
        assert parse_export(raw) == parse_export(raw)


class TestValidateCapabilities:
    def test_missing_visibility(self):
        doc = make_export_doc()
        del doc["visibility"]
        violations = validate_capabilities(parse_doc(doc))
        assert [v.item for v in violations] == ["access_control"]

    def test_fully_formed_export(self, tiny_export):
        assert validate_capabilities(tiny_export) == []

    def test_posts_lacking_comments_field(self):
        doc = make_export_doc(posts=[make_post("p1")])
        del doc["posts"][0]["comments"]
        violations = validate_capabilities(parse_doc(doc))
        assert [v.item for v in violations] == ["commenting"]

    def test_missing_posts_field(self):
        doc = make_export_doc()
        del doc["posts"]
        violations = validate_capabilities(parse_doc(doc))
        assert [v.item for v in violations] == ["posting"]

    def test_untitled_room(self):
        violations = validate_capabilities(parse_doc(make_export_doc(room_title="")))
        assert [v.item for v in violations] == ["room"]


class TestActivityTimeline:
    def test_basic_bucketing_with_explicit_zero_day(self):
        export = parse_doc(
            make_export_doc(
                posts=[make_post("p1", day=0), make_post("p2", day=0), make_post("p3", day=2)]
            )
        )
        timeline = activity_timeline(export)
        assert timeline[0].posts == 2
        assert timeline[1].posts == 0  # zero bucket emitted explicitly
        assert timeline[2].posts == 1
        assert sorted(timeline) == [0, 1, 2]

    def test_case_study_last_nonzero_bucket_is_day_6(self, casestudy_export):
        timeline = activity_timeline(casestudy_export)
        nonzero = [d for d, b in timeline.items() if b.total > 0]
        assert max(nonzero) == 6

    def test_single_post_with_five_likes(self):
        doc = make_export_doc(
            participants=[
                {"id": "mod", "display_name": "M", "category": "moderator"},
                {"id": "u1", "display_name": "A", "category": "ordinary"},
                {"id": "u2", "display_name": "B", "category": "ordinary"},
                {"id": "u3", "display_name": "C", "category": "ordinary"},
                {"id": "u4", "display_name": "D", "category": "ordinary"},
                {"id": "u5", "display_name": "E", "category": "ordinary"},
                {"id": "u6", "display_name": "F", "category": "ordinary"},
            ],
            posts=[make_post("p1", likes=["u2", "u3", "u4", "u5", "u6"])],
        )
        timeline = activity_timeline(parse_doc(doc))
        assert timeline[0].posts == 1
        assert timeline[0].likes == 5
        assert timeline[0].active_users >= 1

    def test_empty_export_raises(self):
        with pytest.raises(EmptyTimelineError):
            activity_timeline(parse_doc(make_export_doc()))

    def test_likes_bucket_with_their_item(self):
        # comment created on day 3 under a day-0 post: its like lands on day 3
        doc = make_export_doc(
            posts=[
                make_post(
                    "p1",
                    day=0,
                    comments=[make_comment("c1", day=3, likes=["u3"])],
                )
            ]
        )
        timeline = activity_timeline(parse_doc(doc))
        assert timeline[3].comments == 1
        assert timeline[3].likes == 1
        assert timeline[0].likes == 0

    def test_bucket_must_be_positive(self, tiny_export):
        with pytest.raises(ValueError):
            activity_timeline(tiny_export, bucket=timedelta(0))


# -- property tests -----------------------------------------------------------

participant_ids = st.integers(min_value=1, max_value=8).map(lambda i: f"u{i}")


@st.composite
def export_docs(draw):
    n_users = draw(st.integers(min_value=1, max_value=8))
    users = [f"u{i}" for i in range(1, n_users + 1)]
    participants = [{"id": "mod", "display_name": "M", "category": "moderator"}] + [
        {
            "id": u,
            "display_name": u.upper(),
            "category": draw(st.sampled_from(["expert", "ordinary"])),
        }
        for u in users
    ]
    n_posts = draw(st.integers(min_value=0, max_value=6))
    posts = []
    comment_seq = 0
    for p in range(n_posts):
        n_comments = draw(st.integers(min_value=0, max_value=3))
        comments = []
        for _ in range(n_comments):
            comment_seq += 1
            comments.append(
                {
                    "id": f"c{comment_seq}",
                    "author_id": draw(st.sampled_from(users)),
                    "created_at": f"2017-01-{draw(st.integers(2, 9)):02d}T0{draw(st.integers(0, 9))}:00:00Z",
                    "text": draw(st.sampled_from(["good point", "the app should map floods", "+1"])),
                    "likes": draw(st.lists(st.sampled_from(users), unique=True, max_size=3)),
                }
            )
        posts.append(
            {
                "id": f"p{p + 1}",
                "author_id": draw(st.sampled_from(users)),
                "created_at": f"2017-01-{draw(st.integers(2, 9)):02d}T0{draw(st.integers(0, 9))}:00:00Z",
                "text": draw(st.sampled_from(["we must track people", "hello", "alert zones"])),
                "likes": draw(st.lists(st.sampled_from(users), unique=True, max_size=4)),
                "comments": comments,
            }
        )
    return make_export_doc(participants=participants, posts=posts)


@given(export_docs())
@settings(max_examples=60, deadline=None)
def test_parse_serialize_parse_roundtrips(doc):
    first = parse_export(json.dumps(doc).encode())
    again = parse_export(dumps_export(first).encode())
    assert first == again


@given(export_docs())
@settings(max_examples=60, deadline=None)
def test_timeline_sums_match_totals(doc):
    export = parse_export(json.dumps(doc).encode())
    if not export.posts:
        with pytest.raises(EmptyTimelineError):
            activity_timeline(export)
        return
    timeline = activity_timeline(export)
    assert sum(b.posts for b in timeline.values()) == len(export.posts)
    assert sum(b.comments for b in timeline.values()) == total_comments(export)
    assert sum(b.likes for b in timeline.values()) == total_likes(export)

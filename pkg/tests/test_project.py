import copy
import json
import os
from pathlib import Path

import pytest

from threadreq.errors import (
    ConfigError,
    ProjectError,
    RevisionConflictError,
    UnknownIdError,
)
from threadreq.project import (
    PROJECT_FILENAME,
    apply_mutation,
    init_project,
    load_project,
    payload_hash,
    replay_audit,
    save_project,
)

from conftest import make_export_doc, make_post

EXPORT_DOC = make_export_doc(
    posts=[
        make_post("p1", author="u1", text="The app should send flood alerts", likes=["u2", "u3"]),
        make_post("p2", author="u2", day=1, text="The app should send flood alerts"),
        make_post("p3", author="u2", day=1, text="It must track missing people", likes=["u1"]),
        make_post("p4", author="u3", day=2, text="The app must track missing people now"),
        make_post("p5", author="u3", day=3, text="chatter only here"),
    ]
)

RATINGS = {"p1": [4, 6, 3, 5, 3], "p2": [3, 4, 4, 4, 5], "p3": [6, 7, 4, 6, 5], "p4": [2, 2, 2, 0, 0]}
DIMS = ["Quality", "Effort Required", "User Need", "Technical", "Business"]


def make_project(tmp_path: Path, recompute: bool = True):
    export_path = tmp_path / "export.json"
    export_path.write_text(json.dumps(EXPORT_DOC), "utf-8")
    project_dir = tmp_path / "proj"
    state = init_project(project_dir, export_path)
    annotations = {pid: {"feasible": "yes"} for pid in RATINGS}
    apply_mutation(
        state,
        "import_annotations",
        {"json": json.dumps(annotations)},
        project_dir=project_dir,
    )
    csv_lines = ["candidate_id," + ",".join(DIMS)]
    for pid, row in RATINGS.items():
        csv_lines.append(pid + "," + ",".join(map(str, row)))
    apply_mutation(
        state,
        "import_ratings",
        {"csv": "\n".join(csv_lines) + "\n"},
        project_dir=project_dir,
    )
    if recompute:
        apply_mutation(state, "recompute", {"scope": "all"}, project_dir=project_dir)
    return project_dir, state


class TestPersistence:
    def test_init_save_load_round_trip(self, tmp_path):
        project_dir, state = make_project(tmp_path)
        loaded = load_project(project_dir)
        assert loaded.revision == state.revision
        assert [c.id for c in loaded.candidates] == [c.id for c in state.candidates]
        assert loaded.ratings.ratings == state.ratings.ratings
        assert [e.to_dict() for e in loaded.audit] == [e.to_dict() for e in state.audit]
        assert loaded.artifact_hashes == state.artifact_hashes

    def test_export_change_detected_on_load(self, tmp_path):
        project_dir, _ = make_project(tmp_path)
        export_path = tmp_path / "export.json"
        doc = json.loads(export_path.read_text())
        doc["room_title"] = "edited behind the project's back"
        export_path.write_text(json.dumps(doc), "utf-8")
        with pytest.raises(ProjectError) as err:
            load_project(project_dir)
        assert "changed" in str(err.value)

    def test_corrupt_project_file(self, tmp_path):
        project_dir, _ = make_project(tmp_path)
        (project_dir / PROJECT_FILENAME).write_text("{nope", "utf-8")
        with pytest.raises(ProjectError):
            load_project(project_dir)

    def test_crash_between_temp_write_and_rename_keeps_old_file(self, tmp_path, monkeypatch):
        project_dir, state = make_project(tmp_path)
        before = (project_dir / PROJECT_FILENAME).read_bytes()

        def explode(src, dst):
            raise OSError("injected crash before rename")

        monkeypatch.setattr(os, "replace", explode)
        with pytest.raises(OSError):
            save_project(state, project_dir)
        monkeypatch.undo()

        assert (project_dir / PROJECT_FILENAME).read_bytes() == before
        loaded = load_project(project_dir)  # still loadable, old state
        assert loaded.revision == state.revision
        assert not list(project_dir.glob("*.tmp"))  # temp file cleaned up


class TestMutations:
    def test_revision_conflict(self, tmp_path):
        project_dir, state = make_project(tmp_path)
        seen = state.revision
        apply_mutation(
            state,
            "set_rating",
            {"candidate_id": "p1", "ratings": {"Quality": 9}},
            expected_revision=seen,
        )
        with pytest.raises(RevisionConflictError):
            apply_mutation(
                state,
                "set_rating",
                {"candidate_id": "p1", "ratings": {"Quality": 2}},
                expected_revision=seen,
            )

    def test_mutation_marks_ranking_stale(self, tmp_path):
        _, state = make_project(tmp_path)
        assert not state.ranking_is_stale()
        apply_mutation(state, "set_rating", {"candidate_id": "p1", "ratings": {"Quality": 9}})
        assert state.ranking_is_stale()

    def test_audit_grows_and_hashes_payloads(self, tmp_path):
        _, state = make_project(tmp_path)
        n = len(state.audit)
        payload = {"candidate_id": "p1", "ratings": {"Quality": 9}}
        apply_mutation(state, "set_rating", payload)
        assert len(state.audit) == n + 1
        assert state.audit[-1].payload_sha256 == payload_hash(payload)

    def test_invalid_rating_leaves_sheet_untouched(self, tmp_path):
        _, state = make_project(tmp_path)
        before = dict(state.ratings.ratings)
        with pytest.raises(ConfigError):
            apply_mutation(
                state,
                "set_rating",
                {"candidate_id": "p1", "ratings": {"Quality": 3, "Business": 11}},
            )
        assert state.ratings.ratings == before

    def test_failed_mutation_appends_no_audit(self, tmp_path):
        _, state = make_project(tmp_path)
        n = len(state.audit)
        with pytest.raises(UnknownIdError):
            apply_mutation(state, "set_rating", {"candidate_id": "zz", "ratings": {"Quality": 3}})
        assert len(state.audit) == n

    def test_set_feasibility_no_then_recompute_drops_infeasible(self, tmp_path):
        project_dir, state = make_project(tmp_path)
        top = state.ranking[0].candidate_id
        apply_mutation(state, "set_feasibility", {"candidate_id": top, "feasible": "no"})
        apply_mutation(state, "recompute", {"scope": "all"})
        assert any(
            d.candidate_id == top and d.reason == "infeasible" for d in state.dropped
        )

    def test_feasibility_survives_reextract(self, tmp_path):
        _, state = make_project(tmp_path)
        apply_mutation(state, "set_feasibility", {"candidate_id": "p1", "feasible": "no"})
        # force a full re-extract, which rebuilds candidates from annotations
        apply_mutation(
            state,
            "set_annotation",
            {"source_id": "p5", "annotation": {"is_requirement": True}},
        )
        apply_mutation(state, "recompute", {"scope": "all"})
        assert state.candidate("p1").feasible == "no"
        assert state.candidate("p5").status in ("candidate", "final", "dropped")

    def test_scaling_weights_preserves_order(self, tmp_path):
        _, state = make_project(tmp_path)
        before = [r.candidate_id for r in state.ranking]
        dims = [
            {"name": d.name, "kind": d.kind, "weight": d.weight * 2}
            for d in state.config.weights.dimensions
        ]
        apply_mutation(state, "set_weights", {"dimensions": dims})
        apply_mutation(state, "recompute", {"scope": "ranking_only"})
        assert [r.candidate_id for r in state.ranking] == before

    def test_merge_then_split_preserves_partition(self, tmp_path):
        _, state = make_project(tmp_path)
        all_members = sorted(m for c in state.clusters for m in c.member_ids)
        a, b = state.clusters[0].id, state.clusters[1].id
        result = apply_mutation(state, "merge_clusters", {"cluster_ids": [a, b]})
        merged_id = result["cluster_id"]
        assert sorted(m for c in state.clusters for m in c.member_ids) == all_members

        merged = state.cluster(merged_id)
        moving = [merged.member_ids[0]]
        if len(merged.member_ids) > 1:
            apply_mutation(
                state,
                "split_cluster",
                {"cluster_id": merged_id, "member_ids": moving},
            )
            assert sorted(m for c in state.clusters for m in c.member_ids) == all_members

    def test_merge_cluster_with_itself_rejected(self, tmp_path):
        _, state = make_project(tmp_path)
        a = state.clusters[0].id
        with pytest.raises(ConfigError):
            apply_mutation(state, "merge_clusters", {"cluster_ids": [a, a]})

    def test_split_all_members_out_rejected(self, tmp_path):
        _, state = make_project(tmp_path)
        cl = state.clusters[0]
        with pytest.raises(ConfigError):
            apply_mutation(
                state,
                "split_cluster",
                {"cluster_id": cl.id, "member_ids": list(cl.member_ids)},
            )

    def test_set_thresholds_marks_clusters_stale_for_theta(self, tmp_path):
        _, state = make_project(tmp_path)
        apply_mutation(state, "set_thresholds", {"theta_link": 0.4})
        assert state.stale["clusters"]

    def test_unknown_action_rejected(self, tmp_path):
        _, state = make_project(tmp_path)
        with pytest.raises(ConfigError):
            apply_mutation(state, "drop_tables", {})


class TestRecompute:
    def test_untouched_recompute_is_noop_same_hashes(self, tmp_path):
        _, state = make_project(tmp_path)
        hashes = dict(state.artifact_hashes)
        result = apply_mutation(state, "recompute", {"scope": "all"})
        assert result["ran"] == []
        assert state.artifact_hashes == hashes

    def test_rating_change_touches_only_ranking_and_stats_hashes(self, tmp_path):
        _, state = make_project(tmp_path)
        before = dict(state.artifact_hashes)
        apply_mutation(state, "set_rating", {"candidate_id": "p4", "ratings": {"Quality": 9}})
        apply_mutation(state, "recompute", {"scope": "all"})
        after = state.artifact_hashes
        assert after["candidates"] == before["candidates"]
        assert after["clusters"] == before["clusters"]
        assert after["ranking"] != before["ranking"]

    def test_blocked_by_undecided_feasibility(self, tmp_path):
        project_dir, state = make_project(tmp_path, recompute=False)
        apply_mutation(
            state,
            "set_annotation",
            {"source_id": "p4", "annotation": {"feasible": None}},
        )
        result = apply_mutation(state, "recompute", {"scope": "all"})
        assert result["blocked"]["code"] == "undecided_feasibility"
        assert {"candidate_id": "p4"} in result["blocked"]["details"]
        # partial progress kept: candidates and clusters exist, ranking stale
        assert state.candidates
        assert state.clusters
        assert state.ranking_is_stale()

    def test_empty_sheet_skips_ranking_quietly(self, tmp_path):
        project_dir, state = make_project(tmp_path, recompute=False)
        state.ratings.ratings.clear()
        result = apply_mutation(state, "recompute", {"scope": "all"})
        assert result.get("skipped") == ["rank", "stats"]
        assert state.candidates

    def test_invocation_only_overrides_do_not_persist(self, tmp_path):
        _, state = make_project(tmp_path)
        theta_before = state.config.cluster.theta_link
        apply_mutation(
            state,
            "recompute",
            {"scope": "all", "overrides": {"min_score": 1000.0}},
        )
        assert state.config.prune.min_score == 0.0
        assert state.config.cluster.theta_link == theta_before
        # with the huge min_score everything below it was dropped low_priority
        assert all(d.reason == "low_priority" for d in state.dropped)
        assert len(state.dropped) == len(state.ranking)


class TestAuditReplay:
    def test_twenty_mutation_script_replays_to_same_state(self, tmp_path):
        project_dir, state = make_project(tmp_path, recompute=False)
        initial = copy.deepcopy(state)

        script = [
            ("recompute", {"scope": "all"}),
            ("set_rating", {"candidate_id": "p1", "ratings": {"Quality": 9}}),
            ("set_rating", {"candidate_id": "p2", "ratings": {"Business": 1}}),
            ("set_feasibility", {"candidate_id": "p3", "feasible": "no"}),
            ("recompute", {"scope": "ranking_only"}),
            ("set_thresholds", {"min_score": 5.0}),
            ("set_weights", {"dimensions": [
                {"name": "Quality", "kind": "value", "weight": 14},
                {"name": "Effort Required", "kind": "value", "weight": 16},
                {"name": "User Need", "kind": "value", "weight": 10},
                {"name": "Technical", "kind": "risk", "weight": -14},
                {"name": "Business", "kind": "risk", "weight": -10},
            ]}),
            ("recompute", {"scope": "all"}),
            ("set_rating", {"candidate_id": "p4", "ratings": {"User Need": 8}}),
            ("set_feasibility", {"candidate_id": "p4", "feasible": "no"}),
            ("recompute", {"scope": "all"}),
            ("set_annotation", {"source_id": "p5", "annotation": {"is_requirement": True, "feasible": "yes"}}),
            ("recompute", {"scope": "extract"}),
            ("set_rating", {"candidate_id": "p5", "ratings": {
                "Quality": 5, "Effort Required": 5, "User Need": 5,
                "Technical": 1, "Business": 1}}),
            ("recompute", {"scope": "all"}),
            ("set_thresholds", {"theta_link": 0.4, "theta_dup": 0.95}),
            ("recompute", {"scope": "all"}),
            ("set_feasibility", {"candidate_id": "p1", "feasible": "yes"}),
            ("set_rating", {"candidate_id": "p1", "ratings": {"Technical": 0}}),
            ("recompute", {"scope": "all"}),
        ]
        assert len(script) == 20
        for action, payload in script:
            apply_mutation(state, action, payload, project_dir=project_dir)

        replayed = replay_audit(initial, state.audit[len(initial.audit):])
        assert replayed.revision == state.revision
        assert replayed.to_dict() == state.to_dict()

    def test_replay_includes_audit_equality(self, tmp_path):
        project_dir, state = make_project(tmp_path)
        initial = copy.deepcopy(state)
        apply_mutation(state, "set_rating", {"candidate_id": "p1", "ratings": {"Quality": 1}})
        apply_mutation(state, "recompute", {"scope": "ranking_only"})
        replayed = replay_audit(initial, state.audit[len(initial.audit):])
        assert [e.to_dict() for e in replayed.audit] == [e.to_dict() for e in state.audit]

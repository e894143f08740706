"""Acceptance gate: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; a pytest FAILED report for a test here is the corresponding fail line.
"""

import copy
import math
import os
import random
from decimal import Decimal

import pytest
from click.testing import CliRunner

from threadreq.cli import main as cli_main
from threadreq.cluster import base_priority, cluster_candidates
from threadreq.config import DEFAULT_DIMENSIONS
from threadreq.ingest import activity_timeline
from threadreq.pipeline import run_pipeline
from threadreq.prioritize import (
    Dimension,
    RatingSheet,
    ScoredRequirement,
    WeightScheme,
    prune,
    rank,
    score,
)
from threadreq.project import apply_mutation, replay_audit, save_project
from threadreq.textvec import fit_corpus

from conftest import CASESTUDY
from test_project import make_project


def _ok(criterion: int, message: str) -> None:
    print(f"[ACCEPTANCE {criterion}] PASS - {message}")


# -- criterion 1: matrix golden test -------------------------------------------

def test_criterion_1_matrix_golden():
    scheme = WeightScheme(DEFAULT_DIMENSIONS)  # (7, 8, 5, -7, -5)
    rows = {
        "R1": ([4, 6, 3, 5, 3], 41),
        "R12": ([3, 4, 4, 4, 5], 20),
        "R32": ([2, 5, 5, 2, 4], 45),
        "R47": ([6, 5, 3, 7, 2], 38),
        "R3": ([6, 7, 4, 6, 5], 51),
        "R10": ([3, 5, 3, 2, 3], 47),
        # R11 is sometimes quoted as 54, but these ratings force
        # 7*4 + 8*6 + 5*4 - 7*3 - 5*3 = 60; the golden value is the arithmetic
        "R11": ([4, 6, 4, 3, 3], 60),
        "R345": ([5, 3, 4, 5, 3], 29),
    }
    sheet = RatingSheet()
    for cid, (ratings, _) in rows.items():
        for dim, value in zip(scheme.dimensions, ratings):
            sheet.set(cid, dim.name, value)

    for cid, (_, expected) in rows.items():
        got = score(cid, sheet, scheme)
        assert got == expected, f"{cid}: {got} != {expected}"
        assert float(got).is_integer()

    ranked = rank(ScoredRequirement(cid, score(cid, sheet, scheme)) for cid in rows)
    assert ranked[0].candidate_id == "R11"
    assert ranked[-1].candidate_id == "R12"
    _ok(1, "eight matrix rows score exactly; R11 ranks first, R12 last")


# -- criterion 2: case-study aggregate stats ------------------------------------

def _within(value: float, target: str, tolerance: str) -> bool:
    # decimal comparison: +-0.01 must admit a difference of exactly 0.01
    return abs(Decimal(str(value)) - Decimal(target)) <= Decimal(tolerance)


def test_criterion_2_case_study_stats(casestudy_inputs):
    export, annotations, config, sheet = casestudy_inputs
    result = run_pipeline(export, annotations, config, sheet)
    s = result.stats

    assert s.invited == 611
    assert s.active == 202
    assert s.total_posts == 719
    assert s.candidate_count == 345
    assert s.nfr_count == 16
    assert s.final_count == 156
    assert s.expert_final == 96
    assert s.ordinary_final == 60

    assert _within(s.participation_rate, "33.06", "0.01")
    assert _within(s.posts_per_active_user, "3.55", "0.01")
    assert _within(s.nfr_ratio, "4.6", "0.05")
    assert _within(s.final_ratio, "45.22", "0.01")
    assert _within(s.expert_final_ratio, "61.54", "0.01")
    assert _within(s.ordinary_final_ratio, "38.46", "0.01")
    _ok(2, "611/202/719/345/16/156 fixture reproduces every headline figure")


# -- criterion 3: clustering oracle equivalence ----------------------------------

VOCAB = ["flood", "alert", "map", "quake", "rescue", "zone", "water", "camp",
         "road", "home", "food", "phone"]


def oracle_components(vectors: dict, theta: float) -> set:
    def sim(u, v):
        if not u or not v:
            return 0.0
        dot = sum(w * v.get(t, 0.0) for t, w in u.items())
        if dot == 0.0:
            return 0.0
        nu = math.sqrt(sum(w * w for w in u.values()))
        nv = math.sqrt(sum(w * w for w in v.values()))
        return dot / (nu * nv)

    ids = list(vectors)
    components = []
    unassigned = set(ids)
    while unassigned:
        start = unassigned.pop()
        component = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for other in list(unassigned):
                if sim(vectors[node], vectors[other]) >= theta:
                    unassigned.discard(other)
                    component.add(other)
                    frontier.append(other)
        components.append(frozenset(component))
    return set(components)


def test_criterion_3_clustering_oracle_equivalence():
    rng = random.Random(1337)
    thetas = [0.0, 0.3, 0.5, 0.9, 1.01]
    corpora = 0
    for _ in range(200):
        n = rng.randint(1, 10)
        statements = [
            " ".join(rng.choices(VOCAB, k=rng.randint(1, 5))) for _ in range(n)
        ]
        corpus = fit_corpus(statements)
        vectors = {f"s{i}": corpus.vectorize(t) for i, t in enumerate(statements)}
        theta = rng.choice(thetas)
        got = {frozenset(c.member_ids) for c in cluster_candidates(vectors, theta)}
        assert got == oracle_components(vectors, theta), (statements, theta)
        corpora += 1

        # forced cases on the same corpus
        singletons = {
            frozenset(c.member_ids) for c in cluster_candidates(vectors, 1.01)
        }
        assert all(len(s) == 1 for s in singletons)
        one = cluster_candidates(vectors, 0.0)
        assert len(one) == 1 and len(one[0].member_ids) == n

    assert corpora == 200
    _ok(3, "200 random corpora match the brute-force component oracle")


# -- criterion 4: property suites (>=1000 cases each) -----------------------------

SCHEME = WeightScheme(DEFAULT_DIMENSIONS)


def _random_sheet(rng, ids):
    sheet = RatingSheet()
    for cid in ids:
        for dim in SCHEME.dimensions:
            sheet.set(cid, dim.name, rng.randint(0, 10))
    return sheet


def test_criterion_4a_score_monotonicity():
    rng = random.Random(41)
    for case in range(1000):
        sheet = _random_sheet(rng, ["x"])
        dim = rng.choice(SCHEME.dimensions)
        current = sheet.get("x", dim.name)
        if current == 10:
            sheet.set("x", dim.name, 9)
            current = 9
        before = score("x", sheet, SCHEME)
        sheet.set("x", dim.name, current + 1)
        after = score("x", sheet, SCHEME)
        if dim.kind == "value":
            assert after > before
        else:
            assert after < before
    _ok(4, "score strictly monotone in value and risk ratings (1000 cases)")


def test_criterion_4b_rescaling_invariance():
    rng = random.Random(42)
    exact_factors = [0.25, 0.5, 2.0, 4.0, 8.0, 16.0] + [float(i) for i in range(1, 21)]
    for case in range(1000):
        ids = [f"c{i}" for i in range(rng.randint(1, 8))]
        sheet = _random_sheet(rng, ids)
        factor = rng.choice(exact_factors)
        scaled = WeightScheme(
            tuple(Dimension(d.name, d.kind, d.weight * factor) for d in SCHEME.dimensions)
        )
        base = rank(ScoredRequirement(c, score(c, sheet, SCHEME)) for c in ids)
        re_ranked = rank(ScoredRequirement(c, score(c, sheet, scaled)) for c in ids)
        assert [r.candidate_id for r in base] == [r.candidate_id for r in re_ranked]
        assert [r.rank for r in base] == [r.rank for r in re_ranked]
        for lhs, rhs in zip(base, re_ranked):
            assert rhs.score == pytest.approx(lhs.score * factor)
    _ok(4, "full ranking invariant under positive weight rescaling (1000 cases)")


def test_criterion_4c_prune_properties():
    rng = random.Random(43)
    for case in range(1000):
        n = rng.randint(1, 12)
        ids = [f"c{i}" for i in range(n)]
        ranked = rank(
            ScoredRequirement(cid, rng.uniform(-50, 50)) for cid in ids
        )
        feasibility = {cid: rng.choice(["yes", "no"]) for cid in ids}
        relevance = {cid: rng.random() for cid in ids}
        min_score = rng.uniform(-20, 20)
        min_relevance = rng.random()
        result = prune(ranked, min_score, min_relevance, feasibility, relevance)

        final_ids = {f.candidate_id for f in result.final}
        dropped_ids = {d.candidate_id for d in result.dropped}
        assert final_ids <= set(ids)  # subset
        assert final_ids | dropped_ids == set(ids)  # partition
        assert final_ids & dropped_ids == set()

        again = prune(list(result.final), min_score, min_relevance, feasibility, relevance)
        assert {f.candidate_id for f in again.final} == final_ids  # idempotent
        assert again.dropped == ()
    _ok(4, "prune subset/partition/idempotence (1000 cases)")


def test_criterion_4d_base_priority_monotonicity():
    rng = random.Random(44)
    for case in range(1000):
        consensus = rng.randint(0, 100)
        dup = rng.randint(0, 20)
        distance = rng.random()
        base = base_priority(consensus, dup, distance)
        assert base_priority(consensus + 1, dup, distance) > base
        assert base_priority(consensus, dup + 1, distance) > base
        lower = max(distance - rng.uniform(0.01, 0.5), 0.0)
        if lower < distance:
            assert base_priority(consensus, dup, lower) > base
    _ok(4, "base priority monotone in consensus, duplicates, topic distance (1000 cases)")


# -- criterion 5: byte determinism of run-all --------------------------------------

def test_criterion_5_run_all_byte_identical(tmp_path):
    runner = CliRunner()
    digests = []
    for tag in ("first", "second"):
        out = tmp_path / f"out-{tag}"
        result = runner.invoke(
            cli_main,
            ["run-all",
             "--project", str(tmp_path / f"proj-{tag}"),
             "--export", str(CASESTUDY / "case_study_aggregate.json"),
             "--annotations", str(CASESTUDY / "annotations.json"),
             "--ratings", str(CASESTUDY / "ratings.csv"),
             "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        digests.append(
            {
                name: (out / name).read_bytes()
                for name in ("report.md", "ranked.csv", "stats.json")
            }
        )
        report = digests[-1]["report.md"].decode()
        for needle in ("33.06%", "45.22%"):
            assert needle in report
    assert digests[0] == digests[1]
    _ok(5, "run-all twice yields byte-identical report.md, ranked.csv, stats.json")


# -- criterion 6: crash safety and audit replay -------------------------------------

def test_criterion_6_crash_safety_and_replay(tmp_path, monkeypatch):
    project_dir, state = make_project(tmp_path, recompute=False)
    initial = copy.deepcopy(state)

    # injected failure between temp-write and rename: old file must survive
    before_bytes = (project_dir / "project.json").read_bytes()

    def explode(src, dst):
        raise OSError("injected failure before rename")

    monkeypatch.setattr(os, "replace", explode)
    with pytest.raises(OSError):
        save_project(state, project_dir)
    monkeypatch.undo()
    assert (project_dir / "project.json").read_bytes() == before_bytes

    from threadreq.project import load_project

    reloaded = load_project(project_dir)  # loadable, old state intact
    assert reloaded.revision == state.revision

    # 20-mutation script, then replay the audit from the initial state
    script = [
        ("recompute", {"scope": "all"}),
        ("set_rating", {"candidate_id": "p1", "ratings": {"Quality": 9}}),
        ("recompute", {"scope": "ranking_only"}),
        ("set_rating", {"candidate_id": "p2", "ratings": {"Effort Required": 2}}),
        ("set_feasibility", {"candidate_id": "p3", "feasible": "no"}),
        ("recompute", {"scope": "all"}),
        ("set_thresholds", {"min_score": 10.0}),
        ("recompute", {"scope": "ranking_only"}),
        ("set_weights", {"dimensions": [
            {"name": "Quality", "kind": "value", "weight": 7},
            {"name": "Effort Required", "kind": "value", "weight": 8},
            {"name": "User Need", "kind": "value", "weight": 5},
            {"name": "Technical", "kind": "risk", "weight": -3},
            {"name": "Business", "kind": "risk", "weight": -5},
        ]}),
        ("recompute", {"scope": "all"}),
        ("set_annotation", {"source_id": "p5", "annotation": {"is_requirement": True, "feasible": "yes"}}),
        ("recompute", {"scope": "extract"}),
        ("set_rating", {"candidate_id": "p5", "ratings": {
            "Quality": 4, "Effort Required": 4, "User Need": 4,
            "Technical": 2, "Business": 2}}),
        ("recompute", {"scope": "all"}),
        ("set_feasibility", {"candidate_id": "p1", "feasible": "yes"}),
        ("set_thresholds", {"theta_link": 0.45}),
        ("recompute", {"scope": "all"}),
        ("set_rating", {"candidate_id": "p4", "ratings": {"Business": 0}}),
        ("set_feasibility", {"candidate_id": "p4", "feasible": "no"}),
        ("recompute", {"scope": "all"}),
    ]
    assert len(script) == 20
    for action, payload in script:
        apply_mutation(state, action, payload, project_dir=project_dir)

    replayed = replay_audit(initial, state.audit[len(initial.audit):])
    assert replayed.to_dict() == state.to_dict()
    assert replayed.revision == state.revision
    _ok(6, "torn write leaves old project loadable; 20-mutation audit replays exactly")


# -- criterion 7: activity decay shape ----------------------------------------------

def test_criterion_7_decay_shape(casestudy_export):
    timeline = activity_timeline(casestudy_export)
    activity = {day: bucket.total for day, bucket in timeline.items()}
    peak = max(activity.values())

    last_significant = max(
        day for day, value in activity.items() if value >= 0.05 * peak
    )
    assert last_significant <= 4

    day7 = activity.get(7, 0)
    assert day7 <= 0.01 * peak
    _ok(7, "activity >=5% of peak ends by day 4 and is negligible at day 7")

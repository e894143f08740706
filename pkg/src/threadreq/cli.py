"""Batch entry points: the full pipeline, headless.

Subcommands follow the phase order of the method: init (preparation),
validate, extract (elicitation outputs), cluster, prioritize, report
(determination), plus serve and run-all. Every subcommand prints one
machine-readable JSON summary to stdout and exits 0 on success, 1 on
validation/pipeline failures, 2 on usage errors.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from . import __version__
from .analytics import ranked_csv, render_report, stats_json, timeline_csv
from .config import ProjectConfig, load_extract_config
from .errors import ThreadReqError
from .extract import AnnotationSet
from .ingest import parse_export, validate_capabilities
from .project import (
    PROJECT_FILENAME,
    ProjectState,
    apply_mutation,
    init_project,
    load_project,
)

ACTOR = "cli"


def _emit(summary: dict) -> None:
    click.echo(json.dumps(summary, sort_keys=True))


def _fail(exc: ThreadReqError) -> "click.exceptions.Exit":
    click.echo(
        json.dumps(
            {"code": exc.code, "message": str(exc), "details": exc.details()},
            sort_keys=True,
        ),
        err=True,
    )
    return click.exceptions.Exit(1)


def _load(project_dir: Path) -> ProjectState:
    if not (project_dir / PROJECT_FILENAME).exists():
        raise click.UsageError(
            f"no {PROJECT_FILENAME} in {project_dir}; run `threadreq init` first"
        )
    return load_project(project_dir)


def _overrides(
    theta_link: float | None,
    theta_dup: float | None,
    min_score: float | None,
    min_relevance: float | None,
) -> dict:
    flags = {
        "theta_link": theta_link,
        "theta_dup": theta_dup,
        "min_score": min_score,
        "min_relevance": min_relevance,
    }
    return {k: v for k, v in flags.items() if v is not None}


def _recompute(
    state: ProjectState, project_dir: Path, scope: str, overrides: dict
) -> dict:
    payload: dict = {"scope": scope}
    if overrides:
        payload["overrides"] = overrides
    result = apply_mutation(
        state, "recompute", payload, actor=ACTOR, project_dir=project_dir
    )
    if result.get("blocked"):
        blocked = result["blocked"]
        click.echo(json.dumps(blocked, sort_keys=True), err=True)
        raise click.exceptions.Exit(1)
    return result


def _import_annotations(state: ProjectState, project_dir: Path, path: Path) -> None:
    apply_mutation(
        state,
        "import_annotations",
        {"json": path.read_text("utf-8")},
        actor=ACTOR,
        project_dir=project_dir,
    )


def _import_ratings(state: ProjectState, project_dir: Path, path: Path) -> None:
    apply_mutation(
        state,
        "import_ratings",
        {"csv": path.read_text("utf-8")},
        actor=ACTOR,
        project_dir=project_dir,
    )


def _write_candidates(state: ProjectState, project_dir: Path) -> Path:
    out = project_dir / "candidates.json"
    out.write_text(
        json.dumps([c.to_dict() for c in state.candidates], indent=2) + "\n", "utf-8"
    )
    return out


def _write_clusters(state: ProjectState, project_dir: Path) -> Path:
    out = project_dir / "clusters.json"
    out.write_text(
        json.dumps([c.to_dict() for c in state.clusters], indent=2) + "\n", "utf-8"
    )
    return out


def _write_ranking(state: ProjectState, project_dir: Path) -> list[Path]:
    dropped = {d.candidate_id: d for d in state.dropped}
    doc = [
        {
            "candidate_id": r.candidate_id,
            "score": r.score,
            "rank": r.rank,
            "status": "dropped" if r.candidate_id in dropped else "final",
            "reason": dropped[r.candidate_id].reason if r.candidate_id in dropped else None,
        }
        for r in state.ranking
    ]
    json_path = project_dir / "ranking.json"
    json_path.write_text(json.dumps(doc, indent=2) + "\n", "utf-8")
    csv_path = project_dir / "ranked.csv"
    csv_path.write_text(ranked_csv(state.ranking, state.dropped), "utf-8")
    return [json_path, csv_path]


def _write_bundle(state: ProjectState, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    report = render_report(
        export=state.export,
        stats=state.stats,
        clusters=state.clusters,
        candidates=state.candidates,
        scheme=state.config.weights,
        sheet=state.ratings,
        pruned=state.pruned(),
        config=state.config,
    )
    files = {
        "report.md": report,
        "ranked.csv": ranked_csv(state.ranking, state.dropped),
        "stats.json": stats_json(state.stats),
        "timeline.csv": timeline_csv(state.stats.timeline),
    }
    written = []
    for name, text in files.items():
        path = out_dir / name
        path.write_text(text, "utf-8")
        written.append(path)
    return written


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Mine a discussion-room export into prioritized initial requirements."""


@main.command()
@click.option("--export", "export_file", required=True, type=click.Path(exists=True, path_type=Path))
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--config", "config_file", type=click.Path(exists=True, path_type=Path))
@click.option("--extract-config", type=click.Path(exists=True, path_type=Path))
@click.option("--annotations", type=click.Path(exists=True, path_type=Path))
@click.option("--ratings", type=click.Path(exists=True, path_type=Path))
def init(
    export_file: Path,
    project_dir: Path,
    config_file: Path | None,
    extract_config: Path | None,
    annotations: Path | None,
    ratings: Path | None,
) -> None:
    """Create a project from an export file (plus optional config/inputs)."""
    try:
        config = ProjectConfig.from_toml(config_file) if config_file else ProjectConfig()
        if extract_config:
            config = replace(config, extract=load_extract_config(extract_config))
        state = init_project(project_dir, export_file, config=config, actor=ACTOR)
        if annotations:
            _import_annotations(state, project_dir, annotations)
        if ratings:
            _import_ratings(state, project_dir, ratings)
        _emit(
            {
                "command": "init",
                "project": str(project_dir),
                "export": str(export_file),
                "participants": len(state.export.participants),
                "posts": len(state.export.posts),
                "revision": state.revision,
            }
        )
    except ThreadReqError as exc:
        raise _fail(exc) from exc


@main.command()
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--export", "export_file", type=click.Path(exists=True, path_type=Path))
def validate(project_dir: Path, export_file: Path | None) -> None:
    """Check the export against the discussion-space capability checklist."""
    try:
        if export_file is not None:
            export = parse_export(export_file.read_bytes())
        else:
            export = _load(project_dir).export
        violations = validate_capabilities(export)
        _emit(
            {
                "command": "validate",
                "ok": not violations,
                "violations": [
                    {"item": v.item, "message": v.message} for v in violations
                ],
            }
        )
        if violations:
            raise click.exceptions.Exit(1)
    except ThreadReqError as exc:
        raise _fail(exc) from exc


@main.command()
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--annotations", type=click.Path(exists=True, path_type=Path))
def extract(project_dir: Path, annotations: Path | None) -> None:
    """Extract candidate requirements from the discussion content."""
    try:
        state = _load(project_dir)
        if annotations:
            _import_annotations(state, project_dir, annotations)
        _recompute(state, project_dir, "extract", {})
        artifact = _write_candidates(state, project_dir)
        nfr = sum(1 for c in state.candidates if c.req_type == "nonfunctional")
        _emit(
            {
                "command": "extract",
                "candidates": len(state.candidates),
                "nonfunctional": nfr,
                "artifact": str(artifact),
                "revision": state.revision,
            }
        )
    except ThreadReqError as exc:
        raise _fail(exc) from exc


@main.command()
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--theta-link", type=float)
@click.option("--theta-dup", type=float)
def cluster(project_dir: Path, theta_link: float | None, theta_dup: float | None) -> None:
    """Group related candidates and measure topic distance."""
    try:
        state = _load(project_dir)
        _recompute(
            state, project_dir, "cluster", _overrides(theta_link, theta_dup, None, None)
        )
        artifact = _write_clusters(state, project_dir)
        _emit(
            {
                "command": "cluster",
                "clusters": len(state.clusters),
                "artifact": str(artifact),
                "revision": state.revision,
            }
        )
    except ThreadReqError as exc:
        raise _fail(exc) from exc


@main.command()
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--ratings", type=click.Path(exists=True, path_type=Path))
@click.option("--min-score", type=float)
@click.option("--min-relevance", type=float)
def prioritize(
    project_dir: Path,
    ratings: Path | None,
    min_score: float | None,
    min_relevance: float | None,
) -> None:
    """Score, rank, and prune candidates (requires a ratings CSV)."""
    try:
        state = _load(project_dir)
        if ratings:
            _import_ratings(state, project_dir, ratings)
        elif not state.ratings.ratings:
            raise click.UsageError("no ratings in project; pass --ratings FILE")
        _recompute(
            state,
            project_dir,
            "ranking_only",
            _overrides(None, None, min_score, min_relevance),
        )
        artifacts = _write_ranking(state, project_dir)
        _emit(
            {
                "command": "prioritize",
                "ranked": len(state.ranking),
                "final": len(state.ranking) - len(state.dropped),
                "dropped": len(state.dropped),
                "artifacts": [str(p) for p in artifacts],
                "revision": state.revision,
            }
        )
    except ThreadReqError as exc:
        raise _fail(exc) from exc


@main.command()
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path))
def report(project_dir: Path, out_dir: Path | None) -> None:
    """Render the report bundle (report.md, ranked.csv, stats.json, timeline.csv)."""
    try:
        state = _load(project_dir)
        _recompute(state, project_dir, "all", {})
        if state.stats is None:
            raise click.UsageError(
                "nothing to report: pipeline incomplete (are ratings imported?)"
            )
        files = _write_bundle(state, out_dir or project_dir / "out")
        _emit(
            {
                "command": "report",
                "out": str(out_dir or project_dir / "out"),
                "files": [p.name for p in files],
                "revision": state.revision,
            }
        )
    except ThreadReqError as exc:
        raise _fail(exc) from exc


@main.command()
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8347, type=int)
@click.option("--console", "console_dir", type=click.Path(path_type=Path))
def serve(project_dir: Path, host: str, port: int, console_dir: Path | None) -> None:
    """Run the triage HTTP service for the moderator console."""
    try:
        _load(project_dir)  # fail fast on unreadable/corrupt projects
        from .service import serve as run_service

        run_service(project_dir, host=host, port=port, console_dir=console_dir)
    except ThreadReqError as exc:
        raise _fail(exc) from exc


@main.command("run-all")
@click.option("--project", "project_dir", default=".", type=click.Path(path_type=Path))
@click.option("--export", "export_file", type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_file", type=click.Path(exists=True, path_type=Path))
@click.option("--annotations", type=click.Path(exists=True, path_type=Path))
@click.option("--ratings", type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path))
@click.option("--theta-link", type=float)
@click.option("--theta-dup", type=float)
@click.option("--min-score", type=float)
@click.option("--min-relevance", type=float)
def run_all(
    project_dir: Path,
    export_file: Path | None,
    config_file: Path | None,
    annotations: Path | None,
    ratings: Path | None,
    out_dir: Path | None,
    theta_link: float | None,
    theta_dup: float | None,
    min_score: float | None,
    min_relevance: float | None,
) -> None:
    """Initialize if needed, run every stage, and write the full bundle."""
    try:
        if (project_dir / PROJECT_FILENAME).exists():
            state = _load(project_dir)
        else:
            if export_file is None:
                raise click.UsageError("fresh project: pass --export FILE")
            config = (
                ProjectConfig.from_toml(config_file) if config_file else ProjectConfig()
            )
            state = init_project(project_dir, export_file, config=config, actor=ACTOR)
        if annotations:
            _import_annotations(state, project_dir, annotations)
        if ratings:
            _import_ratings(state, project_dir, ratings)
        if not state.ratings.ratings:
            raise click.UsageError("no ratings in project; pass --ratings FILE")

        violations = validate_capabilities(state.export)
        if violations:
            _emit(
                {
                    "command": "run-all",
                    "ok": False,
                    "violations": [
                        {"item": v.item, "message": v.message} for v in violations
                    ],
                }
            )
            raise click.exceptions.Exit(1)

        _recompute(
            state,
            project_dir,
            "all",
            _overrides(theta_link, theta_dup, min_score, min_relevance),
        )
        if state.stats is None:
            raise click.UsageError("pipeline incomplete; no stats to report")
        _write_candidates(state, project_dir)
        _write_clusters(state, project_dir)
        _write_ranking(state, project_dir)
        files = _write_bundle(state, out_dir or project_dir / "out")
        nfr = sum(1 for c in state.candidates if c.req_type == "nonfunctional")
        _emit(
            {
                "command": "run-all",
                "ok": True,
                "candidates": len(state.candidates),
                "nonfunctional": nfr,
                "clusters": len(state.clusters),
                "final": len(state.ranking) - len(state.dropped),
                "dropped": len(state.dropped),
                "out": str(out_dir or project_dir / "out"),
                "files": [p.name for p in files],
                "revision": state.revision,
            }
        )
    except ThreadReqError as exc:
        raise _fail(exc) from exc


if __name__ == "__main__":
    sys.exit(main())

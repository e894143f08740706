"""HTTP front-end for the moderator console.

One logical writer: every mutation serializes through a lock, works on a copy
of the project, persists atomically, then swaps the snapshot that readers
see. Reads never block on the writer. Derived artifacts (ranking, stats) are
served with an explicit stale flag until the moderator triggers a recompute.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .analytics import render_report
from .errors import (
    ConfigError,
    MissingRatingError,
    ProjectError,
    RevisionConflictError,
    SchemaError,
    ThreadReqError,
    UndecidedFeasibilityError,
    UnknownIdError,
)
from .pipeline import cluster_distance_by_member
from .project import ProjectState, apply_mutation, load_project, save_project

_STATUS = {
    RevisionConflictError.code: 409,
    UnknownIdError.code: 404,
    ConfigError.code: 422,
    SchemaError.code: 422,
    MissingRatingError.code: 409,
    UndecidedFeasibilityError.code: 409,
    ProjectError.code: 409,
}

PLACEHOLDER_INDEX = """<!doctype html>
<html><head><title>threadreq</title></head>
<body><h1>threadreq triage service</h1>
<p>No console bundle installed; the JSON API lives under <code>/api/v1</code>.</p>
</body></html>"""


class ProjectHolder:
    """Single-writer holder around the persistent project state."""

    def __init__(self, project_dir: Path):
        self.project_dir = project_dir
        self._lock = threading.Lock()
        self._state = load_project(project_dir)

    @property
    def state(self) -> ProjectState:
        return self._state

    def mutate(
        self,
        action: str,
        payload: dict,
        actor: str,
        expected_revision: int | None,
    ) -> dict:
        with self._lock:
            working = self._clone(self._state)
            result = apply_mutation(
                working,
                action,
                payload,
                actor=actor,
                expected_revision=expected_revision,
            )
            save_project(working, self.project_dir)
            self._state = working
            return result

    @staticmethod
    def _clone(state: ProjectState) -> ProjectState:
        clone = ProjectState.from_dict(state.to_dict())
        clone.export = state.export
        return clone


def _error_response(exc: ThreadReqError) -> JSONResponse:
    return JSONResponse(
        status_code=_STATUS.get(exc.code, 422),
        content={"code": exc.code, "message": str(exc), "details": exc.details()},
    )


def create_app(project_dir: str | Path, console_dir: str | Path | None = None) -> FastAPI:
    holder = ProjectHolder(Path(project_dir))
    app = FastAPI(title="threadreq triage service", version=__version__)
    app.state.holder = holder

    @app.exception_handler(ThreadReqError)
    async def _handle_domain_error(_req: Request, exc: ThreadReqError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def _handle_validation(_req: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "schema_error",
                "message": "request body failed validation",
                "details": [
                    {"path": ".".join(str(p) for p in err["loc"]), "error": err["msg"]}
                    for err in exc.errors()
                ],
            },
        )

    api = "/api/v1"

    def _actor(request: Request) -> str:
        return request.headers.get("x-actor", "moderator")

    # -- reads --------------------------------------------------------------

    @app.get(api + "/project")
    def get_project() -> dict:
        s = holder.state
        return {
            "revision": s.revision,
            "version": s.version,
            "export": {"path": s.export_path, "sha256": s.export_sha256},
            "topic_statement": s.export.topic_statement if s.export else None,
            "room_title": s.export.room_title if s.export else None,
            "config": s.config.to_dict(),
            "stale": dict(s.stale),
            "artifact_hashes": dict(s.artifact_hashes),
            "counts": {
                "participants": len(s.export.participants) if s.export else 0,
                "posts": len(s.export.posts) if s.export else 0,
                "candidates": len(s.candidates),
                "clusters": len(s.clusters),
                "ratings": len(s.ratings.ratings),
            },
        }

    @app.get(api + "/candidates")
    def get_candidates() -> dict:
        s = holder.state
        distance = cluster_distance_by_member(s.clusters)
        return {
            "revision": s.revision,
            "stale": s.stale["candidates"],
            "candidates": [
                {
                    **c.to_dict(),
                    "base_priority": s.base_priorities.get(c.id),
                    "topic_distance": distance.get(c.id),
                }
                for c in s.candidates
            ],
        }

    @app.get(api + "/clusters")
    def get_clusters() -> dict:
        s = holder.state
        return {
            "revision": s.revision,
            "stale": s.stale["clusters"] or s.stale["candidates"],
            "clusters": [c.to_dict() for c in s.clusters],
        }

    @app.get(api + "/config/weights")
    def get_weights() -> dict:
        s = holder.state
        return {
            "revision": s.revision,
            "dimensions": [
                {"name": d.name, "kind": d.kind, "weight": d.weight}
                for d in s.config.weights.dimensions
            ],
        }

    @app.get(api + "/config/thresholds")
    def get_thresholds() -> dict:
        s = holder.state
        return {
            "revision": s.revision,
            "theta_link": s.config.cluster.theta_link,
            "theta_dup": s.config.cluster.theta_dup,
            "min_score": s.config.prune.min_score,
            "min_relevance": s.config.prune.min_relevance,
        }

    @app.get(api + "/ratings/{candidate_id}")
    def get_ratings(candidate_id: str) -> dict:
        s = holder.state
        s.candidate(candidate_id)  # 404 on unknown id
        return {
            "revision": s.revision,
            "candidate_id": candidate_id,
            "ratings": s.ratings.row(candidate_id),
        }

    @app.get(api + "/ranking")
    def get_ranking() -> dict:
        s = holder.state
        dropped = {d.candidate_id: d for d in s.dropped}
        computed = bool(s.ranking) or not s.stale["ranking"]
        return {
            "revision": s.revision,
            "stale": s.ranking_is_stale(),
            "thresholds": {
                "min_score": s.config.prune.min_score,
                "min_relevance": s.config.prune.min_relevance,
            },
            "ranking": [
                {
                    "candidate_id": r.candidate_id,
                    "score": r.score,
                    "rank": r.rank,
                    "status": "dropped" if r.candidate_id in dropped else "final",
                    "reason": dropped[r.candidate_id].reason
                    if r.candidate_id in dropped
                    else None,
                }
                for r in s.ranking
            ]
            if computed
            else None,
        }

    @app.get(api + "/stats")
    def get_stats() -> dict:
        s = holder.state
        return {
            "revision": s.revision,
            "stale": s.stats_are_stale(),
            "stats": s.stats.to_dict() if s.stats else None,
        }

    @app.get(api + "/report.md")
    def get_report() -> Response:
        s = holder.state
        if s.stats is None or s.export is None:
            raise ProjectError("no computed report yet; run a recompute first")
        text = render_report(
            export=s.export,
            stats=s.stats,
            clusters=s.clusters,
            candidates=s.candidates,
            scheme=s.config.weights,
            sheet=s.ratings,
            pruned=s.pruned(),
            config=s.config,
        )
        if s.stats_are_stale():
            text = "<!-- stale: derived artifacts predate the latest mutation -->\n" + text
        return Response(content=text, media_type="text/markdown; charset=utf-8")

    @app.get(api + "/audit")
    def get_audit() -> dict:
        s = holder.state
        return {
            "revision": s.revision,
            "entries": [e.to_dict() for e in s.audit],
        }

    # -- mutations ------------------------------------------------------------

    def _run(
        request: Request, action: str, payload: dict, revision: int | None
    ) -> dict:
        result = holder.mutate(action, payload, _actor(request), revision)
        return result

    @app.put(api + "/config/weights")
    async def put_weights(request: Request) -> Any:
        body = await request.json()
        return _run(
            request,
            "set_weights",
            {"dimensions": body["dimensions"]},
            body.get("revision"),
        )

    @app.put(api + "/config/thresholds")
    async def put_thresholds(request: Request) -> Any:
        body = await request.json()
        payload = {
            k: body[k]
            for k in ("theta_link", "theta_dup", "min_score", "min_relevance")
            if k in body
        }
        return _run(request, "set_thresholds", payload, body.get("revision"))

    @app.patch(api + "/candidates/{candidate_id}")
    async def patch_candidate(candidate_id: str, request: Request) -> Any:
        body = await request.json()
        revision = body.get("revision")
        result: dict = {}
        if "feasible" in body:
            result = _run(
                request,
                "set_feasibility",
                {"candidate_id": candidate_id, "feasible": body["feasible"]},
                revision,
            )
            revision = None  # chained mutation continues from the new revision
        if "req_type" in body:
            s = holder.state
            cand = s.candidate(candidate_id)
            prior = s.annotations.overrides.get(cand.id)
            annotation = {
                "is_requirement": prior.is_requirement if prior else None,
                "statement_rewrite": prior.statement_rewrite if prior else None,
                "consensus_override": prior.consensus_override if prior else None,
                "feasible": prior.feasible if prior else None,
                "req_type": body["req_type"],
            }
            annotation = {k: v for k, v in annotation.items() if v is not None}
            result = _run(
                request,
                "set_annotation",
                {"source_id": cand.id, "annotation": annotation},
                revision,
            )
        if not result:
            raise ConfigError("PATCH body must set feasible and/or req_type")
        return result

    @app.put(api + "/ratings/{candidate_id}")
    async def put_ratings(candidate_id: str, request: Request) -> Any:
        body = await request.json()
        return _run(
            request,
            "set_rating",
            {"candidate_id": candidate_id, "ratings": body["ratings"]},
            body.get("revision"),
        )

    @app.post(api + "/clusters/merge")
    async def merge_clusters(request: Request) -> Any:
        body = await request.json()
        return _run(
            request,
            "merge_clusters",
            {"cluster_ids": body["cluster_ids"]},
            body.get("revision"),
        )

    @app.post(api + "/clusters/{cluster_id}/split")
    async def split_cluster(cluster_id: str, request: Request) -> Any:
        body = await request.json()
        return _run(
            request,
            "split_cluster",
            {"cluster_id": cluster_id, "member_ids": body["member_ids"]},
            body.get("revision"),
        )

    @app.post(api + "/recompute")
    async def recompute_endpoint(request: Request) -> Any:
        body = await request.json() if await request.body() else {}
        result = _run(
            request,
            "recompute",
            {"scope": body.get("scope", "all")},
            body.get("revision"),
        )
        if result.get("blocked"):
            blocked = result["blocked"]
            return JSONResponse(
                status_code=409,
                content={
                    "code": blocked["code"],
                    "message": blocked["message"],
                    "details": blocked["details"],
                    "revision": result["revision"],
                    "ran": result.get("ran", []),
                },
            )
        return result

    # -- console bundle ---------------------------------------------------------

    if console_dir is not None and Path(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=console_dir, html=True), name="console")
    else:

        @app.get("/")
        def index() -> Response:
            return Response(content=PLACEHOLDER_INDEX, media_type="text/html")

    return app


def serve(
    project_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 8347,
    console_dir: str | Path | None = None,
) -> None:
    """Run the triage service until interrupted."""
    import uvicorn

    app = create_app(project_dir, console_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")

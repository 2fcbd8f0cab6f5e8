"""HTTP API over a run directory, for review tooling.

The API is read-mostly: review clients page through sets and post
decisions. Every error body has the same shape::

    {"status": 409, "code": "conflict", "message": "..."}

so clients can branch on ``code`` without parsing prose. A decision may
carry the run id it was prepared against; when the directory has moved on,
the server answers 409 and the client is expected to reload its queue.
"""

from __future__ import annotations

import logging
from typing import Any

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import (
    NotFoundError,
    StageOrderError,
    StaleRunError,
    ValidationError,
)
from .model import ProfileRef, Provenance, RepositoryProfile, SetStatus
from .store import STAGE_ORDER, RunStore, SetView

log = logging.getLogger(__name__)


class DecisionBody(BaseModel):
    action: str
    members: list[str] | None = None
    note: str | None = None
    decidedBy: str | None = None
    runId: str | None = None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"status": status, "code": code, "message": message},
    )


class _ProfileCache:
    """Profiles keyed by the run id, reloaded when the run changes."""

    def __init__(self, store: RunStore):
        self.store = store
        self.run_id: str | None = None
        self.profiles: dict[ProfileRef, RepositoryProfile] = {}

    def get(self) -> dict[ProfileRef, RepositoryProfile]:
        current = self.store.run_id()
        if current != self.run_id:
            self.profiles = self.store.profiles_by_ref()
            self.run_id = current
        return self.profiles


_STATUS_VALUES = {s.value for s in SetStatus}
_PROVENANCE_VALUES = {p.value for p in Provenance}
_KIND_VALUES = {"set", "problematic"}


def _parse_filter(name: str, raw: str, allowed: set[str]) -> set[str]:
    """Split a comma-separated filter and reject unknown values.

    Query strings tend to arrive with underscores where the canonical
    values use hyphens (``needs_review``), so both spellings are taken.
    """
    values = {part.strip().replace("_", "-") for part in raw.split(",")}
    values.discard("")
    unknown = values - allowed
    if unknown:
        raise ValidationError(
            f"unknown {name} value {sorted(unknown)[0]!r}; "
            f"expected one of {sorted(allowed)}"
        )
    return values


def _member_doc(
    ref: ProfileRef,
    profiles: dict[ProfileRef, RepositoryProfile],
    detail: bool = False,
) -> dict[str, Any]:
    profile = profiles.get(ref)
    doc = {
        "id": ref.canonical(),
        "registry": ref.registry.value,
        "name": profile.name if profile else None,
        "url": profile.homepage_url if profile else None,
        "missing": profile is None,
    }
    if detail:
        doc["claims"] = [c.canonical() for c in profile.claims] if profile else []
    return doc


def _set_doc(
    view: SetView, profiles: dict[ProfileRef, RepositoryProfile], detail: bool = False
) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "id": view.id,
        "kind": view.kind,
        "provenance": view.provenance,
        "status": view.status,
        "members": [_member_doc(m, profiles, detail=detail) for m in view.members],
        "reason": view.reason,
        "note": view.note,
    }
    if detail:
        doc["history"] = list(view.history)
        doc["decision"] = view.decision
    return doc


def create_app(run_dir: str | RunStore, allow_origins: list[str] | None = None) -> FastAPI:
    """Build the FastAPI application bound to one run directory."""
    store = run_dir if isinstance(run_dir, RunStore) else RunStore(run_dir)
    app = FastAPI(title="regdedup review API", version="0.1.0")
    cache = _ProfileCache(store)

    if allow_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=allow_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error(404, "not_found", str(exc.args[0]) if exc.args else str(exc))

    @app.exception_handler(ValidationError)
    async def _validation(request: Request, exc: ValidationError):
        return _error(400, "validation", str(exc))

    @app.exception_handler(StaleRunError)
    async def _stale(request: Request, exc: StaleRunError):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(StageOrderError)
    async def _stage(request: Request, exc: StageOrderError):
        return _error(409, "stage_order", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _body(request: Request, exc: RequestValidationError):
        return _error(400, "validation", str(exc))

    @app.get("/api/run")
    def run_info() -> dict:
        return {
            "runId": store.run_id(),
            "stages": {stage: store.stage_done(stage) for stage in STAGE_ORDER},
        }

    @app.get("/api/sets")
    def list_sets(
        status: str | None = None,
        kind: str | None = None,
        provenance: str | None = None,
        minSize: int | None = Query(None, ge=1),
        q: str | None = None,
        page: int = Query(1, ge=1),
        pageSize: int = Query(50, ge=1, le=500),
    ) -> dict:
        views = store.current_view()
        if status:
            wanted = _parse_filter("status", status, _STATUS_VALUES)
            views = [v for v in views if v.status in wanted]
        if kind:
            wanted = _parse_filter("kind", kind, _KIND_VALUES)
            views = [v for v in views if v.kind in wanted]
        if provenance:
            wanted = _parse_filter("provenance", provenance, _PROVENANCE_VALUES)
            views = [v for v in views if v.provenance in wanted]
        if minSize is not None:
            views = [v for v in views if len(v.members) >= minSize]
        profiles = cache.get()
        if q:
            needle = q.lower()

            def hit(v: SetView) -> bool:
                if needle in v.id.lower():
                    return True
                for m in v.members:
                    if needle in m.canonical().lower():
                        return True
                    profile = profiles.get(m)
                    if profile and needle in profile.name.lower():
                        return True
                return False

            views = [v for v in views if hit(v)]
        total = len(views)
        start = (page - 1) * pageSize
        items = views[start : start + pageSize]
        return {
            "items": [_set_doc(v, profiles) for v in items],
            "page": page,
            "pageSize": pageSize,
            "total": total,
            "runId": store.run_id(),
        }

    @app.get("/api/sets/{set_id}")
    def get_set(set_id: str) -> dict:
        view = store.get_view(set_id)
        doc = _set_doc(view, cache.get(), detail=True)
        doc["runId"] = store.run_id()
        return doc

    @app.post("/api/sets/{set_id}/decision")
    def post_decision(set_id: str, body: DecisionBody) -> dict:
        record = store.append_decision(
            set_id,
            body.action,
            members=body.members,
            note=body.note,
            decided_by=body.decidedBy,
            expected_run_id=body.runId,
        )
        view = store.get_view(set_id)
        doc = _set_doc(view, cache.get(), detail=True)
        doc["runId"] = store.run_id()
        return {"decision": record, "set": doc}

    @app.get("/api/stats")
    def stats() -> dict:
        store.require_stage("merge")
        return store.stats()

    return app

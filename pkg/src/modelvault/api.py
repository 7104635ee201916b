"""HTTP service over the vault: JSON resources under ``/api/v1``.

Model payloads travel as exchange XML (``application/xml``); everything
else is JSON. Errors use one envelope::

    {"error": {"code": "<stable tag>", "message": "...", "detail": ...}}

with codes from the closed set VALIDATION, AUTH, NOT_FOUND,
ILLEGAL_TRANSITION, CYCLE, CONFLICT, STORAGE. Every route requires a
bearer token from the vault's user file.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import discovery, lifecycle
from .access import User
from .errors import (
    InvalidToken,
    LibraryError,
    NotFound,
    UnknownUser,
    ValidationError,
)
from .exchange import parse_model, serialize_model
from .metrics import complexity_score, connectivity_score, decomposition_advice
from .records import (
    CompositeRelation,
    Condition,
    EntryCore,
    EntryMaster,
    EntryVersion,
    LifecycleState,
    Notification,
    OptionalInfo,
    RelationKind,
)
from .vault import Vault

XML = "application/xml"

_STATUS_BY_CODE = {
    "VALIDATION": 400,
    "AUTH": 403,
    "NOT_FOUND": 404,
    "ILLEGAL_TRANSITION": 409,
    "CYCLE": 409,
    "CONFLICT": 409,
    "STORAGE": 500,
}


def _http_status(exc: LibraryError) -> int:
    if isinstance(exc, (InvalidToken, UnknownUser)):
        return 401
    return _STATUS_BY_CODE.get(exc.code, 500)


def _envelope(exc: LibraryError) -> dict[str, Any]:
    return {"error": {"code": exc.code, "message": exc.message, "detail": exc.detail}}


# -- payload builders ---------------------------------------------------------


def _status_payload(version: EntryVersion) -> dict[str, Any]:
    status = version.status
    return {
        "state": status.state.value,
        "changed_at": status.changed_at.isoformat(),
        "check_required": status.check_required,
        "check_reason": status.check_reason.to_dict() if status.check_reason else None,
    }


def _version_payload(version: EntryVersion) -> dict[str, Any]:
    connectivity = None
    if version.connectivity is not None:
        connectivity = {
            "mean_degree": [
                version.connectivity.mean_degree.numerator,
                version.connectivity.mean_degree.denominator,
            ],
            "mean_degree_display": version.connectivity.display(),
            "rating": version.connectivity.rating.value,
        }
    complexity = None
    if version.complexity is not None:
        complexity = {
            "component_count": version.complexity.component_count,
            "rating": version.complexity.rating.value,
        }
    return {
        "version_number": version.version_number,
        "created_at": version.created_at.isoformat(),
        "status": _status_payload(version),
        "has_model": version.model is not None,
        "complexity": complexity,
        "connectivity": connectivity,
        "relations": [r.to_dict() for r in version.relations],
        "optional_info": version.optional_info.to_dict(),
        "conditions": [c.to_dict() for c in version.conditions],
        "predecessor": version.predecessor,
        "feedback_count": len(version.feedback),
    }


def _master_payload(master: EntryMaster, detail: bool = False) -> dict[str, Any]:
    payload = master.to_dict()
    if detail:
        payload["variants"] = [
            {
                "variant_id": variant.variant_id,
                "origin": list(variant.origin) if variant.origin else None,
                "versions": [_version_payload(v) for v in variant.versions],
            }
            for variant in (master.variants[name] for name in sorted(master.variants))
        ]
    return payload


def _metrics_payload(model) -> dict[str, Any]:
    complexity = complexity_score(model)
    connectivity = connectivity_score(model) if model.elements else None
    advice = decomposition_advice(complexity, connectivity)
    return {
        "component_count": complexity.component_count,
        "complexity": complexity.rating.value,
        "mean_degree": None
        if connectivity is None
        else [connectivity.mean_degree.numerator, connectivity.mean_degree.denominator],
        "mean_degree_display": None if connectivity is None else connectivity.display(),
        "connectivity": None if connectivity is None else connectivity.rating.value,
        "advice": {"subdivide": advice.subdivide, "reason": advice.reason},
    }


def _notification_payload(notification: Notification) -> dict[str, Any]:
    return notification.to_dict()


def _parse_state(value: str | None) -> LifecycleState | None:
    if value is None:
        return None
    try:
        return LifecycleState(value)
    except ValueError:
        raise ValidationError(
            f"unknown state {value!r}; expected one of "
            f"{[s.value for s in LifecycleState]}"
        ) from None


def _parse_relations(raw: list[dict[str, Any]]) -> list[CompositeRelation]:
    relations = []
    for item in raw:
        try:
            kind = RelationKind(item.get("kind", ""))
        except ValueError:
            raise ValidationError(
                f"relation kind must be Link or Replace, got {item.get('kind')!r}"
            ) from None
        relations.append(
            CompositeRelation(
                relation_kind=kind,
                target_entry=item.get("entry", ""),
                target_variant=item.get("variant", ""),
                target_version=int(item.get("version") or 0),
                placeholder=item.get("placeholder"),
            )
        )
    return relations


# -- application factory ------------------------------------------------------


def create_app(
    vault: Vault,
    allow_origins: list[str] | None = None,
    static_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="modelvault", docs_url=None, redoc_url=None, openapi_url=None)

    if allow_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=allow_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(LibraryError)
    def _library_error(_request: Request, exc: LibraryError) -> JSONResponse:
        return JSONResponse(status_code=_http_status(exc), content=_envelope(exc))

    def current_user(request: Request) -> User:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise InvalidToken("missing bearer token")
        return vault.access.authenticate(header[7:].strip())

    @app.get("/api/v1/me")
    def me(user: User = Depends(current_user)) -> dict[str, Any]:
        return {"user_id": user.user_id, "display_name": user.display_name, "role": user.role.value}

    # -- entries ---------------------------------------------------------------

    @app.get("/api/v1/entries")
    def list_entries(
        category: str | None = None,
        layer: str | None = None,
        state: str | None = None,
        offset: int = Query(0, ge=0),
        limit: int = Query(50, ge=1, le=500),
        user: User = Depends(current_user),
    ) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        masters = vault.list_entries(category=category, layer=layer, state=_parse_state(state))
        return {
            "total": len(masters),
            "items": [_master_payload(m) for m in masters[offset : offset + limit]],
        }

    @app.post("/api/v1/entries", status_code=201)
    async def create_entry(request: Request, user: User = Depends(current_user)) -> dict[str, Any]:
        body = await request.json()
        core = EntryCore(
            title=body.get("title", ""),
            category=body.get("category", ""),
            kind=body.get("kind", ""),
            layer=body.get("layer", ""),
            abstract=body.get("abstract", ""),
            keywords=set(body.get("keywords", [])),
            responsible_authors=set(body.get("authors") or [user.user_id]),
        )
        model_text = body.get("model")
        model = parse_model(model_text.encode("utf-8")) if model_text else None
        if body.get("composite") or body.get("relations"):
            relations = _parse_relations(body.get("relations", []))
            master = vault.create_composite(core, relations, model, actor=user.user_id)
        else:
            if model is None:
                raise ValidationError("a model document is required for a regular entry")
            master = vault.create_entry(core, model, actor=user.user_id)
        return _master_payload(master, detail=True)

    @app.get("/api/v1/entries/{entry_id}")
    def get_entry(entry_id: str, user: User = Depends(current_user)) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        return _master_payload(vault.get_entry(entry_id), detail=True)

    @app.post("/api/v1/entries/{entry_id}/variants", status_code=201)
    async def create_variant(
        entry_id: str, request: Request, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        body = await request.json()
        variant = vault.new_variant(
            entry_id,
            name=body.get("name", ""),
            from_variant=body.get("from_variant", "main"),
            from_version=int(body.get("from_version") or 0),
            actor=user.user_id,
        )
        return {
            "variant_id": variant.variant_id,
            "origin": list(variant.origin) if variant.origin else None,
            "versions": [_version_payload(v) for v in variant.versions],
        }

    @app.post("/api/v1/entries/{entry_id}/variants/{variant_id}/versions", status_code=201)
    async def create_version(
        entry_id: str, variant_id: str, request: Request, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        body = await request.json() if await request.body() else {}
        model_text = body.get("model")
        model = parse_model(model_text.encode("utf-8")) if model_text else None
        version = vault.new_version(entry_id, variant_id, model, actor=user.user_id)
        return _version_payload(version)

    @app.get("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}")
    def get_version(
        entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        return _version_payload(vault.get_version(entry_id, variant_id, number))

    # -- model payloads --------------------------------------------------------

    @app.get("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/model")
    def get_model(
        entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
    ) -> Response:
        vault.access.require(user.user_id, "read")
        version = vault.get_version(entry_id, variant_id, number)
        if version.model is None:
            raise NotFound(
                f"version {entry_id}/{variant_id}/{number} carries no inline model"
            )
        return Response(content=serialize_model(version.model), media_type=XML)

    @app.put("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/model")
    async def put_model(
        entry_id: str,
        variant_id: str,
        number: int,
        request: Request,
        user: User = Depends(current_user),
    ) -> dict[str, Any]:
        model = parse_model(await request.body())
        version = vault.update_draft(
            entry_id, variant_id, number, actor=user.user_id, model=model
        )
        return _version_payload(version)

    @app.put("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/draft")
    async def put_draft_fields(
        entry_id: str,
        variant_id: str,
        number: int,
        request: Request,
        user: User = Depends(current_user),
    ) -> dict[str, Any]:
        body = await request.json()
        kwargs: dict[str, Any] = {}
        if "relations" in body:
            kwargs["relations"] = _parse_relations(body["relations"])
        if "optional_info" in body:
            kwargs["optional_info"] = OptionalInfo.from_dict(body["optional_info"])
        if "conditions" in body:
            kwargs["conditions"] = [Condition.from_dict(c) for c in body["conditions"]]
        version = vault.update_draft(
            entry_id, variant_id, number, actor=user.user_id, **kwargs
        )
        return _version_payload(version)

    @app.get("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/resolved")
    def get_resolved(
        entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
    ) -> Response:
        vault.access.require(user.user_id, "read")
        resolved = vault.resolve_composite(entry_id, variant_id, number)
        return Response(content=serialize_model(resolved), media_type=XML)

    # -- metrics ---------------------------------------------------------------

    @app.get("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/metrics")
    def version_metrics(
        entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        version = vault.get_version(entry_id, variant_id, number)
        if version.model is None:
            raise NotFound(f"version {entry_id}/{variant_id}/{number} carries no inline model")
        return _metrics_payload(version.model)

    @app.post("/api/v1/metrics")
    async def uploaded_metrics(
        request: Request, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        return _metrics_payload(parse_model(await request.body()))

    # -- lifecycle -------------------------------------------------------------

    def _transition_route(action: str):
        async def handler(
            entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
        ) -> dict[str, Any]:
            status = lifecycle.transition(
                vault, entry_id, variant_id, number, action, actor=user.user_id
            )
            return _status_payload(vault.get_version(entry_id, variant_id, number)) | {
                "state": status.state.value
            }

        handler.__name__ = f"transition_{action}"
        return handler

    for _action in lifecycle.ACTIONS:
        app.post(
            "/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/" + _action
        )(_transition_route(_action))

    @app.get("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/actions")
    def version_actions(
        entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        return lifecycle.allowed_actions(vault, entry_id, variant_id, number, user.user_id)

    @app.post("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/acknowledge")
    def acknowledge(
        entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        status = lifecycle.acknowledge_check(
            vault, entry_id, variant_id, number, actor=user.user_id
        )
        version = vault.get_version(entry_id, variant_id, number)
        return _status_payload(version) | {"state": status.state.value}

    # -- feedback ---------------------------------------------------------------

    @app.get("/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/feedback")
    def list_feedback(
        entry_id: str, variant_id: str, number: int, user: User = Depends(current_user)
    ) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        version = vault.get_version(entry_id, variant_id, number)
        return {"items": [f.to_dict() for f in version.feedback]}

    @app.post(
        "/api/v1/entries/{entry_id}/variants/{variant_id}/versions/{number}/feedback",
        status_code=201,
    )
    async def post_feedback(
        entry_id: str,
        variant_id: str,
        number: int,
        request: Request,
        user: User = Depends(current_user),
    ) -> dict[str, Any]:
        body = await request.json()
        comment = lifecycle.add_feedback(
            vault, entry_id, variant_id, number, text=body.get("text", ""), actor=user.user_id
        )
        return comment.to_dict()

    # -- discovery ---------------------------------------------------------------

    @app.get("/api/v1/search")
    def search(
        term: list[str] = Query(default=[]),
        category: str | None = None,
        layer: str | None = None,
        state: str | None = None,
        keyword: list[str] = Query(default=[]),
        offset: int = Query(0, ge=0),
        limit: int = Query(50, ge=1, le=500),
        user: User = Depends(current_user),
    ) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        query = discovery.SearchQuery(
            terms=term,
            category=category,
            layer=layer,
            state=_parse_state(state),
            keywords=keyword,
        )
        hits = discovery.search(vault, query)
        items = [
            {"entry": _master_payload(vault.entries[entry_id]), "score": score}
            for entry_id, score in hits[offset : offset + limit]
        ]
        return {"total": len(hits), "items": items}

    @app.get("/api/v1/grid")
    def grid(user: User = Depends(current_user)) -> dict[str, Any]:
        vault.access.require(user.user_id, "read")
        return discovery.overview_grid(vault).to_dict()

    # -- notifications ------------------------------------------------------------

    @app.get("/api/v1/notifications")
    def notifications(user: User = Depends(current_user)) -> dict[str, Any]:
        items = lifecycle.list_notifications(vault, user.user_id)
        return {"items": [_notification_payload(n) for n in items]}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

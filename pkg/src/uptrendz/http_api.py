"""HTTP+JSON control and data planes.

Control plane:
    POST /domains                           create a system domain
    GET  /domains                           list domains
    GET  /domains/{d}                       full configuration readback
    POST /domains/{d}/entity-types          define an entity schema
    POST /domains/{d}/interaction-types     define an interaction type
    POST /domains/{d}/scenarios             create a recommendation scenario

Data plane:
    PUT  /domains/{d}/catalog/{etype}/{id}  upsert an entity
    GET  /domains/{d}/catalog/{etype}/{id}  read an entity back
    POST /domains/{d}/interactions          record an interaction event

Recommendations:
    GET  /domains/{d}/scenarios/{s}/recommendations?userId=&sessionId=&itemId=&k=

Errors are JSON ``{"error", "code", "detail"}``. Data-plane and
recommendation requests run on the domain's bounded worker pool; a full
queue returns 429 for that domain only.
"""

from __future__ import annotations

import argparse
import asyncio
import logging
import os
from pathlib import Path
from typing import Optional

from fastapi import Body, FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import errors
from .gateway import RecommendationRequest
from .model import (
    AttributeKind,
    AttributeSpec,
    EntityKind,
    InteractionTypeConfig,
    ScenarioConfig,
    registered_actor,
    session_actor,
)
from .service import UptrendzService
from .store import EntityRecord, InteractionEvent

log = logging.getLogger(__name__)

_STATUS_BY_CODE = {
    "UnknownDomain": 404,
    "UnknownEntityType": 404,
    "UnknownInteractionType": 404,
    "UnknownScenario": 404,
    "UnknownEntity": 404,
    "UnknownTarget": 404,
    "DuplicateName": 409,
    "DuplicateEntityType": 409,
    "DuplicateInteractionType": 409,
    "DuplicateScenario": 409,
    "PayloadTooLarge": 413,
    "Busy": 429,
    "EngineError": 500,
    "CorruptLog": 500,
}


def _error_response(exc: errors.UptrendzError) -> JSONResponse:
    status = _STATUS_BY_CODE.get(exc.code, 400)
    return JSONResponse(
        status_code=status,
        content={"error": str(exc), "code": exc.code, "detail": exc.detail},
    )


def _parse_enum(enum_cls, raw, field: str):
    try:
        return enum_cls(raw)
    except ValueError:
        valid = ", ".join(e.value for e in enum_cls)
        raise errors.InvalidScenario(f"{field} must be one of: {valid}") from None


def _require(body: dict, field: str):
    if field not in body:
        raise errors.InvalidScenario(f"missing required field {field!r}")
    return body[field]


def create_app(service: UptrendzService) -> FastAPI:
    app = FastAPI(title="uptrendz", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.service = service
    app.add_middleware(
        CORSMiddleware,
        allow_origins=os.environ.get("UPTRENDZ_CORS_ORIGINS", "*").split(","),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(errors.UptrendzError)
    async def _handle_platform_error(request: Request, exc: errors.UptrendzError):
        return _error_response(exc)

    async def _pooled(domain_id: str, fn, *args):
        future = service.gateway.pool(domain_id).submit(fn, *args)
        return await asyncio.wrap_future(future)

    # --- liveness ---------------------------------------------------------

    @app.get("/health")
    async def health():
        return {"status": "ok", "domains": len(service.registry.domain_ids())}

    # --- control plane -----------------------------------------------------

    @app.post("/domains", status_code=201)
    async def create_domain(body: dict = Body(...)):
        domain = service.create_system_domain(_require(body, "name"))
        return domain.to_dict()

    @app.get("/domains")
    async def list_domains():
        return {
            "domains": [
                service.registry.get(d).domain.to_dict() for d in service.registry.domain_ids()
            ]
        }

    @app.get("/domains/{domain_id}")
    async def read_domain(domain_id: str):
        return service.domain_document(domain_id)

    @app.post("/domains/{domain_id}/entity-types", status_code=201)
    async def define_entity_type(domain_id: str, body: dict = Body(...)):
        attributes = [
            AttributeSpec(
                name=_require(a, "name"),
                kind=_parse_enum(AttributeKind, _require(a, "kind"), "attribute kind"),
                required=bool(a.get("required", False)),
            )
            for a in _require(body, "attributes")
        ]
        schema = service.define_entity_schema(
            domain_id,
            _parse_enum(EntityKind, _require(body, "kind"), "kind"),
            _require(body, "name"),
            attributes,
        )
        return schema.to_dict()

    @app.post("/domains/{domain_id}/interaction-types", status_code=201)
    async def define_interaction_type(domain_id: str, body: dict = Body(...)):
        config = InteractionTypeConfig.from_dict({**body, "domain_id": domain_id})
        return service.define_interaction_type(domain_id, config).to_dict()

    @app.post("/domains/{domain_id}/scenarios", status_code=201)
    async def create_scenario(domain_id: str, body: dict = Body(...)):
        config = ScenarioConfig.from_dict(
            {
                **body,
                "domain_id": domain_id,
                "scenario_id": body.get("scenario_id") or body.get("name", ""),
            }
        )
        return service.create_scenario(domain_id, config).to_dict()

    # --- data plane -----------------------------------------------------------

    @app.put("/domains/{domain_id}/catalog/{entity_type_id}/{entity_id}")
    async def upsert_entity(
        domain_id: str, entity_type_id: str, entity_id: str, body: dict = Body(...)
    ):
        record = EntityRecord(entity_id=entity_id, values=_require(body, "values"))
        ack = await _pooled(domain_id, service.upsert_entity, domain_id, entity_type_id, record)
        return {"entity_id": ack.entity_id, "sequence": ack.sequence}

    @app.get("/domains/{domain_id}/catalog/{entity_type_id}/{entity_id}")
    async def read_entity(domain_id: str, entity_type_id: str, entity_id: str):
        values = service.get_entity(domain_id, entity_type_id, entity_id)
        return {"entity_id": entity_id, "entity_type": entity_type_id, "values": values}

    @app.post("/domains/{domain_id}/interactions", status_code=201)
    async def record_interaction(domain_id: str, body: dict = Body(...)):
        user_id = body.get("user_id")
        session_id = body.get("session_id")
        if bool(user_id) == bool(session_id):
            raise errors.ActorModeViolation("exactly one of user_id or session_id required")
        actor = registered_actor(user_id) if user_id else session_actor(session_id)
        event = InteractionEvent(
            domain_id=domain_id,
            interaction_type=_require(body, "type"),
            actor=actor,
            target_id=_require(body, "target_id"),
            value=body.get("value"),
            timestamp=body.get("timestamp"),
        )
        ack = await _pooled(domain_id, service.record_interaction, domain_id, event)
        return {"sequence": ack.sequence}

    # --- recommendations ---------------------------------------------------------

    @app.get("/domains/{domain_id}/scenarios/{scenario_id}/recommendations")
    async def recommend(
        domain_id: str,
        scenario_id: str,
        userId: Optional[str] = Query(default=None),
        sessionId: Optional[str] = Query(default=None),
        itemId: Optional[str] = Query(default=None),
        k: Optional[int] = Query(default=None),
    ):
        request = RecommendationRequest(
            domain_id=domain_id,
            scenario_id=scenario_id,
            user_id=userId,
            session_id=sessionId,
            context_item_id=itemId,
            k=k,
        )
        response = await _pooled(domain_id, service.gateway.serve, request)
        return response.to_dict()

    return app


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="uptrendz-serve", description="Run the recommendation service."
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--data-dir", type=Path, default=Path("./uptrendz-data"))
    parser.add_argument(
        "--config", type=Path, default=None, help="declarative config document to load at startup"
    )
    parser.add_argument("--workers-per-domain", type=int, default=None)
    parser.add_argument("--queue-depth", type=int, default=None)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    service = UptrendzService(
        data_dir=args.data_dir,
        workers_per_domain=args.workers_per_domain,
        queue_depth=args.queue_depth,
    )
    service.boot()
    if args.config is not None:
        loaded = service.load_config_file(args.config)
        log.info("bootstrapped domains from %s: %s", args.config, loaded)

    import uvicorn

    uvicorn.run(create_app(service), host=args.host, port=args.port, log_level="info")
    service.close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

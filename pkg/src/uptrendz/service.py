"""Single-process service facade wiring the registry, catalog store, and
gateway together. This is the surface the HTTP layer and the evaluation
harness both drive."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Iterable, Optional

from . import errors
from .gateway import RecommendationRequest, RecommendationResponse, ScenarioGateway
from .model import (
    AlgorithmVariant,
    AttributeSpec,
    EntityKind,
    EntitySchema,
    InteractionTypeConfig,
    ScenarioConfig,
    SystemDomain,
)
from .registry import Registry
from .store import Ack, CatalogStore, EntityRecord, InteractionEvent, ReplayReport

log = logging.getLogger(__name__)


class UptrendzService:
    """One deployable unit: many isolated system domains behind one API."""

    def __init__(
        self,
        data_dir: Optional[Path] = None,
        workers_per_domain: Optional[int] = None,
        queue_depth: Optional[int] = None,
    ):
        self.data_dir = Path(data_dir) if data_dir is not None else None
        self.registry = Registry(self.data_dir)
        self.store = CatalogStore(self.registry, self.data_dir)
        self.gateway = ScenarioGateway(
            self.registry, self.store, workers_per_domain, queue_depth
        )

    # --- lifecycle ---------------------------------------------------------

    def boot(self) -> list[ReplayReport]:
        """Restore persisted domains: configs first, then log replay."""
        reports = []
        for domain_id in self.registry.load_from_disk():
            reports.append(self.store.open_domain(domain_id))
        return reports

    def load_config_document(self, doc: dict) -> list[str]:
        """Declarative bootstrap; accepts one domain document or {"domains": [...]}."""
        docs = doc.get("domains", [doc]) if isinstance(doc, dict) else doc
        loaded = []
        for domain_doc in docs:
            config = self.registry.load_document(domain_doc)
            self.store.open_domain(config.domain.id)
            loaded.append(config.domain.id)
        return loaded

    def load_config_file(self, path: Path) -> list[str]:
        return self.load_config_document(json.loads(Path(path).read_text(encoding="utf-8")))

    def close(self) -> None:
        self.gateway.shutdown()
        self.store.close()

    def __enter__(self) -> "UptrendzService":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # --- control plane --------------------------------------------------------

    def create_system_domain(self, name: str) -> SystemDomain:
        domain = self.registry.create_system_domain(name)
        self.store.open_domain(domain.id)
        return domain

    def define_entity_schema(
        self,
        domain_id: str,
        entity_kind: EntityKind,
        name: str,
        attributes: Iterable[AttributeSpec],
    ) -> EntitySchema:
        return self.registry.define_entity_schema(domain_id, entity_kind, name, attributes)

    def define_interaction_type(
        self, domain_id: str, config: InteractionTypeConfig
    ) -> InteractionTypeConfig:
        return self.registry.define_interaction_type(domain_id, config)

    def create_scenario(self, domain_id: str, config: ScenarioConfig) -> ScenarioConfig:
        scenario = self.registry.create_scenario(domain_id, config)
        if scenario.algorithm.variant is AlgorithmVariant.CONTENT_BASED:
            self.store.register_corpus(
                domain_id, scenario.target_entity_type, scenario.algorithm.cbf_attributes
            )
        return scenario

    def domain_document(self, domain_id: str) -> dict:
        return self.registry.to_document(domain_id)

    # --- data plane -----------------------------------------------------------

    def upsert_entity(self, domain_id: str, entity_type_id: str, record: EntityRecord) -> Ack:
        return self.store.upsert_entity(domain_id, entity_type_id, record)

    def record_interaction(self, domain_id: str, event: InteractionEvent) -> Ack:
        return self.store.record_interaction(domain_id, event)

    def get_entity(self, domain_id: str, entity_type_id: str, entity_id: str) -> dict:
        return self.store.get_entity(domain_id, entity_type_id, entity_id)

    # --- recommendations ---------------------------------------------------------

    def recommend(self, request: RecommendationRequest) -> RecommendationResponse:
        """Serve on the caller's thread (no pool); same computation as HTTP."""
        return self.gateway.serve(request)

    def request(self, request: RecommendationRequest) -> RecommendationResponse:
        """Serve through the domain's bounded worker pool, as HTTP does."""
        return self.gateway.request(request)

"""Configuration registry: system domains, entity schemas, interaction types,
and recommendation scenarios.

Writes are serialized per registry and publish whole immutable
``DomainConfig`` snapshots, so a reader always observes either the pre-write
or the post-write configuration, never a partial state. Each system domain
persists as one human-readable JSON document inside its storage namespace.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from . import errors
from .model import (
    ATTRIBUTE_NAME_RE,
    MAX_ATTRIBUTES_PER_SCHEMA,
    AlgorithmVariant,
    AttributeSpec,
    EntityKind,
    EntitySchema,
    FilterMode,
    InteractionTypeConfig,
    PostFilter,
    ScenarioConfig,
    SystemDomain,
    slugify,
)

log = logging.getLogger(__name__)

MAX_DOMAIN_NAME_LEN = 128
CONFIG_FILENAME = "config.json"


def canonical_json(doc: dict) -> str:
    """Stable serialization used for config documents and round-trip checks."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def upload_endpoint_path(domain_id: str, entity_type_id: str) -> str:
    """Pure derivation: same (domain, entity type) always yields the same path."""
    return f"/domains/{domain_id}/catalog/{entity_type_id}"


def recommendation_endpoint_path(domain_id: str, scenario_id: str) -> str:
    return f"/domains/{domain_id}/scenarios/{scenario_id}/recommendations"


@dataclass(frozen=True)
class DomainConfig:
    """Immutable snapshot of one system domain's full configuration."""

    domain: SystemDomain
    schemas: dict[str, EntitySchema] = field(default_factory=dict)
    interaction_types: dict[str, InteractionTypeConfig] = field(default_factory=dict)
    scenarios: dict[str, ScenarioConfig] = field(default_factory=dict)

    def to_document(self) -> dict:
        return {
            "domain": self.domain.to_dict(),
            "entity_types": [s.to_dict() for _, s in sorted(self.schemas.items())],
            "interaction_types": [
                t.to_dict() for _, t in sorted(self.interaction_types.items())
            ],
            "scenarios": [s.to_dict() for _, s in sorted(self.scenarios.items())],
        }

    @classmethod
    def from_document(cls, doc: dict) -> "DomainConfig":
        return cls(
            domain=SystemDomain.from_dict(doc["domain"]),
            schemas={
                s["entity_type_id"]: EntitySchema.from_dict(s)
                for s in doc.get("entity_types", ())
            },
            interaction_types={
                t["name"]: InteractionTypeConfig.from_dict(t)
                for t in doc.get("interaction_types", ())
            },
            scenarios={
                s["scenario_id"]: ScenarioConfig.from_dict(s)
                for s in doc.get("scenarios", ())
            },
        )


@dataclass(frozen=True)
class Violation:
    """One registry invariant violation found by a consistency scan."""

    code: str
    subject: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}({self.subject}): {self.detail}"


def _validate_attributes(attributes: Iterable[AttributeSpec]) -> tuple[AttributeSpec, ...]:
    attrs = tuple(attributes)
    if len(attrs) > MAX_ATTRIBUTES_PER_SCHEMA:
        raise errors.InvalidAttribute("*", f"more than {MAX_ATTRIBUTES_PER_SCHEMA} attributes")
    seen = set()
    for spec in attrs:
        if not ATTRIBUTE_NAME_RE.match(spec.name):
            raise errors.InvalidAttribute(spec.name, "name must match [A-Za-z0-9_]{1,64}")
        if spec.name in seen:
            raise errors.InvalidAttribute(spec.name, "duplicate")
        seen.add(spec.name)
    return attrs


class Registry:
    """All declarative configuration, with validation and endpoint derivation."""

    def __init__(self, data_dir: Optional[Path] = None):
        self._data_dir = Path(data_dir) if data_dir is not None else None
        self._lock = threading.RLock()
        self._domains: dict[str, DomainConfig] = {}
        self._slug_counts: dict[str, int] = {}

    # --- reads -----------------------------------------------------------

    def domain_ids(self) -> list[str]:
        return sorted(self._domains)

    def get(self, domain_id: str) -> DomainConfig:
        config = self._domains.get(domain_id)
        if config is None:
            raise errors.UnknownDomain(domain_id)
        return config

    def has_domain(self, domain_id: str) -> bool:
        return domain_id in self._domains

    def get_schema(self, domain_id: str, entity_type_id: str) -> EntitySchema:
        config = self.get(domain_id)
        schema = config.schemas.get(entity_type_id)
        if schema is None:
            raise errors.UnknownEntityType(f"{domain_id}/{entity_type_id}")
        return schema

    def get_interaction_type(self, domain_id: str, name: str) -> InteractionTypeConfig:
        config = self.get(domain_id)
        itype = config.interaction_types.get(name)
        if itype is None:
            raise errors.UnknownInteractionType(f"{domain_id}/{name}")
        return itype

    def get_scenario(self, domain_id: str, scenario_id: str) -> ScenarioConfig:
        config = self.get(domain_id)
        scenario = config.scenarios.get(scenario_id)
        if scenario is None:
            raise errors.UnknownScenario(f"{domain_id}/{scenario_id}")
        return scenario

    def to_document(self, domain_id: str) -> dict:
        return self.get(domain_id).to_document()

    # --- writes ----------------------------------------------------------

    def create_system_domain(self, name: str) -> SystemDomain:
        if not name or len(name) > MAX_DOMAIN_NAME_LEN:
            raise errors.InvalidName(f"domain name must be 1..{MAX_DOMAIN_NAME_LEN} chars")
        slug = slugify(name)
        if not slug:
            raise errors.InvalidName(f"name {name!r} yields an empty identifier")
        with self._lock:
            if any(c.domain.name == name for c in self._domains.values()):
                raise errors.DuplicateName(name)
            count = self._slug_counts.get(slug, 0) + 1
            self._slug_counts[slug] = count
            domain_id = f"{slug}-{count}"
            domain = SystemDomain(
                id=domain_id,
                name=name,
                storage_namespace=f"ns/{domain_id}",
                created_at=datetime.now(timezone.utc).isoformat(),
            )
            self._publish(DomainConfig(domain=domain))
            return domain

    def define_entity_schema(
        self,
        domain_id: str,
        entity_kind: EntityKind,
        name: str,
        attributes: Iterable[AttributeSpec],
    ) -> EntitySchema:
        attrs = _validate_attributes(attributes)
        with self._lock:
            config = self.get(domain_id)
            entity_type_id = slugify(name)
            if not entity_type_id:
                raise errors.InvalidName(f"entity name {name!r} yields an empty identifier")
            if entity_type_id in config.schemas:
                raise errors.DuplicateEntityType(entity_type_id)
            schema = EntitySchema(
                domain_id=domain_id,
                entity_type_id=entity_type_id,
                entity_kind=entity_kind,
                name=name,
                attributes=attrs,
                upload_endpoint=upload_endpoint_path(domain_id, entity_type_id),
            )
            schemas = dict(config.schemas)
            schemas[entity_type_id] = schema
            self._publish(replace(config, schemas=schemas))
            return schema

    def add_attributes(
        self, domain_id: str, entity_type_id: str, new_attributes: Iterable[AttributeSpec]
    ) -> EntitySchema:
        """Schema evolution: attributes may be added, never removed or retyped."""
        with self._lock:
            config = self.get(domain_id)
            schema = self.get_schema(domain_id, entity_type_id)
            merged = _validate_attributes(schema.attributes + tuple(new_attributes))
            updated = replace(schema, attributes=merged)
            schemas = dict(config.schemas)
            schemas[entity_type_id] = updated
            self._publish(replace(config, schemas=schemas))
            return updated

    def define_interaction_type(
        self, domain_id: str, config: InteractionTypeConfig
    ) -> InteractionTypeConfig:
        with self._lock:
            domain_config = self.get(domain_id)
            if config.name in domain_config.interaction_types:
                raise errors.DuplicateInteractionType(config.name)
            if config.target_entity_type not in domain_config.schemas:
                raise errors.UnknownEntityType(config.target_entity_type)
            if config.default_weight < 0:
                raise errors.InvalidWeights("default_weight must be non-negative")
            stored = replace(config, domain_id=domain_id)
            itypes = dict(domain_config.interaction_types)
            itypes[config.name] = stored
            self._publish(replace(domain_config, interaction_types=itypes))
            return stored

    def create_scenario(self, domain_id: str, config: ScenarioConfig) -> ScenarioConfig:
        with self._lock:
            domain_config = self.get(domain_id)
            scenario_id = slugify(config.scenario_id)
            if not scenario_id:
                raise errors.InvalidName(f"scenario id {config.scenario_id!r} is empty")
            if scenario_id in domain_config.scenarios:
                raise errors.DuplicateScenario(scenario_id)
            self._validate_algorithm(domain_config, config)
            stored = replace(
                config,
                domain_id=domain_id,
                scenario_id=scenario_id,
                recommendation_endpoint=recommendation_endpoint_path(domain_id, scenario_id),
            )
            scenarios = dict(domain_config.scenarios)
            scenarios[scenario_id] = stored
            self._publish(replace(domain_config, scenarios=scenarios))
            return stored

    def _validate_algorithm(self, domain_config: DomainConfig, config: ScenarioConfig) -> None:
        if config.target_entity_type not in domain_config.schemas:
            raise errors.UnknownEntityType(config.target_entity_type)
        schema = domain_config.schemas[config.target_entity_type]
        for post_filter in config.post_filters:
            _check_filter_against_schema(post_filter, schema)
        for attr in config.echo_attributes:
            if schema.attribute(attr) is None:
                raise errors.InvalidAttribute(attr, "echo attribute not in target schema")

        spec = config.algorithm
        if spec.variant in (
            AlgorithmVariant.MOST_POPULAR,
            AlgorithmVariant.COLLABORATIVE,
            AlgorithmVariant.USER_FOR_ITEM,
        ):
            if not spec.interaction_subset:
                raise errors.InvalidScenario(f"{spec.variant.value} requires interaction types")
            for name in spec.interaction_subset | set(spec.weight_overrides()):
                if name not in domain_config.interaction_types:
                    raise errors.UnknownInteractionType(name)
            for name, weight in spec.interaction_weights:
                if weight < 0:
                    raise errors.InvalidWeights(f"weight for {name!r} must be non-negative")
        if spec.variant in (AlgorithmVariant.COLLABORATIVE, AlgorithmVariant.USER_FOR_ITEM):
            if spec.neighbors_k < 1:
                raise errors.InvalidScenario("neighbors_k must be positive")
        if spec.variant is AlgorithmVariant.CONTENT_BASED:
            if not spec.cbf_attributes:
                raise errors.InvalidScenario("content_based requires cbf_attributes")
            for attr in spec.cbf_attributes:
                attr_spec = schema.attribute(attr)
                if attr_spec is None:
                    raise errors.InvalidAttribute(attr, "not in target schema")
                if not attr_spec.kind.is_free_text:
                    raise errors.NonTextAttribute(attr)
        if spec.variant is AlgorithmVariant.HYBRID:
            if not spec.hybrid_components:
                raise errors.InvalidScenario("hybrid requires components")
            if all(weight == 0 for _, weight in spec.hybrid_components):
                raise errors.InvalidWeights("hybrid weights must not all be zero")
            for sid, weight in spec.hybrid_components:
                if weight < 0:
                    raise errors.InvalidWeights(f"weight for {sid!r} must be non-negative")
                component = domain_config.scenarios.get(sid)
                if component is None:
                    raise errors.UnknownScenario(sid)
                if component.algorithm.variant is AlgorithmVariant.HYBRID:
                    raise errors.NestedHybrid(sid)
                if component.target_entity_type != config.target_entity_type:
                    raise errors.CrossDomainHybrid(
                        f"component {sid!r} targets {component.target_entity_type!r}, "
                        f"hybrid targets {config.target_entity_type!r}"
                    )

    # --- persistence -------------------------------------------------------

    def _publish(self, config: DomainConfig) -> None:
        self._domains[config.domain.id] = config
        if self._data_dir is not None:
            self._write_document(config)

    def _write_document(self, config: DomainConfig) -> None:
        ns_dir = self._data_dir / config.domain.storage_namespace
        ns_dir.mkdir(parents=True, exist_ok=True)
        path = ns_dir / CONFIG_FILENAME
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(canonical_json(config.to_document()), encoding="utf-8")
        os.replace(tmp, path)

    def load_document(self, doc: dict) -> DomainConfig:
        """Restore one domain from its configuration document, preserving ids."""
        config = DomainConfig.from_document(doc)
        with self._lock:
            domain_id = config.domain.id
            if domain_id in self._domains:
                raise errors.DuplicateName(domain_id)
            slug, _, count = domain_id.rpartition("-")
            if slug and count.isdigit():
                self._slug_counts[slug] = max(self._slug_counts.get(slug, 0), int(count))
            self._publish(config)
            return config

    def load_from_disk(self) -> list[str]:
        """Scan the data directory for persisted domain documents."""
        if self._data_dir is None:
            return []
        loaded = []
        ns_root = self._data_dir / "ns"
        if not ns_root.is_dir():
            return loaded
        for config_path in sorted(ns_root.glob(f"*/{CONFIG_FILENAME}")):
            doc = json.loads(config_path.read_text(encoding="utf-8"))
            self.load_document(doc)
            loaded.append(doc["domain"]["id"])
        log.info("restored %d domain(s) from %s", len(loaded), self._data_dir)
        return loaded

    # --- diagnostics --------------------------------------------------------

    def validate(self) -> list[Violation]:
        """Scan all stored configuration for invariant violations."""
        found: list[Violation] = []
        namespaces: dict[str, str] = {}
        names: dict[str, str] = {}
        for domain_id, config in sorted(self._domains.items()):
            domain = config.domain
            if not domain.storage_namespace:
                found.append(Violation("EmptyNamespace", domain_id, "storage namespace empty"))
            elif domain.storage_namespace in namespaces:
                found.append(
                    Violation(
                        "NamespaceCollision",
                        domain_id,
                        f"shares namespace with {namespaces[domain.storage_namespace]}",
                    )
                )
            else:
                namespaces[domain.storage_namespace] = domain_id
            if domain.name in names:
                found.append(
                    Violation("DuplicateName", domain_id, f"shares name with {names[domain.name]}")
                )
            else:
                names[domain.name] = domain_id

            for etype, schema in sorted(config.schemas.items()):
                subject = f"{domain_id}/{etype}"
                try:
                    _validate_attributes(schema.attributes)
                except errors.InvalidAttribute as exc:
                    found.append(Violation("InvalidAttribute", subject, str(exc)))
                expected = upload_endpoint_path(domain_id, etype)
                if schema.upload_endpoint != expected:
                    found.append(
                        Violation("EndpointDrift", subject, f"expected {expected!r}")
                    )

            for name, itype in sorted(config.interaction_types.items()):
                subject = f"{domain_id}/{name}"
                if itype.target_entity_type not in config.schemas:
                    found.append(
                        Violation(
                            "DanglingReference",
                            subject,
                            f"target entity type {itype.target_entity_type!r} not defined",
                        )
                    )
                if itype.default_weight < 0:
                    found.append(Violation("NegativeWeight", subject, "default_weight < 0"))

            for sid, scenario in sorted(config.scenarios.items()):
                subject = f"{domain_id}/{sid}"
                try:
                    self._validate_algorithm(config, scenario)
                except errors.UptrendzError as exc:
                    found.append(Violation("DanglingReference", subject, str(exc)))
                expected = recommendation_endpoint_path(domain_id, sid)
                if scenario.recommendation_endpoint != expected:
                    found.append(Violation("EndpointDrift", subject, f"expected {expected!r}"))
        return found


def _check_filter_against_schema(post_filter: PostFilter, schema: EntitySchema) -> None:
    attr = schema.attribute(post_filter.attribute)
    if attr is None:
        raise errors.FilterSchemaMismatch(
            f"filter attribute {post_filter.attribute!r} not in schema {schema.entity_type_id!r}"
        )
    if post_filter.mode is FilterMode.NUMERIC_RANGE:
        if not attr.kind.is_numeric:
            raise errors.FilterSchemaMismatch(
                f"numeric_range filter on non-numeric attribute {post_filter.attribute!r}"
            )
        if post_filter.min is None or post_filter.max is None:
            raise errors.FilterSchemaMismatch("numeric_range filter needs min and max")
    else:
        if not attr.kind.is_categorical:
            raise errors.FilterSchemaMismatch(
                f"{post_filter.mode.value} filter on non-categorical attribute "
                f"{post_filter.attribute!r}"
            )
        if post_filter.value is None:
            raise errors.FilterSchemaMismatch("contains/excludes filter needs a value")

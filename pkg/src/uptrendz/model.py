"""Core configuration and result types.

All types are plain frozen dataclasses plus string-valued enums, so that every
object serializes to the JSON configuration document without adapters and the
registry can publish immutable snapshots to concurrent readers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

ATTRIBUTE_NAME_RE = re.compile(r"^[A-Za-z0-9_]{1,64}$")
MAX_ATTRIBUTES_PER_SCHEMA = 256


class AttributeKind(str, Enum):
    """The seven supported attribute kinds for data-upload schemas."""

    CATEGORICAL_SINGLE = "categorical_single"
    CATEGORICAL_MULTI = "categorical_multi"
    FREE_TEXT_ENGLISH = "free_text_english"
    FREE_TEXT_GERMAN = "free_text_german"
    NUMERIC_INTEGER = "numeric_integer"
    NUMERIC_REAL = "numeric_real"
    DATE = "date"

    @property
    def is_categorical(self) -> bool:
        return self in (AttributeKind.CATEGORICAL_SINGLE, AttributeKind.CATEGORICAL_MULTI)

    @property
    def is_free_text(self) -> bool:
        return self in (AttributeKind.FREE_TEXT_ENGLISH, AttributeKind.FREE_TEXT_GERMAN)

    @property
    def is_numeric(self) -> bool:
        return self in (AttributeKind.NUMERIC_INTEGER, AttributeKind.NUMERIC_REAL)


class EntityKind(str, Enum):
    ITEM = "item"
    USER = "user"


class Explicitness(str, Enum):
    EXPLICIT = "explicit"
    IMPLICIT = "implicit"


class ActorMode(str, Enum):
    REGISTERED_ONLY = "registered_only"
    ANONYMOUS_ONLY = "anonymous_only"
    BOTH = "both"


class InteractionTarget(str, Enum):
    USER_ITEM = "user_item"
    USER_USER = "user_user"


class Audience(str, Enum):
    REGISTERED = "registered"
    ANONYMOUS = "anonymous"
    BOTH = "both"


class ContextKind(str, Enum):
    NONE = "none"
    ITEM_ID = "item_id"
    USER_ID = "user_id"


class AlgorithmVariant(str, Enum):
    MOST_POPULAR = "most_popular"
    CONTENT_BASED = "content_based"
    COLLABORATIVE = "collaborative"
    USER_FOR_ITEM = "user_for_item"
    HYBRID = "hybrid"


class FilterMode(str, Enum):
    CONTAINS = "contains"
    EXCLUDES = "excludes"
    NUMERIC_RANGE = "numeric_range"


@dataclass(frozen=True)
class SystemDomain:
    """One fully isolated tenant: its own storage namespace and worker pool."""

    id: str
    name: str
    storage_namespace: str
    created_at: str  # ISO-8601 UTC instant

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "storage_namespace": self.storage_namespace,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SystemDomain":
        return cls(d["id"], d["name"], d["storage_namespace"], d["created_at"])


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: AttributeKind
    required: bool = False

    def to_dict(self) -> dict:
        return {"name": self.name, "kind": self.kind.value, "required": self.required}

    @classmethod
    def from_dict(cls, d: dict) -> "AttributeSpec":
        return cls(d["name"], AttributeKind(d["kind"]), bool(d.get("required", False)))


@dataclass(frozen=True)
class EntitySchema:
    """Declared attribute layout of one recommendable (or user) entity type.

    An item-kind schema constitutes one item-level domain inside its system
    domain; hybrids may only combine scenarios recommending the same one.
    """

    domain_id: str
    entity_type_id: str
    entity_kind: EntityKind
    name: str
    attributes: tuple[AttributeSpec, ...]
    upload_endpoint: str

    def attribute(self, name: str) -> Optional[AttributeSpec]:
        for spec in self.attributes:
            if spec.name == name:
                return spec
        return None

    def to_dict(self) -> dict:
        return {
            "domain_id": self.domain_id,
            "entity_type_id": self.entity_type_id,
            "entity_kind": self.entity_kind.value,
            "name": self.name,
            "attributes": [a.to_dict() for a in self.attributes],
            "upload_endpoint": self.upload_endpoint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EntitySchema":
        return cls(
            domain_id=d["domain_id"],
            entity_type_id=d["entity_type_id"],
            entity_kind=EntityKind(d["entity_kind"]),
            name=d["name"],
            attributes=tuple(AttributeSpec.from_dict(a) for a in d["attributes"]),
            upload_endpoint=d["upload_endpoint"],
        )


@dataclass(frozen=True)
class InteractionTypeConfig:
    domain_id: str
    name: str
    explicitness: Explicitness
    default_weight: float
    actor_mode: ActorMode
    track_timestamp: bool
    target: InteractionTarget
    target_entity_type: str

    def to_dict(self) -> dict:
        return {
            "domain_id": self.domain_id,
            "name": self.name,
            "explicitness": self.explicitness.value,
            "default_weight": self.default_weight,
            "actor_mode": self.actor_mode.value,
            "track_timestamp": self.track_timestamp,
            "target": self.target.value,
            "target_entity_type": self.target_entity_type,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InteractionTypeConfig":
        return cls(
            domain_id=d["domain_id"],
            name=d["name"],
            explicitness=Explicitness(d["explicitness"]),
            default_weight=float(d["default_weight"]),
            actor_mode=ActorMode(d["actor_mode"]),
            track_timestamp=bool(d["track_timestamp"]),
            target=InteractionTarget(d["target"]),
            target_entity_type=d["target_entity_type"],
        )


@dataclass(frozen=True)
class PostFilter:
    """Contains/excludes/numeric-range predicate applied before truncation."""

    attribute: str
    mode: FilterMode
    value: Optional[str] = None
    min: Optional[float] = None
    max: Optional[float] = None

    def to_dict(self) -> dict:
        d: dict = {"attribute": self.attribute, "mode": self.mode.value}
        if self.mode is FilterMode.NUMERIC_RANGE:
            d["min"] = self.min
            d["max"] = self.max
        else:
            d["value"] = self.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PostFilter":
        mode = FilterMode(d["mode"])
        if mode is FilterMode.NUMERIC_RANGE:
            return cls(d["attribute"], mode, min=float(d["min"]), max=float(d["max"]))
        return cls(d["attribute"], mode, value=d["value"])


@dataclass(frozen=True)
class AlgorithmSpec:
    variant: AlgorithmVariant
    # MostPopular / Collaborative / UserForItem
    interaction_subset: frozenset[str] = frozenset()
    interaction_weights: tuple[tuple[str, float], ...] = ()
    # ContentBased
    cbf_attributes: frozenset[str] = frozenset()
    # Collaborative / UserForItem
    neighbors_k: int = 50
    # Hybrid: (component scenario id, weight)
    hybrid_components: tuple[tuple[str, float], ...] = ()

    def weight_overrides(self) -> dict[str, float]:
        return dict(self.interaction_weights)

    def to_dict(self) -> dict:
        d: dict = {"variant": self.variant.value}
        if self.variant in (
            AlgorithmVariant.MOST_POPULAR,
            AlgorithmVariant.COLLABORATIVE,
            AlgorithmVariant.USER_FOR_ITEM,
        ):
            d["interaction_subset"] = sorted(self.interaction_subset)
            d["interaction_weights"] = {k: v for k, v in sorted(self.interaction_weights)}
        if self.variant is AlgorithmVariant.CONTENT_BASED:
            d["cbf_attributes"] = sorted(self.cbf_attributes)
        if self.variant in (AlgorithmVariant.COLLABORATIVE, AlgorithmVariant.USER_FOR_ITEM):
            d["neighbors_k"] = self.neighbors_k
        if self.variant is AlgorithmVariant.HYBRID:
            d["hybrid_components"] = [[sid, w] for sid, w in self.hybrid_components]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AlgorithmSpec":
        weights = d.get("interaction_weights", {})
        return cls(
            variant=AlgorithmVariant(d["variant"]),
            interaction_subset=frozenset(d.get("interaction_subset", ())),
            interaction_weights=tuple(sorted((k, float(v)) for k, v in weights.items())),
            cbf_attributes=frozenset(d.get("cbf_attributes", ())),
            neighbors_k=int(d.get("neighbors_k", 50)),
            hybrid_components=tuple(
                (sid, float(w)) for sid, w in d.get("hybrid_components", ())
            ),
        )


@dataclass(frozen=True)
class ScenarioConfig:
    """A recommendation use-case bound to a live endpoint."""

    domain_id: str
    scenario_id: str
    target_entity_type: str
    audience: Audience
    context: ContextKind
    algorithm: AlgorithmSpec
    post_filters: tuple[PostFilter, ...] = ()
    echo_attributes: tuple[str, ...] = ()
    recommendation_endpoint: str = ""

    def to_dict(self) -> dict:
        return {
            "domain_id": self.domain_id,
            "scenario_id": self.scenario_id,
            "target_entity_type": self.target_entity_type,
            "audience": self.audience.value,
            "context": self.context.value,
            "algorithm": self.algorithm.to_dict(),
            "post_filters": [f.to_dict() for f in self.post_filters],
            "echo_attributes": list(self.echo_attributes),
            "recommendation_endpoint": self.recommendation_endpoint,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        return cls(
            domain_id=d["domain_id"],
            scenario_id=d["scenario_id"],
            target_entity_type=d["target_entity_type"],
            audience=Audience(d["audience"]),
            context=ContextKind(d["context"]),
            algorithm=AlgorithmSpec.from_dict(d["algorithm"]),
            post_filters=tuple(PostFilter.from_dict(f) for f in d.get("post_filters", ())),
            echo_attributes=tuple(d.get("echo_attributes", ())),
            recommendation_endpoint=d.get("recommendation_endpoint", ""),
        )


@dataclass(frozen=True)
class RankedList:
    """Ordered recommendation result; scores non-increasing, ids unique."""

    items: tuple[tuple[str, float], ...]
    scenario_id: str = ""
    as_of_sequence: int = 0

    def ids(self) -> list[str]:
        return [i for i, _ in self.items]


# --- actors ------------------------------------------------------------------

REGISTERED_PREFIX = "u:"
SESSION_PREFIX = "s:"


def registered_actor(user_id: str) -> str:
    """Key for a registered user; disjoint from the session namespace."""
    return REGISTERED_PREFIX + user_id


def session_actor(token: str) -> str:
    """Key for an anonymous session; disjoint from the registered namespace."""
    return SESSION_PREFIX + token


def is_registered(actor: str) -> bool:
    return actor.startswith(REGISTERED_PREFIX)


def actor_entity_id(actor: str) -> str:
    """Strip the namespace tag off an actor key."""
    return actor.split(":", 1)[1]


def slugify(name: str) -> str:
    """Lowercase URL-safe token derived from a display name."""
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug

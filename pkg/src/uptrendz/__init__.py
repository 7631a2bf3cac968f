"""Self-hostable, API-centric recommendation platform.

Operators declaratively configure application domains (entity schemas,
interaction types, recommendation scenarios); the platform materializes live
data-upload and recommendation endpoints serving real-time Most-Popular,
Content-Based, Collaborative-Filtering, user-recommender, and weighted-hybrid
recommendations with post-filtering, with strict per-domain isolation.
"""

from .errors import UptrendzError
from .gateway import RecommendationRequest, RecommendationResponse
from .model import (
    ActorMode,
    AlgorithmSpec,
    AlgorithmVariant,
    AttributeKind,
    AttributeSpec,
    Audience,
    ContextKind,
    EntityKind,
    EntitySchema,
    Explicitness,
    FilterMode,
    InteractionTarget,
    InteractionTypeConfig,
    PostFilter,
    RankedList,
    ScenarioConfig,
    SystemDomain,
    registered_actor,
    session_actor,
)
from .registry import Registry
from .service import UptrendzService
from .store import CatalogStore, EntityRecord, InteractionEvent

__version__ = "0.1.0"

__all__ = [
    "ActorMode",
    "AlgorithmSpec",
    "AlgorithmVariant",
    "AttributeKind",
    "AttributeSpec",
    "Audience",
    "CatalogStore",
    "ContextKind",
    "EntityKind",
    "EntityRecord",
    "EntitySchema",
    "Explicitness",
    "FilterMode",
    "InteractionEvent",
    "InteractionTarget",
    "InteractionTypeConfig",
    "PostFilter",
    "RankedList",
    "RecommendationRequest",
    "RecommendationResponse",
    "Registry",
    "ScenarioConfig",
    "SystemDomain",
    "UptrendzError",
    "UptrendzService",
    "registered_actor",
    "session_actor",
    "__version__",
]

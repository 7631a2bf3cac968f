"""Multi-domain support: item-level domains, the same-domain hybrid rule,
and per-tenant isolation under load.

A start-up-founding platform recommends several distinct things: innovation
ideas, educational materials, and experts who can give feedback. Each
recommendable entity type is its own item-level domain inside one system
domain, and hybrids may only combine scenarios that recommend the same one.

    python demos/multi_domain.py
"""

import threading

from uptrendz import (
    ActorMode,
    AlgorithmSpec,
    AlgorithmVariant,
    AttributeKind,
    AttributeSpec,
    Audience,
    ContextKind,
    EntityKind,
    EntityRecord,
    Explicitness,
    InteractionEvent,
    InteractionTarget,
    InteractionTypeConfig,
    RecommendationRequest,
    ScenarioConfig,
    UptrendzService,
)
from uptrendz.errors import Busy, CrossDomainHybrid


def scenario(domain_id, sid, target, variant, **kwargs):
    return ScenarioConfig(
        domain_id=domain_id,
        scenario_id=sid,
        target_entity_type=target,
        audience=kwargs.pop("audience", Audience.BOTH),
        context=kwargs.pop("context", ContextKind.NONE),
        algorithm=AlgorithmSpec(variant=variant, **kwargs),
    )


def main() -> None:
    service = UptrendzService(workers_per_domain=2, queue_depth=4)

    # One system domain, three item-level domains (separate data models).
    hub = service.create_system_domain("founding hub")
    service.define_entity_schema(
        hub.id, EntityKind.ITEM, "innovation-idea",
        [AttributeSpec("description", AttributeKind.FREE_TEXT_ENGLISH),
         AttributeSpec("stage", AttributeKind.CATEGORICAL_SINGLE)],
    )
    service.define_entity_schema(
        hub.id, EntityKind.ITEM, "educational-material",
        [AttributeSpec("summary", AttributeKind.FREE_TEXT_GERMAN)],
    )
    service.define_entity_schema(
        hub.id, EntityKind.USER, "expert",
        [AttributeSpec("bio", AttributeKind.FREE_TEXT_ENGLISH)],
    )
    service.define_interaction_type(
        hub.id,
        InteractionTypeConfig(
            domain_id=hub.id, name="endorse", explicitness=Explicitness.IMPLICIT,
            default_weight=1.0, actor_mode=ActorMode.BOTH, track_timestamp=False,
            target=InteractionTarget.USER_ITEM, target_entity_type="innovation-idea",
        ),
    )
    print(f"three item-level domains in {hub.id!r}:",
          sorted(service.registry.get(hub.id).schemas))

    # Scenarios per item-level domain.
    service.create_scenario(hub.id, scenario(
        hub.id, "similar-ideas", "innovation-idea", AlgorithmVariant.CONTENT_BASED,
        context=ContextKind.ITEM_ID, cbf_attributes=frozenset({"description"})))
    service.create_scenario(hub.id, scenario(
        hub.id, "popular-ideas", "innovation-idea", AlgorithmVariant.MOST_POPULAR,
        interaction_subset=frozenset({"endorse"})))
    service.create_scenario(hub.id, scenario(
        hub.id, "passende-materialien", "educational-material",
        AlgorithmVariant.CONTENT_BASED, context=ContextKind.ITEM_ID,
        cbf_attributes=frozenset({"summary"})))

    # Hybrids may only combine scenarios of one item-level domain.
    service.create_scenario(hub.id, scenario(
        hub.id, "idea-feed", "innovation-idea", AlgorithmVariant.HYBRID,
        context=ContextKind.ITEM_ID,
        hybrid_components=(("popular-ideas", 0.6), ("similar-ideas", 0.4))))
    print("hybrid 'idea-feed' over two idea scenarios: accepted")
    try:
        service.create_scenario(hub.id, scenario(
            hub.id, "broken-feed", "innovation-idea", AlgorithmVariant.HYBRID,
            hybrid_components=(("popular-ideas", 0.5), ("passende-materialien", 0.5))))
    except CrossDomainHybrid as exc:
        print(f"hybrid across item-level domains: rejected ({exc})")

    # A second system domain is physically separate: own namespace, own pool.
    press = service.create_system_domain("press room")
    service.define_entity_schema(
        press.id, EntityKind.ITEM, "article",
        [AttributeSpec("topic", AttributeKind.CATEGORICAL_SINGLE)],
    )
    service.define_interaction_type(
        press.id,
        InteractionTypeConfig(
            domain_id=press.id, name="read", explicitness=Explicitness.IMPLICIT,
            default_weight=1.0, actor_mode=ActorMode.BOTH, track_timestamp=False,
            target=InteractionTarget.USER_ITEM, target_entity_type="article",
        ),
    )
    service.create_scenario(press.id, scenario(
        press.id, "trending", "article", AlgorithmVariant.MOST_POPULAR,
        interaction_subset=frozenset({"read"})))

    for n in range(5):
        service.upsert_entity(hub.id, "innovation-idea",
                              EntityRecord(f"idea{n}", {"description": f"robot gardening helper {n}",
                                                        "stage": "draft"}))
        service.upsert_entity(press.id, "article", EntityRecord(f"art{n}", {"topic": "tech"}))
        service.record_interaction(press.id, InteractionEvent(
            domain_id=press.id, interaction_type="read", actor="s:anon", target_id=f"art{n}"))
        service.record_interaction(hub.id, InteractionEvent(
            domain_id=hub.id, interaction_type="endorse", actor="s:anon", target_id=f"idea{n}"))

    # Saturate the founding hub's worker pool; the press room is unaffected.
    hold = threading.Event()
    held = service.gateway.saturate(hub.id, hold)
    try:
        try:
            service.request(RecommendationRequest(
                domain_id=hub.id, scenario_id="popular-ideas", session_id="s"))
        except Busy:
            print(f"\nfounding hub saturated ({len(held)} slots held): requests answer 429 Busy")
        press_response = service.request(RecommendationRequest(
            domain_id=press.id, scenario_id="trending", session_id="s", k=3))
        print(f"press room still serving: {press_response.ids()}")
    finally:
        hold.set()
        for future in held:
            future.result(timeout=5)
    service.close()


if __name__ == "__main__":
    main()

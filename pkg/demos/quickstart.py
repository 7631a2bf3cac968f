"""Quickstart: configure a domain, upload data, get live recommendations.

Walks the full operator flow in-process: create a system domain, declare an
entity schema and an interaction type, open a recommendation scenario, feed
some data, and query it. Run with:

    python demos/quickstart.py
"""

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
    FilterMode,
    InteractionEvent,
    InteractionTarget,
    InteractionTypeConfig,
    PostFilter,
    RecommendationRequest,
    ScenarioConfig,
    UptrendzService,
)


def main() -> None:
    service = UptrendzService()

    # 1. A system domain is a fully isolated tenant.
    shop = service.create_system_domain("book shop")
    print(f"created domain {shop.id!r} with namespace {shop.storage_namespace!r}")

    # 2. Declare what a 'book' looks like; this materializes an upload endpoint.
    schema = service.define_entity_schema(
        shop.id,
        EntityKind.ITEM,
        "book",
        [
            AttributeSpec("blurb", AttributeKind.FREE_TEXT_ENGLISH),
            AttributeSpec("shelves", AttributeKind.CATEGORICAL_MULTI),
            AttributeSpec("price", AttributeKind.NUMERIC_REAL),
        ],
    )
    print(f"book uploads go to PUT {schema.upload_endpoint}/{{id}}")

    # 3. Declare which interactions exist and how much they count.
    service.define_interaction_type(
        shop.id,
        InteractionTypeConfig(
            domain_id=shop.id,
            name="purchase",
            explicitness=Explicitness.IMPLICIT,
            default_weight=2.0,
            actor_mode=ActorMode.BOTH,
            track_timestamp=True,
            target=InteractionTarget.USER_ITEM,
            target_entity_type="book",
        ),
    )

    # 4. Scenarios bind an algorithm + filters to a live endpoint.
    bestsellers = service.create_scenario(
        shop.id,
        ScenarioConfig(
            domain_id=shop.id,
            scenario_id="bestsellers-under-20",
            target_entity_type="book",
            audience=Audience.BOTH,
            context=ContextKind.NONE,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.MOST_POPULAR,
                interaction_subset=frozenset({"purchase"}),
            ),
            post_filters=(PostFilter("price", FilterMode.NUMERIC_RANGE, min=0, max=20),),
        ),
    )
    similar = service.create_scenario(
        shop.id,
        ScenarioConfig(
            domain_id=shop.id,
            scenario_id="similar-books",
            target_entity_type="book",
            audience=Audience.BOTH,
            context=ContextKind.ITEM_ID,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.CONTENT_BASED, cbf_attributes=frozenset({"blurb"})
            ),
        ),
    )
    print(f"scenarios live at GET {bestsellers.recommendation_endpoint}")
    print(f"             and GET {similar.recommendation_endpoint}")

    # 5. Upload a few books and record purchases.
    catalog = {
        "b1": ("A quiet harbor town hides an old secret", ["mystery"], 14.0),
        "b2": ("A harbor detective and the town secret", ["mystery"], 24.0),
        "b3": ("Cooking with fire: stove and flame", ["cooking"], 18.0),
        "b4": ("Storms over the harbor: a town divided", ["mystery", "drama"], 9.0),
    }
    for book_id, (blurb, shelves, price) in catalog.items():
        service.upsert_entity(
            shop.id,
            "book",
            EntityRecord(book_id, {"blurb": blurb, "shelves": shelves, "price": price}),
        )
    purchases = [("alice", "b1"), ("alice", "b3"), ("bob", "b1"), ("bob", "b4"), ("carol", "b1")]
    for user, book in purchases:
        service.record_interaction(
            shop.id,
            InteractionEvent(
                domain_id=shop.id,
                interaction_type="purchase",
                actor=f"u:{user}",
                target_id=book,
            ),
        )

    # 6. Ask for recommendations; the answer reflects every acknowledged write.
    response = service.recommend(
        RecommendationRequest(
            domain_id=shop.id, scenario_id="bestsellers-under-20", session_id="visitor-7", k=3
        )
    )
    print("\nbestsellers under 20 (price-filtered most-popular):")
    for item in response.items:
        print(f"  {item['id']}  score={item['score']}")

    response = service.recommend(
        RecommendationRequest(
            domain_id=shop.id,
            scenario_id="similar-books",
            session_id="visitor-7",
            context_item_id="b1",
            k=3,
        )
    )
    print("\nbooks similar to b1 (TF-IDF over blurbs):")
    for item in response.items:
        print(f"  {item['id']}  score={item['score']:.4f}")

    service.close()


if __name__ == "__main__":
    main()

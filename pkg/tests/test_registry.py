"""Configuration registry: validation, endpoint derivation, persistence."""

import json

import pytest

from uptrendz import errors
from uptrendz.model import (
    ActorMode,
    AlgorithmSpec,
    AlgorithmVariant,
    AttributeKind,
    AttributeSpec,
    Audience,
    ContextKind,
    EntityKind,
    Explicitness,
    FilterMode,
    InteractionTarget,
    InteractionTypeConfig,
    PostFilter,
    ScenarioConfig,
)
from uptrendz.registry import (
    DomainConfig,
    Registry,
    canonical_json,
    recommendation_endpoint_path,
    upload_endpoint_path,
)

MOVIE_ATTRS = [
    AttributeSpec("title", AttributeKind.FREE_TEXT_ENGLISH),
    AttributeSpec("genres", AttributeKind.CATEGORICAL_MULTI),
    AttributeSpec("release", AttributeKind.DATE),
]


def rating_config(domain_id, name="rating", target="movie"):
    return InteractionTypeConfig(
        domain_id=domain_id,
        name=name,
        explicitness=Explicitness.EXPLICIT,
        default_weight=1.0,
        actor_mode=ActorMode.REGISTERED_ONLY,
        track_timestamp=True,
        target=InteractionTarget.USER_ITEM,
        target_entity_type=target,
    )


def scenario(domain_id, sid, target="movie", **kwargs):
    defaults = dict(
        audience=Audience.BOTH,
        context=ContextKind.NONE,
        algorithm=AlgorithmSpec(
            variant=AlgorithmVariant.MOST_POPULAR, interaction_subset=frozenset({"rating"})
        ),
    )
    defaults.update(kwargs)
    return ScenarioConfig(
        domain_id=domain_id, scenario_id=sid, target_entity_type=target, **defaults
    )


class TestSystemDomains:
    def test_create_assigns_id_and_namespace(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        assert domain.id == "movielens-1"
        assert domain.storage_namespace == "ns/movielens-1"
        assert registry.get(domain.id).domain == domain

    def test_empty_name_is_invalid_not_duplicate(self):
        registry = Registry()
        with pytest.raises(errors.InvalidName):
            registry.create_system_domain("")

    def test_duplicate_name_rejected(self):
        registry = Registry()
        registry.create_system_domain("startup-founding")
        with pytest.raises(errors.DuplicateName):
            registry.create_system_domain("startup-founding")

    def test_distinct_names_same_slug_get_distinct_namespaces(self):
        registry = Registry()
        a = registry.create_system_domain("My Shop")
        b = registry.create_system_domain("my shop")
        assert a.id != b.id
        assert a.storage_namespace != b.storage_namespace

    def test_overlong_name_rejected(self):
        with pytest.raises(errors.InvalidName):
            Registry().create_system_domain("x" * 129)


class TestEntitySchemas:
    def test_upload_endpoint_derivation(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        schema = registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        assert schema.upload_endpoint == "/domains/movielens-1/catalog/movie"
        assert schema.entity_type_id == "movie"

    def test_endpoint_derivation_is_pure(self):
        assert upload_endpoint_path("d-1", "movie") == upload_endpoint_path("d-1", "movie")
        assert recommendation_endpoint_path("d-1", "s") == "/domains/d-1/scenarios/s/recommendations"

    def test_duplicate_attribute_name(self):
        registry = Registry()
        domain = registry.create_system_domain("shop")
        with pytest.raises(errors.InvalidAttribute) as exc:
            registry.define_entity_schema(
                domain.id,
                EntityKind.ITEM,
                "product",
                [
                    AttributeSpec("price", AttributeKind.NUMERIC_REAL),
                    AttributeSpec("price", AttributeKind.NUMERIC_INTEGER),
                ],
            )
        assert exc.value.name == "price"
        assert exc.value.reason == "duplicate"

    def test_bad_attribute_name(self):
        registry = Registry()
        domain = registry.create_system_domain("shop")
        with pytest.raises(errors.InvalidAttribute):
            registry.define_entity_schema(
                domain.id,
                EntityKind.ITEM,
                "product",
                [AttributeSpec("price tag", AttributeKind.NUMERIC_REAL)],
            )

    def test_attribute_count_cap(self):
        registry = Registry()
        domain = registry.create_system_domain("shop")
        attrs = [AttributeSpec(f"a{i}", AttributeKind.NUMERIC_REAL) for i in range(257)]
        with pytest.raises(errors.InvalidAttribute):
            registry.define_entity_schema(domain.id, EntityKind.ITEM, "product", attrs)

    def test_multiple_item_level_domains_in_one_system_domain(self):
        registry = Registry()
        domain = registry.create_system_domain("startup")
        idea = registry.define_entity_schema(
            domain.id,
            EntityKind.ITEM,
            "innovation-idea",
            [
                AttributeSpec("description", AttributeKind.FREE_TEXT_ENGLISH),
                AttributeSpec("stage", AttributeKind.CATEGORICAL_SINGLE),
            ],
        )
        material = registry.define_entity_schema(
            domain.id,
            EntityKind.ITEM,
            "educational-material",
            [AttributeSpec("summary", AttributeKind.FREE_TEXT_GERMAN)],
        )
        assert idea.entity_type_id != material.entity_type_id
        assert len(registry.get(domain.id).schemas) == 2

    def test_duplicate_entity_type(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        with pytest.raises(errors.DuplicateEntityType):
            registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)

    def test_unknown_domain(self):
        with pytest.raises(errors.UnknownDomain):
            Registry().define_entity_schema("nope", EntityKind.ITEM, "movie", MOVIE_ATTRS)

    def test_schema_evolution_add_only(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        updated = registry.add_attributes(
            domain.id, "movie", [AttributeSpec("plot", AttributeKind.FREE_TEXT_ENGLISH)]
        )
        assert updated.attribute("plot") is not None
        assert updated.attribute("title") is not None
        with pytest.raises(errors.InvalidAttribute):
            registry.add_attributes(
                domain.id, "movie", [AttributeSpec("title", AttributeKind.DATE)]
            )

    def test_exactly_seven_attribute_kinds(self):
        assert len(AttributeKind) == 7
        with pytest.raises(ValueError):
            AttributeKind("embedding")


class TestInteractionTypes:
    def test_register(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        stored = registry.define_interaction_type(domain.id, rating_config(domain.id))
        assert stored.name == "rating"
        assert registry.get_interaction_type(domain.id, "rating") == stored

    def test_duplicate(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        registry.define_interaction_type(domain.id, rating_config(domain.id))
        with pytest.raises(errors.DuplicateInteractionType):
            registry.define_interaction_type(domain.id, rating_config(domain.id))

    def test_unknown_target_entity_type(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        with pytest.raises(errors.UnknownEntityType):
            registry.define_interaction_type(domain.id, rating_config(domain.id, target="book"))

    def test_negative_default_weight(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        bad = InteractionTypeConfig(
            domain_id=domain.id,
            name="boo",
            explicitness=Explicitness.IMPLICIT,
            default_weight=-1.0,
            actor_mode=ActorMode.BOTH,
            track_timestamp=False,
            target=InteractionTarget.USER_ITEM,
            target_entity_type="movie",
        )
        with pytest.raises(errors.InvalidWeights):
            registry.define_interaction_type(domain.id, bad)


class TestScenarios:
    def build(self):
        registry = Registry()
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        registry.define_interaction_type(domain.id, rating_config(domain.id))
        return registry, domain.id

    def test_content_based_scenario_gets_endpoint(self):
        registry, domain_id = self.build()
        created = registry.create_scenario(
            domain_id,
            scenario(
                domain_id,
                "similar-movies",
                context=ContextKind.ITEM_ID,
                algorithm=AlgorithmSpec(
                    variant=AlgorithmVariant.CONTENT_BASED, cbf_attributes=frozenset({"title"})
                ),
            ),
        )
        assert created.recommendation_endpoint == (
            "/domains/movielens-1/scenarios/similar-movies/recommendations"
        )

    def test_most_popular_with_post_filter(self):
        registry, domain_id = self.build()
        created = registry.create_scenario(
            domain_id,
            scenario(
                domain_id,
                "popular-horror-movies",
                post_filters=(PostFilter("genres", FilterMode.CONTAINS, value="Horror"),),
            ),
        )
        assert created.post_filters[0].value == "Horror"

    def test_cbf_requires_free_text_attribute(self):
        registry, domain_id = self.build()
        with pytest.raises(errors.NonTextAttribute):
            registry.create_scenario(
                domain_id,
                scenario(
                    domain_id,
                    "bad-cbf",
                    algorithm=AlgorithmSpec(
                        variant=AlgorithmVariant.CONTENT_BASED,
                        cbf_attributes=frozenset({"genres"}),
                    ),
                ),
            )

    def test_subset_must_be_declared(self):
        registry, domain_id = self.build()
        with pytest.raises(errors.UnknownInteractionType):
            registry.create_scenario(
                domain_id,
                scenario(
                    domain_id,
                    "bad-subset",
                    algorithm=AlgorithmSpec(
                        variant=AlgorithmVariant.MOST_POPULAR,
                        interaction_subset=frozenset({"click"}),
                    ),
                ),
            )

    def test_subset_required_where_applicable(self):
        registry, domain_id = self.build()
        with pytest.raises(errors.InvalidScenario):
            registry.create_scenario(
                domain_id,
                scenario(
                    domain_id,
                    "empty-subset",
                    algorithm=AlgorithmSpec(variant=AlgorithmVariant.MOST_POPULAR),
                ),
            )

    def test_cross_domain_hybrid_rejected(self):
        registry = Registry()
        domain = registry.create_system_domain("startup")
        registry.define_entity_schema(
            domain.id,
            EntityKind.ITEM,
            "innovation-idea",
            [AttributeSpec("description", AttributeKind.FREE_TEXT_ENGLISH)],
        )
        registry.define_entity_schema(
            domain.id,
            EntityKind.USER,
            "expert",
            [AttributeSpec("bio", AttributeKind.FREE_TEXT_ENGLISH)],
        )
        registry.define_interaction_type(
            domain.id, rating_config(domain.id, name="vote", target="innovation-idea")
        )
        registry.create_scenario(
            domain_id := domain.id,
            scenario(
                domain_id,
                "similar-ideas",
                target="innovation-idea",
                context=ContextKind.ITEM_ID,
                algorithm=AlgorithmSpec(
                    variant=AlgorithmVariant.CONTENT_BASED,
                    cbf_attributes=frozenset({"description"}),
                ),
            ),
        )
        registry.create_scenario(
            domain_id,
            scenario(
                domain_id,
                "similar-experts",
                target="expert",
                context=ContextKind.ITEM_ID,
                algorithm=AlgorithmSpec(
                    variant=AlgorithmVariant.CONTENT_BASED, cbf_attributes=frozenset({"bio"})
                ),
            ),
        )
        with pytest.raises(errors.CrossDomainHybrid):
            registry.create_scenario(
                domain_id,
                scenario(
                    domain_id,
                    "mixed-hybrid",
                    target="innovation-idea",
                    algorithm=AlgorithmSpec(
                        variant=AlgorithmVariant.HYBRID,
                        hybrid_components=(("similar-ideas", 0.5), ("similar-experts", 0.5)),
                    ),
                ),
            )

    def test_hybrid_weights_not_all_zero(self):
        registry, domain_id = self.build()
        registry.create_scenario(domain_id, scenario(domain_id, "popular"))
        with pytest.raises(errors.InvalidWeights):
            registry.create_scenario(
                domain_id,
                scenario(
                    domain_id,
                    "zero-hybrid",
                    algorithm=AlgorithmSpec(
                        variant=AlgorithmVariant.HYBRID,
                        hybrid_components=(("popular", 0.0),),
                    ),
                ),
            )

    def test_hybrid_depth_one(self):
        registry, domain_id = self.build()
        registry.create_scenario(domain_id, scenario(domain_id, "popular"))
        registry.create_scenario(
            domain_id,
            scenario(
                domain_id,
                "hybrid-1",
                algorithm=AlgorithmSpec(
                    variant=AlgorithmVariant.HYBRID, hybrid_components=(("popular", 1.0),)
                ),
            ),
        )
        with pytest.raises(errors.NestedHybrid):
            registry.create_scenario(
                domain_id,
                scenario(
                    domain_id,
                    "hybrid-2",
                    algorithm=AlgorithmSpec(
                        variant=AlgorithmVariant.HYBRID, hybrid_components=(("hybrid-1", 1.0),)
                    ),
                ),
            )

    def test_hybrid_component_must_exist(self):
        registry, domain_id = self.build()
        with pytest.raises(errors.UnknownScenario):
            registry.create_scenario(
                domain_id,
                scenario(
                    domain_id,
                    "dangling",
                    algorithm=AlgorithmSpec(
                        variant=AlgorithmVariant.HYBRID, hybrid_components=(("missing", 1.0),)
                    ),
                ),
            )


class TestValidateAndPersist:
    def test_fresh_registry_is_consistent(self):
        assert Registry().validate() == []

    def test_full_walkthrough_config_validates_cleanly(self):
        registry, domain_id = TestScenarios().build()
        registry.define_entity_schema(
            domain_id,
            EntityKind.USER,
            "user",
            [AttributeSpec("age", AttributeKind.NUMERIC_INTEGER)],
        )
        registry.create_scenario(
            domain_id,
            scenario(
                domain_id,
                "similar-movies",
                context=ContextKind.ITEM_ID,
                algorithm=AlgorithmSpec(
                    variant=AlgorithmVariant.CONTENT_BASED, cbf_attributes=frozenset({"title"})
                ),
            ),
        )
        registry.create_scenario(
            domain_id,
            scenario(
                domain_id,
                "popular-horror-movies",
                post_filters=(PostFilter("genres", FilterMode.CONTAINS, value="Horror"),),
            ),
        )
        assert registry.validate() == []

    def test_dangling_reference_detected(self):
        registry, domain_id = TestScenarios().build()
        registry.create_scenario(domain_id, scenario(domain_id, "popular"))
        config = registry.get(domain_id)
        config.schemas.pop("movie")  # simulate a corrupted registry
        violations = registry.validate()
        assert violations, "expected violations after deleting the entity type"
        assert any(v.code == "DanglingReference" for v in violations)

    def test_namespace_collision_detected(self):
        registry = Registry()
        a = registry.create_system_domain("alpha")
        b = registry.create_system_domain("beta")
        clash = DomainConfig(domain=b.__class__(
            id=b.id, name=b.name, storage_namespace=a.storage_namespace, created_at=b.created_at
        ))
        registry._domains[b.id] = clash
        assert any(v.code == "NamespaceCollision" for v in registry.validate())

    def test_round_trip_is_byte_identical(self, tmp_path):
        registry = Registry(tmp_path)
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        registry.define_interaction_type(domain.id, rating_config(domain.id))
        registry.create_scenario(
            domain.id,
            scenario(
                domain.id,
                "popular-horror-movies",
                post_filters=(PostFilter("genres", FilterMode.CONTAINS, value="Horror"),),
                echo_attributes=("title",),
            ),
        )
        first = canonical_json(registry.to_document(domain.id))
        restored = Registry()
        restored.load_document(json.loads(first))
        second = canonical_json(restored.to_document(domain.id))
        assert first == second

    def test_persisted_document_loads_from_disk(self, tmp_path):
        registry = Registry(tmp_path)
        domain = registry.create_system_domain("movielens")
        registry.define_entity_schema(domain.id, EntityKind.ITEM, "movie", MOVIE_ATTRS)
        on_disk = tmp_path / "ns" / domain.id / "config.json"
        assert on_disk.is_file()
        fresh = Registry(tmp_path)
        assert fresh.load_from_disk() == [domain.id]
        assert fresh.to_document(domain.id) == registry.to_document(domain.id)

    def test_id_counter_survives_reload(self, tmp_path):
        registry = Registry(tmp_path)
        registry.create_system_domain("shop")
        fresh = Registry(tmp_path)
        fresh.load_from_disk()
        second = fresh.create_system_domain("Shop")
        assert second.id == "shop-2"

import pytest

from uptrendz import (
    ActorMode,
    AttributeKind,
    AttributeSpec,
    EntityKind,
    EntityRecord,
    Explicitness,
    InteractionEvent,
    InteractionTarget,
    InteractionTypeConfig,
    UptrendzService,
)


@pytest.fixture
def service():
    with UptrendzService() as svc:
        yield svc


@pytest.fixture
def durable_service(tmp_path):
    with UptrendzService(data_dir=tmp_path / "data") as svc:
        yield svc


def build_movie_domain(svc: UptrendzService, name: str = "movielens") -> str:
    """Small movie domain used across test modules: movie + user schemas,
    explicit 'rating' and implicit 'view' interactions."""
    domain = svc.create_system_domain(name)
    svc.define_entity_schema(
        domain.id,
        EntityKind.ITEM,
        "movie",
        [
            AttributeSpec("title", AttributeKind.FREE_TEXT_ENGLISH),
            AttributeSpec("genres", AttributeKind.CATEGORICAL_MULTI),
            AttributeSpec("release", AttributeKind.DATE),
        ],
    )
    svc.define_entity_schema(
        domain.id,
        EntityKind.USER,
        "user",
        [
            AttributeSpec("age", AttributeKind.NUMERIC_INTEGER),
            AttributeSpec("gender", AttributeKind.CATEGORICAL_SINGLE),
            AttributeSpec("occupation", AttributeKind.CATEGORICAL_SINGLE),
        ],
    )
    svc.define_interaction_type(
        domain.id,
        InteractionTypeConfig(
            domain_id=domain.id,
            name="rating",
            explicitness=Explicitness.EXPLICIT,
            default_weight=1.0,
            actor_mode=ActorMode.REGISTERED_ONLY,
            track_timestamp=True,
            target=InteractionTarget.USER_ITEM,
            target_entity_type="movie",
        ),
    )
    svc.define_interaction_type(
        domain.id,
        InteractionTypeConfig(
            domain_id=domain.id,
            name="view",
            explicitness=Explicitness.IMPLICIT,
            default_weight=0.5,
            actor_mode=ActorMode.BOTH,
            track_timestamp=False,
            target=InteractionTarget.USER_ITEM,
            target_entity_type="movie",
        ),
    )
    return domain.id


def add_movie(svc, domain_id, movie_id, title="", genres=(), release=None):
    values = {"title": title, "genres": list(genres)}
    if release:
        values["release"] = release
    return svc.upsert_entity(domain_id, "movie", EntityRecord(movie_id, values))


def add_user(svc, domain_id, user_id, age=30, gender="F", occupation="engineer"):
    values = {"age": age, "gender": gender, "occupation": occupation}
    return svc.upsert_entity(domain_id, "user", EntityRecord(user_id, values))


def rate(svc, domain_id, user_id, movie_id, value, timestamp=None):
    return svc.record_interaction(
        domain_id,
        InteractionEvent(
            domain_id=domain_id,
            interaction_type="rating",
            actor=f"u:{user_id}",
            target_id=movie_id,
            value=value,
            timestamp=timestamp,
        ),
    )


def view(svc, domain_id, actor, movie_id):
    return svc.record_interaction(
        domain_id,
        InteractionEvent(
            domain_id=domain_id,
            interaction_type="view",
            actor=actor,
            target_id=movie_id,
        ),
    )

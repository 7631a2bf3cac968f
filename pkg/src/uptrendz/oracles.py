"""Brute-force reference implementations and the randomized comparison harness.

The oracles recompute every ranking directly from raw event lists and the
written-out definitions (dense affinity rows, explicit pairwise cosines,
naive filter re-checks), sharing no code with the incremental engines. The
harness generates seeded micro-instances, feeds them through a real
in-memory domain, and asserts engine-vs-oracle equality: identical id order,
scores within 1e-9.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

from . import engines, errors
from .content import quantize
from .model import (
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
    actor_entity_id,
    is_registered,
)
from .registry import Registry
from .store import CatalogStore, EntityRecord, InteractionEvent

SCORE_TOLERANCE = 1e-9

RowKey = tuple[str, str]  # (target entity type, target id)


@dataclass
class RawEvent:
    itype: str
    actor: str
    target_id: str
    value: Optional[float] = None


@dataclass
class Instance:
    """One randomized micro-instance: a tiny domain plus engine arguments."""

    seed: int
    item_values: dict[str, dict] = field(default_factory=dict)
    user_values: dict[str, dict] = field(default_factory=dict)
    itypes: dict[str, dict] = field(default_factory=dict)  # name -> config fields
    events: list[RawEvent] = field(default_factory=list)
    subset: list[str] = field(default_factory=list)
    overrides: dict[str, float] = field(default_factory=dict)
    neighbors_k: int = 50
    filters: list[PostFilter] = field(default_factory=list)
    user_filters: list[PostFilter] = field(default_factory=list)
    k: Optional[int] = None
    texts: dict[str, list[str]] = field(default_factory=dict)  # item id -> tokens


# --- shared oracle primitives -------------------------------------------------


def oracle_rows(
    instance: Instance, subset: list[str], weights: dict[str, float]
) -> tuple[dict[str, dict[RowKey, float]], dict[str, set[RowKey]]]:
    """Dense affinity rows straight from the event list, plus touched keys."""
    rows: dict[str, dict[RowKey, float]] = {}
    touched: dict[str, set[RowKey]] = {}
    for event in instance.events:
        if event.itype not in subset:
            continue
        config = instance.itypes[event.itype]
        key = (config["target_entity_type"], event.target_id)
        raw = 1.0 if event.value is None else event.value
        contribution = weights[event.itype] * raw
        rows.setdefault(event.actor, {})
        rows[event.actor][key] = rows[event.actor].get(key, 0.0) + contribution
        touched.setdefault(event.actor, set()).add(key)
    return rows, touched


def oracle_weights(instance: Instance) -> dict[str, float]:
    return {
        name: instance.overrides.get(name, instance.itypes[name]["default_weight"])
        for name in instance.subset
    }


def _cosine(row_u: dict[RowKey, float], row_v: dict[RowKey, float]) -> float:
    dot = 0.0
    for key in sorted(row_u):
        if key in row_v:
            dot += row_u[key] * row_v[key]
    norm_u = math.sqrt(sum(w * w for _, w in sorted(row_u.items())))
    norm_v = math.sqrt(sum(w * w for _, w in sorted(row_v.items())))
    if norm_u == 0.0 or norm_v == 0.0:
        return 0.0
    return dot / (norm_u * norm_v)


def oracle_filter(values: dict, post_filter: PostFilter) -> bool:
    present = post_filter.attribute in values
    value = values.get(post_filter.attribute)
    if post_filter.mode is FilterMode.CONTAINS:
        if not present:
            return False
        return value == post_filter.value if isinstance(value, str) else post_filter.value in value
    if post_filter.mode is FilterMode.EXCLUDES:
        if not present:
            return True
        return value != post_filter.value if isinstance(value, str) else post_filter.value not in value
    if not present or not isinstance(value, (int, float)) or isinstance(value, bool):
        return False
    return post_filter.min <= value <= post_filter.max


def _oracle_finish(
    scores: dict[str, float],
    entity_values: dict[str, dict],
    filters: list[PostFilter],
    k: Optional[int],
) -> list[tuple[str, float]]:
    kept = []
    for entity_id in sorted(scores):
        score = quantize(scores[entity_id])
        if score == 0.0:
            continue
        values = entity_values.get(entity_id, {})
        if all(oracle_filter(values, f) for f in filters):
            kept.append((entity_id, score))
    kept.sort(key=lambda pair: (-pair[1], pair[0]))
    return kept if k is None else kept[:k]


# --- per-engine oracles ---------------------------------------------------------


def oracle_most_popular(instance: Instance, target_etype: str) -> list[tuple[str, float]]:
    weights = oracle_weights(instance)
    rows, touched = oracle_rows(instance, instance.subset, weights)
    scores: dict[str, float] = {}
    for actor in sorted(rows):
        for (etype, target_id), affinity in sorted(rows[actor].items()):
            if etype == target_etype:
                scores[target_id] = scores.get(target_id, 0.0) + affinity
    for actor_touched in touched.values():
        for etype, target_id in actor_touched:
            if etype == target_etype:
                scores.setdefault(target_id, 0.0)
    return _oracle_finish(scores, instance.item_values, instance.filters, instance.k)


def oracle_collaborative(instance: Instance, target_etype: str, actor: str) -> list[tuple[str, float]]:
    weights = oracle_weights(instance)
    rows, touched = oracle_rows(instance, instance.subset, weights)
    if actor not in touched:
        raise errors.ColdStartActor(actor)
    row_u = rows.get(actor, {})
    sims = []
    for v in sorted(rows):
        if v == actor:
            continue
        sim = quantize(_cosine(row_u, rows[v]))
        if sim > 0.0:
            sims.append((sim, v))
    sims.sort(key=lambda pair: (-pair[0], pair[1]))
    neighbors = sims[: instance.neighbors_k]
    scores: dict[str, float] = {}
    sim_total = 0.0
    seen = {target_id for etype, target_id in touched[actor] if etype == target_etype}
    for sim, v in neighbors:
        sim_total += sim
        for (etype, target_id), affinity in rows[v].items():
            if etype != target_etype or target_id in seen or affinity == 0.0:
                continue
            scores[target_id] = scores.get(target_id, 0.0) + sim * affinity
    if sim_total > 0.0:
        scores = {target_id: s / sim_total for target_id, s in scores.items()}
    return _oracle_finish(scores, instance.item_values, instance.filters, instance.k)


def oracle_users_for_item(
    instance: Instance, user_etype: str, item_id: str
) -> list[tuple[str, float]]:
    weights = oracle_weights(instance)
    rows, touched = oracle_rows(instance, instance.subset, weights)
    item_etype = instance.itypes[instance.subset[0]]["target_entity_type"]
    item_key = (item_etype, item_id)
    raters = sorted(v for v in touched if item_key in touched[v])
    if not raters:
        raise errors.NoAudience(item_id)
    scores: dict[str, float] = {}
    for u in sorted(rows):
        if not is_registered(u) or item_key in touched.get(u, ()):
            continue
        user_id = actor_entity_id(u)
        if user_id not in instance.user_values:
            continue
        score = 0.0
        for v in raters:
            affinity = rows.get(v, {}).get(item_key, 0.0)
            if affinity == 0.0:
                continue
            score += _cosine(rows[u], rows[v]) * affinity
        scores[user_id] = score
    return _oracle_finish(scores, instance.user_values, instance.user_filters, instance.k)


def oracle_tfidf_vectors(texts: dict[str, list[str]]) -> dict[str, dict[str, float]]:
    """Dense TF-IDF from token lists: tf is the raw count,
    idf = ln((1+N)/(1+df)) + 1."""
    doc_count = len(texts)
    doc_freq: dict[str, int] = {}
    for tokens in texts.values():
        for term in set(tokens):
            doc_freq[term] = doc_freq.get(term, 0) + 1
    vectors = {}
    for doc_id, tokens in texts.items():
        counts: dict[str, int] = {}
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
        vectors[doc_id] = {
            term: count * (math.log((1 + doc_count) / (1 + doc_freq[term])) + 1.0)
            for term, count in counts.items()
        }
    return vectors


def oracle_content_based(instance: Instance, context_id: str) -> list[tuple[str, float]]:
    vectors = oracle_tfidf_vectors(instance.texts)
    context = vectors[context_id]
    if not context:
        raise errors.EmptyProfile(context_id)
    scores: dict[str, float] = {}
    for doc_id in sorted(vectors):
        if doc_id == context_id:
            continue
        terms = sorted(set(context) | set(vectors[doc_id]))
        dot = sum(context.get(t, 0.0) * vectors[doc_id].get(t, 0.0) for t in terms)
        norm_c = math.sqrt(sum(w * w for w in context.values()))
        norm_d = math.sqrt(sum(w * w for w in vectors[doc_id].values()))
        scores[doc_id] = dot / (norm_c * norm_d) if norm_c > 0 and norm_d > 0 else 0.0
    return _oracle_finish(scores, instance.item_values, instance.filters, instance.k)


def oracle_hybrid(
    components: list[tuple[list[tuple[str, float]], float]],
    item_values: dict[str, dict],
    filters: list[PostFilter],
    k: Optional[int],
) -> list[tuple[str, float]]:
    combined: dict[str, float] = {}
    for items, weight in components:
        if weight == 0.0 or not items:
            continue
        scores = [s for _, s in items]
        lo, hi = min(scores), max(scores)
        for entity_id, score in items:
            norm = 1.0 if hi == lo else (score - lo) / (hi - lo)
            combined[entity_id] = combined.get(entity_id, 0.0) + weight * norm
    kept = []
    for entity_id in sorted(combined):
        values = item_values.get(entity_id, {})
        if all(oracle_filter(values, f) for f in filters):
            kept.append((entity_id, quantize(combined[entity_id])))
    kept.sort(key=lambda pair: (-pair[1], pair[0]))
    return kept if k is None else kept[:k]


# --- instance generation ----------------------------------------------------------

_COLORS = ["red", "green", "blue", "amber"]
_TAGS = ["indie", "classic", "new", "long", "short"]
_VOCAB = ["moon", "river", "storm", "quiet", "iron", "glass", "night", "summer"]
_WEIGHT_CHOICES = [0.25, 0.5, 1.0, 1.5, 2.0]


def generate_instance(seed: int) -> Instance:
    rng = random.Random(seed)
    instance = Instance(seed=seed)

    n_items = rng.randint(3, 12)
    n_users = rng.randint(2, 8)
    n_sessions = rng.randint(0, 2)
    items = [f"i{n:02d}" for n in range(1, n_items + 1)]
    users = [f"p{n}" for n in range(1, n_users + 1)]
    actors = [f"u:{u}" for u in users] + [f"s:g{n}" for n in range(1, n_sessions + 1)]

    for item in items:
        instance.item_values[item] = {
            "color": rng.choice(_COLORS),
            "tags": sorted(rng.sample(_TAGS, rng.randint(0, 3))),
            "price": rng.randint(1, 40) * 0.25,
        }
        instance.texts[item] = [rng.choice(_VOCAB) for _ in range(rng.randint(0, 6))]
    for user in users:
        instance.user_values[user] = {"age": rng.randint(15, 70)}

    n_types = rng.randint(1, 3)
    for n in range(1, n_types + 1):
        name = f"act{n}"
        explicit = rng.random() < 0.5
        user_target = n_types >= 2 and n == n_types and rng.random() < 0.3
        instance.itypes[name] = {
            "explicitness": "explicit" if explicit else "implicit",
            "default_weight": rng.choice(_WEIGHT_CHOICES),
            "target_entity_type": "person" if user_target else "thing",
            "track_timestamp": rng.random() < 0.5,
        }

    item_types = [n for n, c in instance.itypes.items() if c["target_entity_type"] == "thing"]
    instance.subset = sorted(
        rng.sample(sorted(instance.itypes), rng.randint(1, len(instance.itypes)))
    )
    if not any(instance.itypes[t]["target_entity_type"] == "thing" for t in instance.subset):
        instance.subset = sorted(set(instance.subset) | {item_types[0]})
    for name in instance.subset:
        if rng.random() < 0.4:
            instance.overrides[name] = rng.choice([0.0] + _WEIGHT_CHOICES)

    n_events = rng.randint(5, 60)
    for _ in range(n_events):
        itype = rng.choice(sorted(instance.itypes))
        config = instance.itypes[itype]
        actor = rng.choice(actors)
        if config["target_entity_type"] == "person":
            target = rng.choice(users)
        else:
            target = rng.choice(items)
        value = float(rng.randint(1, 5)) if config["explicitness"] == "explicit" else None
        instance.events.append(RawEvent(itype, actor, target, value))

    instance.neighbors_k = rng.choice([1, 2, 3, 50])
    instance.k = rng.choice([None, 1, 2, 3, 5, 8])
    if rng.random() < 0.6:
        mode = rng.choice([FilterMode.CONTAINS, FilterMode.EXCLUDES])
        if rng.random() < 0.5:
            instance.filters.append(PostFilter("color", mode, value=rng.choice(_COLORS)))
        else:
            instance.filters.append(PostFilter("tags", mode, value=rng.choice(_TAGS)))
    if rng.random() < 0.4:
        lo = rng.randint(1, 30) * 0.25
        instance.filters.append(
            PostFilter("price", FilterMode.NUMERIC_RANGE, min=lo, max=lo + rng.randint(1, 20) * 0.25)
        )
    if rng.random() < 0.5:
        lo = float(rng.randint(15, 50))
        instance.user_filters.append(
            PostFilter("age", FilterMode.NUMERIC_RANGE, min=lo, max=lo + rng.randint(5, 30))
        )
    return instance


# --- harness -----------------------------------------------------------------------


def build_domain(instance: Instance) -> tuple[Registry, CatalogStore, str]:
    """Materialize the instance as a real in-memory domain."""
    registry = Registry()
    domain = registry.create_system_domain(f"oracle-{instance.seed}")
    registry.define_entity_schema(
        domain.id,
        EntityKind.ITEM,
        "thing",
        [
            AttributeSpec("color", AttributeKind.CATEGORICAL_SINGLE),
            AttributeSpec("tags", AttributeKind.CATEGORICAL_MULTI),
            AttributeSpec("price", AttributeKind.NUMERIC_REAL),
            AttributeSpec("blurb", AttributeKind.FREE_TEXT_ENGLISH),
        ],
    )
    registry.define_entity_schema(
        domain.id,
        EntityKind.USER,
        "person",
        [AttributeSpec("age", AttributeKind.NUMERIC_INTEGER)],
    )
    for name in sorted(instance.itypes):
        fields = instance.itypes[name]
        registry.define_interaction_type(
            domain.id,
            InteractionTypeConfig(
                domain_id=domain.id,
                name=name,
                explicitness=Explicitness(fields["explicitness"]),
                default_weight=fields["default_weight"],
                actor_mode=ActorMode.BOTH,
                track_timestamp=fields["track_timestamp"],
                target=InteractionTarget.USER_USER
                if fields["target_entity_type"] == "person"
                else InteractionTarget.USER_ITEM,
                target_entity_type=fields["target_entity_type"],
            ),
        )
    store = CatalogStore(registry)
    store.open_domain(domain.id)
    store.register_corpus(domain.id, "thing", frozenset({"blurb"}))
    for item_id in sorted(instance.item_values):
        values = dict(instance.item_values[item_id])
        values["blurb"] = " ".join(instance.texts[item_id])
        store.upsert_entity(domain.id, "thing", EntityRecord(item_id, values))
    for user_id in sorted(instance.user_values):
        store.upsert_entity(domain.id, "person", EntityRecord(user_id, instance.user_values[user_id]))
    for event in instance.events:
        store.record_interaction(
            domain.id,
            InteractionEvent(
                domain_id=domain.id,
                interaction_type=event.itype,
                actor=event.actor,
                target_id=event.target_id,
                value=event.value,
            ),
        )
    return registry, store, domain.id


def _assert_equal(
    name: str, instance: Instance, got: list[tuple[str, float]], want: list[tuple[str, float]]
) -> None:
    ok = len(got) == len(want) and all(
        g[0] == w[0] and abs(g[1] - w[1]) <= SCORE_TOLERANCE for g, w in zip(got, want)
    )
    if not ok:
        raise errors.OracleMismatch(
            f"{name} mismatch on seed {instance.seed}:\n"
            f"  engine: {got}\n  oracle: {want}\n  instance: {instance}"
        )


def check_instance(instance: Instance) -> dict[str, int]:
    """Run every engine against its oracle on one instance; returns check counts."""
    registry, store, domain_id = build_domain(instance)
    config = registry.get(domain_id)
    snapshot = store.snapshot(domain_id)
    checks: dict[str, int] = {}

    spec = AlgorithmSpec(
        variant=AlgorithmVariant.MOST_POPULAR,
        interaction_subset=frozenset(instance.subset),
        interaction_weights=tuple(sorted(instance.overrides.items())),
        neighbors_k=instance.neighbors_k,
    )

    got = engines.most_popular(snapshot, config, spec, "thing", instance.filters, instance.k)
    want = oracle_most_popular(instance, "thing")
    _assert_equal("most_popular", instance, got, want)
    checks["most_popular"] = 1

    rng = random.Random(instance.seed * 31 + 7)
    weights = oracle_weights(instance)
    rows, touched = oracle_rows(instance, instance.subset, weights)
    actors = sorted(set(e.actor for e in instance.events))
    if actors:
        actor = rng.choice(actors)
        if actor in touched:
            got = engines.collaborative(
                snapshot, config, spec, "thing", actor, instance.filters, instance.k
            )
            want = oracle_collaborative(instance, "thing", actor)
            _assert_equal("collaborative", instance, got, want)
            checks["collaborative"] = 1
        else:
            for fn in (
                lambda: engines.collaborative(
                    snapshot, config, spec, "thing", actor, instance.filters, instance.k
                ),
                lambda: oracle_collaborative(instance, "thing", actor),
            ):
                try:
                    fn()
                    raise AssertionError(f"expected ColdStartActor for {actor}")
                except errors.ColdStartActor:
                    pass
            checks["collaborative_cold"] = 1

    item_types = [t for t in instance.subset if instance.itypes[t]["target_entity_type"] == "thing"]
    ufi_subset = sorted(item_types)
    ufi_spec = AlgorithmSpec(
        variant=AlgorithmVariant.USER_FOR_ITEM,
        interaction_subset=frozenset(ufi_subset),
        interaction_weights=tuple(sorted(instance.overrides.items())),
        neighbors_k=instance.neighbors_k,
    )
    ufi_instance = Instance(**{**instance.__dict__, "subset": ufi_subset})
    item_id = rng.choice(sorted(instance.item_values))
    _, ufi_touched = oracle_rows(ufi_instance, ufi_subset, oracle_weights(ufi_instance))
    has_audience = any(("thing", item_id) in keys for keys in ufi_touched.values())
    if has_audience:
        got = engines.users_for_item(
            snapshot, config, ufi_spec, "person", item_id, instance.user_filters, instance.k
        )
        want = oracle_users_for_item(ufi_instance, "person", item_id)
        _assert_equal("users_for_item", instance, got, want)
        checks["users_for_item"] = 1
    else:
        for fn in (
            lambda: engines.users_for_item(
                snapshot, config, ufi_spec, "person", item_id, instance.user_filters, instance.k
            ),
            lambda: oracle_users_for_item(ufi_instance, "person", item_id),
        ):
            try:
                fn()
                raise AssertionError(f"expected NoAudience for {item_id}")
            except errors.NoAudience:
                pass
        checks["users_for_item_no_audience"] = 1

    cbf_spec = AlgorithmSpec(
        variant=AlgorithmVariant.CONTENT_BASED, cbf_attributes=frozenset({"blurb"})
    )
    context_id = rng.choice(sorted(instance.texts))
    if instance.texts[context_id]:
        got = engines.content_based(
            snapshot, cbf_spec, "thing", context_id, instance.filters, instance.k
        )
        want = oracle_content_based(instance, context_id)
        _assert_equal("content_based", instance, got, want)
        checks["content_based"] = 1
    else:
        for fn in (
            lambda: engines.content_based(
                snapshot, cbf_spec, "thing", context_id, instance.filters, instance.k
            ),
            lambda: oracle_content_based(instance, context_id),
        ):
            try:
                fn()
                raise AssertionError(f"expected EmptyProfile for {context_id}")
            except errors.EmptyProfile:
                pass
        checks["content_based_empty"] = 1

    mp_full = engines.most_popular(snapshot, config, spec, "thing", (), None)
    cbf_full = (
        engines.content_based(snapshot, cbf_spec, "thing", context_id, (), None)
        if instance.texts[context_id]
        else []
    )
    hybrid_weights = (rng.choice([0.0, 0.25, 0.5, 1.0]), rng.choice([0.25, 0.5, 1.0]))
    components = [(mp_full, hybrid_weights[0]), (cbf_full, hybrid_weights[1])]
    entity_values = snapshot.state.entities.get("thing")
    got = engines.hybrid_combine(components, instance.filters, entity_values, instance.k)
    want = oracle_hybrid(components, instance.item_values, instance.filters, instance.k)
    _assert_equal("hybrid", instance, got, want)
    checks["hybrid"] = 1
    return checks


def run_oracles(seed: int, instances: int = 120) -> dict[str, int]:
    """Engine-vs-oracle equality over seeded random micro-instances.

    Raises OracleMismatch (with the instance dump) on the first divergence.
    """
    totals: dict[str, int] = {"instances": 0}
    rng = random.Random(seed)
    for _ in range(instances):
        instance_seed = rng.randrange(1 << 30)
        instance = generate_instance(instance_seed)
        for name, n in check_instance(instance).items():
            totals[name] = totals.get(name, 0) + n
        totals["instances"] += 1
    return totals

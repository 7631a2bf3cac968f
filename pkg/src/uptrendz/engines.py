"""The five recommendation engines plus post-filtering.

All engines are pure functions over an immutable domain snapshot: identical
snapshot and arguments yield identical output. Rankings sort by descending
score with ties broken by ascending entity id, and scores are canonically
quantized (see ``content.quantize``) so independently computed rankings
agree on ties. Candidates whose final score quantizes to zero are dropped:
a zero carries no preference signal.

Affinity of an actor for a target is the weighted sum of that actor's raw
per-type aggregates, ``sum_t w_t * agg_t(actor, target)``, where ``w_t``
comes from the scenario's overrides or the interaction type's default.
Because different interaction types may target different entity types,
affinity rows live in a keyspace of (target entity type, target id); types
with different target entity types never share coordinates.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Optional

from . import errors
from .content import quantize, similar_entities
from .model import (
    AlgorithmSpec,
    EntitySchema,
    FilterMode,
    PostFilter,
    actor_entity_id,
    is_registered,
)
from .pmap import PMap
from .registry import DomainConfig, _check_filter_against_schema
from .store import DomainSnapshot

_EMPTY = PMap()

ScoredList = list[tuple[str, float]]


def resolve_weights(config: DomainConfig, spec: AlgorithmSpec) -> dict[str, float]:
    overrides = spec.weight_overrides()
    return {
        name: overrides.get(name, config.interaction_types[name].default_weight)
        for name in sorted(spec.interaction_subset)
    }


def _target_etype(config: DomainConfig, itype_name: str) -> str:
    return config.interaction_types[itype_name].target_entity_type


# --- post-filters -------------------------------------------------------------


def passes_filter(values: Mapping, post_filter: PostFilter) -> bool:
    """A missing attribute fails Contains and NumericRange but passes Excludes."""
    value = values.get(post_filter.attribute)
    if post_filter.mode is FilterMode.CONTAINS:
        if value is None:
            return False
        if isinstance(value, str):
            return value == post_filter.value
        return post_filter.value in value
    if post_filter.mode is FilterMode.EXCLUDES:
        if value is None:
            return True
        if isinstance(value, str):
            return value != post_filter.value
        return post_filter.value not in value
    # numeric range, inclusive bounds
    if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
        return False
    return post_filter.min <= value <= post_filter.max


def apply_post_filters(
    candidates: ScoredList,
    filters: Iterable[PostFilter],
    entity_values: PMap,
    schema: Optional[EntitySchema] = None,
) -> ScoredList:
    """Keep candidates satisfying every filter (conjunction), before truncation."""
    filters = tuple(filters)
    if schema is not None:
        for post_filter in filters:
            _check_filter_against_schema(post_filter, schema)
    if not filters:
        return candidates
    kept = []
    for entity_id, score in candidates:
        values = entity_values.get(entity_id) or {}
        if all(passes_filter(values, f) for f in filters):
            kept.append((entity_id, score))
    return kept


def _finalize(
    candidates: ScoredList,
    filters: Iterable[PostFilter],
    entity_values: PMap,
    k: Optional[int],
) -> ScoredList:
    kept = apply_post_filters(candidates, filters, entity_values)
    kept.sort(key=lambda pair: (-pair[1], pair[0]))
    return kept if k is None else kept[:k]


# --- most popular ---------------------------------------------------------------


def most_popular(
    snapshot: DomainSnapshot,
    config: DomainConfig,
    spec: AlgorithmSpec,
    target_entity_type: str,
    filters: Iterable[PostFilter] = (),
    k: Optional[int] = None,
) -> ScoredList:
    """Sum of all actors' affinities per target; only types recommending the
    scenario's target entity type contribute."""
    state = snapshot.state
    weights = resolve_weights(config, spec)
    scores: dict[str, float] = {}
    for name in sorted(spec.interaction_subset):
        if _target_etype(config, name) != target_entity_type:
            continue
        weight = weights[name]
        if weight == 0.0:
            continue
        totals = state.totals.get(name)
        if totals is None:
            continue
        for target_id, total in totals.items():
            scores[target_id] = scores.get(target_id, 0.0) + weight * total
    candidates = []
    for target_id in sorted(scores):
        score = quantize(scores[target_id])
        if score != 0.0:
            candidates.append((target_id, score))
    entity_values = state.entities.get(target_entity_type) or _EMPTY
    return _finalize(candidates, filters, entity_values, k)


# --- user-based collaborative filtering -----------------------------------------


def _norm_sq(state, config: DomainConfig, actor: str, subset: list[str], weights) -> float:
    moments = state.moments.get(actor) or {}
    total = 0.0
    for i, t in enumerate(subset):
        et = _target_etype(config, t)
        for s in subset[i:]:
            if _target_etype(config, s) != et:
                continue
            val = moments.get((t, s), 0.0)
            if val == 0.0:
                continue
            term = weights[t] * weights[s] * val
            total += term if s == t else 2.0 * term
    return total


def _actor_dots(state, config: DomainConfig, actor: str, subset: list[str], weights) -> dict[str, float]:
    """Dot products of one actor's affinity row with every other actor's row."""
    dots: dict[str, float] = {}
    for t in subset:
        wt = weights[t]
        if wt == 0.0:
            continue
        row_u = (state.agg.get(t) or _EMPTY).get(actor)
        if not row_u:
            continue
        et = _target_etype(config, t)
        for s in subset:
            ws = weights[s]
            if ws == 0.0 or _target_etype(config, s) != et:
                continue
            postings = state.postings.get(s)
            if postings is None:
                continue
            pair_weight = wt * ws
            for target_id, a_u in row_u.items():
                if a_u == 0.0:
                    continue
                entry = postings.get(target_id)
                if not entry:
                    continue
                contribution = pair_weight * a_u
                for v, a_v in entry.items():
                    if v != actor and a_v != 0.0:
                        dots[v] = dots.get(v, 0.0) + contribution * a_v
    return dots


def _touched(state, config: DomainConfig, actor: str, subset: list[str], target_entity_type) -> set:
    touched = set()
    for t in subset:
        if target_entity_type is not None and _target_etype(config, t) != target_entity_type:
            continue
        row = (state.agg.get(t) or _EMPTY).get(actor)
        if row:
            touched.update(row)
    return touched


def neighborhood(
    snapshot: DomainSnapshot,
    config: DomainConfig,
    spec: AlgorithmSpec,
    actor: str,
) -> list[tuple[float, str]]:
    """Top neighbors by cosine similarity of affinity rows, similarity > 0,
    ties broken by ascending actor key. Similarities are quantized before
    selection so the cut at ``neighbors_k`` is reproducible."""
    state = snapshot.state
    subset = sorted(spec.interaction_subset)
    weights = resolve_weights(config, spec)
    if not _touched(state, config, actor, subset, None):
        raise errors.ColdStartActor(actor)
    norm_u = math.sqrt(_norm_sq(state, config, actor, subset, weights))
    if norm_u == 0.0:
        return []
    dots = _actor_dots(state, config, actor, subset, weights)
    sims = []
    for v in sorted(dots):
        dot = dots[v]
        if dot <= 0.0:
            continue
        norm_v = math.sqrt(_norm_sq(state, config, v, subset, weights))
        if norm_v == 0.0:
            continue
        sim = quantize(dot / (norm_u * norm_v))
        if sim > 0.0:
            sims.append((sim, v))
    sims.sort(key=lambda pair: (-pair[0], pair[1]))
    return sims[: spec.neighbors_k]


def collaborative(
    snapshot: DomainSnapshot,
    config: DomainConfig,
    spec: AlgorithmSpec,
    target_entity_type: str,
    actor: str,
    filters: Iterable[PostFilter] = (),
    k: Optional[int] = None,
) -> ScoredList:
    """User-based kNN: similarity-weighted average of neighbors' affinities
    over targets the actor has not interacted with."""
    state = snapshot.state
    subset = sorted(spec.interaction_subset)
    weights = resolve_weights(config, spec)
    neighbors = neighborhood(snapshot, config, spec, actor)
    if not neighbors:
        entity_values = state.entities.get(target_entity_type) or _EMPTY
        return _finalize([], filters, entity_values, k)
    seen = _touched(state, config, actor, subset, target_entity_type)
    scores: dict[str, float] = {}
    sim_total = 0.0
    for sim, v in neighbors:
        sim_total += sim
        for t in subset:
            if _target_etype(config, t) != target_entity_type:
                continue
            weight = weights[t]
            if weight == 0.0:
                continue
            row_v = (state.agg.get(t) or _EMPTY).get(v)
            if not row_v:
                continue
            for target_id, a_v in row_v.items():
                if a_v == 0.0 or target_id in seen:
                    continue
                scores[target_id] = scores.get(target_id, 0.0) + sim * weight * a_v
    candidates = []
    for target_id in sorted(scores):
        score = quantize(scores[target_id] / sim_total)
        if score != 0.0:
            candidates.append((target_id, score))
    entity_values = state.entities.get(target_entity_type) or _EMPTY
    return _finalize(candidates, filters, entity_values, k)


# --- user recommender for an item ------------------------------------------------


def users_for_item(
    snapshot: DomainSnapshot,
    config: DomainConfig,
    spec: AlgorithmSpec,
    target_entity_type: str,
    context_item_id: str,
    filters: Iterable[PostFilter] = (),
    k: Optional[int] = None,
) -> ScoredList:
    """Rank registered users (without prior affinity to the item) by
    similarity-weighted affinity of the item's existing audience."""
    state = snapshot.state
    subset = sorted(spec.interaction_subset)
    weights = resolve_weights(config, spec)
    item_etype = _target_etype(config, subset[0])
    if context_item_id not in (state.entities.get(item_etype) or _EMPTY):
        raise errors.UnknownEntity(f"{item_etype}/{context_item_id}")

    raters: set[str] = set()
    affinity: dict[str, float] = {}
    for t in subset:
        entry = (state.postings.get(t) or _EMPTY).get(context_item_id)
        if not entry:
            continue
        weight = weights[t]
        for v, a_v in entry.items():
            raters.add(v)
            if weight != 0.0 and a_v != 0.0:
                affinity[v] = affinity.get(v, 0.0) + weight * a_v
    if not raters:
        raise errors.NoAudience(context_item_id)

    # z = sum over raters of (affinity / row norm) * affinity row; then
    # score(u) = dot(row_u, z) / ||row_u|| without computing pairwise sims.
    z: dict[tuple[str, str], float] = {}
    for v in sorted(raters):
        aff_v = affinity.get(v, 0.0)
        if aff_v == 0.0:
            continue
        norm_v = math.sqrt(_norm_sq(state, config, v, subset, weights))
        if norm_v == 0.0:
            continue
        coeff = aff_v / norm_v
        for t in subset:
            weight = weights[t]
            if weight == 0.0:
                continue
            et = _target_etype(config, t)
            row_v = (state.agg.get(t) or _EMPTY).get(v)
            if not row_v:
                continue
            for target_id, a_v in row_v.items():
                if a_v != 0.0:
                    key = (et, target_id)
                    z[key] = z.get(key, 0.0) + coeff * weight * a_v

    acc: dict[str, float] = {}
    for (et, target_id), z_val in z.items():
        if z_val == 0.0:
            continue
        for t in subset:
            weight = weights[t]
            if weight == 0.0 or _target_etype(config, t) != et:
                continue
            entry = (state.postings.get(t) or _EMPTY).get(target_id)
            if not entry:
                continue
            for u, a_u in entry.items():
                if a_u != 0.0:
                    acc[u] = acc.get(u, 0.0) + z_val * weight * a_u

    user_entities = state.entities.get(target_entity_type) or _EMPTY
    candidates = []
    for u in sorted(acc):
        if not is_registered(u) or u in raters:
            continue
        user_id = actor_entity_id(u)
        if user_id not in user_entities:
            continue
        norm_u = math.sqrt(_norm_sq(state, config, u, subset, weights))
        if norm_u == 0.0:
            continue
        score = quantize(acc[u] / norm_u)
        if score != 0.0:
            candidates.append((user_id, score))
    return _finalize(candidates, filters, user_entities, k)


# --- weighted hybrid --------------------------------------------------------------


def min_max_normalize(items: ScoredList) -> dict[str, float]:
    """Min-max to [0, 1]; single-candidate or all-equal lists map to 1.0."""
    if not items:
        return {}
    scores = [score for _, score in items]
    lo, hi = min(scores), max(scores)
    if hi == lo:
        return {entity_id: 1.0 for entity_id, _ in items}
    span = hi - lo
    return {entity_id: (score - lo) / span for entity_id, score in items}


def hybrid_combine(
    components: list[tuple[ScoredList, float]],
    filters: Iterable[PostFilter] = (),
    entity_values: PMap = _EMPTY,
    k: Optional[int] = None,
) -> ScoredList:
    """Weighted sum of per-component min-max normalized scores. Components
    with weight zero are skipped entirely, so a (1, 0) weighting reproduces
    the first component's ranking exactly."""
    if not components or all(weight == 0 for _, weight in components):
        raise errors.InvalidWeights("hybrid weights must not all be zero")
    combined: dict[str, float] = {}
    for items, weight in components:
        if weight == 0.0:
            continue
        normalized = min_max_normalize(items)
        for entity_id, norm in normalized.items():
            combined[entity_id] = combined.get(entity_id, 0.0) + weight * norm
    candidates = [(entity_id, quantize(score)) for entity_id, score in sorted(combined.items())]
    return _finalize(candidates, filters, entity_values, k)


# --- content-based ----------------------------------------------------------------


def content_based(
    snapshot: DomainSnapshot,
    spec: AlgorithmSpec,
    target_entity_type: str,
    context_entity_id: str,
    filters: Iterable[PostFilter] = (),
    k: Optional[int] = None,
) -> ScoredList:
    """Cosine-similar entities of the context entity's TF-IDF profile."""
    key = (target_entity_type, spec.cbf_attributes)
    corpus = snapshot.state.corpora.get(key)
    if corpus is None:
        raise errors.EngineError(f"no corpus registered for {key!r}")
    candidates = similar_entities(corpus, context_entity_id, k=None)
    entity_values = snapshot.state.entities.get(target_entity_type) or _EMPTY
    return _finalize(candidates, filters, entity_values, k)

"""Request serving: scenario resolution, audience/context validation, engine
dispatch, cold-start fallback, and per-domain isolation.

Each system domain owns a dedicated worker pool with a bounded queue.
A request never holds a lock across engine computation: it reads one
immutable snapshot and computes on it. Overload of one domain surfaces as
``Busy`` for that domain only; other domains' pools are untouched.
"""

from __future__ import annotations

import os
import queue
import threading
import time
from concurrent.futures import Future
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import engines, errors
from .model import (
    AlgorithmVariant,
    Audience,
    ContextKind,
    RankedList,
    registered_actor,
    session_actor,
)
from .registry import DomainConfig, Registry
from .store import CatalogStore, DomainSnapshot

DEFAULT_K = 10
MAX_K = 100
DEFAULT_WORKERS = int(os.environ.get("UPTRENDZ_WORKERS_PER_DOMAIN", "4"))
DEFAULT_QUEUE_DEPTH = int(os.environ.get("UPTRENDZ_QUEUE_DEPTH", "64"))


@dataclass(frozen=True)
class RecommendationRequest:
    domain_id: str
    scenario_id: str
    user_id: Optional[str] = None
    session_id: Optional[str] = None
    context_item_id: Optional[str] = None
    k: Optional[int] = None


@dataclass(frozen=True)
class RecommendationResponse:
    items: tuple[dict, ...]
    scenario_id: str
    as_of_sequence: int
    fallback_used: bool
    latency_ms: float

    def ids(self) -> list[str]:
        return [item["id"] for item in self.items]

    def to_dict(self) -> dict:
        return {
            "items": list(self.items),
            "scenario_id": self.scenario_id,
            "as_of_sequence": self.as_of_sequence,
            "fallback_used": self.fallback_used,
            "latency_ms": self.latency_ms,
        }


class DomainPool:
    """Fixed worker threads with a bounded queue; full queue means Busy."""

    def __init__(self, domain_id: str, workers: int, depth: int):
        self.domain_id = domain_id
        self._queue: queue.Queue = queue.Queue(maxsize=depth)
        self._threads = []
        self._shutdown = False
        for n in range(workers):
            thread = threading.Thread(
                target=self._run, name=f"uptrendz-{domain_id}-{n}", daemon=True
            )
            thread.start()
            self._threads.append(thread)

    def _run(self) -> None:
        while True:
            task = self._queue.get()
            if task is None:
                return
            future, fn, args = task
            if not future.set_running_or_notify_cancel():
                continue
            try:
                future.set_result(fn(*args))
            except BaseException as exc:
                future.set_exception(exc)

    def submit(self, fn: Callable, *args) -> Future:
        if self._shutdown:
            raise errors.Busy(f"{self.domain_id}: pool is shut down")
        future: Future = Future()
        try:
            self._queue.put_nowait((future, fn, args))
        except queue.Full:
            raise errors.Busy(f"{self.domain_id}: request queue full") from None
        return future

    def shutdown(self) -> None:
        self._shutdown = True
        for _ in self._threads:
            self._queue.put(None)
        for thread in self._threads:
            thread.join(timeout=5)


@dataclass
class LatencyReport:
    requests: int = 0
    ok: int = 0
    busy: int = 0
    failed: int = 0
    latencies_ms: list = field(default_factory=list)

    def percentile(self, q: float) -> float:
        if not self.latencies_ms:
            return 0.0
        return float(np.percentile(np.asarray(self.latencies_ms), q))

    def summary(self) -> dict:
        return {
            "requests": self.requests,
            "ok": self.ok,
            "busy": self.busy,
            "failed": self.failed,
            "p50_ms": self.percentile(50),
            "p99_ms": self.percentile(99),
        }


class ScenarioGateway:
    """Dispatches recommendation requests against immutable snapshots."""

    def __init__(
        self,
        registry: Registry,
        store: CatalogStore,
        workers_per_domain: Optional[int] = None,
        queue_depth: Optional[int] = None,
    ):
        self._registry = registry
        self._store = store
        self._workers = workers_per_domain or DEFAULT_WORKERS
        self._depth = queue_depth or DEFAULT_QUEUE_DEPTH
        self._pools: dict[str, DomainPool] = {}
        self._pool_lock = threading.Lock()

    # --- pools -------------------------------------------------------------

    def pool(self, domain_id: str) -> DomainPool:
        with self._pool_lock:
            pool = self._pools.get(domain_id)
            if pool is None:
                if not self._registry.has_domain(domain_id):
                    raise errors.UnknownDomain(domain_id)
                pool = DomainPool(domain_id, self._workers, self._depth)
                self._pools[domain_id] = pool
            return pool

    def shutdown(self) -> None:
        with self._pool_lock:
            for pool in self._pools.values():
                pool.shutdown()
            self._pools.clear()

    # --- serving -------------------------------------------------------------

    def request(self, request: RecommendationRequest) -> RecommendationResponse:
        """Serve through the domain's bounded worker pool (the HTTP path)."""
        if not self._registry.has_domain(request.domain_id):
            raise errors.UnknownDomain(request.domain_id)
        future = self.pool(request.domain_id).submit(self.serve, request)
        return future.result()

    def serve(self, request: RecommendationRequest) -> RecommendationResponse:
        started = time.perf_counter()
        scenario = self._registry.get_scenario(request.domain_id, request.scenario_id)
        config = self._registry.get(request.domain_id)
        k = self._validate_request(scenario, request)
        snapshot = self._store.snapshot(request.domain_id)

        fallback_used = False
        try:
            ranked = self._dispatch(snapshot, config, scenario, request, k)
        except (errors.ColdStartActor, errors.EmptyProfile, errors.NoAudience):
            ranked = self._fallback(snapshot, config, scenario, k)
            fallback_used = True

        items = self._render_items(snapshot, scenario, ranked)
        latency_ms = (time.perf_counter() - started) * 1000.0
        return RecommendationResponse(
            items=items,
            scenario_id=scenario.scenario_id,
            as_of_sequence=snapshot.as_of_sequence,
            fallback_used=fallback_used,
            latency_ms=latency_ms,
        )

    def ranked(self, request: RecommendationRequest) -> RankedList:
        response = self.serve(request)
        return RankedList(
            items=tuple((item["id"], item["score"]) for item in response.items),
            scenario_id=response.scenario_id,
            as_of_sequence=response.as_of_sequence,
        )

    # --- request validation -----------------------------------------------------

    @staticmethod
    def _validate_request(scenario, request: RecommendationRequest) -> int:
        k = DEFAULT_K if request.k is None else request.k
        if not isinstance(k, int) or k < 1:
            raise errors.InvalidScenario("k must be a positive integer")
        k = min(k, MAX_K)

        if scenario.audience is Audience.REGISTERED:
            if not request.user_id:
                raise errors.AudienceViolation("scenario serves registered users only")
            if request.session_id:
                raise errors.AudienceViolation("unexpected session_id for registered-only scenario")
        elif scenario.audience is Audience.ANONYMOUS:
            if not request.session_id:
                raise errors.AudienceViolation("scenario serves anonymous sessions only")
            if request.user_id:
                raise errors.AudienceViolation("unexpected user_id for anonymous-only scenario")
        else:
            if not request.user_id and not request.session_id:
                raise errors.AudienceViolation("user_id or session_id required")

        if scenario.context is ContextKind.ITEM_ID:
            if not request.context_item_id:
                raise errors.MissingContext("context_item_id required")
        elif scenario.context is ContextKind.USER_ID:
            if not request.user_id:
                raise errors.MissingContext("user_id required as context")
            if request.context_item_id:
                raise errors.MissingContext("unexpected context_item_id")
        else:
            if request.context_item_id:
                raise errors.MissingContext("scenario takes no item context")
        return k

    @staticmethod
    def _request_actor(request: RecommendationRequest) -> str:
        if request.user_id:
            return registered_actor(request.user_id)
        return session_actor(request.session_id)

    # --- dispatch ------------------------------------------------------------------

    def _dispatch(
        self,
        snapshot: DomainSnapshot,
        config: DomainConfig,
        scenario,
        request: RecommendationRequest,
        k: Optional[int],
    ) -> list[tuple[str, float]]:
        spec = scenario.algorithm
        variant = spec.variant
        if variant is AlgorithmVariant.MOST_POPULAR:
            return engines.most_popular(
                snapshot, config, spec, scenario.target_entity_type, scenario.post_filters, k
            )
        if variant is AlgorithmVariant.CONTENT_BASED:
            return engines.content_based(
                snapshot,
                spec,
                scenario.target_entity_type,
                request.context_item_id,
                scenario.post_filters,
                k,
            )
        if variant is AlgorithmVariant.COLLABORATIVE:
            return engines.collaborative(
                snapshot,
                config,
                spec,
                scenario.target_entity_type,
                self._request_actor(request),
                scenario.post_filters,
                k,
            )
        if variant is AlgorithmVariant.USER_FOR_ITEM:
            return engines.users_for_item(
                snapshot,
                config,
                spec,
                scenario.target_entity_type,
                request.context_item_id,
                scenario.post_filters,
                k,
            )
        if variant is AlgorithmVariant.HYBRID:
            return self._dispatch_hybrid(snapshot, config, scenario, request, k)
        raise errors.EngineError(f"unhandled algorithm variant {variant!r}")

    def _dispatch_hybrid(
        self,
        snapshot: DomainSnapshot,
        config: DomainConfig,
        scenario,
        request: RecommendationRequest,
        k: Optional[int],
    ) -> list[tuple[str, float]]:
        """Components are computed untruncated; a component that cannot score
        (cold actor, empty profile, no audience, missing context) contributes
        an empty list. If nothing scores, the hybrid falls back as a whole."""
        components = []
        any_items = False
        for component_id, weight in scenario.algorithm.hybrid_components:
            component = config.scenarios[component_id]
            try:
                items = self._dispatch(snapshot, config, component, request, None)
            except (
                errors.ColdStartActor,
                errors.EmptyProfile,
                errors.NoAudience,
                errors.MissingContext,
                errors.AudienceViolation,
            ):
                items = []
            if weight != 0.0 and items:
                any_items = True
            components.append((items, weight))
        if not any_items:
            raise errors.ColdStartActor("no hybrid component produced candidates")
        entity_values = snapshot.state.entities.get(scenario.target_entity_type)
        return engines.hybrid_combine(
            components, scenario.post_filters, entity_values, k
        )

    def _fallback(
        self, snapshot: DomainSnapshot, config: DomainConfig, scenario, k: Optional[int]
    ) -> list[tuple[str, float]]:
        """Most-Popular substitution over the scenario's interaction subset
        (or every declared type when the scenario has none)."""
        subset = scenario.algorithm.interaction_subset
        if not subset:
            subset = frozenset(config.interaction_types)
        spec = engines.AlgorithmSpec(
            variant=AlgorithmVariant.MOST_POPULAR,
            interaction_subset=subset,
            interaction_weights=scenario.algorithm.interaction_weights,
        )
        return engines.most_popular(
            snapshot, config, spec, scenario.target_entity_type, scenario.post_filters, k
        )

    def _render_items(self, snapshot: DomainSnapshot, scenario, ranked) -> tuple[dict, ...]:
        echo = scenario.echo_attributes
        items = []
        for entity_id, score in ranked:
            item = {"id": entity_id, "score": score}
            if echo:
                values = snapshot.state.entity_values(scenario.target_entity_type, entity_id) or {}
                item["attributes"] = {a: values.get(a) for a in echo if a in values}
            items.append(item)
        return tuple(items)

    # --- isolation harness -----------------------------------------------------------

    def saturate(self, domain_id: str, hold: threading.Event) -> list[Future]:
        """Fill a domain's pool (workers + queue) with tasks that block on
        ``hold``; subsequent submissions to the domain observe Busy."""
        futures = []
        try:
            while True:
                futures.append(self.pool(domain_id).submit(hold.wait))
        except errors.Busy:
            pass
        return futures

    def probe(self, requests: list[RecommendationRequest]) -> LatencyReport:
        """Closed-loop sequential probe through the pooled path."""
        report = LatencyReport()
        for request in requests:
            report.requests += 1
            started = time.perf_counter()
            try:
                self.request(request)
                report.ok += 1
                report.latencies_ms.append((time.perf_counter() - started) * 1000.0)
            except errors.Busy:
                report.busy += 1
            except errors.UptrendzError:
                report.failed += 1
        return report

    def serve_isolated(
        self,
        probes: dict[str, list[RecommendationRequest]],
        saturate: frozenset[str] = frozenset(),
    ) -> dict[str, dict]:
        """Per-domain latency/status report, optionally with domains saturated.

        Saturated domains' pools are pre-filled with blocking tasks, so their
        probes observe Busy while other domains proceed on their own pools.
        """
        hold = threading.Event()
        held: list[Future] = []
        try:
            for domain_id in sorted(saturate):
                held.extend(self.saturate(domain_id, hold))
            reports = {}
            for domain_id in sorted(probes):
                reports[domain_id] = self.probe(probes[domain_id]).summary()
            return reports
        finally:
            hold.set()
            for future in held:
                future.result(timeout=5)

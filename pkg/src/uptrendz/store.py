"""Per-domain catalog of entities and interaction events.

Ingestion appends to one newline-delimited JSON log per system domain
(``<namespace>/log.ndjson``) and synchronously evolves an immutable in-memory
state before acknowledging, so an acknowledged write is both durable and
visible to the next recommendation request. States are persistent data
structures (see ``pmap``): taking a snapshot is a reference read, and a
snapshot never observes later ingests.

Besides raw entities and events, the state carries the structures the
engines need at request time, maintained incrementally per event:

- ``agg``       per interaction type: actor -> {target id: raw aggregate}
                (implicit events count 1 each, explicit events add their value;
                scenario weights are applied at query time)
- ``postings``  per interaction type: target id -> {actor: raw aggregate}
- ``totals``    per interaction type: target id -> summed raw aggregate
- ``moments``   actor -> {(type, type): sum over targets of products of the
                two types' aggregates}, which yields affinity-row norms for
                any weighting without rescanning rows
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Optional

from . import content, errors
from .model import (
    ActorMode,
    AttributeKind,
    EntitySchema,
    Explicitness,
    InteractionTypeConfig,
    is_registered,
)
from .pmap import PMap
from .registry import Registry

log = logging.getLogger(__name__)

LOG_FILENAME = "log.ndjson"
MAX_RECORD_BYTES = 1 << 20

CorpusKey = tuple[str, frozenset[str]]


@dataclass(frozen=True)
class EntityRecord:
    entity_id: str
    values: dict


@dataclass(frozen=True)
class InteractionEvent:
    """One user-item or user-user interaction. ``actor`` is namespace-tagged
    (``u:<user id>`` or ``s:<session token>``), so sessions never collide with
    registered users."""

    domain_id: str
    interaction_type: str
    actor: str
    target_id: str
    value: Optional[float] = None
    timestamp: Optional[str] = None
    sequence: int = 0


@dataclass(frozen=True)
class Ack:
    entity_id: Optional[str]
    sequence: int


@dataclass(frozen=True)
class ReplayReport:
    domain_id: str
    records: int
    corrupt: Optional[errors.CorruptLog] = None


@dataclass(frozen=True)
class DomainState:
    """Immutable, sequence-stamped state of one domain.

    ``events_log`` is a shared append-only list; a state owns the prefix of
    length ``n_events``. Everything else is copy-on-write.
    """

    seq: int = 0
    n_events: int = 0
    entities: dict = field(default_factory=dict)   # etype -> PMap[id -> values]
    agg: dict = field(default_factory=dict)        # itype -> PMap[actor -> {id: float}]
    postings: dict = field(default_factory=dict)   # itype -> PMap[id -> {actor: float}]
    totals: dict = field(default_factory=dict)     # itype -> PMap[id -> float]
    moments: PMap = PMap(shards=64)                # actor -> {(t, s): float}
    corpora: dict = field(default_factory=dict)    # CorpusKey -> CorpusState
    events_log: list = field(default_factory=list)

    def events(self) -> Iterator[InteractionEvent]:
        for i in range(self.n_events):
            yield self.events_log[i]

    def entity_values(self, entity_type_id: str, entity_id: str) -> Optional[dict]:
        bucket = self.entities.get(entity_type_id)
        return bucket.get(entity_id) if bucket is not None else None

    def __eq__(self, other) -> bool:
        if not isinstance(other, DomainState):
            return NotImplemented
        return (
            self.seq == other.seq
            and self.n_events == other.n_events
            and self.entities == other.entities
            and self.agg == other.agg
            and self.postings == other.postings
            and self.totals == other.totals
            and self.moments == other.moments
            and self.corpora == other.corpora
            and self.events_log[: self.n_events] == other.events_log[: other.n_events]
        )


@dataclass(frozen=True)
class DomainSnapshot:
    domain_id: str
    state: DomainState

    @property
    def as_of_sequence(self) -> int:
        return self.state.seq


def _utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()


def _validate_value(kind: AttributeKind, value) -> None:
    if kind is AttributeKind.CATEGORICAL_SINGLE and not isinstance(value, str):
        raise ValueError("expected string")
    if kind is AttributeKind.CATEGORICAL_MULTI:
        if not isinstance(value, (list, tuple)) or not all(isinstance(v, str) for v in value):
            raise ValueError("expected list")
    if kind.is_free_text and not isinstance(value, str):
        raise ValueError("expected text")
    if kind is AttributeKind.NUMERIC_INTEGER:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError("expected integer")
    if kind is AttributeKind.NUMERIC_REAL:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError("expected real")
    if kind is AttributeKind.DATE:
        if not isinstance(value, str):
            raise ValueError("expected ISO-8601 date string")
        try:
            datetime.fromisoformat(value)
        except ValueError:
            raise ValueError("expected ISO-8601 date string")


def validate_record(schema: EntitySchema, record: EntityRecord) -> dict:
    """Check a record against its schema; returns a normalized values dict."""
    if not record.entity_id or not isinstance(record.entity_id, str):
        raise errors.SchemaViolation("entity_id", "must be a non-empty string")
    values = {}
    for name, value in record.values.items():
        spec = schema.attribute(name)
        if spec is None:
            raise errors.SchemaViolation(name, "not declared in schema")
        try:
            _validate_value(spec.kind, value)
        except ValueError as exc:
            raise errors.SchemaViolation(name, str(exc)) from None
        values[name] = list(value) if isinstance(value, tuple) else value
    for spec in schema.attributes:
        if spec.required and spec.name not in values:
            raise errors.SchemaViolation(spec.name, "required attribute missing")
    return values


class CatalogStore:
    """Append-only ingestion with snapshot reads, one isolated namespace per domain."""

    def __init__(self, registry: Registry, data_dir: Optional[Path] = None):
        self._registry = registry
        self._data_dir = Path(data_dir) if data_dir is not None else None
        self._states: dict[str, DomainState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._files: dict[str, object] = {}
        self._global_lock = threading.Lock()

    # --- lifecycle ---------------------------------------------------------

    def open_domain(self, domain_id: str) -> ReplayReport:
        """Attach a domain: create its namespace, replay any existing log."""
        config = self._registry.get(domain_id)
        with self._global_lock:
            if domain_id in self._states:
                return ReplayReport(domain_id, 0)
            self._locks[domain_id] = threading.Lock()
            state = DomainState()
            for scenario in config.scenarios.values():
                if scenario.algorithm.cbf_attributes:
                    key = (scenario.target_entity_type, scenario.algorithm.cbf_attributes)
                    state = self._ensure_corpus(state, domain_id, key)
            report = ReplayReport(domain_id, 0)
            if self._data_dir is not None:
                log_path = self._log_path(domain_id)
                log_path.parent.mkdir(parents=True, exist_ok=True)
                if log_path.exists():
                    state, report = self._replay_into(domain_id, state, log_path)
                self._files[domain_id] = open(log_path, "a", encoding="utf-8")
            self._states[domain_id] = state
            return report

    def close(self) -> None:
        for handle in self._files.values():
            handle.close()
        self._files.clear()

    def _log_path(self, domain_id: str) -> Path:
        namespace = self._registry.get(domain_id).domain.storage_namespace
        return self._data_dir / namespace / LOG_FILENAME

    # --- reads -------------------------------------------------------------

    def snapshot(self, domain_id: str) -> DomainSnapshot:
        state = self._states.get(domain_id)
        if state is None:
            raise errors.UnknownDomain(domain_id)
        return DomainSnapshot(domain_id=domain_id, state=state)

    def get_entity(self, domain_id: str, entity_type_id: str, entity_id: str) -> dict:
        self._registry.get_schema(domain_id, entity_type_id)
        values = self.snapshot(domain_id).state.entity_values(entity_type_id, entity_id)
        if values is None:
            raise errors.UnknownEntity(f"{entity_type_id}/{entity_id}")
        return values

    # --- corpus registration -------------------------------------------------

    def register_corpus(self, domain_id: str, entity_type_id: str, attributes: frozenset[str]) -> None:
        """Ensure a TF-IDF corpus exists for (entity type, attribute set),
        backfilling already-ingested entities."""
        key: CorpusKey = (entity_type_id, frozenset(attributes))
        with self._domain_lock(domain_id):
            state = self._states[domain_id]
            self._states[domain_id] = self._ensure_corpus(state, domain_id, key)

    def _ensure_corpus(self, state: DomainState, domain_id: str, key: CorpusKey) -> DomainState:
        if key in state.corpora:
            return state
        entity_type_id, attrs = key
        schema = self._registry.get_schema(domain_id, entity_type_id)
        corpus = content.CorpusState()
        existing = state.entities.get(entity_type_id)
        if existing is not None:
            for entity_id in sorted(existing):
                tokens = content.profile_tokens(schema, existing[entity_id], attrs)
                corpus = content.index_document(corpus, entity_id, tokens)
        corpora = dict(state.corpora)
        corpora[key] = corpus
        return replace(state, corpora=corpora)

    # --- ingestion -----------------------------------------------------------

    def upsert_entity(self, domain_id: str, entity_type_id: str, record: EntityRecord) -> Ack:
        schema = self._registry.get_schema(domain_id, entity_type_id)
        values = validate_record(schema, record)
        payload = json.dumps(values, separators=(",", ":"), sort_keys=True)
        if len(payload.encode("utf-8")) > MAX_RECORD_BYTES:
            raise errors.PayloadTooLarge(f"{len(payload)} bytes")
        with self._domain_lock(domain_id):
            state = self._states[domain_id]
            seq = state.seq + 1
            self._append_line(
                domain_id, self._encode_entity_line(seq, entity_type_id, record.entity_id, values)
            )
            self._states[domain_id] = self._apply_entity(
                state, schema, record.entity_id, values, seq
            )
            return Ack(entity_id=record.entity_id, sequence=seq)

    def record_interaction(self, domain_id: str, event: InteractionEvent) -> Ack:
        itype = self._registry.get_interaction_type(domain_id, event.interaction_type)
        event = self._validate_event(itype, event)
        with self._domain_lock(domain_id):
            state = self._states[domain_id]
            targets = state.entities.get(itype.target_entity_type)
            if targets is None or event.target_id not in targets:
                raise errors.UnknownTarget(f"{itype.target_entity_type}/{event.target_id}")
            seq = state.seq + 1
            event = replace(event, domain_id=domain_id, sequence=seq)
            self._append_line(domain_id, self._encode_event_line(event))
            self._states[domain_id] = self._apply_event(state, itype, event)
            return Ack(entity_id=None, sequence=seq)

    def _validate_event(
        self, itype: InteractionTypeConfig, event: InteractionEvent
    ) -> InteractionEvent:
        actor = event.actor
        if not actor.startswith(("u:", "s:")) or len(actor) < 3:
            raise errors.ActorModeViolation(f"malformed actor key {actor!r}")
        if itype.actor_mode is ActorMode.REGISTERED_ONLY and not is_registered(actor):
            raise errors.ActorModeViolation(f"{itype.name} accepts registered users only")
        if itype.actor_mode is ActorMode.ANONYMOUS_ONLY and is_registered(actor):
            raise errors.ActorModeViolation(f"{itype.name} accepts anonymous sessions only")
        if itype.explicitness is Explicitness.EXPLICIT:
            if event.value is None:
                raise errors.ExplicitnessViolation(f"{itype.name} requires a value")
            event = replace(event, value=float(event.value))
        elif event.value is not None:
            raise errors.ExplicitnessViolation(f"{itype.name} is implicit, no value allowed")
        if itype.track_timestamp:
            ts = event.timestamp or _utc_now_iso()
            try:
                datetime.fromisoformat(ts)
            except ValueError:
                raise errors.SchemaViolation("timestamp", "expected ISO-8601 instant") from None
            event = replace(event, timestamp=ts)
        else:
            # Untracked types store no timestamp, provided or not.
            event = replace(event, timestamp=None)
        return event

    # --- state evolution ------------------------------------------------------

    def _apply_entity(
        self, state: DomainState, schema: EntitySchema, entity_id: str, values: dict, seq: int
    ) -> DomainState:
        etype = schema.entity_type_id
        bucket = state.entities.get(etype) or PMap(shards=64)
        entities = dict(state.entities)
        entities[etype] = bucket.set(entity_id, values)
        corpora = state.corpora
        touched = {
            key: corpus for key, corpus in corpora.items() if key[0] == etype
        }
        if touched:
            corpora = dict(corpora)
            for key, corpus in touched.items():
                tokens = content.profile_tokens(schema, values, key[1])
                corpora[key] = content.index_document(corpus, entity_id, tokens)
        return replace(state, seq=seq, entities=entities, corpora=corpora)

    def _apply_event(
        self, state: DomainState, itype: InteractionTypeConfig, event: InteractionEvent
    ) -> DomainState:
        name = itype.name
        raw = 1.0 if event.value is None else float(event.value)
        actor, target = event.actor, event.target_id

        rows = state.agg.get(name) or PMap(shards=64)
        row = dict(rows.get(actor) or {})
        old = row.get(target, 0.0)
        new = old + raw
        row[target] = new
        agg = dict(state.agg)
        agg[name] = rows.set(actor, row)

        posting_map = state.postings.get(name) or PMap(shards=64)
        entry = dict(posting_map.get(target) or {})
        entry[actor] = new
        postings = dict(state.postings)
        postings[name] = posting_map.set(target, entry)

        total_map = state.totals.get(name) or PMap(shards=64)
        totals = dict(state.totals)
        totals[name] = total_map.set(target, total_map.get(target, 0.0) + raw)

        # Norm moments: for every declared type with the same target entity
        # type, track sum over targets of the two types' aggregate products.
        moment_row = dict(state.moments.get(actor) or {})
        domain_types = self._registry.get(event.domain_id).interaction_types
        for other in sorted(domain_types):
            if domain_types[other].target_entity_type != itype.target_entity_type:
                continue
            pair = (name, other) if name <= other else (other, name)
            if other == name:
                moment_row[pair] = moment_row.get(pair, 0.0) + (new * new - old * old)
            else:
                other_rows = agg.get(other)
                other_val = (other_rows.get(actor) or {}).get(target, 0.0) if other_rows else 0.0
                if other_val != 0.0:
                    moment_row[pair] = moment_row.get(pair, 0.0) + raw * other_val
        moments = state.moments.set(actor, moment_row)

        state.events_log.append(event)
        return replace(
            state,
            seq=event.sequence,
            n_events=state.n_events + 1,
            agg=agg,
            postings=postings,
            totals=totals,
            moments=moments,
        )

    # --- log encoding / replay -------------------------------------------------

    @staticmethod
    def _encode_entity_line(seq: int, entity_type_id: str, entity_id: str, values: dict) -> str:
        return json.dumps(
            {
                "kind": "entity",
                "seq": seq,
                "entity_type": entity_type_id,
                "entity_id": entity_id,
                "values": values,
            },
            separators=(",", ":"),
            sort_keys=True,
        )

    @staticmethod
    def _encode_event_line(event: InteractionEvent) -> str:
        record = {
            "kind": "event",
            "seq": event.sequence,
            "type": event.interaction_type,
            "actor": event.actor,
            "target": event.target_id,
        }
        if event.value is not None:
            record["value"] = event.value
        if event.timestamp is not None:
            record["timestamp"] = event.timestamp
        return json.dumps(record, separators=(",", ":"), sort_keys=True)

    def _append_line(self, domain_id: str, line: str) -> None:
        handle = self._files.get(domain_id)
        if handle is None:
            return
        handle.write(line + "\n")
        handle.flush()

    def _domain_lock(self, domain_id: str) -> threading.Lock:
        lock = self._locks.get(domain_id)
        if lock is None:
            raise errors.UnknownDomain(domain_id)
        return lock

    def _replay_into(
        self, domain_id: str, state: DomainState, log_path: Path
    ) -> tuple[DomainState, ReplayReport]:
        config = self._registry.get(domain_id)
        records = 0
        corrupt: Optional[errors.CorruptLog] = None
        offset = 0
        with open(log_path, "r", encoding="utf-8") as handle:
            for raw_line in handle:
                line = raw_line.rstrip("\n")
                try:
                    if not raw_line.endswith("\n"):
                        raise ValueError("torn final record")
                    record = json.loads(line)
                    kind = record["kind"]
                    seq = record["seq"]
                    if kind == "entity":
                        schema = config.schemas[record["entity_type"]]
                        state = self._apply_entity(
                            state, schema, record["entity_id"], record["values"], seq
                        )
                    elif kind == "event":
                        itype = config.interaction_types[record["type"]]
                        event = InteractionEvent(
                            domain_id=domain_id,
                            interaction_type=record["type"],
                            actor=record["actor"],
                            target_id=record["target"],
                            value=record.get("value"),
                            timestamp=record.get("timestamp"),
                            sequence=seq,
                        )
                        state = self._apply_event(state, itype, event)
                    else:
                        raise ValueError(f"unknown record kind {kind!r}")
                except (ValueError, KeyError) as exc:
                    corrupt = errors.CorruptLog(offset, f"{log_path.name}: {exc}")
                    log.warning("stopping replay of %s: %s", domain_id, corrupt)
                    break
                records += 1
                offset += len(raw_line.encode("utf-8"))
        return state, ReplayReport(domain_id=domain_id, records=records, corrupt=corrupt)

    def replay(self, domain_id: str) -> tuple[DomainState, ReplayReport]:
        """Rebuild a domain's state from its log, independent of live state."""
        config = self._registry.get(domain_id)
        state = DomainState()
        for scenario in config.scenarios.values():
            if scenario.algorithm.cbf_attributes:
                key = (scenario.target_entity_type, scenario.algorithm.cbf_attributes)
                state = self._ensure_corpus(state, domain_id, key)
        log_path = self._log_path(domain_id)
        if not log_path.exists():
            return state, ReplayReport(domain_id, 0)
        return self._replay_into(domain_id, state, log_path)

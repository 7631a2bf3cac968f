"""Catalog store: ingestion validation, snapshots, durability, isolation."""

import builtins
import json
import threading

import pytest

from conftest import add_movie, add_user, build_movie_domain, rate, view
from uptrendz import errors
from uptrendz.store import EntityRecord, InteractionEvent
from uptrendz.service import UptrendzService


class TestUpsert:
    def test_movie_upsert_ack(self, service):
        domain_id = build_movie_domain(service)
        ack = add_movie(
            service,
            domain_id,
            "1",
            title="Toy Story (1995)",
            genres=["Animation", "Children's", "Comedy"],
            release="1995-01-01",
        )
        assert ack.entity_id == "1"
        assert ack.sequence == 1
        stored = service.get_entity(domain_id, "movie", "1")
        assert stored["genres"] == ["Animation", "Children's", "Comedy"]

    def test_string_where_list_required(self, service):
        domain_id = build_movie_domain(service)
        with pytest.raises(errors.SchemaViolation) as exc:
            service.upsert_entity(
                domain_id, "movie", EntityRecord("1", {"genres": "Horror"})
            )
        assert exc.value.attribute == "genres"
        assert "list" in exc.value.reason

    def test_reupsert_replaces(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "1", title="Old Title")
        add_movie(service, domain_id, "1", title="New Title")
        assert service.get_entity(domain_id, "movie", "1")["title"] == "New Title"

    def test_undeclared_attribute(self, service):
        domain_id = build_movie_domain(service)
        with pytest.raises(errors.SchemaViolation):
            service.upsert_entity(domain_id, "movie", EntityRecord("1", {"director": "x"}))

    def test_required_attribute_enforced(self, service):
        from uptrendz import AttributeKind, AttributeSpec, EntityKind

        domain = service.create_system_domain("shop")
        service.define_entity_schema(
            domain.id,
            EntityKind.ITEM,
            "product",
            [AttributeSpec("name", AttributeKind.CATEGORICAL_SINGLE, required=True)],
        )
        with pytest.raises(errors.SchemaViolation) as exc:
            service.upsert_entity(domain.id, "product", EntityRecord("p1", {}))
        assert "required" in exc.value.reason

    def test_bad_date(self, service):
        domain_id = build_movie_domain(service)
        with pytest.raises(errors.SchemaViolation):
            add_movie(service, domain_id, "1", release="01-Jan-1995")

    def test_integer_rejects_bool_and_float(self, service):
        domain_id = build_movie_domain(service)
        with pytest.raises(errors.SchemaViolation):
            add_user(service, domain_id, "u1", age=True)
        with pytest.raises(errors.SchemaViolation):
            add_user(service, domain_id, "u1", age=30.5)

    def test_unknown_entity_type(self, service):
        domain_id = build_movie_domain(service)
        with pytest.raises(errors.UnknownEntityType):
            service.upsert_entity(domain_id, "book", EntityRecord("1", {}))

    def test_payload_too_large(self, service):
        domain_id = build_movie_domain(service)
        with pytest.raises(errors.PayloadTooLarge):
            add_movie(service, domain_id, "1", title="x" * (1 << 20 + 1))


class TestRecordInteraction:
    def test_rating_event(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "242", title="Kolya (1996)")
        ack = rate(service, domain_id, "196", "242", 3.0, timestamp="1997-12-04T15:55:49+00:00")
        assert ack.sequence == 2
        events = list(service.store.snapshot(domain_id).state.events())
        assert events[0].actor == "u:196"
        assert events[0].value == 3.0

    def test_session_on_registered_only_type(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "242")
        with pytest.raises(errors.ActorModeViolation):
            service.record_interaction(
                domain_id,
                InteractionEvent(
                    domain_id=domain_id,
                    interaction_type="rating",
                    actor="s:s-abc",
                    target_id="242",
                    value=3.0,
                ),
            )

    def test_value_on_implicit_type(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "242")
        with pytest.raises(errors.ExplicitnessViolation):
            service.record_interaction(
                domain_id,
                InteractionEvent(
                    domain_id=domain_id,
                    interaction_type="view",
                    actor="s:s-abc",
                    target_id="242",
                    value=5.0,
                ),
            )

    def test_missing_value_on_explicit_type(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "242")
        with pytest.raises(errors.ExplicitnessViolation):
            rate(service, domain_id, "196", "242", None)

    def test_unknown_target(self, service):
        domain_id = build_movie_domain(service)
        with pytest.raises(errors.UnknownTarget):
            rate(service, domain_id, "196", "242", 3.0)

    def test_unknown_interaction_type(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "242")
        with pytest.raises(errors.UnknownInteractionType):
            service.record_interaction(
                domain_id,
                InteractionEvent(
                    domain_id=domain_id,
                    interaction_type="click",
                    actor="u:196",
                    target_id="242",
                ),
            )

    def test_timestamp_assigned_when_tracked(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "242")
        rate(service, domain_id, "196", "242", 3.0)  # no timestamp supplied
        (event,) = service.store.snapshot(domain_id).state.events()
        assert event.timestamp is not None

    def test_timestamp_dropped_when_untracked(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "242")
        service.record_interaction(
            domain_id,
            InteractionEvent(
                domain_id=domain_id,
                interaction_type="view",
                actor="s:tok",
                target_id="242",
                timestamp="1997-12-04T15:55:49+00:00",
            ),
        )
        (event,) = service.store.snapshot(domain_id).state.events()
        assert event.timestamp is None


class TestSnapshots:
    def test_empty_domain(self, service):
        domain_id = build_movie_domain(service)
        snapshot = service.store.snapshot(domain_id)
        assert snapshot.as_of_sequence == 0
        assert list(snapshot.state.events()) == []

    def test_sequence_counts_all_ingests(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "1")
        add_movie(service, domain_id, "2")
        rate(service, domain_id, "9", "1", 4.0)
        assert service.store.snapshot(domain_id).as_of_sequence == 3

    def test_snapshots_differ_by_exactly_one_event(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "1")
        before = service.store.snapshot(domain_id)
        rate(service, domain_id, "9", "1", 4.0)
        after = service.store.snapshot(domain_id)
        before_events = list(before.state.events())
        after_events = list(after.state.events())
        assert len(after_events) - len(before_events) == 1
        assert after_events[: len(before_events)] == before_events
        assert after_events[-1].target_id == "1"

    def test_snapshot_immutable_under_later_ingest(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "1", title="Original")
        snapshot = service.store.snapshot(domain_id)
        add_movie(service, domain_id, "1", title="Changed")
        rate(service, domain_id, "9", "1", 4.0)
        assert snapshot.state.entity_values("movie", "1")["title"] == "Original"
        assert snapshot.as_of_sequence == 1
        assert list(snapshot.state.events()) == []

    def test_unknown_domain(self, service):
        with pytest.raises(errors.UnknownDomain):
            service.store.snapshot("nope")


class TestConcurrency:
    def test_sequences_gap_free_under_concurrent_ingest(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "1")
        acks = []
        lock = threading.Lock()

        def worker(n):
            for _ in range(50):
                ack = view(service, domain_id, f"s:tok{n}", "1")
                with lock:
                    acks.append(ack.sequence)

        threads = [threading.Thread(target=worker, args=(n,)) for n in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(acks) == list(range(2, 202))


class TestDurabilityAndReplay:
    def test_replay_empty_log(self, durable_service):
        domain_id = build_movie_domain(durable_service)
        state, report = durable_service.store.replay(domain_id)
        assert report.records == 0 and report.corrupt is None
        assert state.seq == 0

    def test_kill_and_replay_reproduces_state(self, tmp_path):
        data_dir = tmp_path / "data"
        svc = UptrendzService(data_dir=data_dir)
        domain_id = build_movie_domain(svc)
        add_movie(svc, domain_id, "1", title="Toy Story (1995)", genres=["Animation"])
        add_movie(svc, domain_id, "2", title="GoldenEye (1995)", genres=["Action"])
        rate(svc, domain_id, "196", "1", 3.0, timestamp="1997-12-04T15:55:49+00:00")
        view(svc, domain_id, "s:tok", "2")
        live_state = svc.store.snapshot(domain_id).state
        # no clean shutdown: abandon the service object entirely
        del svc

        recovered = UptrendzService(data_dir=data_dir)
        recovered.boot()
        assert recovered.store.snapshot(domain_id).state == live_state
        recovered.close()

    def test_torn_final_line_recovers_prefix(self, tmp_path):
        data_dir = tmp_path / "data"
        svc = UptrendzService(data_dir=data_dir)
        domain_id = build_movie_domain(svc)
        add_movie(svc, domain_id, "1")
        rate(svc, domain_id, "196", "1", 3.0)
        svc.close()

        log_path = data_dir / "ns" / domain_id / "log.ndjson"
        torn = log_path.read_text(encoding="utf-8") + '{"kind":"event","seq":3,"ty'
        log_path.write_text(torn, encoding="utf-8")

        recovered = UptrendzService(data_dir=data_dir)
        reports = recovered.boot()
        (report,) = reports
        assert report.records == 2
        assert report.corrupt is not None
        assert recovered.store.snapshot(domain_id).as_of_sequence == 2
        recovered.close()

    def test_log_lines_have_documented_shape(self, tmp_path):
        data_dir = tmp_path / "data"
        svc = UptrendzService(data_dir=data_dir)
        domain_id = build_movie_domain(svc)
        add_movie(svc, domain_id, "7", title="Se7en")
        rate(svc, domain_id, "196", "7", 5.0, timestamp="1997-12-04T15:55:49+00:00")
        svc.close()
        lines = [
            json.loads(line)
            for line in (data_dir / "ns" / domain_id / "log.ndjson").read_text().splitlines()
        ]
        assert [line["kind"] for line in lines] == ["entity", "event"]
        assert [line["seq"] for line in lines] == list(range(1, len(lines) + 1))
        assert lines[-1]["type"] == "rating"
        assert lines[-1]["actor"] == "u:196"

    def test_replay_after_many_events_matches(self, tmp_path):
        import random

        data_dir = tmp_path / "data"
        svc = UptrendzService(data_dir=data_dir)
        domain_id = build_movie_domain(svc)
        rng = random.Random(5)
        for m in range(20):
            add_movie(svc, domain_id, str(m), title=f"Movie {m}", genres=["Action"])
        for _ in range(500):
            if rng.random() < 0.5:
                rate(svc, domain_id, str(rng.randint(1, 8)), str(rng.randrange(20)),
                     float(rng.randint(1, 5)), timestamp="1997-12-04T15:55:49+00:00")
            else:
                view(svc, domain_id, f"s:tok{rng.randint(1, 3)}", str(rng.randrange(20)))
        live = svc.store.snapshot(domain_id).state
        rebuilt, report = svc.store.replay(domain_id)
        assert report.corrupt is None
        assert rebuilt == live
        svc.close()


class TestNamespaceIsolation:
    def test_domain_read_paths_stay_in_own_namespace(self, tmp_path, monkeypatch):
        data_dir = tmp_path / "data"
        svc = UptrendzService(data_dir=data_dir)
        domain_a = build_movie_domain(svc, "tenant-a")
        domain_b = build_movie_domain(svc, "tenant-b")
        add_movie(svc, domain_a, "1", title="A Movie")
        add_movie(svc, domain_b, "1", title="B Movie")
        rate(svc, domain_a, "9", "1", 4.0)
        rate(svc, domain_b, "9", "1", 5.0)
        ns_a = svc.registry.get(domain_a).domain.storage_namespace
        ns_b = svc.registry.get(domain_b).domain.storage_namespace
        assert ns_a != ns_b

        opened = []
        real_open = builtins.open

        def recording_open(file, *args, **kwargs):
            opened.append(str(file))
            return real_open(file, *args, **kwargs)

        monkeypatch.setattr(builtins, "open", recording_open)
        svc.store.replay(domain_a)
        monkeypatch.undo()
        svc.close()

        assert opened, "replay should read the domain log"
        assert all(ns_a in path for path in opened if "ns/" in path)
        assert not any(ns_b in path for path in opened)

    def test_distinct_log_files_per_domain(self, tmp_path):
        data_dir = tmp_path / "data"
        svc = UptrendzService(data_dir=data_dir)
        domain_a = build_movie_domain(svc, "tenant-a")
        domain_b = build_movie_domain(svc, "tenant-b")
        add_movie(svc, domain_a, "1")
        add_movie(svc, domain_b, "2")
        svc.close()
        log_a = (data_dir / "ns" / domain_a / "log.ndjson").read_text()
        log_b = (data_dir / "ns" / domain_b / "log.ndjson").read_text()
        assert '"entity_id":"1"' in log_a and '"entity_id":"2"' not in log_a
        assert '"entity_id":"2"' in log_b and '"entity_id":"1"' not in log_b

"""Engine behavior on hand-built fixtures: scoring formulas, tie-breaks,
filters, and the ranking invariants."""

import pytest

from conftest import add_movie, add_user, build_movie_domain, rate, view
from uptrendz import engines, errors
from uptrendz.model import (
    AlgorithmSpec,
    AlgorithmVariant,
    FilterMode,
    PostFilter,
)
from uptrendz.pmap import pmap_from

RATING = frozenset({"rating"})
VIEW = frozenset({"view"})


def mp_spec(subset=VIEW, weights=(), neighbors_k=50):
    return AlgorithmSpec(
        variant=AlgorithmVariant.MOST_POPULAR,
        interaction_subset=subset,
        interaction_weights=weights,
        neighbors_k=neighbors_k,
    )


def snap(service, domain_id):
    return service.store.snapshot(domain_id), service.registry.get(domain_id)


class TestMostPopular:
    def test_counting_implicit_views(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "A")
        add_movie(service, domain_id, "B")
        for _ in range(3):
            view(service, domain_id, "s:x", "A")
        view(service, domain_id, "s:x", "B")
        snapshot, config = snap(service, domain_id)
        # weight 1.0 override; 3 views on A, 1 on B
        result = engines.most_popular(
            snapshot, config, mp_spec(weights=(("view", 1.0),)), "movie", (), 10
        )
        assert result == [("A", 3.0), ("B", 1.0)]

    def test_post_filter_keeps_horror_only(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "A", genres=["Comedy"])
        add_movie(service, domain_id, "B", genres=["Horror"])
        for _ in range(3):
            view(service, domain_id, "s:x", "A")
        view(service, domain_id, "s:x", "B")
        snapshot, config = snap(service, domain_id)
        result = engines.most_popular(
            snapshot,
            config,
            mp_spec(weights=(("view", 1.0),)),
            "movie",
            (PostFilter("genres", FilterMode.CONTAINS, value="Horror"),),
            10,
        )
        assert result == [("B", 1.0)]

    def test_explicit_values_sum(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "A")
        rate(service, domain_id, "1", "A", 5.0)
        rate(service, domain_id, "2", "A", 1.0)
        snapshot, config = snap(service, domain_id)
        result = engines.most_popular(snapshot, config, mp_spec(subset=RATING), "movie", (), 10)
        assert result == [("A", 6.0)]

    def test_default_weight_applies(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "A")
        view(service, domain_id, "s:x", "A")  # view default weight 0.5
        snapshot, config = snap(service, domain_id)
        assert engines.most_popular(snapshot, config, mp_spec(), "movie", (), 10) == [("A", 0.5)]

    def test_zero_score_items_excluded(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "A")
        view(service, domain_id, "s:x", "A")
        snapshot, config = snap(service, domain_id)
        result = engines.most_popular(
            snapshot, config, mp_spec(weights=(("view", 0.0),)), "movie", (), 10
        )
        assert result == []

    def test_filter_before_truncation(self, service):
        domain_id = build_movie_domain(service)
        # 6 horror movies with low counts, 3 comedies with high counts
        for n in range(6):
            add_movie(service, domain_id, f"h{n}", genres=["Horror"])
            view(service, domain_id, "s:x", f"h{n}")
        for n in range(3):
            add_movie(service, domain_id, f"c{n}", genres=["Comedy"])
            for _ in range(5):
                view(service, domain_id, f"s:v{_}", f"c{n}")
        snapshot, config = snap(service, domain_id)
        result = engines.most_popular(
            snapshot,
            config,
            mp_spec(),
            "movie",
            (PostFilter("genres", FilterMode.CONTAINS, value="Horror"),),
            4,
        )
        # all four slots filled by horror movies despite comedies scoring higher
        assert len(result) == 4
        assert all(item.startswith("h") for item, _ in result)


class TestCollaborative:
    def test_single_perfect_neighbor(self, service):
        domain_id = build_movie_domain(service)
        for m in ("m1", "m2", "X"):
            add_movie(service, domain_id, m)
        # u and v identical on m1, m2; v additionally rated X with 4.0
        rate(service, domain_id, "u", "m1", 3.0)
        rate(service, domain_id, "u", "m2", 5.0)
        rate(service, domain_id, "v", "m1", 3.0)
        rate(service, domain_id, "v", "m2", 5.0)
        rate(service, domain_id, "v", "X", 4.0)
        snapshot, config = snap(service, domain_id)
        result = engines.collaborative(
            snapshot, config, mp_spec(subset=RATING), "movie", "u:u", (), 10
        )
        assert [item for item, _ in result] == ["X"]
        # one neighbor: score = sim * affinity / sim = affinity(v, X)
        assert result[0][1] == pytest.approx(4.0, abs=1e-9)

    def test_cold_start_actor(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "m1")
        rate(service, domain_id, "v", "m1", 4.0)
        snapshot, config = snap(service, domain_id)
        with pytest.raises(errors.ColdStartActor):
            engines.collaborative(
                snapshot, config, mp_spec(subset=RATING), "movie", "u:newbie", (), 10
            )

    def test_never_returns_seen_items(self, service):
        import random

        domain_id = build_movie_domain(service)
        rng = random.Random(11)
        movies = [f"m{i}" for i in range(12)]
        for m in movies:
            add_movie(service, domain_id, m)
        for u in range(8):
            for m in rng.sample(movies, rng.randint(2, 8)):
                rate(service, domain_id, f"u{u}", m, float(rng.randint(1, 5)))
        snapshot, config = snap(service, domain_id)
        for u in range(8):
            seen = {
                e.target_id
                for e in snapshot.state.events()
                if e.actor == f"u:u{u}"
            }
            result = engines.collaborative(
                snapshot, config, mp_spec(subset=RATING), "movie", f"u:u{u}", (), None
            )
            assert not seen & {item for item, _ in result}

    def test_neighbors_k_limits_neighborhood(self, service):
        domain_id = build_movie_domain(service)
        for m in ("shared", "a", "b"):
            add_movie(service, domain_id, m)
        rate(service, domain_id, "u", "shared", 5.0)
        # v2's direction is closer to u's: its extra item has small magnitude
        # (cos(u,v1) = 25/(5*sqrt(41)) ~ 0.78, cos(u,v2) = 25/(5*sqrt(26)) ~ 0.98)
        rate(service, domain_id, "v1", "shared", 5.0)
        rate(service, domain_id, "v1", "a", 4.0)
        rate(service, domain_id, "v2", "shared", 5.0)
        rate(service, domain_id, "v2", "b", 1.0)
        snapshot, config = snap(service, domain_id)
        result = engines.collaborative(
            snapshot, config, mp_spec(subset=RATING, neighbors_k=1), "movie", "u:u", (), None
        )
        # only the top neighbor v2 contributes, so only its item appears
        assert [item for item, _ in result] == ["b"]


class TestUsersForItem:
    def test_similar_user_ranked_first(self, service):
        domain_id = build_movie_domain(service)
        for m in ("m1", "m2", "item"):
            add_movie(service, domain_id, m)
        for uid in ("u", "v", "w"):
            add_user(service, domain_id, uid)
        # v saw the item; u's history matches v's exactly except the item
        rate(service, domain_id, "v", "m1", 4.0)
        rate(service, domain_id, "v", "m2", 2.0)
        rate(service, domain_id, "v", "item", 5.0)
        rate(service, domain_id, "u", "m1", 4.0)
        rate(service, domain_id, "u", "m2", 2.0)
        rate(service, domain_id, "w", "m2", 5.0)
        snapshot, config = snap(service, domain_id)
        result = engines.users_for_item(
            snapshot, config, mp_spec(subset=RATING), "user", "item", (), 10
        )
        assert result[0][0] == "u"

    def test_no_audience(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "lonely")
        add_user(service, domain_id, "u")
        rate(service, domain_id, "u", "lonely", 3.0)
        add_movie(service, domain_id, "unseen")
        snapshot, config = snap(service, domain_id)
        with pytest.raises(errors.NoAudience):
            engines.users_for_item(
                snapshot, config, mp_spec(subset=RATING), "user", "unseen", (), 10
            )

    def test_unknown_item(self, service):
        domain_id = build_movie_domain(service)
        add_movie(service, domain_id, "m1")
        rate(service, domain_id, "u", "m1", 3.0)
        snapshot, config = snap(service, domain_id)
        with pytest.raises(errors.UnknownEntity):
            engines.users_for_item(
                snapshot, config, mp_spec(subset=RATING), "user", "ghost", (), 10
            )

    def test_raters_excluded_from_candidates(self, service):
        domain_id = build_movie_domain(service)
        for m in ("m1", "item"):
            add_movie(service, domain_id, m)
        for uid in ("a", "b"):
            add_user(service, domain_id, uid)
        rate(service, domain_id, "a", "item", 5.0)
        rate(service, domain_id, "a", "m1", 4.0)
        rate(service, domain_id, "b", "m1", 4.0)
        snapshot, config = snap(service, domain_id)
        result = engines.users_for_item(
            snapshot, config, mp_spec(subset=RATING), "user", "item", (), 10
        )
        assert [user for user, _ in result] == ["b"]

    def test_user_attribute_filter(self, service):
        domain_id = build_movie_domain(service)
        for m in ("m1", "item"):
            add_movie(service, domain_id, m)
        add_user(service, domain_id, "young", age=25)
        add_user(service, domain_id, "old", age=40)
        add_user(service, domain_id, "rater", age=50)
        rate(service, domain_id, "rater", "item", 5.0)
        rate(service, domain_id, "rater", "m1", 4.0)
        rate(service, domain_id, "young", "m1", 4.0)
        rate(service, domain_id, "old", "m1", 4.0)
        snapshot, config = snap(service, domain_id)
        result = engines.users_for_item(
            snapshot,
            config,
            mp_spec(subset=RATING),
            "user",
            "item",
            (PostFilter("age", FilterMode.NUMERIC_RANGE, min=18, max=30),),
            10,
        )
        assert [user for user, _ in result] == ["young"]


class TestHybrid:
    def test_weight_one_zero_reproduces_first_component(self):
        first = [("a", 9.0), ("c", 5.0), ("b", 5.0), ("d", 1.0)]
        second = [("z", 0.4), ("y", 0.2)]
        result = engines.hybrid_combine([(first, 1.0), (second, 0.0)], (), pmap_from({}), None)
        assert [item for item, _ in result] == ["a", "b", "c", "d"]

    def test_symmetric_single_candidate_components(self):
        result = engines.hybrid_combine(
            [([("A", 1.0)], 0.5), ([("B", 1.0)], 0.5)], (), pmap_from({}), None
        )
        assert result == [("A", 0.5), ("B", 0.5)]

    def test_all_equal_scores_map_to_one(self):
        result = engines.hybrid_combine(
            [([("a", 2.0), ("b", 2.0)], 1.0)], (), pmap_from({}), None
        )
        assert result == [("a", 1.0), ("b", 1.0)]

    def test_absent_item_counts_as_zero(self):
        first = [("a", 2.0), ("b", 1.0)]
        second = [("b", 7.0)]
        result = engines.hybrid_combine([(first, 0.5), (second, 0.5)], (), pmap_from({}), None)
        # a: 0.5*1.0; b: 0.5*0.0 + 0.5*1.0 -> tie broken by id
        assert result == [("a", 0.5), ("b", 0.5)]

    def test_single_component_degenerate_case(self):
        items = [("x", 0.9), ("a", 0.3), ("m", 0.3), ("q", 0.1)]
        result = engines.hybrid_combine([(items, 1.0)], (), pmap_from({}), None)
        assert [item for item, _ in result] == ["x", "a", "m", "q"]

    def test_all_zero_weights_rejected(self):
        with pytest.raises(errors.InvalidWeights):
            engines.hybrid_combine([([("a", 1.0)], 0.0)], (), pmap_from({}), None)

    def test_truncation(self):
        items = [(f"i{n}", float(10 - n)) for n in range(10)]
        result = engines.hybrid_combine([(items, 1.0)], (), pmap_from({}), 3)
        assert len(result) == 3


class TestPostFilters:
    ENTITIES = pmap_from(
        {
            "A": {"genres": ["Horror"], "price": 10.0},
            "B": {"genres": ["Comedy"], "price": 25.0},
            "C": {"price": 5.0},
            "D": {"genres": ["Horror", "Comedy"]},
        }
    )
    CANDIDATES = [("A", 4.0), ("B", 3.0), ("C", 2.0), ("D", 1.0)]

    def test_contains(self):
        result = engines.apply_post_filters(
            self.CANDIDATES,
            (PostFilter("genres", FilterMode.CONTAINS, value="Horror"),),
            self.ENTITIES,
        )
        assert [item for item, _ in result] == ["A", "D"]

    def test_excludes_passes_missing(self):
        result = engines.apply_post_filters(
            self.CANDIDATES,
            (PostFilter("genres", FilterMode.EXCLUDES, value="Horror"),),
            self.ENTITIES,
        )
        assert [item for item, _ in result] == ["B", "C"]

    def test_numeric_range_missing_fails(self):
        result = engines.apply_post_filters(
            self.CANDIDATES,
            (PostFilter("price", FilterMode.NUMERIC_RANGE, min=6.0, max=30.0),),
            self.ENTITIES,
        )
        assert [item for item, _ in result] == ["A", "B"]

    def test_conjunction(self):
        result = engines.apply_post_filters(
            self.CANDIDATES,
            (
                PostFilter("genres", FilterMode.CONTAINS, value="Horror"),
                PostFilter("price", FilterMode.NUMERIC_RANGE, min=6.0, max=30.0),
            ),
            self.ENTITIES,
        )
        assert [item for item, _ in result] == ["A"]

    def test_contains_on_single_value_is_equality(self):
        entities = pmap_from({"u1": {"gender": "F"}, "u2": {"gender": "M"}})
        result = engines.apply_post_filters(
            [("u1", 1.0), ("u2", 1.0)],
            (PostFilter("gender", FilterMode.CONTAINS, value="F"),),
            entities,
        )
        assert [item for item, _ in result] == ["u1"]


class TestWeightScalingInvariance:
    def test_scaling_all_weights_preserves_order(self, service):
        import random

        domain_id = build_movie_domain(service)
        rng = random.Random(3)
        movies = [f"m{i}" for i in range(10)]
        for m in movies:
            add_movie(service, domain_id, m)
        for u in range(6):
            for m in rng.sample(movies, rng.randint(2, 6)):
                if rng.random() < 0.5:
                    rate(service, domain_id, f"u{u}", m, float(rng.randint(1, 5)))
                else:
                    view(service, domain_id, f"u:u{u}", m)
        snapshot, config = snap(service, domain_id)
        both = frozenset({"rating", "view"})
        for scale in (2.0, 4.0, 0.5):
            base = mp_spec(subset=both, weights=(("rating", 1.0), ("view", 0.5)))
            scaled = mp_spec(
                subset=both, weights=(("rating", 1.0 * scale), ("view", 0.5 * scale))
            )
            for spec_pair in ("mp", "cf"):
                if spec_pair == "mp":
                    a = engines.most_popular(snapshot, config, base, "movie", (), None)
                    b = engines.most_popular(snapshot, config, scaled, "movie", (), None)
                else:
                    a = engines.collaborative(
                        snapshot, config, base, "movie", "u:u0", (), None
                    )
                    b = engines.collaborative(
                        snapshot, config, scaled, "movie", "u:u0", (), None
                    )
                assert [i for i, _ in a] == [i for i, _ in b]

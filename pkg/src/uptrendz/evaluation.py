"""Offline evaluation harness: dataset loading, the demo scenario suite,
temporal-split Recall/Precision/NDCG, and latency measurement.

Works with any directory in MovieLens-100k file format (``u.item``,
``u.user``, ``u.data``; pipe/tab separated, Latin-1). All ingestion goes
through the service's public data plane, never around it.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from . import errors
from .gateway import LatencyReport, RecommendationRequest
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
)
from .service import UptrendzService
from .store import EntityRecord, InteractionEvent

log = logging.getLogger(__name__)

DOMAIN_NAME = "movielens"
MOVIE_TYPE = "movie"
USER_TYPE = "user"
RATING = "rating"

WALKTHROUGH_SCENARIOS = [
    "similar-movies",
    "popular-horror-movies",
    "movies-by-ratings",
    "hybrid-movies",
    "users-for-movie",
]
BASELINE_SCENARIO = "popular-movies"

MIN_TEST_RATINGS = 5

_MONTH_NUMBER = {
    "Jan": 1, "Feb": 2, "Mar": 3, "Apr": 4, "May": 5, "Jun": 6,
    "Jul": 7, "Aug": 8, "Sep": 9, "Oct": 10, "Nov": 11, "Dec": 12,
}

GENRE_COLUMNS = [
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy",
    "Crime", "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror",
    "Musical", "Mystery", "Romance", "Sci-Fi", "Thriller", "War", "Western",
]


@dataclass
class RatingRow:
    user_id: str
    item_id: str
    value: float
    epoch: int
    line: int


@dataclass
class MovieLensData:
    movies: dict[str, dict] = field(default_factory=dict)
    users: dict[str, dict] = field(default_factory=dict)
    ratings: list[RatingRow] = field(default_factory=list)


def independent_counts(data_path: Path) -> dict:
    """Counts recomputed from the raw files with none of the loader's parsing:
    distinct non-empty id prefixes and raw line counts."""
    data_path = Path(data_path)
    item_ids = set()
    for line in (data_path / "u.item").read_bytes().decode("latin-1").splitlines():
        if line.strip():
            item_ids.add(line.split("|", 1)[0])
    user_ids = set()
    for line in (data_path / "u.user").read_bytes().decode("latin-1").splitlines():
        if line.strip():
            user_ids.add(line.split("|", 1)[0])
    events = sum(
        1 for line in (data_path / "u.data").read_bytes().decode("latin-1").splitlines() if line.strip()
    )
    return {"users": len(user_ids), "items": len(item_ids), "events": events}


def parse_dataset(data_path: Path) -> MovieLensData:
    data_path = Path(data_path)
    for name in ("u.item", "u.user", "u.data"):
        if not (data_path / name).is_file():
            raise errors.MissingFile(name)
    data = MovieLensData()

    for number, line in enumerate(
        (data_path / "u.item").read_bytes().decode("latin-1").splitlines(), start=1
    ):
        if not line.strip():
            continue
        fields = line.split("|")
        if len(fields) != 5 + len(GENRE_COLUMNS):
            raise errors.ParseError("u.item", number, f"expected 24 fields, got {len(fields)}")
        movie_id, title, release = fields[0], fields[1], fields[2]
        try:
            genres = [
                GENRE_COLUMNS[i] for i, flag in enumerate(fields[5:]) if int(flag) == 1
            ]
        except ValueError:
            raise errors.ParseError("u.item", number, "genre flags must be 0/1") from None
        values: dict = {"title": title, "genres": genres}
        if release:
            iso = _release_to_iso(release)
            if iso is None:
                raise errors.ParseError("u.item", number, f"bad release date {release!r}")
            values["release"] = iso
        data.movies[movie_id] = values

    for number, line in enumerate(
        (data_path / "u.user").read_bytes().decode("latin-1").splitlines(), start=1
    ):
        if not line.strip():
            continue
        fields = line.split("|")
        if len(fields) != 5:
            raise errors.ParseError("u.user", number, f"expected 5 fields, got {len(fields)}")
        try:
            age = int(fields[1])
        except ValueError:
            raise errors.ParseError("u.user", number, f"bad age {fields[1]!r}") from None
        data.users[fields[0]] = {"age": age, "gender": fields[2], "occupation": fields[3]}

    for number, line in enumerate(
        (data_path / "u.data").read_bytes().decode("latin-1").splitlines(), start=1
    ):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 4:
            raise errors.ParseError("u.data", number, f"expected 4 fields, got {len(fields)}")
        try:
            row = RatingRow(
                user_id=fields[0],
                item_id=fields[1],
                value=float(int(fields[2])),
                epoch=int(fields[3]),
                line=number,
            )
        except ValueError:
            raise errors.ParseError("u.data", number, "numeric fields required") from None
        data.ratings.append(row)
    return data


def _release_to_iso(release: str) -> Optional[str]:
    parts = release.split("-")
    if len(parts) != 3 or parts[1] not in _MONTH_NUMBER:
        return None
    try:
        day, year = int(parts[0]), int(parts[2])
    except ValueError:
        return None
    return f"{year:04d}-{_MONTH_NUMBER[parts[1]]:02d}-{day:02d}"


# --- schema + scenario setup ---------------------------------------------------


def configure_domain(service: UptrendzService) -> str:
    """Create the movie domain with its schemas and the rating interaction."""
    domain = service.create_system_domain(DOMAIN_NAME)
    service.define_entity_schema(
        domain.id,
        EntityKind.ITEM,
        MOVIE_TYPE,
        [
            AttributeSpec("title", AttributeKind.FREE_TEXT_ENGLISH, required=True),
            AttributeSpec("genres", AttributeKind.CATEGORICAL_MULTI),
            AttributeSpec("release", AttributeKind.DATE),
        ],
    )
    service.define_entity_schema(
        domain.id,
        EntityKind.USER,
        USER_TYPE,
        [
            AttributeSpec("age", AttributeKind.NUMERIC_INTEGER),
            AttributeSpec("gender", AttributeKind.CATEGORICAL_SINGLE),
            AttributeSpec("occupation", AttributeKind.CATEGORICAL_SINGLE),
        ],
    )
    service.define_interaction_type(
        domain.id,
        InteractionTypeConfig(
            domain_id=domain.id,
            name=RATING,
            explicitness=Explicitness.EXPLICIT,
            default_weight=1.0,
            actor_mode=ActorMode.REGISTERED_ONLY,
            track_timestamp=True,
            target=InteractionTarget.USER_ITEM,
            target_entity_type=MOVIE_TYPE,
        ),
    )
    return domain.id


def configure_scenarios(service: UptrendzService, domain_id: str) -> list[str]:
    """The five demo scenarios plus an unfiltered most-popular baseline."""
    rating = frozenset({RATING})
    scenarios = [
        ScenarioConfig(
            domain_id=domain_id,
            scenario_id="similar-movies",
            target_entity_type=MOVIE_TYPE,
            audience=Audience.BOTH,
            context=ContextKind.ITEM_ID,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.CONTENT_BASED, cbf_attributes=frozenset({"title"})
            ),
        ),
        ScenarioConfig(
            domain_id=domain_id,
            scenario_id="popular-horror-movies",
            target_entity_type=MOVIE_TYPE,
            audience=Audience.BOTH,
            context=ContextKind.NONE,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.MOST_POPULAR, interaction_subset=rating
            ),
            post_filters=(PostFilter("genres", FilterMode.CONTAINS, value="Horror"),),
        ),
        ScenarioConfig(
            domain_id=domain_id,
            scenario_id="movies-by-ratings",
            target_entity_type=MOVIE_TYPE,
            audience=Audience.REGISTERED,
            context=ContextKind.NONE,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.COLLABORATIVE,
                interaction_subset=rating,
                neighbors_k=50,
            ),
        ),
        ScenarioConfig(
            domain_id=domain_id,
            scenario_id="popular-movies",
            target_entity_type=MOVIE_TYPE,
            audience=Audience.BOTH,
            context=ContextKind.NONE,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.MOST_POPULAR, interaction_subset=rating
            ),
        ),
        ScenarioConfig(
            domain_id=domain_id,
            scenario_id="hybrid-movies",
            target_entity_type=MOVIE_TYPE,
            audience=Audience.REGISTERED,
            context=ContextKind.ITEM_ID,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.HYBRID,
                hybrid_components=(("movies-by-ratings", 0.7), ("similar-movies", 0.3)),
            ),
        ),
        ScenarioConfig(
            domain_id=domain_id,
            scenario_id="users-for-movie",
            target_entity_type=USER_TYPE,
            audience=Audience.BOTH,
            context=ContextKind.ITEM_ID,
            algorithm=AlgorithmSpec(
                variant=AlgorithmVariant.USER_FOR_ITEM,
                interaction_subset=rating,
                neighbors_k=50,
            ),
        ),
    ]
    for scenario in scenarios:
        service.create_scenario(domain_id, scenario)
    return [s.scenario_id for s in scenarios]


def load_dataset(
    service: UptrendzService,
    domain_id: str,
    data: MovieLensData,
    ratings: Optional[list[RatingRow]] = None,
) -> dict:
    """Ingest entities and (optionally a subset of) events via the data plane."""
    for movie_id in data.movies:
        service.upsert_entity(domain_id, MOVIE_TYPE, EntityRecord(movie_id, data.movies[movie_id]))
    for user_id in data.users:
        service.upsert_entity(domain_id, USER_TYPE, EntityRecord(user_id, data.users[user_id]))
    rows = data.ratings if ratings is None else ratings
    for row in rows:
        service.record_interaction(
            domain_id,
            InteractionEvent(
                domain_id=domain_id,
                interaction_type=RATING,
                actor=f"u:{row.user_id}",
                target_id=row.item_id,
                value=row.value,
                timestamp=datetime.fromtimestamp(row.epoch, tz=timezone.utc).isoformat(),
            ),
        )
    return {"users": len(data.users), "items": len(data.movies), "events": len(rows)}


def load_movielens(service: UptrendzService, data_path: Path) -> dict:
    """Full walkthrough load: domain, schemas, scenarios, all records and events."""
    data = parse_dataset(data_path)
    domain_id = configure_domain(service)
    configure_scenarios(service, domain_id)
    summary = load_dataset(service, domain_id, data)
    summary["domain_id"] = domain_id
    return summary


# --- temporal split ---------------------------------------------------------------


@dataclass
class Split:
    train: list[RatingRow]
    heldout: dict[str, list[str]]          # test user -> held-out item ids (time order)
    last_train_item: dict[str, str]        # user -> most recent training item


def temporal_split(data: MovieLensData, holdout_fraction: float) -> Split:
    """Per-user split by timestamp: the last fraction of each user's ratings
    is held out. Users with fewer than MIN_TEST_RATINGS ratings stay entirely
    in training and are excluded from the test set."""
    if not 0.0 < holdout_fraction < 1.0:
        raise ValueError("holdout_fraction must be in (0, 1)")
    by_user: dict[str, list[RatingRow]] = {}
    for row in data.ratings:
        by_user.setdefault(row.user_id, []).append(row)
    train: list[RatingRow] = []
    heldout: dict[str, list[str]] = {}
    last_train_item: dict[str, str] = {}
    for user_id in sorted(by_user, key=lambda u: int(u) if u.isdigit() else 0):
        rows = sorted(by_user[user_id], key=lambda r: (r.epoch, r.line))
        if len(rows) < MIN_TEST_RATINGS:
            train.extend(rows)
            if rows:
                last_train_item[user_id] = rows[-1].item_id
            continue
        cut = len(rows) - max(1, int(len(rows) * holdout_fraction))
        train.extend(rows[:cut])
        heldout[user_id] = [r.item_id for r in rows[cut:]]
        last_train_item[user_id] = rows[cut - 1].item_id
    train.sort(key=lambda r: r.line)
    if not heldout:
        raise errors.NoTestUsers("no user has enough ratings for the test set")
    return Split(train=train, heldout=heldout, last_train_item=last_train_item)


# --- metrics -------------------------------------------------------------------------


def ranking_metrics(recommended: list[str], relevant: set[str], k: int) -> dict:
    """Recall@k, Precision@k, and binary-relevance NDCG@k with log2 discount."""
    top = recommended[:k]
    hits = [item for item in top if item in relevant]
    dcg = sum(1.0 / math.log2(pos + 1) for pos, item in enumerate(top, start=1) if item in relevant)
    ideal = sum(1.0 / math.log2(pos + 1) for pos in range(1, min(k, len(relevant)) + 1))
    return {
        "recall": len(hits) / len(relevant) if relevant else 0.0,
        "precision": len(hits) / k,
        "ndcg": dcg / ideal if ideal > 0 else 0.0,
    }


@dataclass
class ScenarioMetrics:
    queries: int = 0
    fallbacks: int = 0
    recall_sum: float = 0.0
    precision_sum: float = 0.0
    ndcg_sum: float = 0.0

    def add(self, metrics: dict, fallback: bool) -> None:
        self.queries += 1
        self.fallbacks += int(fallback)
        self.recall_sum += metrics["recall"]
        self.precision_sum += metrics["precision"]
        self.ndcg_sum += metrics["ndcg"]

    def summary(self, k: int) -> dict:
        n = max(1, self.queries)
        return {
            f"recall_at_{k}": self.recall_sum / n,
            f"precision_at_{k}": self.precision_sum / n,
            f"ndcg_at_{k}": self.ndcg_sum / n,
            "queries": self.queries,
            "fallbacks": self.fallbacks,
        }


def evaluate_scenarios(
    service: UptrendzService,
    domain_id: str,
    split: Split,
    scenario_ids: list[str],
    k: int,
    seed: int,
    max_item_queries: int = 300,
) -> dict[str, dict]:
    """Query each scenario per test user (or per held-out item for the user
    recommender) and aggregate ranking metrics."""
    results: dict[str, dict] = {}
    registry = service.registry
    for scenario_id in scenario_ids:
        scenario = registry.get_scenario(domain_id, scenario_id)
        collector = ScenarioMetrics()
        if scenario.algorithm.variant is AlgorithmVariant.USER_FOR_ITEM:
            testers: dict[str, set[str]] = {}
            for user_id, items in split.heldout.items():
                for item_id in items:
                    testers.setdefault(item_id, set()).add(user_id)
            rng = random.Random(seed)
            item_ids = sorted(testers)
            if len(item_ids) > max_item_queries:
                item_ids = sorted(rng.sample(item_ids, max_item_queries))
            for item_id in item_ids:
                response = service.request(
                    RecommendationRequest(
                        domain_id=domain_id,
                        scenario_id=scenario_id,
                        session_id="offline-eval",
                        context_item_id=item_id,
                        k=k,
                    )
                )
                collector.add(
                    ranking_metrics(response.ids(), testers[item_id], k), response.fallback_used
                )
        else:
            needs_item = scenario.context is ContextKind.ITEM_ID
            for user_id in sorted(split.heldout, key=int):
                request = RecommendationRequest(
                    domain_id=domain_id,
                    scenario_id=scenario_id,
                    user_id=user_id,
                    context_item_id=split.last_train_item[user_id] if needs_item else None,
                    k=k,
                )
                response = service.request(request)
                collector.add(
                    ranking_metrics(response.ids(), set(split.heldout[user_id]), k),
                    response.fallback_used,
                )
        results[scenario_id] = collector.summary(k)
    return results


# --- latency phase ----------------------------------------------------------------


def measure_latency(
    service: UptrendzService,
    domain_id: str,
    scenario_ids: list[str],
    user_ids: list[str],
    item_by_user: dict[str, str],
    k: int,
    seed: int,
    samples: int = 200,
) -> dict:
    """Closed-loop latency probe across scenarios on the loaded domain."""
    rng = random.Random(seed)
    registry = service.registry
    per_scenario: dict[str, dict] = {}
    overall = LatencyReport()
    pool = [u for u in user_ids if u in item_by_user]
    for scenario_id in scenario_ids:
        scenario = registry.get_scenario(domain_id, scenario_id)
        requests = []
        for _ in range(samples):
            user_id = rng.choice(pool)
            requests.append(
                RecommendationRequest(
                    domain_id=domain_id,
                    scenario_id=scenario_id,
                    user_id=user_id if scenario.audience is not Audience.ANONYMOUS else None,
                    context_item_id=item_by_user[user_id]
                    if scenario.context is ContextKind.ITEM_ID
                    else None,
                    k=k,
                )
            )
        report = service.gateway.probe(requests)
        per_scenario[scenario_id] = report.summary()
        overall.requests += report.requests
        overall.ok += report.ok
        overall.busy += report.busy
        overall.failed += report.failed
        overall.latencies_ms.extend(report.latencies_ms)
    return {"per_scenario": per_scenario, "overall": overall.summary()}

"""The movie-recommender walkthrough at demo scale.

Generates a small dataset in MovieLens-100k file format, loads it through the
public data plane, and exercises all five demo scenarios: similar movies
(content-based), popular horror movies (most-popular + post-filter), movies
based on ratings (collaborative filtering), their weighted hybrid, and a
user recommender for a given movie. Finishes with a temporal-split offline
evaluation.

    python demos/movielens_walkthrough.py
"""

import tempfile
from pathlib import Path

from uptrendz import RecommendationRequest, UptrendzService, datagen, evaluation


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="movielens-demo-"))
    summary = datagen.generate(workdir / "ml-mini", seed=7, n_users=120, n_items=300, n_events=9000)
    print(f"dataset: {summary}")

    service = UptrendzService()
    loaded = evaluation.load_movielens(service, workdir / "ml-mini")
    domain_id = loaded.pop("domain_id")
    print(f"loaded through the data plane: {loaded}")

    def show(title, response, kind="movie"):
        print(f"\n{title} (fallback={response.fallback_used})")
        for item in response.items:
            print(f"  {kind} {item['id']:>4}  score={item['score']:.4f}")

    # a user with training history and one of their recent movies
    split = evaluation.temporal_split(evaluation.parse_dataset(workdir / "ml-mini"), 0.2)
    user_id = sorted(split.heldout, key=int)[0]
    context_movie = split.last_train_item[user_id]

    show("similar movies (content-based)", service.recommend(RecommendationRequest(
        domain_id=domain_id, scenario_id="similar-movies", user_id=user_id,
        context_item_id=context_movie, k=5)))
    show("popular horror movies (most-popular, post-filtered)", service.recommend(
        RecommendationRequest(domain_id=domain_id, scenario_id="popular-horror-movies",
                              session_id="demo", k=5)))
    show(f"movies based on ratings (user-kNN CF for user {user_id})", service.recommend(
        RecommendationRequest(domain_id=domain_id, scenario_id="movies-by-ratings",
                              user_id=user_id, k=5)))
    show("weighted hybrid (0.7 CF + 0.3 CBF)", service.recommend(RecommendationRequest(
        domain_id=domain_id, scenario_id="hybrid-movies", user_id=user_id,
        context_item_id=context_movie, k=5)))
    show(f"users for movie {context_movie}", service.recommend(RecommendationRequest(
        domain_id=domain_id, scenario_id="users-for-movie", session_id="demo",
        context_item_id=context_movie, k=5)), kind="user")

    # offline evaluation on a train-only copy of the domain
    eval_service = UptrendzService()
    eval_domain = evaluation.configure_domain(eval_service)
    evaluation.configure_scenarios(eval_service, eval_domain)
    data = evaluation.parse_dataset(workdir / "ml-mini")
    evaluation.load_dataset(eval_service, eval_domain, data, ratings=split.train)
    results = evaluation.evaluate_scenarios(
        eval_service, eval_domain, split,
        evaluation.WALKTHROUGH_SCENARIOS + [evaluation.BASELINE_SCENARIO], k=10, seed=7)
    print("\noffline evaluation (temporal 80/20 split, k=10):")
    for scenario_id, row in results.items():
        print(f"  {scenario_id:<24} recall={row['recall_at_10']:.4f} "
              f"precision={row['precision_at_10']:.4f} ndcg={row['ndcg_at_10']:.4f}")
    eval_service.close()
    service.close()


if __name__ == "__main__":
    main()

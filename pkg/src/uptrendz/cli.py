"""``uptrendz-eval``: boot the service in-process, ingest a MovieLens-format
dataset, configure the demo scenarios, run the temporal-split offline
evaluation, and optionally the engine-vs-oracle equality suite.

Exit code 0 means every requested phase succeeded; 2 flags a dataset
integrity mismatch, 3 an oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional

from . import errors, evaluation, oracles
from .registry import canonical_json
from .service import UptrendzService

log = logging.getLogger(__name__)

REPORT_VOLATILE_KEYS = ("wall_clock", "latency")


def deterministic_view(report: dict) -> dict:
    """The report minus timing sections; byte-identical across repeat runs."""
    return {k: v for k, v in report.items() if k not in REPORT_VOLATILE_KEYS}


def run(args) -> tuple[int, dict]:
    report: dict = {"config": {
        "data": str(args.data),
        "holdout": args.holdout,
        "k": args.k,
        "seed": args.seed,
        "scenarios": args.scenarios,
    }}
    wall: dict[str, float] = {}
    exit_code = 0

    work_dir = args.work_dir
    cleanup = work_dir is None
    if work_dir is None:
        work_dir = Path(tempfile.mkdtemp(prefix="uptrendz-eval-"))

    try:
        # Phase 1: full walkthrough load with durability on.
        started = time.perf_counter()
        data = evaluation.parse_dataset(args.data)
        independent = evaluation.independent_counts(args.data)
        full_service = UptrendzService(data_dir=work_dir)
        summary = evaluation.load_movielens(full_service, args.data)
        domain_id = summary.pop("domain_id")
        wall["load_s"] = time.perf_counter() - started
        report["dataset"] = summary
        report["integrity"] = {
            "loader": summary,
            "independent": independent,
            "match": all(summary[key] == independent[key] for key in independent),
        }
        if not report["integrity"]["match"]:
            log.error("dataset integrity mismatch: %s vs %s", summary, independent)
            exit_code = 2

        scenario_ids = list(evaluation.WALKTHROUGH_SCENARIOS)
        if args.scenarios != "all":
            requested = [s.strip() for s in args.scenarios.split(",") if s.strip()]
            unknown = set(requested) - set(scenario_ids)
            if unknown:
                raise errors.UnknownScenario(", ".join(sorted(unknown)))
            scenario_ids = [s for s in scenario_ids if s in requested]

        # Phase 2: temporal-split offline evaluation on a fresh in-memory service.
        started = time.perf_counter()
        split = evaluation.temporal_split(data, args.holdout)
        eval_service = UptrendzService()
        eval_domain = evaluation.configure_domain(eval_service)
        evaluation.configure_scenarios(eval_service, eval_domain)
        evaluation.load_dataset(eval_service, eval_domain, data, ratings=split.train)
        evaluated = evaluation.evaluate_scenarios(
            eval_service,
            eval_domain,
            split,
            scenario_ids + [evaluation.BASELINE_SCENARIO],
            args.k,
            args.seed,
        )
        report["scenarios"] = evaluated
        report["split"] = {
            "test_users": len(split.heldout),
            "train_events": len(split.train),
            "heldout_events": sum(len(v) for v in split.heldout.values()),
        }
        wall["eval_s"] = time.perf_counter() - started
        eval_service.close()

        # Phase 3: latency probe on the fully loaded domain.
        started = time.perf_counter()
        report["latency"] = evaluation.measure_latency(
            full_service,
            domain_id,
            scenario_ids,
            sorted(data.users, key=int),
            split.last_train_item,
            args.k,
            args.seed,
            samples=args.latency_samples,
        )
        wall["latency_s"] = time.perf_counter() - started

        # Phase 4 (optional): engine-vs-oracle equality suite.
        if args.oracles:
            started = time.perf_counter()
            try:
                report["oracles"] = oracles.run_oracles(args.seed, instances=args.oracles)
            except errors.OracleMismatch as exc:
                log.error("oracle mismatch: %s", exc)
                report["oracles"] = {"error": str(exc)}
                exit_code = exit_code or 3
            wall["oracles_s"] = time.perf_counter() - started

        full_service.close()
    finally:
        if cleanup:
            shutil.rmtree(work_dir, ignore_errors=True)

    wall["total_s"] = sum(wall.values())
    report["wall_clock"] = wall
    return exit_code, report


def print_table(report: dict, k: int) -> None:
    scenarios = report.get("scenarios", {})
    if scenarios:
        width = max(len(s) for s in scenarios) + 2
        header = f"{'scenario':<{width}}{'recall@' + str(k):>12}{'precision@' + str(k):>14}{'ndcg@' + str(k):>10}{'queries':>9}{'fallbacks':>11}"
        print(header)
        print("-" * len(header))
        for sid, row in scenarios.items():
            print(
                f"{sid:<{width}}{row[f'recall_at_{k}']:>12.4f}{row[f'precision_at_{k}']:>14.4f}"
                f"{row[f'ndcg_at_{k}']:>10.4f}{row['queries']:>9}{row['fallbacks']:>11}"
            )
    latency = report.get("latency", {}).get("overall")
    if latency:
        print(
            f"\nlatency: p50 {latency['p50_ms']:.1f} ms, p99 {latency['p99_ms']:.1f} ms "
            f"over {latency['requests']} requests"
        )
    integrity = report.get("integrity", {})
    print(f"dataset integrity: {'ok' if integrity.get('match') else 'MISMATCH'} {report.get('dataset')}")
    if "oracles" in report:
        print(f"oracles: {report['oracles']}")
    print(f"wall clock: {json.dumps(report.get('wall_clock', {}), sort_keys=True)}")


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="uptrendz-eval",
        description="Offline evaluation harness for the recommendation service.",
    )
    parser.add_argument("--data", type=Path, required=True, help="MovieLens-100k format directory")
    parser.add_argument("--holdout", type=float, default=0.2)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--scenarios", default="all")
    parser.add_argument("--report", type=Path, default=None, help="write the JSON report here")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--oracles", type=int, default=0, help="run N oracle instances")
    parser.add_argument("--latency-samples", type=int, default=120)
    parser.add_argument("--work-dir", type=Path, default=None, help="durable working directory")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(message)s")
    try:
        exit_code, report = run(args)
    except errors.UptrendzError as exc:
        log.error("%s: %s", exc.code, exc)
        return 1
    if args.report is not None:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(canonical_json(report), encoding="utf-8")
        log.info("report written to %s", args.report)
    print_table(report, args.k)
    return exit_code


if __name__ == "__main__":
    raise SystemExit(main())

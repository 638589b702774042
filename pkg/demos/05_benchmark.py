"""Benchmark harness: repeated splits, both training modes, a report file.

Equivalent to the CLI run
  hoselm bench --per-class 150 --dim 12 --both-modes --repetitions 5 ...
but driven through the library so the report object can be inspected.
"""

import argparse
import tempfile
from pathlib import Path

from hoselm.bench import RunConfig, emit_report, run_benchmark
from hoselm.pipeline import PipelineConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repetitions", type=int, default=5)
    parser.add_argument("--spread", type=float, default=0.35)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    cfg = RunConfig(
        pipeline=PipelineConfig(node_count=3, subspace_dim=60, classifier_nodes=8),
        modes=("batch", "sequential"),
        synth_classes=4,
        synth_per_class=150,
        synth_dim=12,
        synth_spread=args.spread,
        train_size=0.5,
        repetitions=args.repetitions,
        seed=args.seed,
    )
    report = run_benchmark(cfg)

    print(f"{args.repetitions} repetitions on synthetic clusters (spread {args.spread}):")
    for method, stats in report.aggregates.items():
        rate = stats["mean_per_class_rate"]
        print(f"  {method:10s} mean per-class rate {rate['mean']:.4f} +- {rate['std']:.4f}")

    train_time = sum(e.train_seconds for e in report.entries)
    print(f"  total training time {train_time:.3f}s across {len(report.entries)} fits")

    with tempfile.TemporaryDirectory() as tmp:
        for fmt in ("json", "csv"):
            path = Path(tmp) / f"report.{fmt}"
            emit_report(report, path, fmt)
            print(f"  wrote {fmt} report ({path.stat().st_size} bytes)")


if __name__ == "__main__":
    main()

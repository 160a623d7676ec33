"""A miniature benchmark sweep end to end, CSVs and all.

Runs the same harness the `meshroute bench` subcommand uses, but scaled
down (two sizes, five seeds, 2000 packets) so it finishes in a few seconds.
Every algorithm sees identical topologies, solver seeds and traffic seeds,
so the summary table is a like-for-like comparison; the full-size sweep is
just `meshroute bench --out-dir results`.

Run:  python3 demos/benchmark_sweep.py
"""

import csv
import tempfile
from pathlib import Path

from meshroute.cli import ExperimentPlan, run_bench


def main() -> None:
    plan = ExperimentPlan(node_sizes=[25, 50], seeds_per_cell=5,
                          packet_count=2000)
    out = Path(tempfile.mkdtemp(prefix="meshroute-bench-"))
    run_bench(plan, str(out))

    print(f"wrote {sorted(p.name for p in out.iterdir())} to {out}\n")
    with open(out / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    header = ("size", "algorithm", "median_best_total", "mean_pdr",
              "mean_avg_delay_ms")
    print(f"{'size':>4} {'algorithm':>9} {'median F':>10} "
          f"{'mean PDR':>9} {'mean delay':>10}")
    for r in rows:
        print(f"{r['size']:>4} {r['algorithm']:>9} "
              f"{float(r['median_best_total']):>10.3f} "
              f"{float(r['mean_pdr']):>9.4f} "
              f"{float(r['mean_avg_delay_ms']):>10.3f}")


if __name__ == "__main__":
    main()

"""Runtime scaling experiment: n = 2e5, eps = 2^-5 .. 2^-9, stages at eps.

    python scripts/run_scaling.py [--out results/scaling.csv] [--seeds 1]

Equivalent to ``knapsack-fptas bench --ns 200000 --epsilons ... --raw-eps``
followed by ``scripts/analyze_bench.py``.
"""

import argparse
import os
import sys

from knapsack_fptas.bench import BenchConfig, run_bench, to_csv

sys.path.insert(0, os.path.dirname(__file__))
from analyze_bench import main as analyze  # noqa: E402


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/scaling.csv")
    ap.add_argument("--n", type=int, default=200_000)
    ap.add_argument("--min-exp", type=int, default=5)
    ap.add_argument("--max-exp", type=int, default=9)
    ap.add_argument("--seeds", type=int, default=1)
    ap.add_argument("--dist", default="uniform")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)

    eps = tuple(2.0**-k for k in range(args.min_exp, args.max_exp + 1))
    cfg = BenchConfig(ns=(args.n,), epsilons=eps, seeds=args.seeds, dist=args.dist,
                      k_stage=1.0, jobs=args.jobs, dp_limit=0)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w") as fh:
        fh.write(to_csv(run_bench(cfg)))
    return analyze([args.out])


if __name__ == "__main__":
    sys.exit(main())

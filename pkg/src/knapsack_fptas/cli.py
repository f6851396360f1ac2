"""Command line: solve an instance file, run seeded benchmarks, self-test,
or dump a set tower."""

from __future__ import annotations

import argparse
import logging
import sys

from . import bench
from .instance import Instance, ParseError, parse_instance
from .oracle import OracleRefused
from .selftest import SUITES, run_selftest
from .solver import ALGORITHMS, K_STAGE, run_algorithm
from .stepfn import dump_function
from .towers import (
    TowerError,
    TowerParams,
    construct_base_set,
    dump_partition,
    dump_tower,
    generate_tower,
    grid_profits,
    partition_profits,
)

EXIT_USAGE = 2
EXIT_ORACLE = 3


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(t)) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="knapsack-fptas", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("solve", help="approximate the best value of one instance")
    s.add_argument("--input", required=True, help="instance file ('-' for stdin)")
    s.add_argument("--epsilon", required=True, type=_positive)
    s.add_argument("--capacity", type=_positive, help="override the file's capacity")
    s.add_argument("--algorithm", choices=ALGORITHMS, default="fptas")
    s.add_argument("--emit-function", metavar="PATH", help="write the step function as 'x y' lines")
    s.add_argument("--verify", action="store_true", help="also compute the exact optimum")
    s.add_argument("--raw-eps", action="store_true",
                   help=f"run every stage at epsilon itself instead of epsilon/{K_STAGE}")

    b = sub.add_parser("bench", help="seeded benchmark grid to CSV")
    b.add_argument("--ns", required=True, type=_int_list)
    b.add_argument("--epsilons", required=True, type=_float_list)
    b.add_argument("--seeds", required=True, type=int)
    b.add_argument("--dist", choices=("uniform", "correlated"), default="uniform")
    b.add_argument("--out", required=True)
    b.add_argument("--algorithms", type=lambda t: [a for a in t.split(",") if a], default=["fptas"])
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--raw-eps", action="store_true")
    b.add_argument("--dp-limit", type=int, default=bench.DP_CELL_LIMIT,
                   help="largest n*W for which the exact optimum is computed")

    t = sub.add_parser("selftest", help="oracle-equivalence and invariant suites")
    t.add_argument("--suite", action="append", choices=sorted(SUITES))
    t.add_argument("--corrupt", action="append", choices=["smawk"], default=[])

    w = sub.add_parser("tower", help="dump a base set, its tower, and optionally a partition")
    w.add_argument("--epsilon", required=True, type=_positive)
    w.add_argument("--deltas", required=True, type=_float_list)
    w.add_argument("--groups", type=int, help="partition the grid profits into this many groups")
    return ap


def _read_instance(path: str) -> Instance:
    if path == "-":
        return parse_instance(sys.stdin)
    with open(path) as fh:
        return parse_instance(fh)


def cmd_solve(args) -> int:
    inst = _read_instance(args.input)
    if args.capacity is not None:
        inst = Instance(inst.items, args.capacity)
    k_stage = 1.0 if args.raw_eps else K_STAGE
    res = run_algorithm(args.algorithm, inst, args.epsilon, k_stage)
    print(f"SOL {res.value!r}")
    if args.emit_function:
        with open(args.emit_function, "w") as fh:
            fh.write(dump_function(res.function))
    if args.verify:
        opt = bench.exact_optimum(inst.items, inst.capacity)
        if opt is None:
            raise OracleRefused("instance too large for the exact oracle (n <= 20 or integer weights with small n*W)")
        ratio = opt / res.value if res.value > 0 else (1.0 if opt == 0 else float("inf"))
        print(f"OPT {opt!r}")
        print(f"ratio {ratio!r}")
    return 0


def cmd_bench(args) -> int:
    try:
        out = open(args.out, "w")
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc}")
    for a in args.algorithms:
        if a not in ALGORITHMS:
            out.close()
            raise UsageError(f"unknown algorithm {a!r}")
    cfg = bench.BenchConfig(
        ns=tuple(args.ns),
        epsilons=tuple(args.epsilons),
        seeds=args.seeds,
        dist=args.dist,
        algorithms=tuple(args.algorithms),
        k_stage=1.0 if args.raw_eps else K_STAGE,
        jobs=max(1, args.jobs),
        dp_limit=args.dp_limit,
    )
    with out:
        out.write(bench.to_csv(bench.run_bench(cfg)))
    return 0


def cmd_selftest(args) -> int:
    results = run_selftest(args.suite, args.corrupt)
    for r in results:
        print(r.line())
    return 0 if all(r.ok for r in results) else 1


def cmd_tower(args) -> int:
    params = TowerParams(tuple(args.deltas), args.epsilon)
    base = construct_base_set(args.epsilon, params)
    tower = generate_tower(base, params)
    sys.stdout.write(dump_tower(tower))
    if args.groups:
        P = grid_profits(args.epsilon).tolist()
        sys.stdout.write(dump_partition(partition_profits(P, args.groups, args.epsilon, params), P))
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "selftest": cmd_selftest, "tower": cmd_tower}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.cmd](args)
    except OracleRefused as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (UsageError, ParseError, TowerError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Benchmark cells: generate, solve, time, and (when affordable) compare to
an exact optimum. Output is one CSV row per (n, eps, algorithm, seed)."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .instance import random_instance
from .oracle import BRUTE_LIMIT, brute_force_profile, dp_profile
from .solver import K_STAGE, run_algorithm

HEADER = ("n", "eps", "alg", "capacity", "sol", "opt", "ratio", "runtime_ms", "seed")
# Largest n * capacity for which the DP optimum is computed.
DP_CELL_LIMIT = 5 * 10**7


@dataclass(frozen=True)
class BenchConfig:
    ns: tuple[int, ...]
    epsilons: tuple[float, ...]
    seeds: int
    dist: str = "uniform"
    algorithms: tuple[str, ...] = ("fptas",)
    k_stage: float = K_STAGE
    jobs: int = 1
    dp_limit: int = DP_CELL_LIMIT


@dataclass(frozen=True)
class BenchRecord:
    n: int
    eps: float
    alg: str
    capacity: float
    sol: float
    opt: float | None
    ratio: float | None
    runtime_ms: float
    seed: int

    def __post_init__(self):
        if self.ratio is not None and self.ratio < 1 - 1e-9:
            raise ValueError(f"ratio {self.ratio!r} below 1: solver overshot the optimum")

    def row(self) -> list[str]:
        def num(v):
            return "" if v is None else repr(float(v))

        return [
            str(self.n),
            repr(self.eps),
            self.alg,
            num(self.capacity),
            num(self.sol),
            num(self.opt),
            num(self.ratio),
            f"{self.runtime_ms:.3f}",
            str(self.seed),
        ]

    def key(self):
        return (self.n, self.eps, self.alg, self.seed)


def exact_optimum(items, capacity: float, dp_limit: int = DP_CELL_LIMIT) -> float | None:
    if len(items) <= BRUTE_LIMIT:
        return brute_force_profile(items)(capacity)
    W = math.floor(capacity)
    if all(it.weight == int(it.weight) for it in items) and len(items) * (W + 1) <= dp_limit:
        return dp_profile(items, W)(W)
    return None


def run_cell(n: int, eps: float, alg: str, seed: int, dist: str, k_stage: float, dp_limit: int) -> BenchRecord:
    inst = random_instance(n, seed, dist)
    t0 = time.perf_counter()
    res = run_algorithm(alg, inst, eps, k_stage)
    ms = (time.perf_counter() - t0) * 1000
    opt = exact_optimum(inst.items, inst.capacity, dp_limit)
    ratio = None
    if opt is not None:
        ratio = opt / res.value if res.value > 0 else (1.0 if opt == 0 else math.inf)
    return BenchRecord(n, eps, alg, inst.capacity, res.value, opt, ratio, ms, seed)


def _cell(args):
    return run_cell(*args)


def cells(cfg: BenchConfig) -> list[tuple]:
    return [
        (n, eps, alg, seed, cfg.dist, cfg.k_stage, cfg.dp_limit)
        for n in cfg.ns
        for eps in cfg.epsilons
        for alg in cfg.algorithms
        for seed in range(cfg.seeds)
    ]


def run_bench(cfg: BenchConfig) -> list[BenchRecord]:
    work = cells(cfg)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            recs = list(pool.map(_cell, work))
    else:
        recs = [_cell(w) for w in work]
    return sorted(recs, key=BenchRecord.key)


def to_csv(records: Iterable[BenchRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    rows = list(csv.DictReader(io.StringIO(text)))
    if rows and tuple(rows[0].keys()) != HEADER:
        raise ValueError("unexpected CSV header")
    return rows


def strip_timing(text: str) -> str:
    """CSV with the runtime column blanked, for determinism comparisons."""
    out = []
    k = HEADER.index("runtime_ms")
    for line in text.splitlines():
        parts = line.split(",")
        if parts and parts[0] != "n":
            parts[k] = ""
        out.append(",".join(parts))
    return "\n".join(out) + "\n"


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    import numpy as np

    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])

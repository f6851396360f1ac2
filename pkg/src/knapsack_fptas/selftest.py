"""Desk-scale self checks: each suite compares a fast routine to its exact
reference on seeded random inputs and reports pass/fail deterministically."""

from __future__ import annotations

import contextlib
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator
from unittest import mock

import numpy as np

from . import smawk as smawk_mod
from .instance import Item, random_instance
from .multilevel import approx_capped, approx_items_small
from .oracle import (
    attainable_sums,
    brute_add_uniform,
    brute_fold,
    brute_force_profile,
    brute_maxplus,
    brute_row_argmax,
    dp_profile,
    sandwich,
)
from .smawk import (
    QuantizedProfile,
    UniformFunction,
    add_uniform,
    build_uniform_functions,
)
from .solver import greedy_cap_check, solve
from .stepfn import StepFunction, cap, exact_maxplus, merge_dnc
from .subsetsum import subset_sum_sketch
from .towers import (
    TowerParams,
    construct_base_set,
    generate_tower,
    grid_profits,
    size_bound,
    top_multiples,
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    ok: bool
    detail: str

    def line(self) -> str:
        return f"{self.name}: {'PASS' if self.ok else 'FAIL'} {self.detail}".rstrip()


def random_step(rng: random.Random, k: int) -> StepFunction:
    xs = np.cumsum([rng.randint(1, 9) for _ in range(k)])
    ys = np.cumsum([rng.randint(1, 9) for _ in range(k)])
    return StepFunction(xs, ys)


def random_tm_matrix(rng: random.Random, rows: int, cols: int):
    """Integer inverse-Monge matrix ``a_j + b_i + x_i y_j`` with sorted x, y."""
    x = sorted(rng.randint(-6, 6) for _ in range(rows))
    y = sorted(rng.randint(-6, 6) for _ in range(cols))
    a = [rng.randint(-30, 30) for _ in range(cols)]
    b = [rng.randint(-30, 30) for _ in range(rows)]
    return lambda i, j: a[j] + b[i] + x[i] * y[j]


def random_uniform(rng: random.Random, p: float, kmax: int, wmax: int = 9) -> UniformFunction:
    ws = [rng.randint(1, wmax) for _ in range(rng.randint(1, kmax))]
    return UniformFunction.from_weights(p, ws)


def suite_stepfn(rng: random.Random) -> tuple[bool, str]:
    for _ in range(40):
        f, g = random_step(rng, rng.randint(0, 8)), random_step(rng, rng.randint(0, 8))
        if exact_maxplus(f, g) != brute_maxplus(f, g):
            return False, "exact_maxplus differs from reference"
    worst = 1.0
    for _ in range(10):
        fs = [random_step(rng, rng.randint(1, 6)) for _ in range(rng.randint(1, 8))]
        s = sandwich(merge_dnc(fs, 0.1), brute_fold(fs))
        if not s.sound or s.worst_ratio > 1.1 * (1 + 1e-9):
            return False, f"merge_dnc ratio {s.worst_ratio:.6f}"
        worst = max(worst, s.worst_ratio)
    return True, f"worst merge ratio {worst:.6f}"


def suite_smawk(rng: random.Random) -> tuple[bool, str]:
    for _ in range(200):
        R, C = rng.randint(1, 30), rng.randint(1, 30)
        v = random_tm_matrix(rng, R, C)
        if smawk_mod.smawk_argmax(R, C, v) != brute_row_argmax(R, C, v):
            return False, f"argmax mismatch on {R}x{C}"
    for _ in range(100):
        K, c = rng.randint(1, 40), rng.randint(1, 4)
        old = [0.0]
        for _ in range(K):
            old.append(old[-1] + rng.randint(0, 4))
        f = random_uniform(rng, c * 0.25, 8)
        prof = QuantizedProfile(0.25, np.array(old), K * 0.25)
        got = add_uniform(prof, f, "smawk").minweight.tolist()
        if got != brute_add_uniform(old, f.cumweights.tolist(), c):
            return False, "add_uniform mismatch"
    return True, "300 cases"


def suite_towers(rng: random.Random) -> tuple[bool, str]:
    for eps, deltas in [(2**-6, (2**-3,)), (2**-6, (2**-5, 2**-3)), (2**-7, (2**-7, 2**-5, 2**-3))]:
        params = TowerParams(deltas, eps)
        base = construct_base_set(eps, params)
        tower = generate_tower(base, params)
        for i in range(1, params.d + 1):
            if len(tower.levels[i - 1]) > size_bound(tower, i):
                return False, "size bound violated"
        vals, _, _ = top_multiples(tower.top)
        for p in grid_profits(eps):
            k = np.searchsorted(vals, p * (1 + 1e-12), side="right") - 1
            if k < 0 or vals[k] < p - eps * (1 + 1e-9):
                return False, f"p={p} not hit"
    return True, "3 schedules"


def suite_subsetsum(rng: random.Random) -> tuple[bool, str]:
    for _ in range(40):
        ws = [rng.uniform(0.5, 5) for _ in range(rng.randint(0, 10))]
        W = rng.uniform(1, sum(ws) + 1)
        eps = rng.choice([0.3, 0.1, 0.05])
        S = subset_sum_sketch(ws, W, eps).values
        sums = attainable_sums(ws)
        if not all(np.any(np.abs(sums - s) <= 1e-9 * max(1.0, s)) for s in S):
            return False, "unattainable sketch value"
        for s in sums[sums <= W]:
            k = np.searchsorted(S, s * (1 + 1e-12), side="right") - 1
            if S[k] < s - eps * W * (1 + 1e-9):
                return False, "coverage violated"
    return True, "40 sketches"


def suite_multilevel(rng: random.Random) -> tuple[bool, str]:
    eps = 2**-10
    worst = 1.0
    for _ in range(6):
        items = [Item(rng.randint(1, 40), 1 + rng.randint(0, 1024) / 1024) for _ in range(rng.randint(1, 10))]
        fs = build_uniform_functions(items, eps)
        rounded = [Item(w, f.p) for f in fs for w in f.weights]
        exact = brute_force_profile(rounded)
        B = rng.choice([16, 64])
        for got, ref in ((approx_capped(fs, B, eps), cap(exact, B)), (approx_items_small(fs, eps), exact)):
            s = sandwich(got, ref)
            if not s.sound:
                return False, "output above exact profile"
            worst = max(worst, s.worst_ratio)
    ok = (worst - 1) / eps <= 12
    return ok, f"worst (ratio-1)/eps {(worst - 1) / eps:.4f}"


def suite_solver(rng: random.Random) -> tuple[bool, str]:
    worst = 1.0
    for seed in range(30):
        inst = random_instance(1 + seed % 12, seed)
        eps = 0.1
        res = solve(inst, eps)
        opt = brute_force_profile(inst.items)(inst.capacity)
        if res.value > opt * (1 + 1e-9) or opt > (1 + eps) * (1 + 1e-9) * res.value:
            return False, f"ratio violated at seed {seed}"
        worst = max(worst, opt / res.value if res.value else math.inf)
    for seed in range(20):
        H = [Item(rng.randint(1, 5), 1 + rng.random()) for _ in range(rng.randint(1, 8))]
        q = min(it.unit_profit for it in H)
        alpha = rng.uniform(0.05, 0.5)
        L = []
        for _ in range(rng.randint(0, 8)):
            p = 1 + rng.random()
            L.append(Item(p / (q * (1 - alpha) * rng.uniform(0.3, 1.0)), p))
        WH = sum(it.weight for it in H)
        xs = [WH * k / 49 for k in range(50)]
        if not greedy_cap_check(H, L, alpha, xs):
            return False, "greedy cap equality failed"
    return True, f"worst ratio {worst:.6f}"


def suite_oracle(rng: random.Random) -> tuple[bool, str]:
    for seed in range(30):
        inst = random_instance(1 + seed % 10, 1000 + seed, max_value=50)
        W = int(inst.capacity)
        a = brute_force_profile(inst.items)
        b = dp_profile(inst.items, W)
        xs = np.arange(W + 1)
        if not np.array_equal(a.values_at(xs), b.values_at(xs)):
            return False, f"dp and brute disagree at seed {seed}"
    return True, "30 instances"


SUITES: dict[str, Callable[[random.Random], tuple[bool, str]]] = {
    "stepfn": suite_stepfn,
    "smawk": suite_smawk,
    "towers": suite_towers,
    "subsetsum": suite_subsetsum,
    "multilevel": suite_multilevel,
    "solver": suite_solver,
    "oracle": suite_oracle,
}


def _broken_smawk(rows, cols, value):
    return [0] * rows if rows > 0 and cols > 0 else []


@contextlib.contextmanager
def corrupted(names: set[str]) -> Iterator[None]:
    """Inject known faults, as negative controls for the suites."""
    with contextlib.ExitStack() as stack:
        if "smawk" in names:
            stack.enter_context(mock.patch.object(smawk_mod, "smawk_argmax", _broken_smawk))
        yield


def run_selftest(suites=None, corrupt=(), seed: int = 20240601) -> list[SuiteResult]:
    names = list(SUITES) if not suites else list(suites)
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}")
    bad = set(corrupt) - {"smawk"}
    if bad:
        raise KeyError(f"unknown fault {sorted(bad)[0]!r}")
    out = []
    with corrupted(set(corrupt)):
        for n in names:
            try:
                ok, detail = SUITES[n](random.Random(f"{seed}:{n}"))
            except Exception as exc:  # a crashing suite is a failing suite
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            out.append(SuiteResult(n, ok, detail))
    return out

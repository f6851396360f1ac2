"""The knapsack approximation scheme end to end.

Items are grouped by binary profit scale; within a group (profits in [1, 2])
the top ``B = ceil(1/eps)`` items by unit profit (H) are merged with the
small-count routine, cheap items (L) only matter up to ``2/alpha`` and go
through the capped merge, and items near the H threshold (M) form few
unit-profit classes, each a subset-sum problem. Values above ``B`` come from
the greedy prefix profile.

Error budget. With ``e = eps / K_STAGE`` the stages lose at most these
factors:

* preprocessing ``1/(1-e)``;
* per group, the worst branch is L: power rounding ``1+e``, grid rounding
  ``1/(1-e)``, capped merge ``(1+e)/(1-10e)``. H and M are no worse and
  greedy loses ``1/(1-2e)``. The (max,+) combination of branches costs the
  worst branch, not the product;
* combining the three branches with ``merge_dnc`` ``1+e``;
* merging the groups ``1+e``.

``(1+e)**4 / ((1-e)**2 (1-10e)) <= 1 + eps`` for all ``eps`` in (0, 1/2]
once ``K_STAGE = 22``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instance import Instance, Item, group_by_profit, preprocess
from .multilevel import approx_capped, approx_items_small
from .oracle import OracleRefused, brute_force_profile, brute_maxplus, dp_profile
from .smawk import build_uniform_functions, profit_grid_size
from .stepfn import StepFunction, cap, merge_dnc, pointwise_max, power_grid
from .subsetsum import subset_sum_profile

log = logging.getLogger(__name__)

K_STAGE = 22
EPS_MAX = 0.5


def stage_bound(e: float) -> float:
    """End-to-end factor guaranteed when every stage runs with ``e``."""
    return (1 + e) ** 4 / ((1 - e) ** 2 * (1 - 10 * e))


def check_eps(eps: float) -> float:
    if not (eps > 0 and math.isfinite(eps)):
        raise ValueError(f"epsilon must be positive, got {eps!r}")
    if eps > EPS_MAX:
        log.warning("epsilon %g clamped to %g", eps, EPS_MAX)
        return EPS_MAX
    return eps


def greedy_order(items: Sequence[Item]) -> list[int]:
    """Indices by unit profit, highest first; ties by index."""
    return sorted(range(len(items)), key=lambda i: (-items[i].profit / items[i].weight, i))


def greedy_sorted_profile(items: Sequence[Item]) -> StepFunction:
    """Prefix sums in greedy order; within ``max p`` of the profit function."""
    if not items:
        return StepFunction.zero()
    order = greedy_order(items)
    ws = np.cumsum([items[i].weight for i in order])
    ps = np.cumsum([items[i].profit for i in order])
    return StepFunction(ws, ps)


@dataclass(frozen=True)
class TripartiteSplit:
    H: tuple[Item, ...]
    M: tuple[Item, ...]
    L: tuple[Item, ...]
    q: float
    alpha: float
    B: int


def split_hml(items: Sequence[Item], eps: float, alpha: float) -> TripartiteSplit:
    """H: the ``B = ceil(1/eps)`` best items by unit profit; M: the rest with
    unit profit at least ``q (1 - alpha)``; L: everything else."""
    B = profit_grid_size(eps)
    order = greedy_order(items)
    H = tuple(items[i] for i in order[:B])
    q = min(it.unit_profit for it in H) if H else math.inf
    M, L = [], []
    for i in order[B:]:
        (M if items[i].unit_profit >= q * (1 - alpha) else L).append(items[i])
    return TripartiteSplit(H, tuple(M), tuple(L), q, alpha, B)


def greedy_cap_check(
    H: Sequence[Item], L: Sequence[Item], alpha: float, xs: Sequence[float]
) -> bool:
    """Brute-force check that capping ``f_L`` at ``2/alpha`` changes nothing
    below the total weight of ``H``."""
    if L:
        if not H:
            raise ValueError("H must be nonempty when L is")
        q = min(it.unit_profit for it in H)
        if max(it.unit_profit for it in L) > q * (1 - alpha) * (1 + 1e-12):
            raise ValueError("unit-profit gap condition violated")
    fH = brute_force_profile(H)
    fL = brute_force_profile(L)
    WH = math.fsum(it.weight for it in H)
    lhs = brute_maxplus(fH, fL)
    rhs = brute_maxplus(fH, cap(fL, 2 / alpha) if len(fL) else fL)
    pts = [x for x in xs if 0 <= x <= WH]
    a = lhs.values_at(pts)
    b = rhs.values_at(pts)
    return bool(np.allclose(a, b, rtol=1e-12, atol=0))


def round_unit_power(u: float, eps: float) -> float:
    """Largest ``(1+eps)**k <= u`` over integers ``k``."""
    base = 1.0 + eps
    k = math.floor(math.log(u) / math.log1p(eps))
    while base**k > u:
        k -= 1
    while base ** (k + 1) <= u:
        k += 1
    return base**k


def round_profits_powers(items: Sequence[Item], eps: float) -> list[Item]:
    """Profits in [1, 2] rounded down to ``(1+eps)**k``."""
    if not items:
        return []
    grid = power_grid(1.0, eps, 2.0)
    ps = np.array([it.profit for it in items])
    idx = np.maximum(np.searchsorted(grid, ps, side="right") - 1, 0)
    return [Item(it.weight, float(min(grid[k], it.profit))) for it, k in zip(items, idx)]


def m_profile(M: Sequence[Item], eps: float, B: float) -> StepFunction:
    """Items of ``M`` in unit-profit classes ``(1+eps)**k``; each class is a
    subset-sum profile on weights scaled by its unit profit."""
    classes: dict[float, list[float]] = {}
    for it in M:
        classes.setdefault(round_unit_power(it.unit_profit, eps), []).append(it.weight)
    parts = []
    for u, ws in sorted(classes.items()):
        prof = subset_sum_profile([Item(w, w) for w in ws], eps, cap=B / u)
        parts.append(prof.scaled(u))
    return merge_dnc(parts, eps)


def solve_unit_range(items: Sequence[Item], eps: float) -> StepFunction:
    """Profit function of items with profits in [1, 2]."""
    items = list(items)
    if not items:
        return StepFunction.zero()
    B = profit_grid_size(eps)
    if len(items) < B:
        return approx_items_small(build_uniform_functions(items, eps), eps)
    alpha = eps**0.75
    sp = split_hml(items, eps, alpha)
    fH = approx_items_small(build_uniform_functions(sp.H, eps), eps)
    fL = approx_capped(build_uniform_functions(round_profits_powers(sp.L, eps), eps), 2 / alpha, eps)
    fM = m_profile(sp.M, eps, B)
    combined = merge_dnc([cap(f, B) for f in (fH, fL, fM) if len(f)], eps)
    return pointwise_max(cap(combined, B) if len(combined) else combined,
                         greedy_sorted_profile(items))


@dataclass(frozen=True)
class SolveResult:
    function: StepFunction
    value: float
    eps: float
    eps_internal: float
    n_kept: int


def _per_group(inst: Instance, e: float, unit) -> StepFunction:
    parts = []
    for g in group_by_profit(inst):
        f = unit(g.items, e)
        if len(f):
            parts.append(f.scaled(g.scale))
    return merge_dnc(parts, e)


def _run(inst: Instance, eps: float, k_stage: float, unit) -> SolveResult:
    eps = check_eps(eps)
    e = eps / k_stage
    pre = preprocess(inst, e)
    f = _per_group(pre, e, unit) if pre.n else StepFunction.zero()
    return SolveResult(f, f(inst.capacity), eps, e, pre.n)


def solve(inst: Instance, eps: float, k_stage: float = K_STAGE) -> SolveResult:
    """``SOL <= OPT <= (1 + eps) SOL`` for ``eps <= 1/2`` with the default split."""
    return _run(inst, eps, k_stage, solve_unit_range)


def _small_unit(items: Sequence[Item], e: float) -> StepFunction:
    return approx_items_small(build_uniform_functions(items, e), e)


def solve_small_n(inst: Instance, eps: float, k_stage: float = K_STAGE) -> SolveResult:
    """Per profit group the small-count merge only; meant for ``n = O(1/eps)``."""
    return _run(inst, eps, k_stage, _small_unit)


def _capped_unit(items: Sequence[Item], e: float) -> StepFunction:
    B = profit_grid_size(e)
    fc = approx_capped(build_uniform_functions(items, e), B, e)
    return pointwise_max(fc, greedy_sorted_profile(items))


def solve_capped(inst: Instance, eps: float, k_stage: float = K_STAGE) -> SolveResult:
    """Capped merge at ``ceil(1/e)`` plus greedy beyond the cap, per group."""
    return _run(inst, eps, k_stage, _capped_unit)


def solve_greedy(inst: Instance) -> SolveResult:
    """Greedy prefix profile of the fitting items; additive error below ``max p``."""
    items = [it for it in inst.items if it.weight <= inst.capacity]
    f = greedy_sorted_profile(items)
    return SolveResult(f, f(inst.capacity), 0.0, 0.0, len(items))


def solve_exact(inst: Instance) -> SolveResult:
    items = list(inst.items)
    if all(it.weight == int(it.weight) for it in items) and len(items) > 20:
        f = dp_profile(items, math.floor(inst.capacity))
    elif len(items) <= 20:
        f = brute_force_profile(items)
    else:
        raise OracleRefused("exact solve needs n <= 20 or integer weights")
    return SolveResult(f, f(inst.capacity), 0.0, 0.0, len(items))


ALGORITHMS = ("fptas", "smalln", "capped", "greedy", "exact")


def run_algorithm(name: str, inst: Instance, eps: float, k_stage: float = K_STAGE) -> SolveResult:
    if name == "fptas":
        return solve(inst, eps, k_stage)
    if name == "smalln":
        return solve_small_n(inst, eps, k_stage)
    if name == "capped":
        return solve_capped(inst, eps, k_stage)
    if name == "greedy":
        return solve_greedy(inst)
    if name == "exact":
        return solve_exact(inst)
    raise ValueError(f"unknown algorithm {name!r}")

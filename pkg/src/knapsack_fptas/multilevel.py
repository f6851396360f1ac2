"""Multi-level merging of equal-profit classes with profits in [1, 2].

Profits are split into ``r`` groups, each served by a small base set. For a
group, level ``i`` merges with quanta from the ``i``-th tower level and cap
``B_i``; its additive error is at most ``8 eps B_{i-1}``, which is small next
to every value that level is responsible for. Values below ``B_0`` come from
the two-band grid merge. The group results are combined with ``merge_dnc``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .smawk import (
    ContractError,
    UniformFunction,
    fast_naive_capped,
    naive_capped,
    uniform_merge,
)
from .stepfn import StepFunction, cap, merge_dnc, pointwise_max
from .towers import (
    GroupedProfits,
    SetTower,
    TowerError,
    TowerParams,
    chain_multipliers,
    find_generator,
    generate_tower,
    partition_profits,
)

# Profit rounding to a top-set multiple may lose at most this many eps.
ROUND_LOSS = 2.0
# Iterations allowed when fixing the cap from group totals.
CAP_ROUNDS = 8


@dataclass(frozen=True)
class LevelSchedule:
    d: int
    alpha: float
    deltas: tuple[float, ...]
    caps: tuple[float, ...]
    t: float
    B: float
    r: int
    eps: float

    def with_t(self, t: float) -> "LevelSchedule":
        caps = tuple(self.B * t / self.alpha ** (2 ** (self.d - i)) for i in range(self.d + 1))
        return replace(self, t=t, caps=caps)

    @property
    def params(self) -> TowerParams:
        return TowerParams(self.deltas, self.eps)


def choose_level_params(B: float, r: int, eps: float) -> LevelSchedule:
    """Levels ``d`` with ``2**(2**(d-1)) <= sqrt(B/r) < 2**(2**d)``,
    ``alpha**(2**(d-1)) = sqrt(B/r)``, ``delta_i = eps sqrt(B r) / alpha**(2**(d-i))``.

    ``t`` starts at ``alpha`` and is finalized with ``finalize_t``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if B < 4 * r:
        raise ValueError(f"B={B!r} is below 4r={4 * r}")
    R = math.sqrt(B / r)
    d = 1 + math.floor(math.log2(math.log2(R)) + 1e-12)
    alpha = R ** (1.0 / 2 ** (d - 1))
    root = math.sqrt(B * r)
    deltas = tuple(eps * root / alpha ** (2 ** (d - i)) for i in range(1, d + 1))
    deltas = (eps * r,) + deltas[1:]  # exact identity delta_1 = eps r
    sched = LevelSchedule(d, alpha, deltas, (), alpha, float(B), int(r), eps)
    return sched.with_t(alpha)


def finalize_t(sched: LevelSchedule, towers: Sequence[SetTower]) -> LevelSchedule:
    """``t = max(alpha, max_j |Delta_i^(j)| / (delta_i / (eps r)))``."""
    t = sched.alpha
    for tw in towers:
        for lvl, delta in zip(tw.levels, sched.deltas):
            t = max(t, len(lvl) * sched.eps * sched.r / delta)
    return sched.with_t(t)


def level_profits(y: float, k: int, tower: SetTower) -> list[float]:
    """``k * y`` written as a multiple of the generator chain element at each level."""
    chain = find_generator(y, tower)
    mults = chain_multipliers(chain)
    out = []
    for i, z in enumerate(chain):
        c = k * math.prod(mults[i:])
        out.append(c * z)
    return out


def approx_group(
    fs: Sequence[UniformFunction],
    multiples: Sequence[tuple[float, int]],
    base: Sequence[float],
    sched: LevelSchedule,
    eps: float,
) -> StepFunction:
    """``min{B_d, (+) fs}`` for one group within factor ``1/(1 - 10 eps)``.

    ``multiples[i] = (y, k)`` with ``k * y`` the top-set multiple just below
    ``fs[i].p``.
    """
    if not fs:
        return StepFunction.zero()
    tower = generate_tower(base, sched.params)
    per_level: list[list[UniformFunction]] = [[] for _ in range(sched.d)]
    for f, (y, k) in zip(fs, multiples):
        ps = level_profits(y, k, tower)
        if ps[-1] < f.p - ROUND_LOSS * eps * (1 + 1e-9) or ps[-1] > f.p * (1 + 1e-9):
            raise ContractError(f"no top-set multiple within {ROUND_LOSS} eps below {f.p!r}")
        for i, p in enumerate(ps):
            per_level[i].append(f.with_profit(p))
    parts = [fast_naive_capped(fs, sched.caps[0], eps)]
    for i in range(sched.d):
        parts.append(
            uniform_merge(per_level[i], tower.levels[i], sched.deltas[i], sched.caps[i + 1])
        )
    return cap(pointwise_max(*parts), sched.caps[-1])


def _grouped(fs: Sequence[UniformFunction], gp: GroupedProfits):
    for members in gp.groups:
        if not members:
            continue
        sub = [fs[i] for i in members]
        mult = [(gp.assignment[i][1], gp.assignment[i][2]) for i in members]
        gidx = gp.assignment[members[0]][0]
        yield sub, mult, gp.bases[gidx]


def _plan(fs: Sequence[UniformFunction], B: float, r: int, eps: float):
    """Schedule, partition and finalized ``t``, or ``None`` if out of range."""
    try:
        sched = choose_level_params(B, r, eps)
        gp = partition_profits([f.p for f in fs], r, eps, sched.params)
    except (ValueError, TowerError):
        return None
    towers = [generate_tower(b, sched.params) for b in gp.bases if b]
    return finalize_t(sched, towers), gp


def in_cap_band(B: float, eps: float) -> bool:
    return eps ** -0.01 / 4 <= B <= 4 / eps


def in_count_band(m: int, eps: float) -> bool:
    return eps ** (-2 / 3) / 4 <= m <= 4 / eps


def approx_capped(fs: Sequence[UniformFunction], B: float, eps: float) -> StepFunction:
    """``min{f_1 (+) ... (+) f_m, B}`` within factor ``(1+eps)/(1-10 eps)``."""
    fs = [f for f in fs if f.length]
    if not fs:
        return StepFunction.zero()
    if not in_cap_band(B, eps):
        return naive_capped(fs, B, eps)
    r = min(len(fs), max(1, math.ceil(B ** (1 / 3))))
    plan = _plan(fs, B, r, eps)
    if plan is None:
        return naive_capped(fs, B, eps)
    sched, gp = plan
    parts = [approx_group(sub, mult, base, sched, eps) for sub, mult, base in _grouped(fs, gp)]
    return cap(merge_dnc(parts, eps), B)


def approx_items_small(fs: Sequence[UniformFunction], eps: float) -> StepFunction:
    """``(+) fs`` within factor ``(1+eps)/(1-10 eps)`` for ``O(1/eps)`` classes.

    The cap is the largest group total, so no group is ever truncated; since
    that total depends on the partition, which depends on the cap, the cap is
    raised until it covers every group.
    """
    fs = [f for f in fs if f.length]
    if not fs:
        return StepFunction.zero()
    total = math.fsum(f.total for f in fs)
    m = len(fs)
    if not in_count_band(m, eps):
        return naive_capped(fs, total, eps)
    r = min(m, max(1, math.ceil(m**0.75 * eps**0.5)))
    B = float(max(4 * r, math.ceil(total / r)))
    for _ in range(CAP_ROUNDS):
        plan = _plan(fs, B, r, eps)
        if plan is None:
            return naive_capped(fs, total, eps)
        sched, gp = plan
        need = max(math.fsum(fs[i].total for i in g) for g in gp.groups if g)
        if need <= B:
            break
        B = float(math.ceil(need))
    else:
        return naive_capped(fs, total, eps)
    parts = [approx_group(sub, mult, base, sched, eps) for sub, mult, base in _grouped(fs, gp)]
    return merge_dnc(parts, eps)

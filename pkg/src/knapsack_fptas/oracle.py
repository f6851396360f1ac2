"""Exact reference computations: subset enumeration, pseudo-polynomial DP,
and quadratic reference versions of the fast kernels.

These ship with the library so the CLI can report true ratios on small inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .instance import Item
from .stepfn import StepFunction

BRUTE_LIMIT = 20
DP_GUARD = 10**9


class OracleRefused(ValueError):
    """Input too large for the exact method."""


def _subset_sums(values: Sequence[float]) -> np.ndarray:
    out = np.zeros(1)
    for v in values:
        out = np.concatenate((out, out + v))
    return out


def brute_force_profile(items: Sequence[Item], limit: int = BRUTE_LIMIT) -> StepFunction:
    """Exact profit function by enumerating all ``2**n`` subsets."""
    if len(items) > limit:
        raise OracleRefused(f"brute force limited to {limit} items, got {len(items)}")
    ws = _subset_sums([it.weight for it in items])
    ps = _subset_sums([it.profit for it in items])
    return StepFunction(ws, ps)


def dp_profile(items: Sequence[Item], Wmax: int) -> StepFunction:
    """Exact best profit at every integer capacity ``0..Wmax`` (integer weights)."""
    Wmax = int(Wmax)
    if any(it.weight != int(it.weight) for it in items):
        raise OracleRefused("dp oracle needs integer weights")
    if max(1, len(items)) * (Wmax + 1) > DP_GUARD:
        raise OracleRefused("n * Wmax exceeds the dp guard")
    best = np.zeros(Wmax + 1)
    for it in items:
        w = int(it.weight)
        if w > Wmax:
            continue
        cand = best[: Wmax + 1 - w] + it.profit
        np.maximum(best[w:], cand, out=best[w:])
    return StepFunction(np.arange(Wmax + 1, dtype=float), best)


def brute_opt(items: Sequence[Item], capacity: float) -> float:
    """Best value at ``capacity``, by enumeration or DP (integer weights)."""
    if len(items) <= BRUTE_LIMIT:
        return brute_force_profile(items)(capacity)
    return dp_profile(items, math.floor(capacity))(math.floor(capacity))


def brute_maxplus(f: StepFunction, g: StepFunction) -> StepFunction:
    """(max,+) convolution by a plain double loop over breakpoints."""
    fp = [(0.0, 0.0)] + f.points
    gp = [(0.0, 0.0)] + g.points
    pts = [(a + c, b + d) for a, b in fp for c, d in gp]
    pts.sort(key=lambda t: (t[0], -t[1]))
    xs, ys = [], []
    best = 0.0
    for x, y in pts:
        if y > best:
            xs.append(x)
            ys.append(y)
            best = y
    return StepFunction(xs, ys, canonical=True) if xs else StepFunction.zero()


def brute_fold(fs: Sequence[StepFunction]) -> StepFunction:
    out = StepFunction.zero()
    for f in fs:
        out = brute_maxplus(out, f)
    return out


def brute_row_argmax(rows: int, cols: int, value: Callable[[int, int], object]) -> list[int]:
    out = []
    for i in range(rows):
        best, bv = 0, value(i, 0)
        for j in range(1, cols):
            v = value(i, j)
            if v > bv:
                best, bv = j, v
        out.append(best)
    return out


def brute_add_uniform(minweight: Sequence[float], cumweights: Sequence[float], c: int) -> list[float]:
    """``new[k] = min_j old[max(0, k - c j)] + cum[j]`` with ``cum[0] = 0``."""
    cum = [0.0] + list(cumweights)
    out = []
    for k in range(len(minweight)):
        best = math.inf
        for j, w in enumerate(cum):
            best = min(best, minweight[max(0, k - c * j)] + w)
        out.append(best)
    return out


def attainable_sums(weights: Sequence[float]) -> np.ndarray:
    """Sorted distinct subset sums (``n <= 20``)."""
    if len(weights) > BRUTE_LIMIT:
        raise OracleRefused("too many weights for enumeration")
    return np.unique(_subset_sums(weights))


def find_subset(weights: Sequence[float], target: float, tol: float = 1e-9) -> tuple[int, ...] | None:
    """Indices of a subset summing to ``target`` within ``tol`` (relative), or None."""
    n = len(weights)
    if n > BRUTE_LIMIT:
        raise OracleRefused("too many weights for enumeration")
    sums = _subset_sums(weights)
    hit = np.flatnonzero(np.abs(sums - target) <= tol * max(1.0, abs(target)))
    if not hit.size:
        return None
    mask = int(hit[0])
    return tuple(i for i in range(n) if mask >> i & 1)


@dataclass(frozen=True)
class Sandwich:
    sound: bool
    worst_ratio: float
    worst_x: float


def sandwich(approx: StepFunction, exact: StepFunction, slack: float = 1e-9) -> Sandwich:
    """Compare ``approx`` to ``exact`` at the breakpoints of both.

    ``sound`` means ``approx(x) <= exact(x (1 + slack)) (1 + slack)``
    everywhere checked; ``worst_ratio`` is the largest
    ``exact(x) / approx(x (1 + slack))`` (inf when approx is 0 and exact is
    not). The slack on ``x`` absorbs weight sums that differ in the last bits
    because they were added in a different order.
    """
    xs = np.union1d(approx.xs, exact.xs)
    if not xs.size:
        return Sandwich(True, 1.0, 0.0)
    wide = xs * (1 + slack)
    sound = bool(np.all(approx.values_at(xs) <= exact.values_at(wide) * (1 + slack)))
    a = approx.values_at(wide)
    e = exact.values_at(xs)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(e > 0, e / np.where(a > 0, a, 0.0), 1.0)
    k = int(np.argmax(r))
    return Sandwich(sound, float(r[k]), float(xs[k]))

"""Approximate subset-sum lists and the profit function of items with p = w.

A sketch for capacity ``W`` is a short sorted list ``S`` of attainable sums
such that every attainable sum ``s <= W`` has some ``s'`` in ``S`` with
``s - eps W <= s' <= s``.

Scheme:

* If ``W >= 2 wmax / eps`` the sorted prefix sums already have gaps of at
  most ``wmax <= eps W / 2``; one thinning pass finishes the job.
* Otherwise at most ``k = floor(W / wmin)`` items fit. Weights are bucketed
  with width ``eps W / (4k)`` and only the ``k`` lightest of each bucket are
  kept (swapping an item for a lighter one of its bucket loses less than the
  width). The survivors go through a sumset DP that keeps the minimum per
  fixed grid cell of the same width: a representative only drifts inside the
  cell where it was created, so the loss is under one width per used item.
* A final thinning keeps the minimum per cell of width ``eps W / 2``.

Total loss is below ``eps W / 4 + eps W / 4 + eps W / 2``, and every kept
value is a true subset sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .instance import Item
from .stepfn import StepFunction

# Hard guard on sketch length: |S| <= SIZE_CONST / eps.
SIZE_CONST = 16.0


@dataclass(frozen=True)
class SumSketch:
    values: np.ndarray
    W: float
    eps: float

    def __len__(self) -> int:
        return int(self.values.size)


def thin_min(values: np.ndarray, width: float) -> np.ndarray:
    """Smallest value of each cell ``[k width, (k+1) width)``; input sorted."""
    if values.size == 0:
        return values
    cell = np.floor(values / width)
    first = np.ones(values.size, dtype=bool)
    first[1:] = cell[1:] != cell[:-1]
    return values[first]


def _reduce_relevant(ws: np.ndarray, k: int, width: float) -> np.ndarray:
    """Keep the ``k`` lightest weights of every bucket of the given width."""
    ws = np.sort(ws)
    bucket = np.floor(ws / width).astype(np.int64)
    start = np.searchsorted(bucket, bucket, side="left")
    rank = np.arange(ws.size) - start
    return ws[rank < k]


def subset_sum_sketch(weights: Sequence[float], W: float, eps: float) -> SumSketch:
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not W > 0:
        raise ValueError("W must be positive")
    ws = np.asarray([w for w in weights if w <= W], dtype=float)
    if ws.size == 0:
        return SumSketch(np.zeros(1), W, eps)
    if np.any(ws <= 0):
        raise ValueError("weights must be positive")
    wmax, wmin = float(ws.max()), float(ws.min())
    final = eps * W / 2
    if W >= 2 * wmax / eps:
        prefix = np.concatenate(([0.0], np.cumsum(np.sort(ws))))
        vals = thin_min(prefix[prefix <= W], final)
        return SumSketch(vals, W, eps)
    k = max(1, math.floor(W / wmin))
    width = eps * W / (4 * k)
    ws = _reduce_relevant(ws, k, width)
    S = np.zeros(1)
    for w in ws:
        cand = S + w
        cand = cand[cand <= W]
        if not cand.size:
            continue
        S = thin_min(np.union1d(S, cand), width)
    S = thin_min(S, final)
    return SumSketch(S, W, eps)


def _check_identity(items: Sequence[Item]) -> None:
    for it in items:
        if abs(it.profit - it.weight) > 1e-12 * max(it.profit, it.weight):
            raise ValueError(f"profit {it.profit!r} differs from weight {it.weight!r}")


def subset_sum_profile(items: Sequence[Item], eps: float, cap: float | None = None) -> StepFunction:
    """Profit function of items with ``p = w``, within factor ``1/(1 - 2 eps)``.

    Sketches are taken at ``W_j = 2**j wmin`` until ``W_j`` covers the total
    weight (or ``2 cap + 2 wmax`` when a cap is given, beyond which values
    are irrelevant to the caller); the union of all lists gives the
    breakpoints ``(s, s)``.
    """
    _check_identity(items)
    if not items:
        return StepFunction.zero()
    ws = [it.weight for it in items]
    wmin, wmax = min(ws), max(ws)
    top = math.fsum(ws)
    if cap is not None:
        top = min(top, 2 * cap + 2 * wmax)
    vals = [np.zeros(1)]
    W = wmin
    while True:
        vals.append(subset_sum_sketch(ws, W, eps).values)
        if W >= top:
            break
        W *= 2
    allv = np.unique(np.concatenate(vals))
    return StepFunction(allv, allv)

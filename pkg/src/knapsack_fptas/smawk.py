"""Merging equal-profit item classes.

A class of items sharing profit ``p`` has the profit function
``p * max{k : cumweights[k-1] <= x}``; with weights sorted ascending it is
pseudo-concave, so adding it to a min-weight table is a (min,+) product with
a convex sequence. Row minima of that product are found with SMAWK.

Tables are indexed by profit: entry ``k`` of a ``QuantizedProfile`` is the
least weight reaching profit ``>= k * quantum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .instance import Item
from .stepfn import StepFunction, pointwise_max
from .towers import TowerParams, construct_base_set, nearest_multiple_below

# Relative tolerance when checking that a profit is an integer multiple.
MULT_TOL = 1e-12
# Largest class length handled by the shifted-minimum path in ``add_uniform``.
SHIFT_LIMIT = 8192


class ContractError(ValueError):
    pass


@dataclass(frozen=True)
class UniformFunction:
    p: float
    cumweights: np.ndarray

    def __post_init__(self):
        cw = np.asarray(self.cumweights, dtype=float).reshape(-1)
        cw.flags.writeable = False
        object.__setattr__(self, "cumweights", cw)
        if not self.p > 0:
            raise ValueError("profit quantum must be positive")
        if cw.size:
            steps = np.diff(np.concatenate(([0.0], cw)))
            if np.any(steps <= 0):
                raise ValueError("cumweights must be strictly increasing and positive")
            if np.any(np.diff(steps) < -1e-12 * cw[-1]):
                raise ValueError("not pseudo-concave: weight steps must be nondecreasing")

    @classmethod
    def from_weights(cls, p: float, weights: Sequence[float]) -> "UniformFunction":
        return cls(p, np.cumsum(np.sort(np.asarray(weights, dtype=float))))

    @property
    def length(self) -> int:
        return int(self.cumweights.size)

    @property
    def weights(self) -> np.ndarray:
        return np.diff(np.concatenate(([0.0], self.cumweights)))

    @property
    def total(self) -> float:
        return self.p * self.length

    def to_stepfunction(self) -> StepFunction:
        ks = np.arange(1, self.length + 1, dtype=float)
        return StepFunction(self.cumweights.copy(), self.p * ks)

    def with_profit(self, p: float) -> "UniformFunction":
        return UniformFunction(p, self.cumweights)


def profit_grid_size(eps: float) -> int:
    """``ceil(1/eps)``, the integer standing in for ``1/eps``."""
    return math.ceil(1 / eps - 1e-9)


def round_to_grid(p: float, N: int) -> float:
    """Largest multiple of ``1/N`` not above ``p``."""
    k = math.floor(p * N * (1 + MULT_TOL))
    if k / N > p * (1 + MULT_TOL):
        k -= 1
    return k / N


def build_uniform_functions(items: Sequence[Item], eps: float) -> list[UniformFunction]:
    """Round profits in [1, 2] down to multiples of ``1/ceil(1/eps)`` and
    bundle each profit class into one pseudo-concave function."""
    N = profit_grid_size(eps)
    classes: dict[float, list[float]] = {}
    for it in items:
        if not 1 - 1e-12 <= it.profit <= 2 * (1 + 1e-12):
            raise ValueError(f"profit {it.profit!r} outside [1, 2]")
        p = round_to_grid(max(it.profit, 1.0), N)
        classes.setdefault(p, []).append(it.weight)
    return [UniformFunction.from_weights(p, ws) for p, ws in sorted(classes.items())]


def fold_uniform(fs: Sequence[UniformFunction]) -> list[StepFunction]:
    return [f.to_stepfunction() for f in fs]


# --- SMAWK -----------------------------------------------------------------


def smawk_argmax(rows: int, cols: int, value: Callable[[int, int], object]) -> list[int]:
    """Leftmost row maxima of a totally monotone ``rows x cols`` matrix.

    ``value(i, j)`` may return anything totally ordered (tuples work).
    """
    if rows <= 0 or cols <= 0:
        return []
    result = [0] * rows
    _smawk(list(range(rows)), list(range(cols)), value, result)
    return result


def _smawk(rows: list[int], cols: list[int], value, result: list[int]) -> None:
    if not rows:
        return
    # REDUCE: keep at most len(rows) candidate columns
    stack: list[int] = []
    for c in cols:
        while stack:
            r = rows[len(stack) - 1]
            if value(r, stack[-1]) < value(r, c):
                stack.pop()
            else:
                break
        if len(stack) < len(rows):
            stack.append(c)
    cols = stack
    _smawk(rows[1::2], cols, value, result)
    # INTERPOLATE the even rows between neighbouring odd-row answers
    pos = {c: k for k, c in enumerate(cols)}
    start = 0
    for i in range(0, len(rows), 2):
        r = rows[i]
        stop = pos[result[rows[i + 1]]] if i + 1 < len(rows) else len(cols) - 1
        best = cols[start]
        bv = value(r, best)
        for k in range(start + 1, stop + 1):
            v = value(r, cols[k])
            if v > bv:
                best, bv = cols[k], v
        result[r] = best
        start = stop


# --- quantized profiles ----------------------------------------------------


@dataclass
class QuantizedProfile:
    quantum: float
    minweight: np.ndarray
    cap: float

    @classmethod
    def empty(cls, quantum: float, cap: float) -> "QuantizedProfile":
        K = table_top(cap, quantum)
        mw = np.full(K + 1, np.inf)
        mw[0] = 0.0
        return cls(quantum, mw, cap)

    @property
    def top(self) -> int:
        return len(self.minweight) - 1

    def values(self) -> np.ndarray:
        """Profit claimed by each entry: ``min(k * quantum, cap)``."""
        return np.minimum(np.arange(self.top + 1) * self.quantum, self.cap)

    def to_stepfunction(self) -> StepFunction:
        vals = self.values()[1:]
        mw = self.minweight[1:]
        ok = np.isfinite(mw)
        return StepFunction(mw[ok], vals[ok])


def table_top(cap: float, quantum: float) -> int:
    """Index whose entry means 'profit >= cap'."""
    return max(1, math.ceil(cap / quantum * (1 - MULT_TOL)))


def multiple_of(p: float, quantum: float) -> int:
    """``p / quantum`` as an integer, or ``ContractError``."""
    c = p / quantum
    ci = round(c)
    if ci < 1 or abs(c - ci) > MULT_TOL * c:
        raise ContractError(f"profit {p!r} is not a multiple of {quantum!r}")
    return ci


def add_uniform(profile: QuantizedProfile, f: UniformFunction, method: str = "auto") -> QuantizedProfile:
    """``new[k] = min_j old[max(0, k - c j)] + cumweights[j-1]`` with ``c = p / quantum``.

    ``method``: ``shift`` takes the minimum over shifted copies (cheap for
    short classes), ``smawk`` runs one SMAWK pass per residue of ``k`` mod
    ``c``; ``auto`` picks by class length.
    """
    c = multiple_of(f.p, profile.quantum)
    old = profile.minweight
    K = len(old) - 1
    # once c*j >= K every k is served by old[0]; only the first such j counts
    J = min(f.length, math.ceil(K / c))
    if J == 0:
        return QuantizedProfile(profile.quantum, old.copy(), profile.cap)
    cum = f.cumweights[:J]
    if method == "auto":
        method = "shift" if J <= SHIFT_LIMIT else "smawk"
    if method == "shift":
        new = _add_shift(old, cum, c)
    elif method == "smawk":
        new = _add_smawk(old, cum, c)
    else:
        raise ValueError(f"unknown method {method!r}")
    return QuantizedProfile(profile.quantum, new, profile.cap)


def _add_shift(old: np.ndarray, cum: np.ndarray, c: int) -> np.ndarray:
    new = old.copy()
    K = len(old) - 1
    for j, wj in enumerate(cum, start=1):
        s = c * j
        if s > K:
            np.minimum(new, wj, out=new)
            break
        np.minimum(new[:s], wj, out=new[:s])
        np.minimum(new[s:], old[: K + 1 - s] + wj, out=new[s:])
    return new


def _add_smawk(old: np.ndarray, cum: np.ndarray, c: int) -> np.ndarray:
    """One residue class at a time. Row ``u`` is index ``a + c u``, column
    ``v`` uses ``old[a + c v]`` (0 for ``v < 0``) plus ``j = u - v`` items.

    Entries are lexicographic triples ``(penalty(j), unreachable(v), weight)``
    with a linear penalty outside ``0 <= j <= J``; the penalty keeps the
    matrix Monge and the middle flag keeps infinite weights out of sums.
    """
    K = len(old) - 1
    J = len(cum)
    cumx = [0.0] + cum.tolist()
    new = old.copy()
    oldl = old.tolist()
    for a in range(min(c, K + 1)):
        U = (K - a) // c
        col_flag = []
        col_w = []
        for v in range(-J, U + 1):
            if v < 0:
                col_flag.append(0)
                col_w.append(0.0)
            else:
                w = oldl[a + c * v]
                fin = math.isfinite(w)
                col_flag.append(0 if fin else 1)
                col_w.append(w if fin else 0.0)

        def value(u, vi, _f=col_flag, _w=col_w):
            j = u - (vi - J)
            if j < 0:
                return (j, 0, 0.0)
            if j > J:
                return (J - j, 0, 0.0)
            return (0, -_f[vi], -(_w[vi] + cumx[j]))

        arg = smawk_argmax(U + 1, U + 1 + J, value)
        for u, vi in enumerate(arg):
            j = u - (vi - J)
            if col_flag[vi]:
                continue
            new[a + c * u] = min(new[a + c * u], col_w[vi] + cumx[j])
    return new


def requantize(profile: QuantizedProfile, quantum: float) -> QuantizedProfile:
    """Move to a coarser (or any) quantum; each entry loses less than
    ``quantum`` of profit and stays sound."""
    old = profile.minweight
    Kold = len(old) - 1
    K = table_top(profile.cap, quantum)
    ks = np.arange(K + 1, dtype=float)
    idx = np.ceil(ks * quantum / profile.quantum * (1 - MULT_TOL)).astype(np.int64)
    idx = np.minimum(idx, Kold)
    idx[K] = Kold
    return QuantizedProfile(quantum, old[idx].copy(), profile.cap)


def assign_quanta(fs: Sequence[UniformFunction], Delta: Sequence[float]) -> list[float]:
    """Smallest element of ``Delta`` dividing each profit."""
    ds = sorted(Delta)
    out = []
    for f in fs:
        for y in ds:
            c = f.p / y
            if abs(c - round(c)) <= MULT_TOL * c and round(c) >= 1:
                out.append(y)
                break
        else:
            raise ContractError(f"profit {f.p!r} is not a multiple of any quantum")
    return out


def uniform_merge(
    fs: Sequence[UniformFunction],
    Delta: Sequence[float],
    delta: float,
    B: float,
    method: str = "auto",
) -> StepFunction:
    """``min{f_1 (+) ... (+) f_m, B}`` up to additive ``8 delta |Delta|``.

    Classes are added in ascending order of their quantum; every switch to a
    larger quantum rounds the table once.
    """
    fs = [f for f in fs if f.length]
    if not fs:
        return StepFunction.zero()
    for y in Delta:
        if not delta * (1 - 1e-9) <= y <= 8 * delta * (1 + 1e-9):
            raise ContractError(f"quantum {y!r} outside [{delta!r}, {8 * delta!r}]")
    quanta = assign_quanta(fs, Delta)
    cap_eff = min(B, math.fsum(f.total for f in fs))
    order = sorted(range(len(fs)), key=lambda i: (quanta[i], fs[i].p))
    profile = QuantizedProfile.empty(quanta[order[0]], cap_eff)
    for i in order:
        if quanta[i] != profile.quantum:
            profile = requantize(profile, quanta[i])
        profile = add_uniform(profile, fs[i], method)
    return profile.to_stepfunction()


def naive_capped(fs: Sequence[UniformFunction], B: float, eps: float) -> StepFunction:
    """Round profits down to multiples of ``1/ceil(1/eps)`` and merge on that
    single quantum; no quantum switch, so only the rounding loses profit."""
    N = profit_grid_size(eps)
    delta = 1.0 / N
    rounded = []
    for f in fs:
        p = round_to_grid(f.p, N)
        if p <= 0:
            raise ContractError(f"profit {f.p!r} rounds to zero")
        rounded.append(f.with_profit(p))
    return uniform_merge(rounded, [delta], delta, B)


@dataclass(frozen=True)
class FastNaivePlan:
    delta1: float
    base: tuple[float, ...]
    additive: float
    low_cap: float


def fast_naive_plan(B: float, eps: float) -> FastNaivePlan | None:
    """Parameters of the two-band merge, or ``None`` when it would not beat
    the plain grid merge."""
    if eps > 0.125:
        return None
    mult = max(1.0, math.floor(64 * max(B, 1.0) ** 0.01) / 64)
    d1 = min(eps * mult, 0.125)
    base = construct_base_set(eps, TowerParams((d1,), eps))
    E = 8 * d1 * len(base)
    low = E / eps
    if low >= B:
        return None
    return FastNaivePlan(d1, base, E, low)


def fast_naive_capped(fs: Sequence[UniformFunction], B: float, eps: float) -> StepFunction:
    """Large values from a merge over a small base set (additive error ``E``),
    values below ``E / eps`` from the grid merge; return the pointwise max."""
    fs = [f for f in fs if f.length]
    if not fs:
        return StepFunction.zero()
    plan = fast_naive_plan(B, eps)
    if plan is None:
        return naive_capped(fs, B, eps)
    rounded = []
    for f in fs:
        v, _, _ = nearest_multiple_below(f.p, plan.base)
        if v < f.p - 2 * eps * (1 + 1e-9):
            raise ContractError(f"base set misses profit {f.p!r}")
        rounded.append(f.with_profit(v))
    high = uniform_merge(rounded, plan.base, plan.delta1, B)
    low = naive_capped(fs, plan.low_cap, eps)
    return pointwise_max(low, high)

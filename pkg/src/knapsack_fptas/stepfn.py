"""Monotone step functions and their (max,+) algebra.

A function is stored by its breakpoints ``(x_k, y_k)`` with both coordinates
strictly increasing; ``f(x)`` is the ``y`` of the last breakpoint at or before
``x`` and 0 before the first one. The empty point set is the zero function.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

# Candidate pairs generated per block by the convolution kernels.
_BLOCK = 1 << 21
# Longest power grid that is materialized; beyond it levels are computed per value.
DENSE_LEVELS = 1 << 22


class StepFunction:
    __slots__ = ("xs", "ys")

    def __init__(self, xs, ys, *, canonical: bool = False):
        xs = np.asarray(xs, dtype=float).reshape(-1)
        ys = np.asarray(ys, dtype=float).reshape(-1)
        if xs.shape != ys.shape:
            raise ValueError("xs and ys must have equal length")
        if not canonical:
            xs, ys = _canonicalize(xs, ys)
        xs.flags.writeable = False
        ys.flags.writeable = False
        self.xs = xs
        self.ys = ys

    @classmethod
    def zero(cls) -> "StepFunction":
        return cls(np.empty(0), np.empty(0), canonical=True)

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]]) -> "StepFunction":
        pts = list(points)
        if not pts:
            return cls.zero()
        arr = np.asarray(pts, dtype=float)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    @property
    def complexity(self) -> int:
        return len(self.xs)

    @property
    def max_value(self) -> float:
        return float(self.ys[-1]) if len(self.ys) else 0.0

    @property
    def min_positive(self) -> float:
        return float(self.ys[0]) if len(self.ys) else math.inf

    def __call__(self, x: float) -> float:
        return eval_at(self, x)

    def __len__(self) -> int:
        return len(self.xs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.ys, other.ys)

    def __hash__(self):
        return hash((self.xs.tobytes(), self.ys.tobytes()))

    def __repr__(self) -> str:
        body = ", ".join(f"({x:g}, {y:g})" for x, y in self.points[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"StepFunction([{body}{more}])"

    def values_at(self, xs) -> np.ndarray:
        """Vectorized evaluation."""
        xs = np.asarray(xs, dtype=float)
        if np.any(xs < 0):
            raise ValueError("step functions are defined on x >= 0")
        idx = np.searchsorted(self.xs, xs, side="right") - 1
        out = np.zeros(xs.shape)
        hit = idx >= 0
        out[hit] = self.ys[idx[hit]]
        return out

    def scaled(self, factor: float) -> "StepFunction":
        """Multiply every value by ``factor > 0``."""
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return StepFunction(self.xs.copy(), self.ys * factor)


def _canonicalize(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if xs.size == 0:
        return np.empty(0), np.empty(0)
    if np.any(xs < 0) or np.any(~np.isfinite(xs)) or np.any(np.isnan(ys)):
        raise ValueError("breakpoints need finite x >= 0 and defined y")
    pos = ys > 0
    xs, ys = xs[pos], ys[pos]
    if xs.size == 0:
        return np.empty(0), np.empty(0)
    # x ascending, larger y first among equal x
    order = np.lexsort((-ys, xs))
    xs, ys = xs[order], ys[order]
    best = np.maximum.accumulate(ys)
    keep = np.empty(xs.size, dtype=bool)
    keep[0] = True
    keep[1:] = ys[1:] > best[:-1]
    return xs[keep].copy(), ys[keep].copy()


def eval_at(f: StepFunction, x: float) -> float:
    if x < 0:
        raise ValueError("step functions are defined on x >= 0")
    k = int(np.searchsorted(f.xs, x, side="right")) - 1
    return float(f.ys[k]) if k >= 0 else 0.0


def cap(f: StepFunction, B: float) -> StepFunction:
    """Pointwise ``min(f, B)``."""
    if not B > 0:
        raise ValueError("cap must be positive")
    k = int(np.searchsorted(f.ys, B, side="left"))
    if k == len(f):
        return f
    xs = f.xs[: k + 1].copy()
    ys = f.ys[: k + 1].copy()
    ys[k] = B
    return StepFunction(xs, ys, canonical=True)


def pointwise_max(*fs: StepFunction) -> StepFunction:
    fs = [f for f in fs if len(f)]
    if not fs:
        return StepFunction.zero()
    if len(fs) == 1:
        return fs[0]
    return StepFunction(np.concatenate([f.xs for f in fs]), np.concatenate([f.ys for f in fs]))


def power_grid(A: float, eps: float, top: float) -> np.ndarray:
    """``A * (1+eps)**k`` for ``k = 0, 1, ...`` up to the first value above ``top``.

    Every rounding routine builds its grid here so that equal parameters give
    bit-identical grid values.
    """
    if top < A:
        return np.array([A])
    kmax = int(math.floor(math.log(top / A) / math.log1p(eps))) + 2
    grid = A * np.power(1.0 + eps, np.arange(kmax + 1, dtype=float))
    while grid[-1] <= top:
        kmax += 1
        grid = A * np.power(1.0 + eps, np.arange(kmax + 1, dtype=float))
    return grid[: int(np.searchsorted(grid, top, side="right")) + 1]


def power_levels(values: np.ndarray, A: float, eps: float) -> np.ndarray:
    """Largest ``k`` with ``A*(1+eps)**k <= v`` for each value, without
    building the grid; ``power_value`` of the result matches ``power_grid``
    bit for bit."""
    v = np.asarray(values, dtype=float)
    k = np.floor(np.log(v / A) / math.log(1.0 + eps))
    for _ in range(4):
        over = power_value(k, A, eps) > v
        under = power_value(k + 1, A, eps) <= v
        if not (over.any() or under.any()):
            break
        k = k - over + under
    return k.astype(np.int64)


def power_value(k, A: float, eps: float) -> np.ndarray:
    return A * np.power(1.0 + eps, np.asarray(k, dtype=float))


def round_down_powers(f: StepFunction, eps: float, A: float | None = None) -> StepFunction:
    """Round every value down to a power ``A*(1+eps)**k``.

    The result ``g`` satisfies ``g <= f <= (1+eps) g``. ``A`` defaults to the
    smallest positive value of ``f``; values below ``A`` violate the range
    precondition and raise.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    if not len(f):
        return f
    if A is None:
        A = f.min_positive
    if not A > 0:
        raise ValueError("A must be positive")
    if f.ys[0] < A * (1 - 1e-12):
        raise ValueError(f"value {f.ys[0]!r} lies below the range floor A={A!r}")
    if _level_count(A, eps, f.max_value) <= DENSE_LEVELS:
        grid = power_grid(A, eps, f.max_value)
        vals = grid[np.maximum(np.searchsorted(grid, f.ys, side="right") - 1, 0)]
    else:
        vals = power_value(np.maximum(power_levels(f.ys, A, eps), 0), A, eps)
    ys = np.minimum(vals, f.ys)
    return StepFunction(f.xs.copy(), ys)


def _with_origin(f: StepFunction) -> tuple[np.ndarray, np.ndarray]:
    return np.concatenate(([0.0], f.xs)), np.concatenate(([0.0], f.ys))


def _pair_blocks(f: StepFunction, g: StepFunction):
    """Yield (x, y) candidate blocks of all breakpoint pairs, origin included."""
    fx, fy = _with_origin(f)
    gx, gy = _with_origin(g)
    if len(fx) > len(gx):
        fx, fy, gx, gy = gx, gy, fx, fy
    rows = max(1, _BLOCK // len(gx))
    for start in range(0, len(fx), rows):
        sx = fx[start : start + rows, None]
        sy = fy[start : start + rows, None]
        yield (sx + gx[None, :]).ravel(), (sy + gy[None, :]).ravel()


def exact_maxplus(f: StepFunction, g: StepFunction) -> StepFunction:
    """Exact ``(f (+) g)(x) = max_{x'} f(x') + g(x - x')`` by enumerating
    breakpoint pairs."""
    if not len(f):
        return g
    if not len(g):
        return f
    parts = []
    for xs, ys in _pair_blocks(f, g):
        h = StepFunction(xs, ys)
        parts.append(h)
    return pointwise_max(*parts) if len(parts) > 1 else parts[0]


def maxplus_rounded(f: StepFunction, g: StepFunction, eps: float, A: float) -> StepFunction:
    """``round_down_powers(exact_maxplus(f, g), eps, A)`` without materializing
    the exact convolution.

    Each candidate pair is binned to its grid level; the minimal weight per
    level followed by a suffix minimum gives the rounded function directly.
    """
    if not len(f) and not len(g):
        return f
    top = f.max_value + g.max_value
    if _level_count(A, eps, top) <= DENSE_LEVELS:
        return _maxplus_dense(f, g, power_grid(A, eps, top))
    return _maxplus_sparse(f, g, eps, A)


def _level_count(A: float, eps: float, top: float) -> float:
    return math.log(max(top, A) / A) / math.log(1.0 + eps) + 2


def _maxplus_dense(f: StepFunction, g: StepFunction, grid: np.ndarray) -> StepFunction:
    best = np.full(len(grid), np.inf)
    for xs, ys in _pair_blocks(f, g):
        pos = ys > 0
        xs, ys = xs[pos], ys[pos]
        if not xs.size:
            continue
        lvl = np.searchsorted(grid, ys, side="right") - 1
        if lvl.min() < 0:
            raise ValueError("convolution value below the range floor A")
        np.minimum.at(best, lvl, xs)
    best = np.minimum.accumulate(best[::-1])[::-1]
    ok = np.isfinite(best)
    return StepFunction(best[ok], grid[ok])


def _lightest_per_level(lvl: np.ndarray, xs: np.ndarray):
    order = np.lexsort((xs, lvl))
    lvl, xs = lvl[order], xs[order]
    first = np.ones(lvl.size, dtype=bool)
    first[1:] = lvl[1:] != lvl[:-1]
    return lvl[first], xs[first]


def _maxplus_sparse(f: StepFunction, g: StepFunction, eps: float, A: float) -> StepFunction:
    """Same result for grids too long to allocate (tiny ``eps``)."""
    lv, wx = [], []
    for xs, ys in _pair_blocks(f, g):
        pos = ys > 0
        xs, ys = xs[pos], ys[pos]
        if not xs.size:
            continue
        lvl = power_levels(ys, A, eps)
        if lvl.min() < 0:
            raise ValueError("convolution value below the range floor A")
        a, b = _lightest_per_level(lvl, xs)
        lv.append(a)
        wx.append(b)
    if not lv:
        return StepFunction.zero()
    lvl, xs = _lightest_per_level(np.concatenate(lv), np.concatenate(wx))
    best = np.minimum.accumulate(xs[::-1])[::-1]
    keep = np.ones(lvl.size, dtype=bool)
    keep[:-1] = best[:-1] < best[1:]
    return StepFunction(best[keep], power_value(lvl[keep], A, eps), canonical=True)


def merge_dnc(
    fs: Sequence[StepFunction],
    eps: float,
    A: float | None = None,
    B: float | None = None,
) -> StepFunction:
    """Approximate ``f_1 (+) ... (+) f_m`` within factor ``1 + eps``.

    Balanced binary merge tree. Leaves and every internal convolution are
    rounded to powers of ``1 + eps'`` where ``(1 + eps')**(L+1) = 1 + eps``
    and ``L = ceil(log2 m)`` is the tree depth, so each root-to-leaf path sees
    at most ``L + 1`` roundings. ``A`` defaults to the smallest positive
    value among the inputs; ``B`` only bounds the complexity and is unused
    otherwise.
    """
    fs = [f for f in fs if len(f)]
    if not fs:
        return StepFunction.zero()
    if A is None:
        A = min(f.min_positive for f in fs)
    depth = math.ceil(math.log2(len(fs))) if len(fs) > 1 else 0
    step = math.expm1(math.log1p(eps) / (depth + 1))
    leaves = [round_down_powers(f, step, A) for f in fs]

    def merge(lo: int, hi: int) -> StepFunction:
        if hi - lo == 1:
            return leaves[lo]
        mid = (lo + hi) // 2
        return maxplus_rounded(merge(lo, mid), merge(mid, hi), step, A)

    return merge(0, len(leaves))


def dump_function(f: StepFunction) -> str:
    """Text dump: one ``x y`` pair per line, ascending."""
    return "".join(f"{x!r} {y!r}\n" for x, y in f.points)


def load_function(text: str) -> StepFunction:
    pts = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            x, y = line.split()
            pts.append((float(x), float(y)))
    return StepFunction.from_points(pts)

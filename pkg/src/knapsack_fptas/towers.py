"""Set towers and the number-theoretic rounding sets built on them.

A tower starts from a base set of reals in ``[delta_1, 8 delta_1]``; each next
level keeps the integer multiples of the previous level that land in
``[delta_i, 8 delta_i]``. A base set is chosen (greedy hitting set) so that
every profit in [1, 2] sits just above a multiple of some top-level element,
which lets profits be rounded to a few quanta shared by all levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

# Relative tolerance for band membership and duplicate merging.
REL_TOL = 1e-12


class TowerError(ValueError):
    pass


def _int_range(lo: float, hi: float) -> range:
    """Integers in ``[lo, hi]`` with a relative slack of ``REL_TOL``."""
    a = math.ceil(lo * (1 - REL_TOL))
    b = math.floor(hi * (1 + REL_TOL))
    return range(max(a, 1), b + 1)


@dataclass(frozen=True)
class TowerParams:
    deltas: tuple[float, ...]
    eps: float

    def __post_init__(self):
        ds = tuple(float(d) for d in self.deltas)
        object.__setattr__(self, "deltas", ds)
        if not ds:
            raise TowerError("at least one level is required")
        if not self.eps > 0:
            raise TowerError("eps must be positive")
        if ds[0] < self.eps * (1 - REL_TOL):
            raise TowerError(f"delta_1={ds[0]!r} is below eps={self.eps!r}")
        for a, b in zip(ds, ds[1:]):
            if a > b / 2 * (1 + REL_TOL):
                raise TowerError(f"deltas must at least double: {a!r} then {b!r}")
        if ds[-1] > 0.125 * (1 + REL_TOL):
            raise TowerError(f"top delta {ds[-1]!r} exceeds 1/8")

    @property
    def d(self) -> int:
        return len(self.deltas)


@dataclass(frozen=True)
class SetTower:
    """Levels ``Delta_1..Delta_d`` (sorted tuples) with generator links.

    ``links[i][k] = (j, mult)`` says level ``i+1`` element ``k`` equals
    ``mult`` times level ``i`` element ``j`` (first such parent found).
    """

    levels: tuple[tuple[float, ...], ...]
    links: tuple[tuple[tuple[int, int], ...], ...]
    params: TowerParams

    @property
    def base(self) -> tuple[float, ...]:
        return self.levels[0]

    @property
    def top(self) -> tuple[float, ...]:
        return self.levels[-1]


def _dedupe_sorted(pairs: list[tuple[float, int, int]]) -> list[tuple[float, int, int]]:
    pairs.sort()
    out: list[tuple[float, int, int]] = []
    for item in pairs:
        if out and item[0] - out[-1][0] <= REL_TOL * item[0]:
            continue
        out.append(item)
    return out


def next_level(prev: Sequence[float], delta: float) -> list[tuple[float, int, int]]:
    """``[delta, 8 delta] ∩ (integer multiples of prev)`` as sorted
    ``(value, parent_index, multiplier)`` triples."""
    cand = []
    for j, z in enumerate(prev):
        for k in _int_range(delta / z, 8 * delta / z):
            cand.append((k * z, j, k))
    return _dedupe_sorted(cand)


def generate_tower(base: Sequence[float], params: TowerParams) -> SetTower:
    d1 = params.deltas[0]
    base = sorted(float(x) for x in base)
    for x in base:
        if not d1 * (1 - REL_TOL) <= x <= 8 * d1 * (1 + REL_TOL):
            raise TowerError(f"base element {x!r} outside [{d1!r}, {8 * d1!r}]")
    first = _dedupe_sorted([(x, -1, 1) for x in base])
    levels = [tuple(v for v, _, _ in first)]
    links: list[tuple[tuple[int, int], ...]] = []
    for delta in params.deltas[1:]:
        lvl = next_level(levels[-1], delta)
        levels.append(tuple(v for v, _, _ in lvl))
        links.append(tuple((j, k) for _, j, k in lvl))
    return SetTower(tuple(levels), tuple(links), params)


def level_index(value: float, level: Sequence[float]) -> int:
    """Position of ``value`` in a sorted level (within ``REL_TOL``), else -1."""
    arr = np.asarray(level)
    k = int(np.searchsorted(arr, value * (1 - REL_TOL)))
    if k < len(arr) and abs(arr[k] - value) <= REL_TOL * value:
        return k
    return -1


def find_generator(y: float, tower: SetTower) -> tuple[float, ...]:
    """Chain ``z_1, ..., z_d = y`` with ``z_i`` in level ``i`` and every
    ratio ``z_{i+1} / z_i`` an integer."""
    k = level_index(y, tower.top)
    if k < 0:
        raise TowerError(f"{y!r} is not in the top set")
    chain = [tower.top[k]]
    for lvl in range(len(tower.levels) - 1, 0, -1):
        j, _ = tower.links[lvl - 1][k]
        k = j
        chain.append(tower.levels[lvl - 1][k])
    return tuple(reversed(chain))


def chain_multipliers(chain: Sequence[float]) -> tuple[int, ...]:
    """Integer ratios of a generator chain; raises if one is not integral."""
    out = []
    for a, b in zip(chain, chain[1:]):
        q = b / a
        k = round(q)
        if k < 1 or abs(q - k) > 1e-9 * q:
            raise TowerError(f"ratio {q!r} is not an integer")
        out.append(k)
    return tuple(out)


def size_bound(tower: SetTower, i: int) -> float:
    """Upper bound ``8**(i-1) (delta_i / delta_1) |Delta_1|`` on level ``i`` (1-based)."""
    ds = tower.params.deltas
    return 8 ** (i - 1) * ds[i - 1] / ds[0] * len(tower.base)


# --- good integers ---------------------------------------------------------


@lru_cache(maxsize=256)
def prefix_products(deltas: tuple[float, ...]) -> dict[int, tuple[int, ...]]:
    """Products ``k_1...k_{d-1}`` whose prefixes satisfy
    ``k_1...k_{i-1} in [delta_i/delta_1, 2 delta_i/delta_1]`` for ``2 <= i <= d``,
    each with one witness factorization (lexicographically first)."""
    d1 = deltas[0]
    layer: dict[int, tuple[int, ...]] = {1: ()}
    for delta in deltas[1:]:
        lo, hi = delta / d1, 2 * delta / d1
        nxt: dict[int, tuple[int, ...]] = {}
        for s in sorted(layer):
            for k in _int_range(lo / s, hi / s):
                nxt.setdefault(s * k, layer[s] + (k,))
        layer = nxt
    return layer


def enumerate_good_integers(p: float, params: TowerParams) -> dict[int, tuple[int, ...]]:
    """Integers ``K = k_1...k_{d-1} j`` good for ``p``, with witnesses.

    Witness tuples are ``(k_1, ..., k_{d-1}, j)``. ``K`` must also satisfy
    ``K in [p / (4 delta_1), p / (2 delta_1)]``.
    """
    d1 = params.deltas[0]
    out: dict[int, tuple[int, ...]] = {}
    for s, wit in sorted(prefix_products(params.deltas).items()):
        for j in _int_range(p / (4 * d1 * s), p / (2 * d1 * s)):
            out.setdefault(s * j, wit + (j,))
    return dict(sorted(out.items()))


def _good_mask(deltas: tuple[float, ...], kmax: int) -> np.ndarray:
    """``mask[K]`` is true when some admissible prefix product divides ``K``."""
    mask = np.zeros(kmax + 1, dtype=bool)
    for s in prefix_products(deltas):
        if s <= kmax:
            mask[s::s] = True
    return mask


def grid_profits(eps: float) -> np.ndarray:
    """``1, 1+eps, ..., 1 + floor(1/eps) eps``."""
    top = math.floor(1 / eps + 1e-9)
    return 1.0 + eps * np.arange(top + 1, dtype=float)


def hitting_intervals(eps: float, params: TowerParams):
    """All intervals ``[(p-eps)/K, p/K]`` for grid profits ``p`` and good ``K``.

    Returns ``(lo, hi, owner)`` arrays; ``owner`` indexes the grid profit.
    Raises ``TowerError`` if some ``p`` has no good integer, and asserts that
    one profit's intervals are pairwise disjoint.
    """
    d1 = params.deltas[0]
    ps = grid_profits(eps)
    kmax = math.floor(ps[-1] / (2 * d1) * (1 + REL_TOL)) + 1
    mask = _good_mask(params.deltas, kmax)
    los, his, owners = [], [], []
    for idx, p in enumerate(ps):
        ks = np.arange(max(1, math.ceil(p / (4 * d1) * (1 - REL_TOL))),
                       math.floor(p / (2 * d1) * (1 + REL_TOL)) + 1)
        ks = ks[mask[ks]]
        if not ks.size:
            raise TowerError(f"no good integer for p={float(p)!r}; I_p is empty")
        lo = (p - eps) / ks
        hi = p / ks
        # K ascending, so intervals descend; consecutive ones must not overlap
        if ks.size > 1 and np.any(hi[1:] > lo[:-1] * (1 + REL_TOL)):
            raise TowerError(f"intervals of p={float(p)!r} overlap")
        los.append(lo)
        his.append(hi)
        owners.append(np.full(ks.size, idx))
    return np.concatenate(los), np.concatenate(his), np.concatenate(owners)


def greedy_hitting_points(lo: np.ndarray, hi: np.ndarray, owner: np.ndarray) -> list[float]:
    """Greedy hitting set over interval unions.

    Each round takes the leftmost region covered by the most intervals of
    still-unhit owners, picks its midpoint, and retires every owner hit.
    Events are sorted once; each round is a masked prefix sum.
    """
    m = lo.size
    coord = np.concatenate([lo, hi])
    kind = np.concatenate([np.zeros(m, dtype=np.int8), np.ones(m, dtype=np.int8)])
    ev_owner = np.concatenate([owner, owner])
    order = np.lexsort((kind, coord))  # starts before ends on ties: closed intervals
    coord, kind, ev_owner = coord[order], kind[order], ev_owner[order]
    sign = np.where(kind == 0, 1, -1).astype(np.int64)
    points: list[float] = []
    while coord.size:
        cover = np.cumsum(sign)
        cover_at_start = np.where(kind == 0, cover, -1)
        best = int(np.argmax(cover_at_start))
        if cover_at_start[best] <= 0:
            raise TowerError("greedy hitting set stalled")
        right = coord[best + 1] if best + 1 < coord.size else coord[best]
        x = 0.5 * (coord[best] + right)
        hit = (lo <= x) & (x <= hi)
        dead = np.zeros(int(owner.max()) + 1, dtype=bool)
        dead[owner[hit]] = True
        keep = ~dead[ev_owner]
        coord, kind, ev_owner, sign = coord[keep], kind[keep], ev_owner[keep], sign[keep]
        live = ~dead[owner]
        lo, hi, owner = lo[live], hi[live], owner[live]
        points.append(float(x))
    return sorted(points)


@lru_cache(maxsize=128)
def _base_set_cached(eps: float, deltas: tuple[float, ...]) -> tuple[float, ...]:
    params = TowerParams(deltas, eps)
    lo, hi, owner = hitting_intervals(eps, params)
    return tuple(greedy_hitting_points(lo, hi, owner))


def construct_base_set(eps: float, params: TowerParams) -> tuple[float, ...]:
    """Base set in ``[delta_1, 4 delta_1]`` whose generated top set puts a
    multiple within ``[p - eps, p]`` of every grid profit ``p``."""
    return _base_set_cached(float(eps), params.deltas)


# --- rounding to multiples -------------------------------------------------


def nearest_multiple_below(p: float, quanta: Sequence[float]) -> tuple[float, float, int]:
    """Largest ``k * y <= p`` over ``y`` in ``quanta`` and integers ``k >= 1``.

    Returns ``(k * y, y, k)``; ties prefer the smaller ``y``. The product is
    allowed to exceed ``p`` by at most a relative ``REL_TOL``.
    """
    ys = np.asarray(sorted(quanta), dtype=float)
    if not ys.size:
        raise TowerError("no quanta to round to")
    ks = np.floor(p / ys * (1 + REL_TOL))
    over = ks * ys > p * (1 + REL_TOL)
    ks[over] -= 1
    vals = ks * ys
    vals[ks < 1] = -np.inf
    best = int(np.argmax(vals))
    if not np.isfinite(vals[best]):
        raise TowerError(f"no positive multiple below {p!r}")
    return float(vals[best]), float(ys[best]), int(ks[best])


def top_multiples(top: Sequence[float], lo: float = 0.5, hi: float = 2.0):
    """Sorted multiples ``k*y`` in ``[lo, hi]`` with their ``(y, k)``."""
    vals, ys, ks = [], [], []
    for y in top:
        for k in _int_range(lo / y, hi / y):
            vals.append(k * y)
            ys.append(y)
            ks.append(k)
    order = np.lexsort((np.asarray(ys), np.asarray(vals)))
    return np.asarray(vals)[order], np.asarray(ys)[order], np.asarray(ks, dtype=np.int64)[order]


# --- partition into groups -------------------------------------------------


@dataclass(frozen=True)
class GroupedProfits:
    """Partition of profit positions into ``r`` groups with per-group bases.

    ``assignment[i] = (group, y, k, x)``: profit ``i`` is approximated from
    below by ``k * y`` where ``y`` is a top-set element generated by ``x``.
    """

    bases: tuple[tuple[float, ...], ...]
    groups: tuple[tuple[int, ...], ...]
    assignment: tuple[tuple[int, float, int, float], ...]
    base: tuple[float, ...]
    D: int
    s: int

    @property
    def r(self) -> int:
        return len(self.groups)

    def size_cap(self) -> int:
        """``s * ceil(2D / r)``, the per-group size bound."""
        return self.s * math.ceil(2 * self.D / self.r)


def partition_profits(
    P: Sequence[float],
    r: int,
    eps: float,
    params: TowerParams,
    c: float = 1.0,
) -> GroupedProfits:
    """Split profits into ``r`` groups of size ``O(m / r)``, each served by a
    small base set.

    Every profit is matched to the closest top-set multiple below it and
    bucketed by the base element generating that multiple; buckets are cut
    into chunks of at most ``s = ceil(m / D)`` and packed
    ``ceil(2D / r)`` chunks per group, ``D = max(r, #used base elements)``.
    """
    m = len(P)
    d1 = params.deltas[0]
    limit = min(c * d1 / eps * (1 + 1e-9), m) if m else 0
    if r < 1 or (m and r > limit):
        raise TowerError(f"r={r} outside [1, min(c*delta_1/eps, m)]")
    base = construct_base_set(eps, params)
    tower = generate_tower(base, params)
    vals, ys, ks = top_multiples(tower.top)
    gen_of: dict[float, float] = {}

    buckets: dict[float, list[int]] = {}
    assign: list[tuple[float, int, float] | None] = [None] * m
    for i, p in enumerate(P):
        pos = int(np.searchsorted(vals, p * (1 + REL_TOL), side="right")) - 1
        if pos < 0:
            raise TowerError(f"no top-set multiple below p={p!r}")
        y, k = float(ys[pos]), int(ks[pos])
        if y not in gen_of:
            gen_of[y] = find_generator(y, tower)[0]
        x = gen_of[y]
        assign[i] = (y, k, x)
        buckets.setdefault(x, []).append(i)

    used = sorted(buckets)
    D = max(r, len(used))
    s = max(1, math.ceil(m / D))
    chunks: list[tuple[float, list[int]]] = []
    for x in used:
        members = buckets[x]
        for a in range(0, len(members), s):
            chunks.append((x, members[a : a + s]))
    per_group = math.ceil(2 * D / r)
    groups: list[list[int]] = [[] for _ in range(r)]
    gbases: list[set[float]] = [set() for _ in range(r)]
    group_of = [0] * m
    for ci, (x, members) in enumerate(chunks):
        g = ci // per_group
        groups[g].extend(members)
        gbases[g].add(x)
        for i in members:
            group_of[i] = g
    assignment = tuple(
        (group_of[i], a[0], a[1], a[2]) for i, a in enumerate(assign)  # type: ignore[index]
    )
    return GroupedProfits(
        bases=tuple(tuple(sorted(b)) for b in gbases),
        groups=tuple(tuple(sorted(g)) for g in groups),
        assignment=assignment,
        base=base,
        D=D,
        s=s,
    )


# --- counting product-representable integers -------------------------------


def _check_chain(T: Sequence[float]) -> None:
    if not T:
        raise ValueError("need at least one threshold")
    if T[0] < 2:
        raise ValueError("T_1 must be at least 2")
    for a, b in zip(T, T[1:]):
        if b < 2 * a:
            raise ValueError("thresholds must at least double")
    if T[-1] > 2**20:
        raise ValueError("T_d above 2**20 is out of desk range")


def _in_half_open(v: int, t: float) -> bool:
    return t / 2 < v <= t


def _divisors(n: int) -> list[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def _representable(t: int, T: Sequence[float], level: int, memo: dict) -> bool:
    key = (t, level)
    if key in memo:
        return memo[key]
    ok = False
    if _in_half_open(t, T[level]):
        if level == 0:
            ok = True
        else:
            ok = any(
                _representable(u, T, level - 1, memo)
                for u in _divisors(t)
                if _in_half_open(u, T[level - 1])
            )
    memo[key] = ok
    return ok


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).tolist()


def count_product_representable(T: Sequence[float], mode: str = "brute") -> int:
    """Count factorization witnesses for the threshold chain ``T``.

    ``brute``: integers ``t <= T_d`` that factor as ``n_1...n_d`` with every
    prefix product in ``(T_i/2, T_i]``, checked integer by integer over
    divisor chains. ``tuples``: ordered tuples of primes with the same
    prefix condition.
    """
    _check_chain(T)
    if mode == "brute":
        memo: dict = {}
        top = T[-1]
        lo = math.floor(top / 2) + 1
        return sum(
            1 for t in range(lo, math.floor(top) + 1) if _representable(t, T, len(T) - 1, memo)
        )
    if mode == "tuples":
        primes = _primes_upto(math.floor(T[-1]))
        layer = {1: 1}
        for t in T:
            nxt: dict[int, int] = {}
            for prod, cnt in layer.items():
                for q in primes:
                    v = prod * q
                    if v > t:
                        break
                    if v > t / 2:
                        nxt[v] = nxt.get(v, 0) + cnt
            layer = nxt
        return sum(layer.values())
    raise ValueError(f"unknown mode {mode!r}")


def count_prime_products(T: Sequence[float]) -> int:
    """Distinct integers that are products of some valid prime tuple."""
    _check_chain(T)
    primes = _primes_upto(math.floor(T[-1]))
    layer = {1}
    for t in T:
        nxt = set()
        for prod in layer:
            for q in primes:
                v = prod * q
                if v > t:
                    break
                if v > t / 2:
                    nxt.add(v)
        layer = nxt
    return len(layer)


def dump_tower(tower: SetTower) -> str:
    """One level per line, elements space-separated."""
    return "".join(" ".join(repr(v) for v in lvl) + "\n" for lvl in tower.levels)


def dump_partition(gp: GroupedProfits, P: Sequence[float]) -> str:
    lines = []
    for j, (base, members) in enumerate(zip(gp.bases, gp.groups)):
        lines.append(f"base[{j}] " + " ".join(repr(x) for x in base))
        lines.append(f"group[{j}] " + " ".join(repr(P[i]) for i in members))
    return "\n".join(lines) + "\n"

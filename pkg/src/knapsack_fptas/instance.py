"""Knapsack instances: the input model, the text format, preprocessing and
profit-scale grouping, plus the seeded instance generators used by the bench.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, TextIO


class ParseError(ValueError):
    """Malformed instance text; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Item:
    weight: float
    profit: float

    def __post_init__(self):
        if not (self.weight > 0 and math.isfinite(self.weight)):
            raise ValueError(f"item weight must be positive, got {self.weight!r}")
        if not (self.profit > 0 and math.isfinite(self.profit)):
            raise ValueError(f"item profit must be positive, got {self.profit!r}")

    @property
    def unit_profit(self) -> float:
        return self.profit / self.weight


@dataclass(frozen=True)
class Instance:
    items: tuple[Item, ...]
    capacity: float

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not (self.capacity > 0 and math.isfinite(self.capacity)):
            raise ValueError(f"capacity must be positive, got {self.capacity!r}")

    @property
    def n(self) -> int:
        return len(self.items)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], capacity: float) -> "Instance":
        return cls(tuple(Item(float(w), float(p)) for w, p in pairs), float(capacity))


@dataclass(frozen=True)
class ProfitGroup:
    """Items whose profits share one binary scale.

    ``items`` carry rescaled profits in [1, 2); multiplying by ``scale``
    restores the originals exactly (the scale is a power of two).
    """

    items: tuple[Item, ...]
    scale: float
    exponent: int = field(default=0)


def _data_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped.split()


def _positive(token: str, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(lineno, f"{what} is not a number: {token!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise ParseError(lineno, f"{what} must be positive, got {token!r}")
    return value


def parse_instance(text: str | TextIO) -> Instance:
    """Parse the whitespace-separated instance format.

    The first data line is ``n W``; each of the next ``n`` lines is ``w p``.
    Lines starting with ``#`` and blank lines are ignored.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = _data_lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise ParseError(0, "empty instance") from None
    if len(head) != 2:
        raise ParseError(lineno, "header must be 'n W'")
    try:
        n = int(head[0])
    except ValueError:
        raise ParseError(lineno, f"item count is not an integer: {head[0]!r}") from None
    if n < 0:
        raise ParseError(lineno, "item count must be nonnegative")
    capacity = _positive(head[1], lineno, "capacity")

    items = []
    last = lineno
    for lineno, fields in lines:
        last = lineno
        if len(items) == n:
            raise ParseError(lineno, f"more than {n} item lines")
        if len(fields) != 2:
            raise ParseError(lineno, "item line must be 'w p'")
        w = _positive(fields[0], lineno, "weight")
        p = _positive(fields[1], lineno, "profit")
        items.append(Item(w, p))
    if len(items) != n:
        raise ParseError(last, f"expected {n} item lines, found {len(items)}")
    return Instance(tuple(items), capacity)


def format_instance(inst: Instance) -> str:
    lines = [f"{inst.n} {inst.capacity!r}"]
    lines += [f"{it.weight!r} {it.profit!r}" for it in inst.items]
    return "\n".join(lines) + "\n"


def preprocess(inst: Instance, eps: float) -> Instance:
    """Drop items that cannot fit and items too cheap to matter.

    An item is too cheap when ``p <= (eps / n) * max p`` with ``n`` counted
    after the weight filter; together these lose at most ``eps * max p``,
    and ``max p`` is itself a feasible answer.
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps!r}")
    fitting = [it for it in inst.items if it.weight <= inst.capacity]
    if not fitting:
        return Instance((), inst.capacity)
    threshold = eps / len(fitting) * max(it.profit for it in fitting)
    kept = tuple(it for it in fitting if it.profit > threshold)
    return Instance(kept, inst.capacity)


def profit_exponent(p: float) -> int:
    """The ``j`` with ``2**j <= p < 2**(j+1)``, exact in binary floating point."""
    _, e = math.frexp(p)
    return e - 1


def group_by_profit(inst: Instance) -> list[ProfitGroup]:
    """Split items by binary profit scale, rescaling profits into [1, 2).

    A profit of exactly ``2**(j+1)`` belongs to group ``j+1`` with rescaled
    profit 1. Groups are returned in ascending scale order.
    """
    buckets: dict[int, list[Item]] = {}
    for it in inst.items:
        j = profit_exponent(it.profit)
        buckets.setdefault(j, []).append(Item(it.weight, math.ldexp(it.profit, -j)))
    return [
        ProfitGroup(tuple(buckets[j]), math.ldexp(1.0, j), j) for j in sorted(buckets)
    ]


# --- seeded generation -----------------------------------------------------

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 (Steele, Lea, Flood 2014); identical streams on every platform."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] (the modulo bias is below 2**-40 here)."""
        return lo + self.next_u64() % (hi - lo + 1)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))


def random_instance(
    n: int,
    seed: int,
    dist: str = "uniform",
    max_value: int = 10_000,
    capacity_fraction: float = 0.5,
) -> Instance:
    """Deterministic benchmark instance.

    ``uniform``: weight and profit independent uniform integers in
    ``[1, max_value]``. ``correlated``: profit = weight + uniform noise in
    ``[1, max_value // 10]``. The capacity is ``capacity_fraction`` of the
    total weight, rounded down, and at least the largest weight.
    """
    rng = SplitMix64(seed)
    pairs = []
    for _ in range(n):
        w = rng.randint(1, max_value)
        if dist == "uniform":
            p = rng.randint(1, max_value)
        elif dist == "correlated":
            p = w + rng.randint(1, max(1, max_value // 10))
        else:
            raise ValueError(f"unknown distribution {dist!r}")
        pairs.append((w, p))
    if not pairs:
        return Instance((), 1.0)
    total = sum(w for w, _ in pairs)
    cap = max(math.floor(total * capacity_fraction), max(w for w, _ in pairs), 1)
    return Instance.from_pairs(pairs, cap)


def instance_digest(inst: Instance) -> str:
    import hashlib

    return hashlib.sha256(format_instance(inst).encode()).hexdigest()


def total_profit(items: Sequence[Item]) -> float:
    return math.fsum(it.profit for it in items)

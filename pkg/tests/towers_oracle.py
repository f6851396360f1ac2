"""Independent reference computations for the tower tests."""

import math

import numpy as np


def brute_next_level(prev, delta):
    """All ``k * z`` in ``[delta, 8 delta]``, scanning ``k`` upward from 1."""
    out = []
    for z in prev:
        k = 1
        while k * z <= 8 * delta * (1 + 1e-12):
            if k * z >= delta * (1 - 1e-12):
                out.append(k * z)
            k += 1
    out.sort()
    merged = []
    for v in out:
        if not merged or v - merged[-1] > 1e-12 * v:
            merged.append(v)
    return merged


def brute_good_integers(p, deltas):
    """Good ``K`` by trial factorization: some chain of divisors
    ``k_1, k_1 k_2, ...`` of ``K`` hits every prefix band."""
    d1 = deltas[0]
    bands = [(d / d1, 2 * d / d1) for d in deltas[1:]]
    lo = math.ceil(p / (4 * d1) - 1e-9)
    hi = math.floor(p / (2 * d1) + 1e-9)

    def ok(K, prefix, level):
        if level == len(bands):
            return True
        a, b = bands[level]
        for s in range(prefix, K + 1, prefix):
            if s > b + 1e-9:
                break
            if s >= a - 1e-9 and K % s == 0 and ok(K, s, level + 1):
                return True
        return False

    return {K for K in range(max(lo, 1), hi + 1) if ok(K, 1, 0)}


def has_multiple_in(values, lo, hi):
    """Whether some ``k * y`` with ``y`` in values lies in ``[lo, hi]``."""
    ys = np.asarray(values, dtype=float)
    ks = np.floor(hi / ys * (1 + 1e-12))
    return bool(np.any((ks >= 1) & (ks * ys >= lo * (1 - 1e-12))))

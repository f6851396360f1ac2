import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from knapsack_fptas import multilevel as ml
from knapsack_fptas.instance import Item
from knapsack_fptas.multilevel import (
    approx_capped,
    approx_group,
    approx_items_small,
    choose_level_params,
    finalize_t,
    in_cap_band,
    in_count_band,
    level_profits,
)
from knapsack_fptas.oracle import brute_fold, sandwich
from knapsack_fptas.smawk import (
    UniformFunction,
    build_uniform_functions,
    fast_naive_capped,
    fold_uniform,
    naive_capped,
    uniform_merge,
)
from knapsack_fptas.stepfn import cap, pointwise_max
from knapsack_fptas.towers import TowerParams, construct_base_set, generate_tower, nearest_multiple_below

# Measured worst (ratio - 1) / eps stays near 1; the stage analysis allows 11.
C_MULTI = 12


def test_level_params_two_levels():
    eps = 1e-4
    s = choose_level_params(64, 1, eps)
    assert s.d == 2
    assert s.alpha == pytest.approx(2 * math.sqrt(2))
    assert s.deltas[1] == pytest.approx(eps * math.sqrt(8))
    assert s.deltas[0] == eps


def test_level_params_boundary():
    s = choose_level_params(12, 3, 1e-3)
    assert s.d == 1 and s.alpha == pytest.approx(2) and s.deltas == (3e-3,)


def test_level_params_rejects_small_cap():
    with pytest.raises(ValueError):
        choose_level_params(7, 2, 1e-3)


@given(st.integers(4, 10**6), st.integers(1, 50))
def test_level_params_formulas(B, r):
    if B < 4 * r:
        return
    s = choose_level_params(B, r, 1e-6)
    R = math.sqrt(B / r)
    assert 2 ** (2 ** (s.d - 1)) <= R * (1 + 1e-9)
    assert R < 2 ** (2**s.d) * (1 + 1e-9)
    assert s.alpha ** (2 ** (s.d - 1)) == pytest.approx(R)
    for a, b in zip(s.deltas, s.deltas[1:]):
        assert b >= 2 * a * (1 - 1e-9)
    assert s.caps[-1] == pytest.approx(B * s.t / s.alpha)


def test_finalize_t_never_below_alpha():
    s = choose_level_params(64, 1, 2**-10)
    assert finalize_t(s, []).t == s.alpha


def test_level_profits_lift_along_chain():
    eps = 2**-8
    params = TowerParams((eps, 4 * eps), eps)
    tower = generate_tower(construct_base_set(eps, params), params)
    for y in tower.top[:5]:
        ps = level_profits(y, 7, tower)
        assert len(ps) == 2
        assert ps[-1] == pytest.approx(7 * y)
        assert ps[0] == pytest.approx(ps[1])


def test_approx_group_single_level_is_composition():
    eps = 2**-8
    sched = choose_level_params(4, 1, eps)
    assert sched.d == 1
    base = construct_base_set(eps, sched.params)
    tower = generate_tower(base, sched.params)
    fs = [UniformFunction.from_weights(1.5, [3, 4]), UniformFunction.from_weights(1.25, [2])]
    mult = []
    rounded = []
    for f in fs:
        v, y, k = nearest_multiple_below(f.p, tower.top)
        mult.append((y, k))
        rounded.append(f.with_profit(v))
    got = approx_group(fs, mult, base, sched, eps)
    want = cap(
        pointwise_max(
            fast_naive_capped(fs, sched.caps[0], eps),
            uniform_merge(rounded, tower.levels[0], sched.deltas[0], sched.caps[1]),
        ),
        sched.caps[-1],
    )
    assert got == want


def _families(rng, m, eps, grid=1024):
    items = [Item(rng.randint(1, 40), 1 + rng.randint(0, grid) / grid) for _ in range(m)]
    return build_uniform_functions(items, eps)


@pytest.mark.parametrize("eps", [0.1, 2**-10])
def test_items_small_single_class_exact(eps):
    f = UniformFunction.from_weights(1.0, [3, 1, 2])
    assert approx_items_small([f], eps) == f.to_stepfunction()


@given(st.integers(0, 2**32), st.integers(1, 8), st.sampled_from([0.1, 2**-10]))
def test_items_small_few_classes(seed, m, eps):
    fs = _families(random.Random(seed), m, eps)
    s = sandwich(approx_items_small(fs, eps), brute_fold(fold_uniform(fs)))
    assert s.sound and s.worst_ratio <= 1 + C_MULTI * eps


@given(st.integers(0, 2**32), st.integers(1, 8), st.sampled_from([4.0, 8.0, 16.0, 64.0]), st.sampled_from([0.1, 2**-10]))
def test_capped_few_classes(seed, m, B, eps):
    fs = _families(random.Random(seed), m, eps)
    exact = cap(brute_fold(fold_uniform(fs)), B)
    got = approx_capped(fs, B, eps)
    s = sandwich(got, exact)
    assert s.sound and s.worst_ratio <= 1 + C_MULTI * eps
    ref = naive_capped(fs, B, eps)
    assert sandwich(got, ref).worst_ratio <= (1 + C_MULTI * eps) / (1 - eps)


@pytest.mark.parametrize("m", [30, 60, 120])
def test_multilevel_path_many_classes(m, monkeypatch):
    eps = 2**-10
    calls = []
    real = ml.approx_group
    monkeypatch.setattr(ml, "approx_group", lambda *a: calls.append(1) or real(*a))
    rng = random.Random(m)
    fs = _families(rng, m, eps)
    assert in_count_band(len(fs), eps)
    exact = brute_fold(fold_uniform(fs))
    got = approx_items_small(fs, eps)
    assert calls, "grouped merge path not taken"
    s = sandwich(got, exact)
    assert s.sound and s.worst_ratio <= 1 + C_MULTI * eps
    for B in (16.0, 64.0):
        calls.clear()
        s = sandwich(approx_capped(fs, B, eps), cap(exact, B))
        assert calls and s.sound and s.worst_ratio <= 1 + C_MULTI * eps


def test_bands():
    eps = 2**-10
    assert in_cap_band(16, eps) and not in_cap_band(0.2, eps) and not in_cap_band(5000, eps)
    assert in_count_band(30, eps) and not in_count_band(3, eps)


def test_empty_inputs():
    assert len(approx_capped([], 5.0, 0.1)) == 0
    assert len(approx_items_small([], 0.1)) == 0

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from knapsack_fptas.instance import Item
from knapsack_fptas.oracle import attainable_sums, brute_force_profile, sandwich
from knapsack_fptas.subsetsum import SIZE_CONST, subset_sum_profile, subset_sum_sketch, thin_min


def covers(S, sums, W, eps):
    for s in sums[sums <= W]:
        k = np.searchsorted(S, s * (1 + 1e-12), side="right") - 1
        if k < 0 or S[k] < s - eps * W * (1 + 1e-9):
            return False
    return True


def sound(S, sums):
    return all(np.any(np.abs(sums - v) <= 1e-9 * max(1.0, v)) for v in S)


def test_single_weight_forced():
    S = subset_sum_sketch([5], 5, 0.1).values
    assert set(S.tolist()) == {0, 5}


def test_small_exhaustive():
    for eps in (0.5, 0.1, 0.01):
        S = subset_sum_sketch([1, 2, 3], 6, eps).values
        assert covers(S, attainable_sums([1, 2, 3]), 6, eps)
        assert sound(S, attainable_sums([1, 2, 3]))


def test_empty_weights():
    assert subset_sum_sketch([], 3.0, 0.1).values.tolist() == [0.0]


def test_bad_arguments():
    with pytest.raises(ValueError):
        subset_sum_sketch([1], 1, 1.5)
    with pytest.raises(ValueError):
        subset_sum_sketch([1], 0, 0.1)


@given(
    st.lists(st.floats(0.1, 10), max_size=12),
    st.floats(0.5, 60),
    st.sampled_from([0.4, 0.1, 0.03]),
)
def test_sketch_contract(ws, W, eps):
    S = subset_sum_sketch(ws, W, eps).values
    sums = attainable_sums(ws)
    assert np.all(np.diff(S) > 0)
    assert S[0] == 0 and S[-1] <= W * (1 + 1e-12)
    assert sound(S, sums)
    assert covers(S, sums, W, eps)
    assert len(S) <= SIZE_CONST / eps + 1


@given(st.lists(st.integers(1, 5), min_size=1, max_size=40), st.sampled_from([0.2, 0.05]))
def test_sketch_prefix_path(ws, eps):
    W = 2 * max(ws) / eps + sum(ws) / 3
    S = subset_sum_sketch(ws, W, eps).values
    sums = attainable_sums(ws) if len(ws) <= 16 else np.unique(np.concatenate(([0], np.cumsum(sorted(ws)))))
    assert covers(S, sums, W, eps) or len(ws) > 16


def test_thin_min():
    assert thin_min(np.array([0.0, 0.4, 1.1, 1.9, 2.0]), 1.0).tolist() == [0.0, 1.1, 2.0]


def test_profile_single_item():
    assert subset_sum_profile([Item(1.5, 1.5)], 0.1).points == [(1.5, 1.5)]


def test_profile_requires_identity():
    with pytest.raises(ValueError):
        subset_sum_profile([Item(1.5, 1.4)], 0.1)


@given(st.lists(st.floats(1, 2), min_size=1, max_size=12), st.sampled_from([0.2, 0.05]))
def test_profile_factor(ws, eps):
    items = [Item(w, w) for w in ws]
    s = sandwich(subset_sum_profile(items, eps), brute_force_profile(items))
    assert s.sound
    assert s.worst_ratio <= 1 / (1 - 2 * eps) * (1 + 1e-9)

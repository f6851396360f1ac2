import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from knapsack_fptas.instance import (
    Instance,
    Item,
    ParseError,
    format_instance,
    group_by_profit,
    instance_digest,
    parse_instance,
    preprocess,
    random_instance,
)


def test_parse_basic():
    inst = parse_instance("2 10\n3 5\n4 7\n")
    assert inst.capacity == 10
    assert inst.items == (Item(3, 5), Item(4, 7))


def test_parse_keeps_oversized_item():
    inst = parse_instance("1 5\n6 1\n")
    assert inst.items == (Item(6, 1),)
    assert preprocess(inst, 0.1).n == 0


def test_parse_from_stream_and_comments():
    inst = parse_instance(io.StringIO("# header\n1 3\n\n2 2.5\n"))
    assert inst.items == (Item(2, 2.5),)


@pytest.mark.parametrize(
    "text, line",
    [
        ("2 10\n3 -1\n", 2),
        ("2 10\n3 1\n", 2),
        ("1 0\n1 1\n", 1),
        ("1 10\n1 x\n", 2),
        ("1 10\n1 2 3\n", 2),
        ("x 10\n", 1),
        ("1 10\n1 1\n2 2\n", 3),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(ParseError) as exc:
        parse_instance(text)
    assert exc.value.lineno == line
    assert f"line {line}" in str(exc.value)


def test_parse_empty_text():
    with pytest.raises(ParseError):
        parse_instance("")


def test_preprocess_drops_oversized():
    inst = Instance.from_pairs([(3, 5), (11, 100)], 10)
    assert preprocess(inst, 0.5).items == (Item(3, 5),)


def test_preprocess_profit_threshold():
    inst = Instance.from_pairs([(1, 100), (1, 0.01)], 10)
    threshold = 0.1 / 2 * 100
    assert 0.01 <= threshold
    assert preprocess(inst, 0.1).items == (Item(1, 100),)


def test_preprocess_empty():
    assert preprocess(Instance((), 3.0), 0.2).n == 0


def test_preprocess_rejects_bad_eps():
    with pytest.raises(ValueError):
        preprocess(Instance((), 1.0), 1.0)


def test_group_by_profit_scales():
    inst = Instance.from_pairs([(1, 1.5), (1, 3), (1, 6)], 5)
    groups = group_by_profit(inst)
    assert [g.exponent for g in groups] == [0, 1, 2]
    assert all(g.items[0].profit == 1.5 for g in groups)


def test_group_boundary_goes_up():
    groups = group_by_profit(Instance.from_pairs([(1, 1), (1, 2)], 5))
    assert [(g.exponent, [it.profit for it in g.items]) for g in groups] == [(0, [1.0]), (1, [1.0])]


def test_group_single():
    groups = group_by_profit(Instance.from_pairs([(1, 1), (2, 1)], 5))
    assert len(groups) == 1 and len(groups[0].items) == 2


@given(st.lists(st.floats(1e-6, 1e9, allow_nan=False), min_size=1, max_size=20))
def test_group_rescale_is_exact(profits):
    inst = Instance(tuple(Item(1.0, p) for p in profits), 1.0)
    seen = []
    for g in group_by_profit(inst):
        for it in g.items:
            assert 1 <= it.profit < 2
            seen.append(it.profit * g.scale)
    assert sorted(seen) == sorted(profits)


@given(st.integers(0, 50), st.integers(0, 2**32), st.sampled_from(["uniform", "correlated"]))
def test_random_instance_deterministic(n, seed, dist):
    a = random_instance(n, seed, dist)
    b = random_instance(n, seed, dist)
    assert instance_digest(a) == instance_digest(b)
    assert a.n == n
    if n:
        assert a.capacity >= max(it.weight for it in a.items)


def test_random_instance_seed_changes_digest():
    assert instance_digest(random_instance(30, 1)) != instance_digest(random_instance(30, 2))


@given(st.integers(0, 30), st.integers(0, 1000))
def test_format_round_trip(n, seed):
    inst = random_instance(n, seed)
    assert parse_instance(format_instance(inst)) == inst


@given(st.integers(1, 30), st.integers(0, 1000), st.sampled_from([0.5, 0.1, 0.01]))
def test_preprocess_loses_little(n, seed, eps):
    from knapsack_fptas.oracle import brute_opt

    inst = random_instance(min(n, 14), seed, max_value=100)
    pre = preprocess(inst, eps)
    opt = brute_opt(inst.items, inst.capacity)
    opt_pre = brute_opt(pre.items, inst.capacity)
    assert opt_pre <= opt
    assert opt <= opt_pre / (1 - eps) * (1 + 1e-12)

import pytest

from knapsack_fptas.bench import (
    HEADER,
    BenchConfig,
    BenchRecord,
    exact_optimum,
    loglog_slope,
    read_csv,
    run_bench,
    strip_timing,
    to_csv,
)
from knapsack_fptas.instance import random_instance


def test_grid_row_count_and_header():
    cfg = BenchConfig(ns=(10, 30), epsilons=(0.2, 0.1), seeds=3)
    rows = read_csv(to_csv(run_bench(cfg)))
    assert len(rows) == 12
    assert tuple(rows[0]) == HEADER
    for r in rows:
        assert float(r["ratio"]) <= 1 + float(r["eps"]) + 1e-9


def test_repeat_is_identical_without_timing():
    cfg = BenchConfig(ns=(20,), epsilons=(0.1,), seeds=2, algorithms=("fptas", "greedy"))
    a = strip_timing(to_csv(run_bench(cfg)))
    b = strip_timing(to_csv(run_bench(cfg)))
    assert a == b


def test_parallel_matches_serial():
    cfg = BenchConfig(ns=(15,), epsilons=(0.2,), seeds=3)
    par = BenchConfig(ns=(15,), epsilons=(0.2,), seeds=3, jobs=2)
    assert strip_timing(to_csv(run_bench(cfg))) == strip_timing(to_csv(run_bench(par)))


def test_exact_optimum_limits():
    small = random_instance(10, 1)
    assert exact_optimum(small.items, small.capacity) is not None
    big = random_instance(100, 1)
    assert exact_optimum(big.items, big.capacity, dp_limit=10) is None


def test_record_rejects_overshoot():
    with pytest.raises(ValueError):
        BenchRecord(1, 0.1, "fptas", 1.0, 2.0, 1.0, 0.5, 0.0, 0)


def test_loglog_slope():
    xs = [2, 4, 8, 16]
    assert loglog_slope(xs, [x**2.25 for x in xs]) == pytest.approx(2.25)


def test_read_csv_rejects_header():
    with pytest.raises(ValueError):
        read_csv("a,b\n1,2\n")

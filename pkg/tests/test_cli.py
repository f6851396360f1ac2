import subprocess
import sys

import pytest

from knapsack_fptas.bench import read_csv, strip_timing
from knapsack_fptas.cli import EXIT_ORACLE, EXIT_USAGE, main
from knapsack_fptas.instance import format_instance, random_instance
from knapsack_fptas.oracle import brute_opt
from knapsack_fptas.stepfn import load_function


@pytest.fixture
def tiny(tmp_path):
    inst = random_instance(10, 42)
    path = tmp_path / "tiny.txt"
    path.write_text(format_instance(inst))
    return inst, path


def report(out):
    return {line.split()[0]: float(line.split()[1]) for line in out.splitlines() if line.strip()}


def test_solve_verify(tiny, capsys):
    inst, path = tiny
    assert main(["solve", "--input", str(path), "--epsilon", "0.1", "--verify"]) == 0
    r = report(capsys.readouterr().out)
    assert r["OPT"] == brute_opt(inst.items, inst.capacity)
    assert 1 <= r["ratio"] <= 1.1 * (1 + 1e-9)
    assert r["SOL"] <= r["OPT"]


def test_solve_exact_and_greedy(tiny, capsys):
    inst, path = tiny
    assert main(["solve", "--input", str(path), "--epsilon", "0.1", "--algorithm", "exact", "--verify"]) == 0
    r = report(capsys.readouterr().out)
    assert r["SOL"] == r["OPT"]
    assert main(["solve", "--input", str(path), "--epsilon", "0.1", "--algorithm", "greedy", "--verify"]) == 0
    r = report(capsys.readouterr().out)
    scale = max(it.profit for it in inst.items)
    assert r["SOL"] >= r["OPT"] - 2 * scale


def test_solve_emit_function_and_capacity(tiny, tmp_path, capsys):
    _, path = tiny
    out = tmp_path / "f.txt"
    assert main(["solve", "--input", str(path), "--epsilon", "0.2", "--capacity", "500",
                 "--emit-function", str(out)]) == 0
    sol = report(capsys.readouterr().out)["SOL"]
    f = load_function(out.read_text())
    assert f(500) == sol


def test_solve_errors(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("2 10\n3 -1\n")
    assert main(["solve", "--input", str(bad), "--epsilon", "0.1"]) == EXIT_USAGE
    assert "line 2" in capsys.readouterr().err
    assert main(["solve", "--input", str(tmp_path / "missing"), "--epsilon", "0.1"]) == EXIT_USAGE
    big = tmp_path / "big.txt"
    big.write_text("30 100\n" + "1.5 2\n" * 30)
    assert main(["solve", "--input", str(big), "--epsilon", "0.1", "--verify"]) == EXIT_ORACLE


def test_bad_flags_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--epsilon", "0.1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--input", "x", "--epsilon", "-1"])
    assert exc.value.code == 2


def test_bench_rows(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bench", "--ns", "10,20", "--epsilons", "0.2,0.1", "--seeds", "3", "--out", str(out)]) == 0
    assert len(read_csv(out.read_text())) == 12
    again = tmp_path / "c.csv"
    main(["bench", "--ns", "10,20", "--epsilons", "0.2,0.1", "--seeds", "3", "--out", str(again)])
    assert strip_timing(out.read_text()) == strip_timing(again.read_text())


def test_bench_unwritable(tmp_path):
    assert main(["bench", "--ns", "5", "--epsilons", "0.2", "--seeds", "1",
                 "--out", str(tmp_path / "no" / "dir.csv")]) == EXIT_USAGE
    assert main(["bench", "--ns", "5", "--epsilons", "0.2", "--seeds", "1", "--algorithms", "zzz",
                 "--out", str(tmp_path / "x.csv")]) == EXIT_USAGE


def test_selftest_and_fault(capsys):
    assert main(["selftest"]) == 0
    assert all("PASS" in line for line in capsys.readouterr().out.splitlines())
    assert main(["selftest", "--suite", "smawk", "--corrupt", "smawk"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_tower_dump(capsys):
    assert main(["tower", "--epsilon", "0.015625", "--deltas", "0.03125,0.0625", "--groups", "2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] and out[1]
    assert any(line.startswith("group[1]") for line in out)
    assert main(["tower", "--epsilon", "0.1", "--deltas", "0.05"]) == EXIT_USAGE


def test_module_entry_point(tiny):
    _, path = tiny
    proc = subprocess.run([sys.executable, "-m", "knapsack_fptas", "solve", "--input", str(path),
                           "--epsilon", "0.1"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("SOL ")

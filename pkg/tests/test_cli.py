import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from bpb_market import Instance, Uniform, load_instance, save_instance
from bpb_market.cli import main
from bpb_market.fixtures import cycle_swap_instance, no_equilibrium_example


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def make(inst=None, prices=None):
        inst = inst or cycle_swap_instance()
        ip = tmp_path / "inst.json"
        ip.write_bytes(save_instance(inst))
        if prices is None:
            return str(ip)
        pp = tmp_path / "prices.json"
        pp.write_text(json.dumps([str(x) for x in prices]))
        return str(ip), str(pp)
    return make


def test_generate_respects_ranges(capsys):
    code, out, _ = run(capsys, "generate", "--n", 10, "--lam", "1/20", "--m", "1/100", "--seed", 7)
    assert code == 0
    inst = load_instance(out.encode())
    assert inst.n == 10 and inst.budget == 1
    assert all(F(1, 100) <= c <= F(1, 20) for c in inst.costs)
    ratios = [v / c for v, c in zip(inst.values, inst.costs)]
    assert len(set(ratios)) == 10


def test_generate_is_deterministic(capsys):
    a = run(capsys, "generate", "--n", 6, "--family", "graphic", "--seed", "abc")[1]
    b = run(capsys, "generate", "--n", 6, "--family", "graphic", "--seed", "abc")[1]
    c = run(capsys, "generate", "--n", 6, "--family", "graphic", "--seed", "abd")[1]
    assert a == b != c


def test_generate_infeasible_spec(capsys):
    code, _, err = run(capsys, "generate", "--n", 3, "--lam", "1/200", "--m", "1/100", "--seed", 1)
    assert code == 2 and err.startswith("error:")


def test_seed_is_mandatory(tmp_path):
    for argv in (["generate", "--n", "3"], ["paper-suite", "--out", str(tmp_path)]):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 2


def test_select(capsys, files):
    inst, prices = files(prices=(F(3, 20), F(1, 3), F(1, 3), F(1, 3), F(19, 20)))
    code, out, _ = run(capsys, "select", "--rule", "bpb", "--instance", inst, "--prices", prices)
    doc = json.loads(out)
    assert code == 0 and doc["selected"] == [2, 3, 4] and doc["spend"] == "1"
    assert doc["value"] == "6"


def test_select_tiebreak_list(capsys, files):
    inst, prices = files(Instance([1, 1], [0, 0], 1), (F(1, 2), F(1, 2)))
    _, out, _ = run(capsys, "select", "--instance", inst, "--prices", prices)
    assert json.loads(out)["order"] == [1, 2]
    _, out, _ = run(capsys, "select", "--instance", inst, "--prices", prices, "--tiebreak", "2,1")
    assert json.loads(out)["order"] == [2, 1]
    code, _, _ = run(capsys, "select", "--instance", inst, "--prices", prices, "--tiebreak", "1,1")
    assert code == 2


def test_construct_then_verify(capsys, files, tmp_path):
    inst = files(Instance([3, 2, 1], [F(1, 10), F(1, 5), F(9, 10)], 1, Uniform(3, 2)))
    eq = tmp_path / "eq.json"
    code, _, _ = run(capsys, "construct-eq", "--algo", "weighted", "--instance", inst,
                     "--trace", "--out", eq)
    doc = json.loads(eq.read_text())
    assert code == 0 and "trace" in doc and all(isinstance(p, str) for p in doc["prices"])
    pp = tmp_path / "p.json"
    pp.write_text(json.dumps(doc["prices"]))
    code, out, _ = run(capsys, "verify-eq", "--instance", inst, "--prices", pp)
    assert code == 0 and json.loads(out)["passed"] is True


def test_verify_failure_exit_code(capsys, files):
    inst, tb = no_equilibrium_example()
    i, p = files(inst, (4, 4, 4))
    code, out, _ = run(capsys, "verify-eq", "--instance", i, "--prices", p, "--tiebreak", "3,1,2")
    assert code == 1 and json.loads(out)["passed"] is False


def test_approx(capsys, files):
    inst, prices = files(Instance([1, 1], [0, 0], 1), (1, 1))
    code, out, _ = run(capsys, "approx", "--instance", inst, "--prices", prices)
    doc = json.loads(out)
    assert code == 0 and doc["ratio"] == "1/2" and doc["decimal"] == 0.5 and doc["opt"] == "2"


def test_bad_input_files(capsys, files, tmp_path):
    inst = files()
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(capsys, "select", "--instance", inst, "--prices", bad)[0] == 2
    assert run(capsys, "select", "--instance", bad, "--prices", bad)[0] == 2
    assert run(capsys, "select", "--instance", tmp_path / "missing", "--prices", bad)[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["verify-eq", "--instance", inst, "--prices", str(bad), "--eps", "x"])
    assert e.value.code == 2


def test_simulate_outputs(capsys, files, tmp_path):
    inst, target = files(Instance([1], [F(1, 5)], 1), (1,))
    out = tmp_path / "sim"
    argv = ["simulate", "--instance", inst, "--delta", "1/10", "--rounds", 3000, "--seed", 0,
            "--seeds", 2, "--target", target, "--out", out]
    assert run(capsys, *argv)[0] == 0
    summ = json.loads((out / "summary.json").read_text())
    assert summ["converged"] == 2 and summ["runs"][0]["modal_prices"] == ["1"]
    rows = list(csv.reader(io.StringIO((out / "trace_seed1.csv").read_text())))
    assert rows[0] == ["round", "module", "price", "selected", "reward", "critical_price"]
    assert len(rows) == 3001
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    run(capsys, *argv)
    assert {p.name: p.read_bytes() for p in out.iterdir()} == first


def test_simulate_not_converged_exit_code(capsys, files):
    inst, target = files(Instance([1], [F(1, 5)], 1), (F(1, 5),))
    code, out, _ = run(capsys, "simulate", "--instance", inst, "--delta", "1/10", "--rounds", 500,
                       "--seed", 0, "--target", target)
    assert code == 1 and json.loads(out)["converged"] == 0


def test_simulate_strict_rejects(capsys, files):
    inst = files(Instance([1, 1], [F(3, 10), F(1, 2)], 1))
    code, _, err = run(capsys, "simulate", "--instance", inst, "--delta", "1/20", "--rounds", 10,
                       "--seed", 0, "--strict-assumptions")
    assert code == 2 and "delta" in err


def test_sweep_rows(capsys, files):
    inst = files(Instance([1, 1], [F(3, 10), F(1, 2)], 1))
    argv = ["sweep", "--instance", inst, "--deltas", "1/10,1/20", "--rounds", 400, "--seed", 3,
            "--seeds", 2]
    code, out, _ = run(capsys, *argv)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert [(r["delta"], r["seed"]) for r in rows] == [("1/10", "3"), ("1/10", "4"),
                                                       ("1/20", "3"), ("1/20", "4")]
    assert run(capsys, *argv)[1] == out


def test_suite_quick_subset(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    code, out, _ = run(capsys, "paper-suite", "--quick", "--seed", 0, "--only", "A1,A8", "--out", a)
    assert code == 0 and out.count("PASS") == 2
    summ = json.loads((a / "summary.json").read_text())
    assert summ["mode"] == "smoke" and summ["passed"] and set(summ["criteria"]) == {"A1", "A8"}
    assert (a / "A1.csv").exists() and (a / "A8.csv").exists()
    run(capsys, "paper-suite", "--quick", "--seed", 0, "--only", "A1,A8", "--out", b)
    for name in ("A1.csv", "A8.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_suite_fault_injection_names_a2(capsys, tmp_path):
    code, out, _ = run(capsys, "paper-suite", "--quick", "--seed", 0, "--only", "A2",
                       "--inject-fault", "corrupt-constructor", "--out", tmp_path)
    summ = json.loads((tmp_path / "summary.json").read_text())
    assert code == 1 and summ["failed"] == ["A2"] and summ["fault"] == "corrupt-constructor"
    assert "failed: A2" in out


def test_suite_unknown_criterion(capsys, tmp_path):
    assert run(capsys, "paper-suite", "--seed", 0, "--only", "A9", "--out", tmp_path)[0] == 2


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "bpb_market", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "kernel:" in r.stdout
    r = subprocess.run([sys.executable, "-m", "bpb_market", "select"], capture_output=True, text=True)
    assert r.returncode == 2

import json
import subprocess
import sys

import pytest

from qdesign import cli, sweep


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "-p", "2", "-m", "3", "-l", "1")
    assert code == 0
    assert out.splitlines() == ["size,count", "5,56", "8,8"]
    code, out, _ = run(capsys, "spectrum", "-p", "3", "-m", "3", "-l", "2")
    assert "17,702" in out.splitlines()


def test_spectrum_rejects_non_prime(capsys):
    code, _, err = run(capsys, "spectrum", "-p", "4", "-m", "2", "-l", "1")
    assert code == 2 and "not prime" in err


def test_field(capsys):
    code, data = run_json(capsys, "field", "-p", "2", "-m", "3", "--elements")
    assert code == 0 and data["schema_version"] == sweep.SCHEMA_VERSION
    assert data["field"]["modulus"] == [1, 1, 0, 1]
    assert data["field"]["elements"][3] == [1, 1, 0]


def test_verify_conjecture_range(capsys):
    code, data = run_json(capsys, "verify", "-p", "3", "-m", "3", "-l", "2", "--mode", "exact")
    assert code == 0
    d = data["design"]
    assert (d["v"], d["k"], d["lambda"], d["b"], d["is_design"]) == (27, 17, 136, 351, True)
    assert data["status"] == "finding" and "finding" in data
    assert data["field"]["modulus"] == [1, 2, 0, 1]


def test_verify_negative_control(capsys):
    code, data = run_json(capsys, "verify", "-p", "5", "-m", "2", "-l", "1", "--mode", "exact")
    assert code == 0
    assert data["design"]["is_design"] is False
    assert data["status"] == "pass"


def test_verify_sampled_and_budget(capsys, monkeypatch):
    code, data = run_json(capsys, "verify", "-p", "3", "-m", "3", "-l", "2",
                          "--mode", "sampled", "--samples", "500", "--seed", "4")
    assert code == 0 and data["design"]["seed"] == 4 and data["design"]["samples"] == 500
    monkeypatch.setattr("qdesign.designs.EXACT_BUDGET", 10)
    code, _, err = run(capsys, "verify", "-p", "3", "-m", "3", "-l", "2", "--mode", "exact")
    assert code == 2 and "budget" in err
    code, data = run_json(capsys, "verify", "-p", "3", "-m", "3", "-l", "2")
    assert code == 0 and data["design"]["mode"] == "sampled"


def test_verify_theorem_range_mismatch_exits_1(capsys):
    # even m in characteristic 2 lies in the proven range yet is not a design
    code, data = run_json(capsys, "verify", "-p", "2", "-m", "10", "-l", "1",
                          "--mode", "sampled", "--samples", "20000", "--seed", "0")
    assert data["prediction"]["range"] == "theorem1"
    assert data["design"]["is_design"] is False
    assert data["status"] == "fail" and code == 1


def test_verify_invalid(capsys):
    code, _, _ = run(capsys, "verify", "-p", "2", "-m", "3", "-l", "3")
    assert code == 2
    code, _, _ = run(capsys, "verify", "-p", "2", "-m", "3", "-l", "1", "-k", "6")
    assert code == 2


def test_bluher(capsys):
    code, data = run_json(capsys, "bluher", "-p", "2", "-m", "3", "-l", "1")
    assert code == 0 and data["predicted"] == data["brute_forced"] == 3
    code, data = run_json(capsys, "bluher", "-p", "2", "-m", "6", "-l", "2")
    assert code == 0 and data["predicted"] is None and "flag" in data


def test_groups_commands(capsys):
    code, data = run_json(capsys, "stabilizer", "-p", "2", "-m", "2", "-l", "1")
    assert code == 0 and data["mu"] == 3
    code, data = run_json(capsys, "orbit", "-p", "3", "-m", "3", "-l", "2", "--group", "qr")
    assert code == 0 and data["orbit_size"] == 351
    code, data = run_json(capsys, "homogeneity", "-p", "5", "-m", "2")
    assert code == 0 and data["homogeneous"] is False and len(data["witness"]) == 2
    code, _, _ = run(capsys, "homogeneity", "-p", "2", "-m", "3", "--group", "qr")
    assert code == 2


def test_equality(capsys):
    code, data = run_json(capsys, "equality", "-p", "3", "-m", "3", "-l", "1")
    assert code == 0 and data["A1_eq_A3"] and data["status"] == "pass"
    code, data = run_json(capsys, "equality", "-p", "2", "-m", "4", "-l", "1")
    assert code == 1 and data["status"] == "fail"


def test_curve(capsys):
    code, data = run_json(capsys, "curve", "-p", "2", "-m", "3", "-l", "1", "-a", "2", "-b", "0")
    assert code == 0 and data["N_proj"] == 9 and data["within_bounds"] is True
    code, data = run_json(capsys, "curve", "-p", "3", "-m", "3", "-l", "1", "-a", "1", "-b", "0")
    assert code == 0 and data["bound_kind"] == "none"
    code, _, err = run(capsys, "curve", "-p", "2", "-m", "3", "-l", "1", "-a", "0", "-b", "0")
    assert code == 2 and "nonzero" in err


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["spectrum", "-p", "2"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["--threads", "0", "field", "-p", "2", "-m", "2"])
    assert exc.value.code == 2


SMALL_CONFIG = """
[sweep]
name = "small"

[[entry]]
p = 2
m = [3, 5]
l = "coprime"
ops = ["bluher", "image", "bounds", "design", "stabilizer", "equality"]

[[entry]]
p = 3
m = 3
l = "all"
ops = ["bluher", "design", "homogeneity"]
mode = "sampled"
seed = 3
samples = 2000
"""


def strip_timings(text):
    data = json.loads(text)
    data.pop("timings")
    return json.dumps(data, sort_keys=True)


def test_sweep_reports_are_reproducible(tmp_path, capsys):
    cfg = tmp_path / "small.toml"
    cfg.write_text(SMALL_CONFIG)
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        code, table, _ = run(capsys, "--threads", str(i + 1), "sweep", str(cfg), "-o", str(out))
        assert code == 0
        outs.append(out.read_text())
    assert strip_timings(outs[0]) == strip_timings(outs[1])
    data = json.loads(outs[0])
    assert data["schema_version"] == 1 and data["totals"]["fail"] == 0
    assert len(data["entries"]) == 2 + 4 + 2
    assert all("modulus" in e for e in data["entries"])
    assert "pass=" in table


def test_sweep_invalid_configs(tmp_path, capsys):
    empty = tmp_path / "empty.toml"
    empty.write_text("")
    assert run(capsys, "sweep", str(empty))[0] == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("[[entry]]\np = 4\nm = 3\n")
    assert run(capsys, "sweep", str(bad))[0] == 2
    bad.write_text("[[entry]]\np = 2\nm = 3\nops = ['dance']\n")
    assert run(capsys, "sweep", str(bad))[0] == 2
    bad.write_text("not toml [")
    assert run(capsys, "sweep", str(bad))[0] == 2
    assert run(capsys, "sweep", str(tmp_path / "missing.toml"))[0] == 2


def test_sweep_fail_exits_1(tmp_path, capsys):
    cfg = tmp_path / "even.toml"
    cfg.write_text("[[entry]]\np = 2\nm = 4\nl = 1\nops = ['equality']\n")
    code, table, _ = run(capsys, "sweep", str(cfg))
    assert code == 1 and "fail=1" in table


def test_bundled_configs_parse():
    for name in sweep.BUNDLED:
        config = sweep.load_config(name)
        assert config.entries
    names = {(e.spec.p, e.spec.m) for e in sweep.load_config("conjecture2").entries}
    assert names == {(3, 3), (3, 5), (7, 3)}


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qdesign.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("qdesign ")

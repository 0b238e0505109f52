import csv
import io
import json
import subprocess
import sys

import pytest

from padic_cam import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_classify_example(capsys):
    code, out, _ = run(capsys, "classify", "--p", "7", "--t", "4", "--R1", "7", "--R2", "1",
                       "--point", "S")
    data = json.loads(out)
    assert code == 0
    assert data["class"] == "3" and data["params"] == ["-7", "-1", "0", "1", "0"]
    assert data["lemma_trace"]["method"] == "lemma" and data["oracle_trace"]["method"] == "oracle"


def test_region_example(capsys):
    code, out, _ = run(capsys, "region", "--p", "2", "--t", "1", "--R1", "1", "--R2", "1/2")
    assert code == 0 and json.loads(out)["region"] == "outer"


def test_sweep_example(capsys):
    code, out, _ = run(capsys, "sweep", "--p", "5", "--point", "S")
    assert code == 0 and json.loads(out)["count"] == 5


def test_sweep_is_byte_stable(capsys):
    _, a, _ = run(capsys, "sweep", "--p", "3", "--point", "all", "--minimum", "40")
    _, b, _ = run(capsys, "sweep", "--p", "3", "--point", "all", "--minimum", "40", "--jobs", "2")
    assert a == b


def test_sweep_csv(capsys):
    code, out, _ = run(capsys, "sweep", "--p", "7", "--point", "P", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and rows[0] == ["point", "class", "params"] and len(rows) == 4


def test_padic_literal_flag(capsys):
    # 1.2;-1 at p = 7 is 1/7 + 2 = 15/7
    code, out, _ = run(capsys, "region", "--p", "7", "--t", "3", "--R1", "1", "--R2", "1.2;-1")
    assert code == 0 and json.loads(out)["parameters"]["R2"] == "15/7"


def test_flag_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["classify", "--p", "8", "--t", "1", "--R1", "1", "--R2", "1/2", "--point", "S"])
    assert e.value.code == 2
    code, _, err = run(capsys, "region", "--p", "5", "--t", "x", "--R1", "1", "--R2", "1/5")
    assert code == 2 and "not a rational" in err
    code, _, _ = run(capsys, "rank1", "--p", "5", "--t", "3", "--R1", "5", "--R2", "1")
    assert code == 2
    code, _, _ = run(capsys, "region", "--p", "5", "--t", "3", "--R1", "5", "--R2", "1",
                     "--format", "csv")
    assert code == 2


def test_math_errors_exit_3(capsys):
    code, _, err = run(capsys, "classify", "--p", "7", "--t", "4", "--R1", "1", "--R2", "7",
                       "--point", "S")
    assert code == 3 and "ord(R2)" in err
    code, _, _ = run(capsys, "realize", "--p", "2", "--c-prime", "3")
    assert code == 3


def test_contradiction_exit_4(capsys, monkeypatch):
    from padic_cam.normal_forms import R3

    real = cli.classify_oracle

    def wrong(params, point):
        _, trace = real(params, point)
        return R3, trace

    monkeypatch.setattr(cli, "classify_oracle", wrong)
    code, out, err = run(capsys, "classify", "--p", "5", "--t", "3", "--R1", "5", "--R2", "1",
                         "--point", "S")
    assert code == 4 and "contradiction" in err
    data = json.loads(out)
    assert "lemma_trace" in data and "oracle_trace" in data


def test_rank1_and_realize(capsys):
    code, out, _ = run(capsys, "realize", "--p", "7", "--c-prime", "-7")
    data = json.loads(out)
    assert code == 0 and data["normal_form"]["c_prime"] == "-7"
    p = data["parameters"]
    code, out, _ = run(capsys, "rank1", "--p", "7", "--t", p["t"], "--R1", p["R1"], "--R2", p["R2"],
                       "--c", data["c"])
    assert code == 0 and json.loads(out)["normal_form"]["c_prime"] == "-7"
    code, out, _ = run(capsys, "rank1", "--p", "7", "--t", "0", "--R1", "7", "--R2", "1")
    fams = json.loads(out)["families"]
    assert {f["branch"] for f in fams} == {"T0_pole1", "T0_pole2"}


def test_poisson_check(capsys):
    code, out, _ = run(capsys, "poisson-check", "--p", "13", "--tuples", "3", "--points", "10")
    data = json.loads(out)
    assert code == 0 and data["max_abs_bracket"] == "0" and data["points"] == 30


def test_region_map(capsys, tmp_path):
    target = tmp_path / "map.csv"
    code, _, _ = run(capsys, "region-map", "--p", "3", "--output", str(target))
    rows = list(csv.DictReader(target.open()))
    assert code == 0 and len(rows) == 27 * 6
    assert set(rows[0]) == {"t_prefix", "ord_k", "region"}
    assert {r["region"] for r in rows} == {"outer", "inner", "limit"}
    # t = 2 (prefix 2.0.0): 2t - 1 = 3, so ord(k (2t-1)^2) = ord(k) + 2
    by_key = {(r["t_prefix"], int(r["ord_k"])): r["region"] for r in rows}
    assert by_key[("2.0.0", -2)] == "limit" and by_key[("2.0.0", -1)] == "inner"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "padic_cam", "region", "--p", "3", "--t", "2",
                          "--R1", "1", "--R2", "1/3"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["region"] == "inner"

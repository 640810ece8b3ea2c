import csv
import io
import json
import math
import subprocess
import sys

import pytest
from numpy.testing import assert_allclose

from cvsteer.cli import main
from cvsteer.werner import p_steer_type_i


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fock_values(capsys):
    code, out, err = run(capsys, "fock", "--s", "0.5", "--eta", "1", "--r", "0", "--idx", "2,2,1,1",
                         "--idx", "0,1,0,0")
    assert code == 0 and "tail_bound" in err
    r = rows(out)
    t = math.tanh(0.5)
    assert_allclose(float(r[0]["value"]), (1 - t * t) * t**3, rtol=1e-14)
    assert float(r[1]["value"]) == 0.0


def test_fock_full_box_json(tmp_path, capsys):
    out = tmp_path / "rho.json"
    code, _, _ = run(capsys, "fock", "--s", "0.3", "--eta", "0.7", "--r", "0.2", "--cutoff", "4",
                     "--format", "json", "--out", str(out))
    assert code == 0
    recs = json.loads(out.read_text())
    assert {"m1", "m2", "n1", "n2", "value"} == set(recs[0])
    meta = json.loads((tmp_path / "rho.json.meta.json").read_text())
    assert meta["cutoff"] == 4 and meta["tail_bound"] > 0


def test_steer_epr_type_i(capsys):
    code, out, _ = run(capsys, "steer", "--epr-s", "0.5", "--criterion", "type-i")
    r = rows(out)[0]
    assert code == 0 and r["steerable"] == "true"
    assert_allclose(float(r["value"]), 1 + 2 * math.tanh(1.0) ** 2, atol=1e-9)


def test_steer_gaussian_below_half(capsys):
    code, out, _ = run(capsys, "steer", "--tmst", "0.5,0.4,0", "--criterion", "gaussian")
    assert code == 0 and rows(out)[0]["steerable"] == "false"


def test_steer_werner(capsys):
    code, out, _ = run(capsys, "steer", "--werner", "0.9,1,1", "--criterion", "type-i")
    assert rows(out)[0]["steerable"] == ("true" if 0.9 > p_steer_type_i(1, 1) else "false")


def test_state_flags_exclusive(capsys):
    code, _, err = run(capsys, "steer", "--epr-s", "1", "--tmst", "1,1,0", "--criterion", "gaussian")
    assert code == 2 and "not allowed" in err


@pytest.mark.parametrize("argv", [
    ["steer", "--tmst", "1,2,0", "--criterion", "gaussian"],
    ["steer", "--tmst", "1,0.5", "--criterion", "gaussian"],
    ["steer", "--criterion", "gaussian"],
    ["fock", "--s", "0.5"],
    ["fock", "--s", "0.5", "--idx", "1,2,3"],
    ["figure", "fig9"],
    ["figure", "fig2"],
    ["threshold", "--s", "0.5", "--tol", "-1"],
    ["bogus"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_env_tolerance_validated(capsys, monkeypatch):
    monkeypatch.setenv("CVSTEER_TOL", "abc")
    assert run(capsys, "steer", "--epr-s", "0.5", "--criterion", "type-i")[0] == 2
    monkeypatch.setenv("CVSTEER_TOL", "1e-4")
    code, out, _ = run(capsys, "threshold", "--s", "0.5", "--criterion", "gaussian", "--format", "json")
    rec = json.loads(out)[0]
    assert code == 0 and abs(rec["eta_threshold"] - 0.5) < 1e-4 and rec["error_bound"] > 1e-6


def test_correlators(capsys):
    code, out, _ = run(capsys, "correlators", "--sf", "1,1,0,0", "--criterion", "type-ii")
    r = rows(out)[0]
    assert (float(r["xx"]), float(r["yy"]), float(r["zz"])) == (0.0, 0.0, 1.0)
    assert run(capsys, "correlators", "--sf", "2,2,0.5,0.5", "--criterion", "type-i")[0] == 2


def test_threshold_sweep_and_crossover(capsys, tmp_path):
    out = tmp_path / "g.csv"
    code, _, _ = run(capsys, "threshold", "--sweep", "s", "--start", "0.1", "--stop", "1", "--points", "3",
                     "--criterion", "gaussian", "--out", str(out))
    assert code == 0
    text = out.read_bytes()
    assert text.startswith(b"abscissa,threshold,converged,error_bound\n") and b"\r" not in text
    code, out_text, _ = run(capsys, "threshold", "--crossover", "--r", "0")
    assert code == 0 and 0.8 <= float(rows(out_text)[0]["s_crossover"]) <= 1.0
    code, out_text, _ = run(capsys, "threshold", "--crossover", "--r", "0.5")
    assert code == 1 and rows(out_text)[0]["status"] == "none"


def test_werner_and_hermite(capsys):
    code, out, _ = run(capsys, "werner", "--s", "1", "--u", "1", "--p", "0.9")
    r = rows(out)[0]
    assert code == 0 and float(r["p_gaussian"]) > float(r["p_type_ii"]) > float(r["p_type_i"])
    code, out, _ = run(capsys, "hermite", "--s", "0.4", "--idx", "1,1,1,1")
    t = math.tanh(0.4)
    assert_allclose(float(rows(out)[0]["fock_element"]), (1 - t * t) * t * t, rtol=1e-13)


@pytest.mark.parametrize("fig", ["fig2", "fig5", "fig6"])
def test_figure_files_deterministic(tmp_path, capsys, fig):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "figure", fig, "--out", str(a))[0] == 0
    assert run(capsys, "figure", fig, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads((tmp_path / "a.csv.meta.json").read_text())["figure"] == fig


def test_figure_contents(tmp_path, capsys):
    run(capsys, "figure", "fig2", "--out", str(tmp_path / "f2.csv"))
    f2 = rows((tmp_path / "f2.csv").read_text())
    m1 = [float(r["M_type_i"]) for r in f2]
    m2 = [float(r["M_type_ii"]) for r in f2]
    assert min(m1 + m2) >= 1.0 and max(m1) < 3.0 and m1[-1] > 2.99
    run(capsys, "figure", "fig6", "--out", str(tmp_path / "f6.csv"))
    for r in rows((tmp_path / "f6.csv").read_text()):
        assert float(r["p_gaussian"]) >= float(r["p_type_i"])
        assert float(r["p_type_ii"]) >= float(r["p_type_i"])


def test_figure3_gaussian_column(tmp_path, capsys):
    assert run(capsys, "figure", "fig3", "--out", str(tmp_path / "f3.csv"), "--tol", "1e-8")[0] == 0
    f3 = rows((tmp_path / "f3.csv").read_text())
    assert_allclose([float(r["eta_gaussian"]) for r in f3], 0.5, atol=1e-8)
    for r in f3:
        assert float(r["eta_type_ii"]) >= float(r["eta_gaussian"])


def test_verify_scopes(capsys):
    code, out, _ = run(capsys, "verify", "fock", "--cases", "5")
    assert code == 0 and out.startswith("PASS fock")
    code, out, _ = run(capsys, "verify", "hermite", "--cases", "3", "--max-degree", "6")
    assert code == 0 and "rel_closed_vs_taylor" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cvsteer", "werner", "--s", "5", "--u", "5"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert abs(float(rows(res.stdout)[0]["p_type_i"]) - 1 / math.sqrt(3)) < 1e-3

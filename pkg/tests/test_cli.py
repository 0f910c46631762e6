import json
import shutil
import subprocess

import numpy as np
import pytest

from hedonic_eq import MarketInstance
from hedonic_eq.cli import main

from conftest import SQ3

EX1 = {"n": 2, "m": 2, "alpha": 1.0, "beta": [0.0, 1.0], "gamma": [2.0, float(SQ3)]}


@pytest.fixture
def ex1_file(tmp_path):
    path = tmp_path / "duopoly.json"
    path.write_text(json.dumps(EX1))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_planner(capsys, ex1_file):
    code, out, _ = run(capsys, "planner", "--instance", ex1_file)
    assert code == 0
    doc = json.loads(out)
    assert doc["planner"]["regime"] == "differentiation"
    assert np.allclose(doc["planner"]["q"], [2.0, SQ3])
    assert MarketInstance.from_dict(doc["instance"]) == MarketInstance.from_dict(EX1)


def test_monopoly(capsys, ex1_file):
    code, out, _ = run(capsys, "monopoly", "--instance", ex1_file)
    assert code == 0
    assert json.loads(out)["monopoly"]["welfare_ratio"] == pytest.approx(0.75)


def test_equilibria(capsys, ex1_file):
    code, out, _ = run(capsys, "equilibria", "--instance", ex1_file)
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 2
    assert [e["pattern"] for e in doc["equilibria"]] == ["differentiation", "concentration"]
    assert all(e["verification"]["accepted"] for e in doc["equilibria"])


def test_inline_and_out(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "equilibria", "--inline", json.dumps(EX1), "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["count"] == 2


def test_welfare(capsys, ex1_file):
    code, out, _ = run(capsys, "welfare", "--instance", ex1_file)
    doc = json.loads(out)
    assert code == 0
    assert doc["comparisons"]["mono-diff"]["observed_sign"] == 1
    assert "skipped" in doc["comparisons"]["mono-conc"]
    assert doc["weighted_cosine"]["differentiation"] == pytest.approx(1.0)


def test_welfare_absent(capsys, ex1_file):
    code, _, err = run(capsys, "welfare", "--instance", ex1_file, "--compare", "mono-conc")
    assert code == 3 and "not found" in err


def test_welfare_diff_sigma(capsys):
    inst = dict(EX1, gamma=[4.0, 4.0])
    code, out, _ = run(capsys, "welfare", "--inline", json.dumps(inst), "--compare", "diff-sigma",
                       "--sigma", "+,-")
    assert code == 0
    assert json.loads(out)["comparisons"]["diff-sigma"]["predicted_sign"] == 1
    code, _, _ = run(capsys, "welfare", "--inline", json.dumps(inst), "--compare", "diff-sigma",
                     "--sigma", "+,x")
    assert code == 2


def test_network(capsys):
    inst = dict(EX1, network=[[0, 0.2], [0.2, 0]])
    code, out, _ = run(capsys, "network", "--inline", json.dumps(inst))
    doc = json.loads(out)["network"]
    assert code == 0 and all(a > b for a, b in zip(doc["q_monopoly"], doc["q_equilibrium"]))
    code, _, err = run(capsys, "network", "--inline", json.dumps(EX1))
    assert code == 2 and "network" in err


def test_ownership(capsys, tmp_path):
    code, out, _ = run(capsys, "ownership", "--inline", json.dumps(EX1), "--kappa", str(2 / 3))
    doc = json.loads(out)
    assert code == 0
    assert np.allclose(doc["equilibrium"]["q"], [6 / 7, 3 * SQ3 / 7])
    assert doc["first_best"]["passed"]
    csv_path = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "ownership", "--inline", json.dumps(EX1), "--grid", "0:1:11",
                     "--csv", str(csv_path))
    lines = csv_path.read_text().splitlines()
    assert code == 0 and lines[0].startswith("kappa,q1,q2") and len(lines) == 12


def test_ownership_absent(capsys):
    code, _, _ = run(capsys, "ownership", "--inline", json.dumps(dict(EX1, gamma=[0.3, 0.3])),
                     "--kappa", "0.5")
    assert code == 3


def test_spectral(capsys, tmp_path):
    code, out, _ = run(capsys, "spectral", "--psi", "1,2", "--sigma", "[[2,0],[0,2]]")
    assert code == 0 and json.loads(out)["report"]["verdict"] == "tie"
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"psi": [1.3, 1.2], "sigma": [[2, 1], [1, 2]]}))
    code, out, _ = run(capsys, "spectral", "--spectral", str(path))
    assert code == 0 and json.loads(out)["report"]["verdict"] == "oligopoly"
    code, _, err = run(capsys, "spectral", "--psi", "1,2", "--sigma", "[[2,1],[0,2]]")
    assert code == 2 and "sigma" in err


@pytest.mark.parametrize("argv", [
    ["planner", "--inline", json.dumps(dict(EX1, alpha=-1.0))],
    ["planner", "--inline", "{not json"],
    ["planner", "--inline", json.dumps(dict(EX1, beta=[1.0, 1.0]))],
    ["planner", "--instance", "/nonexistent/instance.json"],
    ["planner"],
    ["figure", "fig6", "--grid", "5:0:10"],
    ["figure", "fig6", "--grid", "0:5"],
])
def test_invalid_input(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("invalid input")


def test_invalid_names_field(capsys):
    _, _, err = run(capsys, "planner", "--inline", json.dumps(dict(EX1, gamma=[1.0, -1.0])))
    assert "(gamma)" in err


def test_figures(capsys):
    code, out, _ = run(capsys, "figure", "fig4", "--grid", "0:5:11")
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert code == 0 and rows[0][0] == "gamma" and len(rows) == 12
    # gamma = 0: no differentiation or polarization, so those cells are empty
    assert rows[1][2] == "" and rows[1][4] == ""
    assert rows[1][3] == "0.2"
    code, out, _ = run(capsys, "figure", "fig8", "--gammas", "2,3")
    assert out.splitlines()[0] == "kappa,ratio_gamma_2,ratio_gamma_3"
    code, out, _ = run(capsys, "figure", "table1", "--n", "3", "--alpha", "0.5", "--grid", "0:4:5")
    assert code == 0 and out.splitlines()[0].startswith("gamma,region,planner_regime")


def test_figure_determinism(capsys, monkeypatch):
    outs = set()
    for threads in ("1", "4", "16"):
        monkeypatch.setenv("HEDONIC_EQ_THREADS", threads)
        outs.add(run(capsys, "figure", "fig6")[1])
    assert len(outs) == 1
    body = next(iter(outs)).splitlines()
    assert len(body) == 201
    # 12 significant digits at most
    assert max(len(c.lstrip("-").replace(".", "").lstrip("0")) for c in body[5].split(",")) <= 12


def test_seed_determinism(capsys, ex1_file):
    a = run(capsys, "equilibria", "--instance", ex1_file, "--seed", "3")[1]
    b = run(capsys, "equilibria", "--instance", ex1_file, "--seed", "3")[1]
    assert a == b


@pytest.mark.skipif(shutil.which("hedonic-eq") is None, reason="console script not installed")
def test_console_script(ex1_file):
    proc = subprocess.run(["hedonic-eq", "planner", "--instance", ex1_file], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["planner"]["welfare"] == pytest.approx(4.0)

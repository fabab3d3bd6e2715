"""CLI subcommands: exit codes, report files, determinism."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from yamabe.cli import dumps17, main


def write_config(tmp_path, name="config.json", **overrides):
    cfg = {
        "graph": {"family": "path", "params": {"n": 12}},
        "problem": {"p": 4.0, "alpha": 3.0, "delta": 0.4, "h": "1 + dist^2", "g": 1},
        "solver": {"grad_tol": 1e-8, "seed": 0},
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_solve_success(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True
    assert report["positive"] is True
    assert report["n"] == 12
    assert report["eigen_factor"] == 1.0
    assert abs(report["k_value"] - 1.0) <= 1e-10
    assert report["inequalities"]["passed"] is True
    assert report["truncation"] is None
    lines = (out / "solution.csv").read_text().splitlines()
    assert lines[0] == "vertex,u,residual"
    assert len(lines) == 13
    assert "gamma=" in capsys.readouterr().out


def test_solve_bit_identical_reports(tmp_path):
    cfg = write_config(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["solve", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["solve", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    assert (out1 / "solution.csv").read_bytes() == (out2 / "solution.csv").read_bytes()


def test_solve_seed_override_recorded(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out), "--seed", "7"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["seed"] == 7
    assert report["inequalities"]["seed"] == 7


def test_solve_floats_have_17_digits(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    text = (out / "report.json").read_text()
    gamma = json.loads(text)["gamma"]
    assert format(gamma, ".17g") in text


def test_solve_hypothesis_failure_is_validation(tmp_path, capsys):
    cfg = write_config(
        tmp_path, problem={"p": 4.0, "alpha": 2.0, "delta": 0.4}
    )
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 2
    err = capsys.readouterr().err
    assert "invalid config" in err
    assert "alpha must exceed 2" in err
    assert not (out / "report.json").exists()


def test_solve_infeasible_constraint_is_numerical(tmp_path, capsys):
    cfg = write_config(
        tmp_path, problem={"p": 4.0, "alpha": 3.0, "delta": 0.4, "g": 0}
    )
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 1
    assert "infeasible constraint" in capsys.readouterr().err
    report = json.loads((out / "report.json").read_text())
    assert "infeasible constraint" in report["error"]


def test_solve_rejects_unknown_keys(tmp_path, capsys):
    out = tmp_path / "out"
    cfg = write_config(tmp_path, solver={"grad_tol": 1e-8, "momentum": 0.9})
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 2
    assert "momentum" in capsys.readouterr().err
    cfg = write_config(
        tmp_path, problem={"p": 4.0, "alpha": 3.0, "delta": 0.4, "q": 2}
    )
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 2


def test_solve_bad_config_file(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["solve", "--config", str(broken), "--out", str(tmp_path)]) == 2
    assert main(["solve", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2
    capsys.readouterr()


def test_solve_with_truncation_section(tmp_path):
    cfg = write_config(
        tmp_path,
        graph={"family": "lattice_zd_ball", "params": {"d": 1, "radius": 40}},
        problem={"p": 4.0, "alpha": 3.0, "delta": 0.4, "h": "1 + dist^4"},
        truncation={"epsilon": 0.5},
    )
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["truncation"] is not None
    assert report["truncation"]["tail_value"] <= 0.5
    # the solve ran on the truncated ball, not the 81-vertex universe
    assert report["n"] == 2 * report["truncation"]["radius"] + 1
    assert report["n"] < 81


def test_solve_unreachable_truncation_is_numerical(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        graph={"family": "lattice_zd_ball", "params": {"d": 1, "radius": 20}},
        problem={"p": 4.0, "alpha": 3.0, "delta": 0.4, "h": "1 + dist^4"},
        truncation={"epsilon": 1e-300, "r_max": 5},
    )
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 1
    assert "truncation failed" in capsys.readouterr().err


def test_sweep_success(tmp_path, capsys):
    cfg = write_config(
        tmp_path,
        graph={"family": "lattice_zd_ball", "params": {"d": 1}},
        problem={"p": 4.0, "alpha": 3.0, "delta": 0.4, "h": "1 + dist^4"},
    )
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out), "--radii", "4,8"]) == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "R,gamma,lambda,tail_bound,converged"
    assert len(lines) == 3
    assert lines[1].startswith("4,") and lines[1].endswith(",true")
    assert lines[2].startswith("8,") and lines[2].endswith(",true")
    gammas = [float(line.split(",")[1]) for line in lines[1:]]
    assert gammas[1] <= gammas[0] + 1e-9
    assert "R=4" in capsys.readouterr().out


def test_sweep_empty_radii(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "radii" in capsys.readouterr().err


def test_sweep_unsorted_radii(tmp_path, capsys):
    cfg = write_config(
        tmp_path, graph={"family": "lattice_zd_ball", "params": {"d": 1}}
    )
    rc = main(["sweep", "--config", cfg, "--out", str(tmp_path), "--radii", "8,4"])
    assert rc == 2
    capsys.readouterr()


def test_verify_success(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out), "--trials", "300"]) == 0
    data = json.loads((out / "verify.json").read_text())
    assert data["hypotheses"]["passed"] is True
    assert data["inequalities"]["trials"] == 300
    stdout = capsys.readouterr().out
    for name in ("elementary", "gj_pointwise", "holder_embedding", "bd_sup_bound"):
        assert f"{name}: pass" in stdout


def test_verify_deterministic(tmp_path):
    cfg = write_config(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["verify", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "verify.json").read_bytes() == (out2 / "verify.json").read_bytes()


def test_explicit_graph_config(tmp_path):
    cfg = write_config(
        tmp_path,
        graph={
            "explicit": {
                "n": 3,
                "edges": [[0, 1, 1.0], [1, 2, 2.0]],
                "mu": [1.0, 1.0, 1.0],
            },
            "x0": 1,
        },
    )
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["n"] == 3


def test_dumps17_serializer():
    text = dumps17({"a": True, "b": 2, "c": 0.1, "d": None, "e": [1.5], "f": "x"})
    parsed = json.loads(text)
    assert parsed == {"a": True, "b": 2, "c": 0.1, "d": None, "e": [1.5], "f": "x"}
    assert "0.10000000000000001" in text
    assert dumps17(np.float64(0.1)) == "0.10000000000000001"
    assert dumps17(np.array([1.0, 2.0])) == dumps17([1.0, 2.0])
    with pytest.raises(TypeError):
        dumps17(object())


@pytest.mark.skipif(shutil.which("yamabe") is None, reason="console script not on PATH")
def test_console_script_smoke(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    proc = subprocess.run(
        ["yamabe", "solve", "--config", cfg, "--out", str(out)],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    assert "gamma=" in proc.stdout
    assert (out / "report.json").exists()

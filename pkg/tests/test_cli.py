import csv
import json
import subprocess
import sys

import pytest

from cayley_ac import cli

SWEEP = [
    "sweep",
    "--energies=-1,0,1",
    "--etas", "1e-2,1e-3,1e-4",
    "--couplings", "0,0.1",
    "--pool-size", "500",
    "--iterations", "30",
    "--samples", "500",
]


def _data_rows(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


def test_verify_defaults_write_to_env_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path))
    assert cli.main(["verify"]) == 0
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["seed"] == 0 and doc["config"]["command"] == "verify"
    assert all(r["passed"] for r in doc["rows"])


def test_oracle_example(tmp_path):
    out = tmp_path / "o.csv"
    assert cli.main(["oracle", "--M", "2", "--depth", "6", "--trials", "100", "--seed", "7", "--output", str(out)]) == 0
    rows = _data_rows(out)
    assert len(rows) == 100
    assert max(float(r["rel_error"]) for r in rows) <= 1e-10
    head = out.read_text().splitlines()[:2]
    assert head[0].startswith("# config: ") and json.loads(head[0][len("# config: "):])["seed"] == 7
    assert head[1] == "# seed: 7"


def test_sweep_shape(tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main(SWEEP + ["--output", str(out)]) == 0
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert len(body) == 19
    assert all(float(r["mean"]) == 0.0 for r in _data_rows(out) if float(r["k"]) == 0.0)


@pytest.mark.parametrize(
    "args",
    [
        SWEEP,
        ["dos", "--k", "0.2", "--eta", "1e-3", "--energies=-1,0,2", "--pool-size", "300", "--iterations", "20", "--samples", "300", "--replicas", "3"],
        ["certify", "--samples", "30000"],
        ["certify", "--bound", "growth", "--samples", "30000"],
    ],
)
def test_artifacts_independent_of_workers(tmp_path, args):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(args + ["--workers", "1", "--output", str(a)]) == 0
    assert cli.main(args + ["--workers", "3", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_flag_precedence(tmp_path):
    conf = tmp_path / "run.cfg"
    conf.write_text("# oracle settings\nM = 3\ndepth = 3\ntrials = 4\nseed = 5\n")
    cfg = cli.parse_args(["oracle", "--config", str(conf), "--seed", "6"])
    assert (cfg.M, cfg.depth, cfg.trials, cfg.seed) == (3, 3, 4, 6)


@pytest.mark.parametrize(
    "text,needle",
    [("M = 3\nbogus = 1\n", ":2: unknown key"), ("depth = deep\n", ":1: depth"), ("just words\n", ":1: expected")],
)
def test_config_file_diagnostics(tmp_path, capsys, text, needle):
    conf = tmp_path / "bad.cfg"
    conf.write_text(text)
    assert cli.main(["verify", "--config", str(conf)]) == 1
    assert needle in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["oracle", "--M", "1"],
        ["oracle", "--eta", "0"],
        ["sweep", "--etas", "0.1,0"],
        ["certify", "--E", "3"],
        ["mu-scan", "--p", "1.5"],
        ["dos", "--format", "xml"],
        ["sweep", "--couplings", "a,b"],
    ],
)
def test_invalid_configs_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    assert "invalid configuration" in capsys.readouterr().err


def test_unwritable_output_exits_one(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["oracle", "--trials", "2", "--depth", "2", "--output", str(blocker / "o.csv")]) == 1
    assert str(blocker) in capsys.readouterr().err


def test_gated_failure_exits_two(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "ORACLE_TOL", -1.0)
    assert cli.main(["oracle", "--trials", "2", "--depth", "2", "--output", str(tmp_path / "o.csv")]) == 2


def test_mu_scan_and_svg(tmp_path):
    assert cli.main(["mu-scan", "--samples", "5000", "--output", str(tmp_path / "m.json")]) == 0
    doc = json.loads((tmp_path / "m.json").read_text())
    assert doc["label"] == "sampled bound" and doc["config"]["samples"] == 5000
    svg = tmp_path / "d.svg"
    assert cli.main(["dos", "--k", "0", "--output", str(tmp_path / "d.csv"), "--svg", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")


def test_console_entry_point_usage_error():
    proc = subprocess.run([sys.executable, "-m", "cayley_ac.cli", "sweep", "--nope"], capture_output=True, text=True)
    assert proc.returncode == 1

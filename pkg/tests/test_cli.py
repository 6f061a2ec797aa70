import csv
import os

import numpy as np
import pytest

from lmphnn.bench import ExperimentConfig, parse_k_range, parse_seeds
from lmphnn.cli import build_parser, config_from_args, main
from lmphnn.evaluation import read_runs_csv


@pytest.fixture
def blobs(tmp_path):
    """Two tight, far-apart 2-D clusters."""
    rng = np.random.default_rng(0)
    path = tmp_path / "blobs.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["u", "v", "label"])
        for label, centre in (("left", -50.0), ("right", 50.0)):
            for p in rng.normal(centre, 1.0, size=(20, 2)):
                w.writerow([*p, label])
    return str(path)


def _run(*argv):
    return main([str(a) for a in argv])


def test_inspect_wine(wine_path, capsys):
    assert _run("inspect", wine_path) == 0
    out = capsys.readouterr().out
    assert "N=178 d=13 classes=3" in out
    assert "dropped rows: 0" in out


def test_inspect_reports_dropped_rows(tmp_path, capsys):
    path = tmp_path / "holes.csv"
    path.write_text("a,b,y\n1,2,A\n,3,A\n4,?,B\n5,6,B\n7,8,A\n")
    assert _run("inspect", path) == 0
    assert "dropped rows: 2" in capsys.readouterr().out


def test_inspect_empty_file(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("")
    assert _run("inspect", path) == 2
    assert "zero usable rows" in capsys.readouterr().err


def test_bench_writes_artifacts(blobs, tmp_path):
    out = tmp_path / "out"
    assert _run("bench", "--data", blobs, "--out", out, "--seeds", 2, "--k", "3..3", "--format", "csv,md,jsonl") == 0
    names = {"runs.csv", "runs.jsonl", "summary.csv", "summary.md"}
    assert names <= set(os.listdir(out))
    assert len(os.listdir(out / "curves")) == 8
    rows = read_runs_csv(out / "runs.csv")
    assert len(rows) == 2 * 8
    assert all(r["accuracy"] == 1.0 for r in rows)
    assert not [f for f in os.listdir(out) if f.startswith(".tmp")]


def test_k1_collapse_through_cli(wine_path, tmp_path):
    _run("bench", "--data", wine_path, "--out", tmp_path / "a", "--seeds", 2, "--k", "1..1", "--kinds", "LMPHNN")
    _run("bench", "--data", wine_path, "--out", tmp_path / "b", "--seeds", 2, "--k", "1..1", "--kinds", "KNN")
    a, b = read_runs_csv(tmp_path / "a" / "runs.csv"), read_runs_csv(tmp_path / "b" / "runs.csv")
    strip = lambda rows: [{k: v for k, v in r.items() if k not in ("kind", "runtime_ms")} for r in rows]
    assert strip(a) == strip(b)


def test_summary_cells_recompute_from_runs(wine_path, tmp_path):
    out = tmp_path / "o"
    assert _run("bench", "--data", wine_path, "--out", out, "--seeds", 2, "--k", "2..4", "--kinds", "LMPHNN,PNN") == 0
    rows = read_runs_csv(out / "runs.csv")
    with open(out / "summary.csv") as fh:
        summary = list(csv.DictReader(fh))
    md = (out / "summary.md").read_text()
    for line in summary:
        for kind in ("LMPHNN", "PNN"):
            vals = [r[line["metric"]] for r in rows if r["kind"] == kind]
            assert float(line[kind]) == pytest.approx(np.mean(vals), abs=1e-12)
            assert f"{np.mean(vals):.4f}" in md
    with open(out / "curves" / "LMPHNN.csv") as fh:
        for pt in csv.DictReader(fh):
            vals = [r[pt["metric"]] for r in rows if r["kind"] == "LMPHNN" and r["k"] == int(pt["k"])]
            assert float(pt["mean"]) == pytest.approx(np.mean(vals), abs=1e-12)


def test_sensitivity_constant_curve(blobs, tmp_path):
    out = tmp_path / "s"
    assert _run("sensitivity", "--data", blobs, "--out", out, "--seeds", 2, "--k", "2..6") == 0
    with open(out / "sensitivity.csv") as fh:
        table = list(csv.DictReader(fh))
    assert len(table) == 8 * 4
    assert all(float(r["sigma"]) == 0.0 for r in table)
    assert (out / "sensitivity.md").exists()


def test_sensitivity_needs_two_k_values(blobs, tmp_path):
    assert _run("sensitivity", "--data", blobs, "--out", tmp_path, "--k", "3..3") == 1


def test_usage_and_data_errors(blobs, tmp_path, capsys):
    assert _run("bench", "--data", blobs, "--k", "0..3", "--out", tmp_path) == 1
    assert _run("bench", "--data", blobs, "--kinds", "SVM", "--out", tmp_path) == 1
    assert _run("bench", "--data", blobs, "--ratio", "1.5", "--out", tmp_path) == 1
    assert _run("bench", "--out", tmp_path) == 1
    assert _run("bench", "--data", tmp_path / "missing.csv", "--out", tmp_path / "x") == 2
    assert not (tmp_path / "x").exists()
    with pytest.raises(SystemExit) as exc:
        _run("bench", "--no-such-flag")
    assert exc.value.code == 1


def test_config_file_and_flag_precedence(blobs, tmp_path, monkeypatch):
    cfg = tmp_path / "exp.ini"
    cfg.write_text(
        f"[experiment]\ndata = {blobs}\nk = 2..5\nkinds = LMPHNN, LMKNN\nseeds = 3\nnormalize = zscore\n"
    )
    args = build_parser().parse_args(["bench", "--config", str(cfg), "--k", "4..6"])
    config = config_from_args(args)
    assert config.k_range == (4, 5, 6)
    assert [k.value for k in config.kinds] == ["LMPHNN", "LMKNN"]
    assert config.seeds == (0, 1, 2)
    assert config.normalize == "zscore"

    monkeypatch.setenv("LMPHNN_SEED_BASE", "100")
    config = config_from_args(build_parser().parse_args(["bench", "--config", str(cfg)]))
    assert config.seeds == (100, 101, 102)
    config = config_from_args(build_parser().parse_args(["bench", "--config", str(cfg), "--seed-base", "7"]))
    assert config.seeds == (7, 8, 9)


def test_default_config_mirrors_protocol():
    config = ExperimentConfig(data=("x.csv",)).validate()
    assert config.ratio == 0.5
    assert config.k_range == tuple(range(2, 11))
    assert len(config.seeds) == 9
    assert len(config.kinds) == 8


def test_parsers():
    assert parse_k_range("2..10") == tuple(range(2, 11))
    assert parse_k_range("3") == (3,)
    assert parse_seeds("3", base=5) == (5, 6, 7)
    assert parse_seeds("4,9") == (4, 9)

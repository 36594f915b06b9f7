import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from persheat.cli import main, read_features
from persheat.complex import read_filtration
from persheat.datagen import annulus_spec, generate, read_points
from persheat.heatmap import PersistenceF, heatmap
from persheat.pipeline import filtration
from persheat.persistence import persistence_diagram


def run_pipeline(workdir: Path, workers: int):
    """Every subcommand once, with relative paths so that reruns in another
    directory should produce identical bytes."""
    w = ["--workers", str(workers)]
    steps = [
        ["gen", "--kind", "double_annulus", "--class", "B", "--n", "60", "--noise", "0.1", "-o", "pts.csv", "--seed", "3"],
        ["filtration", "alpha", "-i", "pts.csv", "-o", "filt.txt", "--seed", "3"],
        ["filtration", "rips", "-i", "pts.csv", "-o", "rips.txt", "--threshold", "0.3", "--max-dim", "1", "--seed", "3"],
        ["persistence", "-i", "filt.txt", "-o", "dg.json", "--seed", "3"],
        ["features", "landscape", "-i", "dg.json", "-o", "one.csv", "--seed", "3", "--n-t", "20", "--levels", "3"],
        ["features", "landscape", "--gen-kind", "annulus", "--class", "A", "--n", "40", "--noise", "0.1",
         "--n-clouds", "6", "-o", "fa.csv", "--featurizer", "one.manifest.json", "--seed", "1"] + w,
        ["features", "landscape", "--gen-kind", "double_annulus", "--class", "B", "--n", "40", "--noise", "0.1",
         "--n-clouds", "6", "-o", "fb.csv", "--featurizer", "one.manifest.json", "--seed", "2"] + w,
        ["features", "death-vector", "-i", "dg.json", "-o", "dv.csv", "--length", "10", "--seed", "3"],
        ["train", "svm", "--features", "fa.csv", "fb.csv", "--labels", "la.txt", "lb.txt", "-o", "svm.json",
         "--epochs", "20", "--seed", "3"],
        ["train", "svr", "--features", "fa.csv", "fb.csv", "--labels", "ya.txt", "yb.txt", "-o", "svr.json",
         "--epochs", "20", "--seed", "3"],
        ["heatmap", "-i", "dg.json", "-o", "hm.json", "--seed", "3"],
        ["heatmap", "-i", "dg.json", "-o", "hm_model.json", "--F", "model", "--model", "svm.json", "--seed", "3"],
        ["expected-heatmap", "-i", "filt.txt", "-o", "ehm.json", "--kernel", "gaussian", "--alpha", "0.01",
         "--n-samples", "6", "--seed", "3"] + w,
        ["experiment-ephm", "--kind", "double_annulus", "--class", "B", "--n", "40", "--noise", "0.1",
         "--n-clouds", "5", "--grid", "-2", "3", "8", "-o", "ephm.ppm", "--seed", "3"] + w,
        ["raster", "-i", "hm.json", "--complex", "filt.txt", "--points", "pts.csv", "-o", "hm.pgm",
         "--style", "grayscale", "--seed", "3"],
        ["stability-probe", "-i", "filt.txt", "-o", "probe.json", "--free", "0,1", "--outputs", "0,1",
         "--degree", "0", "--F", "constant", "--selector", "birth_simplex", "--pairs", "20", "--nodes", "11",
         "--seed", "3"],
    ]
    (workdir / "la.txt").write_text("-1\n" * 6)
    (workdir / "lb.txt").write_text("1\n" * 6)
    (workdir / "ya.txt").write_text("0.5 1.5 2.5\n1 2 3\n")
    (workdir / "yb.txt").write_text("4,5,6,7,8,9\n")
    for argv in steps:
        assert main(argv) == 0, argv


@pytest.fixture(scope="module")
def two_runs(tmp_path_factory):
    import os
    out = []
    old = os.getcwd()
    try:
        for workers in (1, 2):
            d = tmp_path_factory.mktemp(f"run{workers}")
            os.chdir(d)
            run_pipeline(d, workers)
            out.append(d)
    finally:
        os.chdir(old)
    return out


def test_every_output_is_byte_identical_across_worker_counts(two_runs):
    a, b = two_runs
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert sum(n.endswith(".manifest.json") for n in names) >= 14
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes(), n


def test_rerun_is_byte_identical(two_runs, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run_pipeline(tmp_path, 1)
    for p in two_runs[0].iterdir():
        assert (tmp_path / p.name).read_bytes() == p.read_bytes(), p.name


def test_manifests_have_seed_and_no_clock(two_runs):
    for p in two_runs[0].glob("*.manifest.json"):
        m = json.loads(p.read_text())
        assert "seed" in m and "params" in m and "versions" in m
        assert "workers" not in m["params"]
        text = p.read_text().lower()
        assert "time" not in text and "date" not in text


def test_cli_matches_library(two_runs):
    d = two_runs[0]
    pts = read_points(d / "pts.csv")
    assert pts.tobytes() == generate(annulus_spec("B", 60, 0.1), np.random.default_rng(3)).tobytes()
    K, w, _ = filtration(pts, "alpha", 2, float("inf"))
    K2, w2 = read_filtration(d / "filt.txt")
    assert w2.tobytes() == w.tobytes()
    dg = persistence_diagram(K, w)
    assert (d / "dg.json").read_text() == dg.to_json() + "\n"
    hm = json.loads((d / "hm.json").read_text())["weights"]
    assert np.array(hm).tobytes() == heatmap(dg, 1, PersistenceF(), "rep_cycle").w.tobytes()
    X, names, fz = read_features(d / "fa.csv")
    assert X.shape == (6, 20 * 3) and fz["kind"] == "landscape"
    man = json.loads((d / "ephm.manifest.json").read_text())
    assert man["raster_sum"] == pytest.approx(man["mass"], abs=1e-9)
    probe = json.loads((d / "probe.json").read_text())
    assert probe["ok"] and probe["n_pairs"] == 20


@pytest.mark.parametrize("argv", [
    ["gen", "--kind", "annulus", "-o", "x.csv", "--bogus"],
    ["persistence", "-i", "a", "-o", "b", "--seeds", "1"],
    ["--nope"],
])
def test_unknown_flag_exits_2(argv, tmp_path):
    proc = subprocess.run([sys.executable, "-m", "persheat.cli", *argv], cwd=tmp_path, capture_output=True)
    assert proc.returncode == 2
    assert not list(tmp_path.iterdir())


def test_abbreviated_flag_is_rejected(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "persheat.cli", "gen", "--kind", "annulus", "--nois", "0.1",
                           "-o", "x.csv"], cwd=tmp_path, capture_output=True)
    assert proc.returncode == 2

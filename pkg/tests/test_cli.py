"""End-to-end command-line tests: pipeline smoke, exit codes, config
precedence, golden decomposition, and byte-identical reruns."""

import json
import os
import shutil

import numpy as np
import pytest

from fomcspill.cli import run
from fomcspill.manifest import equal_ignoring_time, read_manifest, verify_manifest
from fomcspill.pbvar import read_irf_csv

DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="module")
def simdir(tmp_path_factory):
    """One small simulated dataset shared by the pipeline tests."""
    path = tmp_path_factory.mktemp("pipeline") / "sim"
    code = run(
        ["simulate", "--out", str(path), "--months", "96", "--countries", "3",
         "--seed", "7"]
    )
    assert code == 0
    code = run(
        ["decompose", "--surprises", str(path / "surprises.csv"),
         "--out", str(path / "shocks.csv")]
    )
    assert code == 0
    return path


def test_simulate_writes_artifacts_and_valid_manifest(simdir):
    expected = [
        "panel.csv", "surprises.csv", "true_shocks.csv", "spec.toml",
        "panel_config.toml", "manifest.json",
    ]
    for name in expected:
        assert (simdir / name).exists(), name
    assert verify_manifest(simdir / "manifest.json") == []
    manifest = read_manifest(simdir / "manifest.json")
    assert manifest["command"] == "simulate"
    assert manifest["seed"] == 7


def test_decompose_matches_golden_file(tmp_path):
    out = tmp_path / "shocks.csv"
    code = run(
        ["decompose", "--surprises", os.path.join(DATA, "demo_surprises.csv"),
         "--out", str(out), "--w", "0.5"]
    )
    assert code == 0
    golden = open(os.path.join(DATA, "demo_shocks_w05.csv"), "rb").read()
    assert out.read_bytes() == golden


def test_decompose_poor_mans_and_angle_flags(tmp_path):
    surprises = os.path.join(DATA, "demo_surprises.csv")
    pm = tmp_path / "pm.csv"
    assert run(["decompose", "--surprises", surprises, "--out", str(pm),
                "--method", "poor-mans"]) == 0
    rows = np.loadtxt(pm, delimiter=",", skiprows=1, usecols=(1, 2, 3))
    total, mp, ident = rows[:, 0], rows[:, 1], rows[:, 2]
    assert np.all(mp * ident == 0.0)
    np.testing.assert_allclose(mp + ident, total, rtol=1e-10)

    forced = tmp_path / "angle.csv"
    assert run(["decompose", "--surprises", surprises, "--out", str(forced),
                "--alpha", "0.30"]) == 0
    rows = np.loadtxt(forced, delimiter=",", skiprows=1, usecols=(1, 2, 3))
    share = np.sum(rows[:, 1] ** 2) / np.sum(rows[:, 0] ** 2)
    assert abs(share - np.cos(0.30) ** 2) < 1e-6

    ratio = tmp_path / "ratio.csv"
    assert run(["decompose", "--surprises", surprises, "--out", str(ratio),
                "--var-ratio", str(np.cos(0.30) ** 2)]) == 0
    assert ratio.read_bytes() == forced.read_bytes()

    assert run(["decompose", "--surprises", surprises, "--out", str(pm),
                "--alpha", "0.3", "--var-ratio", "0.8"]) == 1


def test_full_pipeline_smoke(simdir, tmp_path):
    post = tmp_path / "posterior.npz"
    assert run(
        ["estimate", "--panel", str(simdir / "panel.csv"),
         "--shocks", str(simdir / "shocks.csv"), "--out", str(post),
         "--draws", "120", "--burn", "20", "--lags", "1", "--seed", "3"]
    ) == 0
    assert verify_manifest(str(post) + ".manifest.json") == []

    irf_csv = tmp_path / "irf.csv"
    assert run(["irf", "--posterior", str(post), "--out", str(irf_csv),
                "--horizon", "8"]) == 0
    result = read_irf_csv(irf_csv)
    assert result.values.shape == (2, 7, 9, 5)
    assert json.load(open(str(irf_csv) + ".summary.json"))["n_draws"] == 100

    lp_csv = tmp_path / "lp.csv"
    assert run(
        ["localproj", "--panel", str(simdir / "panel.csv"),
         "--shocks", str(simdir / "shocks.csv"), "--out", str(lp_csv),
         "--horizons", "3", "--spec", "pooled", "--outcomes", "ner,ip"]
    ) == 0
    header = open(lp_csv).readline().strip()
    assert header == "spec,outcome,shock,horizon,beta,se,lo_1,hi_1,lo_1.65,hi_1.65"

    mg_csv = tmp_path / "mg.csv"
    assert run(
        ["meangroup", "--panel", str(simdir / "panel.csv"),
         "--shocks", str(simdir / "shocks.csv"), "--out", str(mg_csv),
         "--horizon", "6"]
    ) == 0
    assert read_irf_csv(mg_csv).values.shape == (2, 7, 7, 5)

    rot_csv = tmp_path / "rot.csv"
    assert run(
        ["rotations", "--panel", str(simdir / "panel.csv"),
         "--surprises", str(simdir / "surprises.csv"), "--out", str(rot_csv),
         "--grid", "3", "--draws", "40", "--burn", "5", "--lags", "1",
         "--horizon", "4", "--subsample", "60",
         "--medians-out", str(tmp_path / "medians.npz")]
    ) == 0
    summary = json.load(open(str(rot_csv) + ".summary.json"))
    assert summary["n_grid"] == 3 and summary["n_pooled"] == 60
    medians = np.load(tmp_path / "medians.npz")
    assert medians["medians"].shape == (3, 2, 7, 5)

    figdir = tmp_path / "figs"
    assert run(
        ["report", "--shocks", str(simdir / "shocks.csv"), "--irf", str(irf_csv),
         "--lp", str(lp_csv), "--out-dir", str(figdir)]
    ) == 0
    for name in ("shocks.png", "irf.png", "localproj.png"):
        assert (figdir / name).stat().st_size > 1000


def test_estimate_rerun_is_byte_identical(simdir, tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"post_{tag}.npz"
        assert run(
            ["estimate", "--panel", str(simdir / "panel.csv"),
             "--shocks", str(simdir / "shocks.csv"), "--out", str(out),
             "--draws", "80", "--burn", "10", "--lags", "1", "--seed", "11"]
        ) == 0
        outs.append(out)
    assert outs[0].read_bytes() == outs[1].read_bytes()
    man_a = read_manifest(str(outs[0]) + ".manifest.json")
    man_b = read_manifest(str(outs[1]) + ".manifest.json")
    # identical inputs and identical resolved config; output paths differ,
    # but the recorded output digests must match cell for cell
    assert man_a["config"] == man_b["config"]
    assert man_a["inputs"] == man_b["inputs"]
    assert sorted(man_a["outputs"].values()) == sorted(man_b["outputs"].values())
    assert equal_ignoring_time(
        {k: v for k, v in man_a.items() if k != "outputs"},
        {k: v for k, v in man_b.items() if k != "outputs"},
    )


def test_exit_codes_for_bad_input_and_numerics(simdir, tmp_path, capsys):
    code = run(
        ["estimate", "--panel", str(simdir / "panel.csv"),
         "--shocks", str(simdir / "shocks.csv"),
         "--out", str(tmp_path / "p.npz"), "--lags", "0"]
    )
    assert code == 1
    assert "--lags" in capsys.readouterr().err

    assert run(["decompose", "--surprises", str(tmp_path / "absent.csv"),
                "--out", str(tmp_path / "x.csv")]) == 1

    # mean-zero contract column so the demeaned composite is exactly
    # proportional to the equity column
    collinear = tmp_path / "collinear.csv"
    with open(collinear, "w") as fh:
        fh.write("date,contract_1,sp500\n")
        for m, v in (("01", 0.2), ("02", -0.1), ("03", 0.2), ("04", -0.3)):
            fh.write(f"2010-{m}-15,{v},{2 * v}\n")
    code = run(["decompose", "--surprises", str(collinear),
                "--out", str(tmp_path / "y.csv")])
    assert code == 2
    assert "numerical error" in capsys.readouterr().err


def test_unknown_flag_exits_one():
    with pytest.raises(SystemExit) as exc:
        run(["decompose", "--nope", "x"])
    assert exc.value.code == 1


def test_no_command_exits_one():
    assert run([]) == 1


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["estimate", "--help"])
    assert exc.value.code == 0
    text = " ".join(capsys.readouterr().out.split())
    for token in ("default 6", "default 5000", "default 500", "default 0.1",
                  "default i_mp,i_id", "default 100"):
        assert token in text, token
    with pytest.raises(SystemExit):
        run(["--help"])
    top = capsys.readouterr().out
    for sub in ("decompose", "estimate", "irf", "localproj", "meangroup",
                "rotations", "simulate", "report"):
        assert sub in top


def test_config_file_precedence(simdir, tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("lags = 1\ndraws = 60\nburn = 10\nseed = 5\n")
    out = tmp_path / "cfg.npz"
    assert run(
        ["estimate", "--panel", str(simdir / "panel.csv"),
         "--shocks", str(simdir / "shocks.csv"), "--out", str(out),
         "--config", str(cfg), "--draws", "70"]
    ) == 0
    manifest = read_manifest(str(out) + ".manifest.json")
    assert manifest["config"]["draws"] == 70  # CLI beats config file
    assert manifest["config"]["lags"] == 1  # config file beats default
    assert manifest["config"]["burn"] == 10
    assert manifest["seed"] == 5

    bad = tmp_path / "bad.toml"
    bad.write_text("lagz = 3\n")
    assert run(
        ["estimate", "--panel", str(simdir / "panel.csv"),
         "--shocks", str(simdir / "shocks.csv"), "--out", str(out),
         "--config", str(bad)]
    ) == 1


def test_panel_config_discovery_and_missing(simdir, tmp_path):
    # discovery: panel_config.toml sits next to panel.csv inside simdir
    out = tmp_path / "d.npz"
    assert run(
        ["estimate", "--panel", str(simdir / "panel.csv"),
         "--shocks", str(simdir / "shocks.csv"), "--out", str(out),
         "--draws", "40", "--burn", "5", "--lags", "1"]
    ) == 0
    # without a sibling config the command must fail with guidance
    lone = tmp_path / "lone"
    lone.mkdir()
    shutil.copy(simdir / "panel.csv", lone / "panel.csv")
    shutil.copy(simdir / "shocks.csv", lone / "shocks.csv")
    assert run(
        ["estimate", "--panel", str(lone / "panel.csv"),
         "--shocks", str(lone / "shocks.csv"), "--out", str(out),
         "--draws", "40", "--burn", "5", "--lags", "1"]
    ) == 1


def test_simulate_rerun_reproduces_bytes(tmp_path):
    dirs = []
    for tag in ("r1", "r2"):
        path = tmp_path / tag
        assert run(["simulate", "--out", str(path), "--months", "72",
                    "--countries", "2", "--seed", "33"]) == 0
        dirs.append(path)
    for name in ("panel.csv", "surprises.csv", "true_shocks.csv", "spec.toml"):
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes(), name

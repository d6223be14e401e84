import csv
import json

import numpy as np
import pytest
from click.testing import CliRunner

from markfield import McmcConfig, PointPattern, build_graph, run_chain
from markfield.cli import main
from markfield.io import manifest_path, read_samples, write_manifest, write_samples


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def sim_csv(tmp_path, runner):
    out = tmp_path / "sim.csv"
    res = runner.invoke(main, [
        "simulate", "--process", "poisson", "--eta", "300",
        "--scenario", "low-repulsion", "--lam", "30", "--c", "0.08",
        "--sweeps", "50", "--seed", "3", "--out", str(out), "--no-plot",
    ])
    assert res.exit_code == 0, res.output
    return out


def test_simulate_writes_pattern_and_sidecar(sim_csv):
    assert sim_csv.exists()
    assert sim_csv.with_suffix(".json").exists()
    with sim_csv.open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y", "mark"]
    assert len(rows) > 100


def test_simulate_plot_flag(tmp_path, runner):
    out = tmp_path / "sim.csv"
    res = runner.invoke(main, [
        "simulate", "--eta", "200", "--sweeps", "5", "--seed", "1",
        "--out", str(out),
    ])
    assert res.exit_code == 0, res.output
    assert out.with_suffix(".png").exists()


def test_mcf_command(tmp_path, runner, sim_csv):
    out = tmp_path / "mcf.csv"
    res = runner.invoke(main, [
        "mcf", "--data", str(sim_csv), "--dmax", "0.2", "--bins", "10",
        "--out", str(out), "--suggest-c",
    ])
    assert res.exit_code == 0, res.output
    assert "suggested cutoff" in res.output
    assert out.with_suffix(".png").exists()
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert {r["q"] for r in rows} == {"1", "2"}
    assert len(rows) == 10 * 3
    # per-bin values over unordered pairs sum to one where pairs exist
    by_bin = {}
    for r in rows:
        if r["value"]:
            by_bin.setdefault(r["bin_mid"], 0.0)
            by_bin[r["bin_mid"]] += float(r["value"])
    for total in by_bin.values():
        assert total == pytest.approx(1.0, abs=1e-8)


def test_fit_transform_mif_pipeline(tmp_path, runner, sim_csv):
    samples_csv = tmp_path / "samples.csv"
    res = runner.invoke(main, [
        "fit", "--data", str(sim_csv), "--c", "0.08",
        "--iterations", "300", "--chains", "2", "--seed", "5",
        "--out", str(samples_csv), "--no-plot",
    ])
    assert res.exit_code == 0, res.output
    assert samples_csv.exists()
    manifest = json.loads(manifest_path(samples_csv).read_text())
    assert manifest["iterations"] == 300
    assert manifest["n_chains"] == 2
    assert "acceptance_rates" in manifest
    assert "wall_time_s" in manifest
    assert "full parameter sweep" in manifest["iteration_unit"]

    summary_json = tmp_path / "summary.json"
    res = runner.invoke(main, [
        "transform", "--samples", str(samples_csv), "--out", str(summary_json),
    ])
    assert res.exit_code == 0, res.output
    doc = json.loads(summary_json.read_text())
    assert sum(doc["pi"]) == pytest.approx(1.0, abs=1e-9)
    phi = np.array(doc["phi"])
    np.testing.assert_allclose(phi.sum(axis=0), [1.0, 1.0], atol=1e-9)
    assert summary_json.with_suffix(".phi.png").exists()

    curves_csv = tmp_path / "curves.csv"
    res = runner.invoke(main, [
        "mif", "--samples", str(samples_csv), "--dmax", "0.2", "--points", "50",
        "--out", str(curves_csv),
    ])
    assert res.exit_code == 0, res.output
    with curves_csv.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 50 * 4
    assert curves_csv.with_suffix(".png").exists()


def test_fit_trace_figure(tmp_path, runner, sim_csv):
    samples_csv = tmp_path / "s.csv"
    res = runner.invoke(main, [
        "fit", "--data", str(sim_csv), "--c", "0.08", "--iterations", "100",
        "--seed", "5", "--out", str(samples_csv),
    ])
    assert res.exit_code == 0, res.output
    assert samples_csv.with_suffix(".trace.png").exists()


def test_fit_accepts_raw_csv_without_sidecar(tmp_path, runner, rng):
    raw = tmp_path / "raw.csv"
    with raw.open("w") as fh:
        fh.write("x,y,mark\n")
        for k in range(150):
            x, y = rng.random(2) * 500.0
            fh.write(f"{x},{y},{'on' if k % 3 else 'off'}\n")
    out = tmp_path / "s.csv"
    res = runner.invoke(main, [
        "fit", "--data", str(raw), "--c", "0.15", "--iterations", "100",
        "--seed", "1", "--out", str(out), "--no-plot",
    ])
    assert res.exit_code == 0, res.output


def test_samples_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    pts = rng.random((40, 2))
    marks = rng.integers(1, 3, 40)
    marks[:2] = [1, 2]
    pat = PointPattern(xs=pts[:, 0], ys=pts[:, 1], marks=marks, Q=2)
    g = build_graph(pat, 0.3)
    samples = run_chain(pat, g, config=McmcConfig(iterations=40, n_chains=3, seed=2))
    path = tmp_path / "samples.csv"
    write_samples(samples, path)
    back = read_samples(path, burn_in_fraction=0.5)
    assert back.Q == 2
    assert back.n_chains == 3
    assert back.iterations == 40
    for name in samples.draws:
        np.testing.assert_allclose(back.draws[name], samples.draws[name], atol=1e-15)
    write_manifest(samples, manifest_path(path), extra_field=1)
    doc = json.loads(manifest_path(path).read_text())
    assert doc["extra_field"] == 1

"""Command-line interface.

Subcommands cover the full workflow: ``simulate`` synthetic patterns,
``mcf`` exploratory mark connection analysis, ``fit`` the interaction model
by MCMC, ``transform`` posterior samples into interpretable summaries, and
``mif`` the fitted interaction curves. Report-producing commands write
figures next to their delimited output unless ``--no-plot`` is given.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import click
import numpy as np

from . import __version__, io, plots
from .descriptive import mcf as mcf_estimate
from .descriptive import suggest_c
from .dmh import McmcConfig, Priors, ProposalScales, run_chain
from .graph import build_graph
from .pattern import PointPattern, load_pattern, read_points, rescale, save_pattern, sidecar_path
from .posterior import summarize
from .simulate import (
    LgcpConfig,
    SCENARIOS,
    gibbs_sample_marks,
    sample_lgcp,
    sample_poisson,
    scenario_params,
)


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Bayesian mark interaction modeling for spatial point patterns."""


def _load_any(path: Path, L: float | None) -> PointPattern:
    """Load a saved pattern when a sidecar exists, otherwise ingest raw rows."""
    if sidecar_path(path).exists():
        return load_pattern(path)
    return rescale(read_points(path), L=L)


@main.command()
@click.option("--process", type=click.Choice(["poisson", "lgcp"]), default="poisson",
              show_default=True, help="Point location process.")
@click.option("--eta", type=float, default=2000.0, show_default=True,
              help="Poisson intensity (ignored for lgcp).")
@click.option("--scenario", type=click.Choice(sorted(SCENARIOS)), default="low-repulsion",
              show_default=True, help="Built-in two-type interaction scenario.")
@click.option("--lam", "--lambda", "lam", type=float, default=60.0, show_default=True,
              help="Decay rate of the pair interaction.")
@click.option("--c", type=float, default=0.05, show_default=True,
              help="Interaction cutoff used to generate marks.")
@click.option("--sweeps", type=int, default=None,
              help="Gibbs sweeps for mark generation [default: ~100000/n].")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Output pattern CSV (a JSON sidecar is written next to it).")
@click.option("--plot/--no-plot", default=True, show_default=True)
def simulate(process, eta, scenario, lam, c, sweeps, seed, out, plot) -> None:
    """Generate a synthetic two-type pattern from a named scenario."""
    rng = np.random.default_rng(seed)
    if process == "poisson":
        pts = sample_poisson(eta, rng)
    else:
        pts = sample_lgcp(LgcpConfig(), rng)
    if len(pts) < 2:
        raise click.ClickException("simulated point count too small; increase --eta")
    params = scenario_params(scenario, lam)
    pattern = PointPattern(
        xs=pts[:, 0], ys=pts[:, 1],
        marks=np.ones(len(pts), dtype=np.int64), Q=2,
        label_map={"1": 1, "2": 2},
    )
    graph = build_graph(pattern, c)
    if sweeps is None:
        sweeps = max(1, round(100_000 / len(pts)))
    marks = gibbs_sample_marks(pattern, graph, params, sweeps=sweeps, seed=rng)
    pattern = PointPattern(
        xs=pts[:, 0], ys=pts[:, 1], marks=marks, Q=2, label_map={"1": 1, "2": 2},
    )
    save_pattern(pattern, out)
    click.echo(f"wrote {len(pts)} points to {out} (scenario={scenario}, sweeps={sweeps})")
    if plot:
        fig = plots.plot_pattern(pattern, out.with_suffix(".png"), title=scenario)
        click.echo(f"wrote {fig}")


@main.command("mcf")
@click.option("--data", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="Pattern CSV (raw x,y,mark or saved pattern).")
@click.option("--rescale-length", "L", type=float, default=None,
              help="Known window length for raw data [default: estimated].")
@click.option("--dmax", type=float, default=0.3, show_default=True)
@click.option("--bins", type=int, default=60, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Output CSV: bin_mid, q, q_prime, value, pair_count.")
@click.option("--suggest-c", "suggest", is_flag=True,
              help="Also print a suggested interaction cutoff with evidence.")
@click.option("--tolerance", type=float, default=0.02, show_default=True,
              help="Flatness band used by --suggest-c.")
@click.option("--plot/--no-plot", default=True, show_default=True)
def mcf_cmd(data, L, dmax, bins, out, suggest, tolerance, plot) -> None:
    """Estimate empirical mark connection functions."""
    pattern = _load_any(data, L)
    est = mcf_estimate(pattern, d_max=dmax, n_bins=bins)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_mid", "q", "q_prime", "value", "pair_count"])
        for k, mid in enumerate(est.bin_mid):
            for col, (q, qp) in enumerate(est.pairs):
                val = est.values[k, col]
                writer.writerow([
                    f"{mid:.8g}", q, qp,
                    "" if np.isnan(val) else f"{val:.8g}",
                    int(est.counts[k, col]),
                ])
    click.echo(f"wrote {out}")
    if plot:
        fig = plots.plot_mcf(est, out.with_suffix(".png"))
        click.echo(f"wrote {fig}")
    if suggest:
        s = suggest_c(est, tolerance=tolerance)
        if not s.converged:
            note = "no convergence detected; capped default"
        elif s.capped:
            note = f"curves flatten beyond the cap; capped at {s.cap:g}"
        else:
            note = "curves flatten"
        click.echo(f"suggested cutoff c = {s.c:.4g} ({note})")
        for pair, pos in sorted(s.per_pair.items()):
            tm = s.tail_means[pair]
            detail = "never settles" if np.isnan(pos) else f"settles at d={pos:.4g}"
            click.echo(f"  pair {pair}: {detail} (tail mean {tm:.3f}, band ±{s.tolerance})")


def _prior_options(fn):
    opts = [
        click.option("--mu-omega", type=float, default=1.0, show_default=True),
        click.option("--sigma-omega", type=float, default=1.0, show_default=True),
        click.option("--mu-theta", type=float, default=0.0, show_default=True),
        click.option("--sigma-theta", type=float, default=1.0, show_default=True),
        click.option("--a-lambda", type=float, default=0.001, show_default=True),
        click.option("--b-lambda", type=float, default=0.001, show_default=True),
        click.option("--tau-omega", type=float, default=0.1, show_default=True),
        click.option("--tau-theta", type=float, default=0.1, show_default=True),
        click.option("--tau-lambda", type=float, default=25.0, show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@main.command()
@click.option("--data", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              required=True, help="Pattern CSV (raw x,y,mark or saved pattern).")
@click.option("--rescale-length", "L", type=float, default=None,
              help="Known window length for raw data [default: estimated].")
@click.option("--c", type=float, default=0.1, show_default=True,
              help="Interaction cutoff.")
@click.option("--iterations", type=int, default=10_000, show_default=True)
@click.option("--burn-in", type=float, default=0.5, show_default=True,
              help="Fraction of iterations discarded as burn-in.")
@click.option("--chains", type=int, default=1, show_default=True)
@click.option("--aux-sweeps", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_prior_options
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Output samples CSV; a .manifest.json is written next to it.")
@click.option("--plot/--no-plot", default=True, show_default=True)
def fit(data, L, c, iterations, burn_in, chains, aux_sweeps, seed,
        mu_omega, sigma_omega, mu_theta, sigma_theta, a_lambda, b_lambda,
        tau_omega, tau_theta, tau_lambda, out, plot) -> None:
    """Fit the mark interaction model by MCMC."""
    pattern = _load_any(data, L)
    graph = build_graph(pattern, c)
    priors = Priors(mu_omega=mu_omega, sigma_omega=sigma_omega,
                    mu_theta=mu_theta, sigma_theta=sigma_theta,
                    a_lambda=a_lambda, b_lambda=b_lambda)
    scales = ProposalScales(tau_omega=tau_omega, tau_theta=tau_theta, tau_lambda=tau_lambda)
    config = McmcConfig(iterations=iterations, burn_in_fraction=burn_in,
                        aux_sweeps=aux_sweeps, n_chains=chains, seed=seed)
    t0 = time.perf_counter()
    samples = run_chain(pattern, graph, priors, scales, config)
    wall = time.perf_counter() - t0
    io.write_samples(samples, out)
    io.write_manifest(
        samples, io.manifest_path(out),
        wall_time_s=round(wall, 3),
        n_points=pattern.n,
        n_edges=graph.n_edges,
        cutoff=c,
        data=str(data),
        priors=vars(priors).copy(),
        proposal_scales=vars(scales).copy(),
        version=__version__,
    )
    click.echo(f"wrote {out} and {io.manifest_path(out)} "
               f"({chains} chain(s) x {iterations} iterations in {wall:.1f}s)")
    rates = samples.acceptance_rates()
    click.echo("acceptance: " + ", ".join(f"{k}={v:.2f}" for k, v in rates.items()))
    if plot:
        fig = plots.plot_traces(samples, out.with_suffix(".trace.png"))
        click.echo(f"wrote {fig}")


@main.command()
@click.option("--samples", "samples_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Samples CSV produced by fit.")
@click.option("--burn-in", type=float, default=0.5, show_default=True)
@click.option("--level", type=float, default=0.95, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Output JSON summary.")
@click.option("--plot/--no-plot", default=True, show_default=True)
def transform(samples_path, burn_in, level, out, plot) -> None:
    """Summarize samples as mark probabilities with credible intervals."""
    samples = io.read_samples(samples_path, burn_in_fraction=burn_in)
    summary = summarize(samples, level=level)
    doc = {
        "pi": summary.pi.tolist(),
        "pi_draw_mean": summary.pi_draw_mean.tolist(),
        "pi_ci": summary.pi_ci.tolist(),
        "phi": summary.phi.tolist(),
        "phi_draw_mean": summary.phi_draw_mean.tolist(),
        "phi_ci": summary.phi_ci.tolist(),
        "lambda_hat": summary.lambda_hat,
        "lambda_ci": list(summary.lambda_ci),
        "level": level,
    }
    with out.open("w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    click.echo(f"wrote {out}")
    click.echo(f"lambda_hat = {summary.lambda_hat:.4g}, pi = "
               + np.array2string(summary.pi, precision=3))
    if plot:
        fig = plots.plot_phi_levels(summary, out.with_suffix(".phi.png"))
        click.echo(f"wrote {fig}")


@main.command()
@click.option("--samples", "samples_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Samples CSV produced by fit.")
@click.option("--burn-in", type=float, default=0.5, show_default=True)
@click.option("--dmax", type=float, default=0.3, show_default=True)
@click.option("--points", type=int, default=200, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Output CSV: d, q, q_prime, value.")
@click.option("--plot/--no-plot", default=True, show_default=True)
def mif(samples_path, burn_in, dmax, points, out, plot) -> None:
    """Evaluate fitted mark interaction curves on a distance grid."""
    samples = io.read_samples(samples_path, burn_in_fraction=burn_in)
    grid = np.linspace(0.0, dmax, points)
    summary = summarize(samples, d_grid=grid)
    Q = samples.Q
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["d", "q", "q_prime", "value"])
        for q in range(1, Q + 1):
            for qp in range(1, Q + 1):
                curve = summary.mif_curves[q - 1, qp - 1]
                for d, v in zip(grid, curve):
                    writer.writerow([f"{d:.8g}", q, qp, f"{v:.8g}"])
    click.echo(f"wrote {out}")
    if plot:
        fig = plots.plot_mif(summary, out.with_suffix(".png"))
        click.echo(f"wrote {fig}")


if __name__ == "__main__":
    main()

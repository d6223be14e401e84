"""Figure rendering for the CLI report paths.

Every plot function writes a PNG to the given path and returns the path;
nothing is ever shown interactively (the Agg backend is forced so the CLI
works headless).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .descriptive import McfEstimate
from .dmh import PosteriorSamples
from .pattern import PointPattern
from .posterior import TransformedSummary

__all__ = ["plot_pattern", "plot_mcf", "plot_mif", "plot_phi_levels", "plot_traces"]

_MARK_CMAP = plt.get_cmap("tab10")


def plot_pattern(pattern: PointPattern, path: str | Path, title: str = "") -> Path:
    """Scatter the pattern with one color per mark."""
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    labels = pattern.labels()
    for q in range(1, pattern.Q + 1):
        sel = pattern.marks == q
        ax.scatter(
            pattern.xs[sel], pattern.ys[sel], s=8, color=_MARK_CMAP((q - 1) % 10),
            label=labels[q - 1], linewidths=0,
        )
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    return _save(fig, path)


def plot_mcf(estimate: McfEstimate, path: str | Path) -> Path:
    """Mark connection function curves against pair distance."""
    fig, ax = plt.subplots(figsize=(6, 4))
    mids = estimate.bin_mid
    for col, (q, qp) in enumerate(estimate.pairs):
        ax.plot(mids, estimate.values[:, col], label=f"({q},{qp})", lw=1.5)
    ax.set_xlabel("distance d")
    ax.set_ylabel("pair-mark frequency")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(title="mark pair", fontsize=8)
    return _save(fig, path)


def plot_mif(summary: TransformedSummary, path: str | Path) -> Path:
    """Mark interaction curves (conditional mark probability vs distance)."""
    Q = summary.pi.shape[0]
    fig, ax = plt.subplots(figsize=(6, 4))
    for q in range(1, Q + 1):
        for qp in range(1, Q + 1):
            ax.plot(
                summary.mif_grid, summary.mif_curves[q - 1, qp - 1],
                label=f"{q}|{qp}", lw=1.3,
            )
    ax.set_xlabel("distance d")
    ax.set_ylabel("P(mark q | neighbor mark q')")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(title="q|q'", fontsize=8, ncol=2)
    return _save(fig, path)


def plot_phi_levels(summary: TransformedSummary, path: str | Path) -> Path:
    """Level plot of the neighbor-mark probability matrix with intervals."""
    phi, ci = summary.phi, summary.phi_ci
    Q = phi.shape[0]
    fig, ax = plt.subplots(figsize=(1.2 * Q + 2.5, 1.2 * Q + 2))
    im = ax.imshow(phi, vmin=0, vmax=1, cmap="viridis")
    for q in range(Q):
        for qp in range(Q):
            lo, hi = ci[q, qp]
            color = "white" if phi[q, qp] < 0.6 else "black"
            ax.text(
                qp, q, f"{phi[q, qp]:.3f}\n[{lo:.3f}, {hi:.3f}]",
                ha="center", va="center", fontsize=8, color=color,
            )
    ax.set_xticks(range(Q), [str(q) for q in range(1, Q + 1)])
    ax.set_yticks(range(Q), [str(q) for q in range(1, Q + 1)])
    ax.set_xlabel("neighbor mark q'")
    ax.set_ylabel("mark q")
    fig.colorbar(im, ax=ax, shrink=0.8)
    return _save(fig, path)


def plot_traces(samples: PosteriorSamples, path: str | Path) -> Path:
    """Per-parameter trace plots with chains overlaid and burn-in marked."""
    names = samples.parameter_names
    ncol = 2
    nrow = (len(names) + ncol - 1) // ncol
    fig, axes = plt.subplots(nrow, ncol, figsize=(10, 2.2 * nrow), squeeze=False)
    for k, name in enumerate(names):
        ax = axes[k // ncol][k % ncol]
        for chain in range(samples.n_chains):
            ax.plot(samples.draws[name][chain], lw=0.5, alpha=0.8)
        ax.axvline(samples.burn_in, color="grey", ls="--", lw=0.8)
        ax.set_title(name, fontsize=9)
    for k in range(len(names), nrow * ncol):
        axes[k // ncol][k % ncol].axis("off")
    return _save(fig, path)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

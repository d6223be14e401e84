"""Reading and writing posterior samples and run manifests.

Samples travel as long-format CSV (chain, iteration, parameter, value) so
they can be inspected or post-processed with any table tool; a JSON
manifest written next to them records the run configuration and acceptance
rates.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np

from .dmh import McmcConfig, PosteriorSamples

__all__ = ["write_samples", "read_samples", "write_manifest", "manifest_path"]


def write_samples(samples: PosteriorSamples, path: str | Path) -> None:
    """Write draws in long format: chain, iteration, parameter, value."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["chain", "iteration", "parameter", "value"])
        for name, mat in samples.draws.items():
            n_chains, iters = mat.shape
            for chain in range(n_chains):
                col = mat[chain]
                for it in range(iters):
                    writer.writerow([chain, it, name, f"{col[it]:.17g}"])


def read_samples(
    path: str | Path, burn_in_fraction: float = 0.5
) -> PosteriorSamples:
    """Rebuild a PosteriorSamples from a long-format CSV.

    Q is inferred from the parameter names; acceptance counts are not part
    of the CSV and come back as zeros (they live in the manifest).
    """
    path = Path(path)
    per_param: dict[str, dict[int, list[float]]] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:4]] != [
            "chain", "iteration", "parameter", "value",
        ]:
            raise ValueError(f"{path}: expected header 'chain,iteration,parameter,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                chain, value = int(row[0]), float(row[3])
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}: line {lineno}: malformed row") from exc
            per_param.setdefault(row[2], {}).setdefault(chain, []).append(value)
    if not per_param:
        raise ValueError(f"{path}: no sample rows")

    draws: dict[str, np.ndarray] = {}
    for name, chains in per_param.items():
        ids = sorted(chains)
        lens = {len(chains[c]) for c in ids}
        if len(lens) != 1:
            raise ValueError(f"{path}: unequal chain lengths for parameter {name}")
        draws[name] = np.array([chains[c] for c in ids])

    Q = 2
    for name in draws:
        if name.startswith("theta_"):
            _, q, qp = name.split("_")
            Q = max(Q, int(q), int(qp))
    iterations = next(iter(draws.values())).shape[1]
    n_chains = next(iter(draws.values())).shape[0]
    config = McmcConfig(
        iterations=iterations,
        burn_in_fraction=burn_in_fraction,
        n_chains=n_chains,
    )
    return PosteriorSamples(
        draws=draws,
        accepts={name: np.zeros(n_chains) for name in draws},
        burn_in=int(iterations * burn_in_fraction),
        Q=Q,
        config=config,
    )


def manifest_path(samples_path: str | Path) -> Path:
    return Path(samples_path).with_suffix(".manifest.json")


def write_manifest(samples: PosteriorSamples, path: str | Path, **extra: Any) -> None:
    """Write the run manifest next to a samples file."""
    cfg = samples.config
    doc = {
        "iterations": cfg.iterations,
        "iteration_unit": "full parameter sweep (every free parameter updated once)",
        "burn_in_fraction": cfg.burn_in_fraction,
        "burn_in_iterations": samples.burn_in,
        "aux_sweeps": cfg.aux_sweeps,
        "n_chains": cfg.n_chains,
        "seed": cfg.seed,
        "Q": samples.Q,
        "acceptance_rates": samples.acceptance_rates(),
        **extra,
    }
    with Path(path).open("w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

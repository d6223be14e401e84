"""Synthetic data generation: point locations and Gibbs-sampled marks.

Locations come from a homogeneous Poisson process or a log Gaussian Cox
process on a grid; marks are then drawn by single-site Gibbs sweeps of the
interaction model's local conditionals. Five named two-type interaction
scenarios (from strong same-mark clustering to strong cross-mark
clustering) are provided for benchmarking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .energy import ModelParams
from .graph import InteractionGraph
from .pattern import PointPattern

__all__ = [
    "LgcpConfig",
    "sample_poisson",
    "sample_lgcp",
    "gibbs_sample_marks",
    "scenario_params",
    "SCENARIOS",
]

# Named two-type scenarios: cross-mark intensity theta_12 with
# theta_11 = theta_22 = 1 and omega = (1, 1). Values below 1 favor
# cross-type neighbors (repulsion of same types), values above 1 favor
# same-type clumping (attraction).
SCENARIOS: dict[str, float] = {
    "high-attraction": 3.2,
    "low-attraction": 1.9,
    "random": 1.0,
    "low-repulsion": 0.2,
    "high-repulsion": -1.2,
}


def scenario_params(name: str, lam: float = 60.0) -> ModelParams:
    """Two-type ModelParams for one of the named interaction scenarios."""
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    t12 = SCENARIOS[name]
    return ModelParams(
        omega=np.array([1.0, 1.0]),
        theta=np.array([[1.0, t12], [t12, 1.0]]),
        lam=lam,
    )


def default_base_log_intensity(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Inhomogeneous log intensity 6 + |x - 0.3| + |y - 0.3|."""
    return 6.0 + np.abs(x - 0.3) + np.abs(y - 0.3)


@dataclass(frozen=True)
class LgcpConfig:
    """Settings for grid-approximated log Gaussian Cox process sampling.

    The Gaussian field is drawn jointly at cell centers with covariance
    k(u, v) = gp_variance * exp(-||u-v|| / gp_scale) (exponential kernel;
    switch ``kernel`` to "squared-exponential" for the smoother variant).
    Within each cell the intensity is treated as constant at its center
    value.
    """

    base_log_intensity: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(
        default=default_base_log_intensity
    )
    gp_variance: float = 1.0
    gp_scale: float = 1.0
    grid_resolution: int = 64
    kernel: str = "exponential"

    def __post_init__(self) -> None:
        if self.grid_resolution < 8:
            raise ValueError("grid_resolution must be >= 8")
        if not (self.gp_variance > 0 and self.gp_scale > 0):
            raise ValueError("gp_variance and gp_scale must be positive")
        if self.kernel not in ("exponential", "squared-exponential"):
            raise ValueError("kernel must be 'exponential' or 'squared-exponential'")


def sample_poisson(
    eta: float, seed: int | np.random.Generator | None = None
) -> np.ndarray:
    """Homogeneous Poisson process on the unit square, intensity ``eta``.

    Returns an (N, 2) coordinate array; N ~ Poisson(eta) and may be zero.
    """
    if not eta > 0:
        raise ValueError("intensity eta must be positive")
    rng = np.random.default_rng(seed)
    n = rng.poisson(eta)
    return rng.random((n, 2))


def _field_cholesky(cov: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        jitter = 1e-8 * np.eye(len(cov))
        return np.linalg.cholesky(cov + jitter)


def sample_lgcp(
    config: LgcpConfig = LgcpConfig(),
    seed: int | np.random.Generator | None = None,
) -> np.ndarray:
    """Log Gaussian Cox process on a grid of constant-intensity cells.

    A zero-mean Gaussian field is sampled at the cell centers, added to the
    base log intensity, and each cell then receives a Poisson number of
    uniformly placed points with mean intensity(center) * cell_area.
    """
    rng = np.random.default_rng(seed)
    res = config.grid_resolution
    centers = (np.arange(res) + 0.5) / res
    gx, gy = np.meshgrid(centers, centers, indexing="ij")
    gx, gy = gx.ravel(), gy.ravel()

    dx = gx[:, None] - gx[None, :]
    dy = gy[:, None] - gy[None, :]
    if config.kernel == "exponential":
        dist = np.hypot(dx, dy)
        cov = config.gp_variance * np.exp(-dist / config.gp_scale)
    else:
        cov = config.gp_variance * np.exp(-(dx**2 + dy**2) / (2.0 * config.gp_scale**2))
    chol = _field_cholesky(cov)
    gp = chol @ rng.standard_normal(len(gx))

    log_intensity = config.base_log_intensity(gx, gy) + gp
    cell_area = 1.0 / (res * res)
    counts = rng.poisson(np.exp(log_intensity) * cell_area)
    total = int(counts.sum())
    if total == 0:
        return np.empty((0, 2))
    cell_idx = np.repeat(np.arange(res * res), counts)
    offsets = rng.random((total, 2)) / res
    xs = gx[cell_idx] - 0.5 / res + offsets[:, 0]
    ys = gy[cell_idx] - 0.5 / res + offsets[:, 1]
    return np.column_stack([xs, ys])


def _run_scan(
    marks: np.ndarray,
    graph: InteractionGraph,
    omega: np.ndarray,
    theta: np.ndarray,
    lam: float,
    sweeps: int,
    rng: np.random.Generator,
    scan: str = "systematic",
) -> np.ndarray:
    """Shared scan driver: prepares visit order and uniforms, runs the kernel."""
    n = graph.n
    weights = np.exp(-lam * graph.dists) if lam != 0.0 else np.ones(len(graph.dists))
    if scan == "systematic":
        sites = np.tile(np.arange(n, dtype=np.int64), sweeps)
    elif scan == "random":
        sites = rng.integers(0, n, size=sweeps * n, dtype=np.int64)
    else:
        raise ValueError("scan must be 'systematic' or 'random'")
    uniforms = rng.random(sweeps * n)
    _kernels.gibbs_scan(
        marks, graph.indptr, graph.indices, weights,
        np.ascontiguousarray(omega), np.ascontiguousarray(theta), sites, uniforms,
    )
    return marks


def gibbs_sample_marks(
    pattern: PointPattern,
    graph: InteractionGraph,
    params: ModelParams,
    sweeps: int,
    init: np.ndarray | str = "random",
    seed: int | np.random.Generator | None = None,
    scan: str = "systematic",
) -> np.ndarray:
    """Run full Gibbs sweeps over the marks and return the final vector.

    A systematic sweep visits points 0..n-1 in order, resampling each mark
    from its local conditional; ``scan="random"`` instead visits n
    uniformly chosen sites per sweep. ``init`` is either a mark vector to
    continue from or "random" for a uniform start. Bit-reproducible for a
    fixed integer seed. One sweep equals n single-site updates.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    if graph.n != pattern.n:
        raise ValueError("pattern and graph describe different numbers of points")
    if params.Q != pattern.Q:
        raise ValueError("params and pattern disagree on Q")
    rng = np.random.default_rng(seed)
    if isinstance(init, str):
        if init != "random":
            raise ValueError("init must be a mark vector or 'random'")
        marks = rng.integers(1, pattern.Q + 1, size=pattern.n, dtype=np.int64)
    else:
        marks = np.array(init, dtype=np.int64)
        if marks.shape != (pattern.n,):
            raise ValueError("init mark vector has wrong length")
        if marks.min() < 1 or marks.max() > pattern.Q:
            raise ValueError(f"init marks must lie in 1..{pattern.Q}")
    return _run_scan(
        marks, graph, params.omega, params.theta, params.lam, sweeps, rng, scan
    )

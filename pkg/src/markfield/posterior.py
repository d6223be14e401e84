"""Posterior summaries and interpretable parameter transforms.

Raw intensities are only identified up to additive shifts, so reporting
happens on the transformed scale: ``pi`` (softmax of -omega) gives limiting
mark probabilities, ``phi`` (column-wise softmax of -theta) gives the mark
probability next to a coincident neighbor of each type, and the mark
interaction curve traces the same conditional probability as a function of
neighbor distance, decaying from phi-like behavior at d=0 toward pi.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dmh import PosteriorSamples
from .energy import ModelParams

__all__ = [
    "TransformedSummary",
    "posterior_mean",
    "transform_pi",
    "transform_phi",
    "mif_curve",
    "credible_interval",
    "gelman_rubin",
    "summarize",
    "DEFAULT_MIF_GRID",
]

DEFAULT_MIF_GRID = np.linspace(0.0, 0.3, 200)


def transform_pi(omega: np.ndarray) -> np.ndarray:
    """Limiting mark probabilities: softmax of -omega, max-subtracted."""
    omega = np.asarray(omega, dtype=np.float64)
    e = np.exp(-(omega - omega.min()))
    return e / e.sum()


def transform_phi(theta: np.ndarray) -> np.ndarray:
    """Column-stochastic neighbor-mark probabilities.

    Column q' is the softmax over q of -theta[q, q']: the probability a
    point takes mark q given a coincident neighbor of mark q'. Columns sum
    to one; the result need not be symmetric even though theta is.
    """
    theta = np.asarray(theta, dtype=np.float64)
    shifted = theta - theta.min(axis=0, keepdims=True)
    e = np.exp(-shifted)
    return e / e.sum(axis=0, keepdims=True)


def mif_curve(params: ModelParams, q: int, qp: int, d_grid: np.ndarray) -> np.ndarray:
    """Mark interaction curve: P(mark q at distance d from a mark-q' point).

    Evaluates softmax_q of -(omega_q + theta[q, q'] * exp(-lam * d)) on the
    grid; converges to transform_pi(omega)[q-1] as d grows.
    """
    d_grid = np.asarray(d_grid, dtype=np.float64)
    if np.any(d_grid < 0):
        raise ValueError("distances must be >= 0")
    if not (1 <= q <= params.Q and 1 <= qp <= params.Q):
        raise ValueError(f"marks must lie in 1..{params.Q}")
    decay = np.exp(-params.lam * d_grid)  # (m,)
    # energies per candidate mark: (Q, m)
    e = params.omega[:, None] + params.theta[:, qp - 1][:, None] * decay[None, :]
    e -= e.min(axis=0, keepdims=True)
    w = np.exp(-e)
    return w[q - 1] / w.sum(axis=0)


def posterior_mean(samples: PosteriorSamples, burn_in: int | None = None) -> ModelParams:
    """Pooled post-burn-in means of every free parameter; fixed entries stay 1."""
    Q = samples.Q
    omega = np.ones(Q)
    for q in range(1, Q):
        omega[q - 1] = samples.pooled(f"omega_{q}", burn_in).mean()
    theta = np.ones((Q, Q))
    for q in range(1, Q + 1):
        for qp in range(q, Q + 1):
            if q == Q and qp == Q:
                continue
            m = samples.pooled(f"theta_{q}_{qp}", burn_in).mean()
            theta[q - 1, qp - 1] = m
            theta[qp - 1, q - 1] = m
    lam = samples.pooled("lambda", burn_in).mean()
    return ModelParams(omega=omega, theta=theta, lam=float(lam))


def credible_interval(
    samples: PosteriorSamples,
    parameter: str,
    level: float = 0.95,
    transform: Callable[[np.ndarray], np.ndarray] | None = None,
    burn_in: int | None = None,
) -> tuple[float, float]:
    """Equal-tailed interval of the (optionally transformed) pooled draws.

    The transform is applied draw-wise before taking quantiles, which are
    linearly interpolated between order statistics.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    values = samples.pooled(parameter, burn_in)
    if len(values) < 100:
        raise ValueError(f"need >= 100 post-burn-in draws, have {len(values)}")
    if transform is not None:
        values = np.asarray(transform(values), dtype=np.float64)
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(values, [alpha, 1.0 - alpha], method="linear")
    return float(lo), float(hi)


def gelman_rubin(
    samples: PosteriorSamples, parameter: str, burn_in: int | None = None
) -> float:
    """Potential scale reduction factor over the post-burn-in chains.

    With m chains of length n, B/n is the variance of the chain means and W
    the mean within-chain variance; the statistic is
    sqrt(((n-1)/n * W + B/n) / W). Values near 1 indicate the chains agree.
    """
    burn = samples.burn_in if burn_in is None else burn_in
    chains = samples.draws[parameter][:, burn:]
    m, n = chains.shape
    if m < 2:
        raise ValueError("the diagnostic needs >= 2 chains; rerun with n_chains >= 2")
    if n < 10:
        raise ValueError("need >= 10 post-burn-in draws per chain")
    means = chains.mean(axis=1)
    b_over_n = means.var(ddof=1)  # = B / n
    w = chains.var(axis=1, ddof=1).mean()
    if w == 0.0:
        return 1.0 if b_over_n == 0.0 else np.inf
    var_hat = (n - 1) / n * w + b_over_n
    return float(np.sqrt(var_hat / w))


def _draw_matrices(
    samples: PosteriorSamples, burn_in: int | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-draw (omega, theta, lambda) arrays assembled from pooled draws."""
    Q = samples.Q
    n_draws = len(samples.pooled("lambda", burn_in))
    omegas = np.ones((n_draws, Q))
    for q in range(1, Q):
        omegas[:, q - 1] = samples.pooled(f"omega_{q}", burn_in)
    thetas = np.ones((n_draws, Q, Q))
    for q in range(1, Q + 1):
        for qp in range(q, Q + 1):
            if q == Q and qp == Q:
                continue
            vals = samples.pooled(f"theta_{q}_{qp}", burn_in)
            thetas[:, q - 1, qp - 1] = vals
            thetas[:, qp - 1, q - 1] = vals
    lams = samples.pooled("lambda", burn_in)
    return omegas, thetas, lams


@dataclass(frozen=True)
class TransformedSummary:
    """Point estimates, draw-wise means, and credible intervals on the
    interpretable scale, plus mark interaction curves on a distance grid."""

    pi: np.ndarray  # (Q,) transform of the posterior-mean omega
    phi: np.ndarray  # (Q, Q) transform of the posterior-mean theta
    pi_draw_mean: np.ndarray  # (Q,) mean of per-draw transforms
    phi_draw_mean: np.ndarray  # (Q, Q)
    pi_ci: np.ndarray  # (Q, 2)
    phi_ci: np.ndarray  # (Q, Q, 2)
    lambda_hat: float
    lambda_ci: tuple[float, float]
    mif_grid: np.ndarray
    mif_curves: np.ndarray  # (Q, Q, len(grid)); [q-1, q'-1] = MIF of q given q'


def summarize(
    samples: PosteriorSamples,
    level: float = 0.95,
    d_grid: np.ndarray | None = None,
    burn_in: int | None = None,
) -> TransformedSummary:
    """Full transformed summary of a posterior sample.

    Point estimates transform the posterior-mean parameters; the mean of
    the per-draw transforms is reported alongside since the two differ for
    nonlinear maps. Intervals are equal-tailed quantiles of the per-draw
    transformed values.
    """
    grid = DEFAULT_MIF_GRID if d_grid is None else np.asarray(d_grid, dtype=np.float64)
    est = posterior_mean(samples, burn_in)
    Q = samples.Q
    omegas, thetas, lams = _draw_matrices(samples, burn_in)
    if omegas.shape[0] < 100:
        raise ValueError("need >= 100 post-burn-in draws for interval summaries")
    alpha = (1.0 - level) / 2.0

    pi_draws = np.stack([transform_pi(o) for o in omegas])
    phi_draws = np.stack([transform_phi(t) for t in thetas])
    pi_ci = np.quantile(pi_draws, [alpha, 1.0 - alpha], axis=0).T
    phi_ci = np.moveaxis(np.quantile(phi_draws, [alpha, 1.0 - alpha], axis=0), 0, -1)

    curves = np.empty((Q, Q, len(grid)))
    for q in range(1, Q + 1):
        for qp in range(1, Q + 1):
            curves[q - 1, qp - 1] = mif_curve(est, q, qp, grid)

    lam_lo, lam_hi = np.quantile(lams, [alpha, 1.0 - alpha])
    return TransformedSummary(
        pi=transform_pi(est.omega),
        phi=transform_phi(est.theta),
        pi_draw_mean=pi_draws.mean(axis=0),
        phi_draw_mean=phi_draws.mean(axis=0),
        pi_ci=pi_ci,
        phi_ci=phi_ci,
        lambda_hat=est.lam,
        lambda_ci=(float(lam_lo), float(lam_hi)),
        mif_grid=grid,
        mif_curves=curves,
    )

"""Posterior sampling with auxiliary-variable Metropolis-Hastings updates.

The likelihood's normalizing constant C(omega, theta, lam) is intractable,
so each update draws an auxiliary mark configuration z* under the proposed
parameters (a short Gibbs run started from the observed marks) and uses the
ratio

    r = p~(z* | cur) / p~(z | cur) * p~(z | prop) / p~(z* | prop) * prior ratio
        * proposal density ratio

in which every p~ is unnormalized: the constants cancel. Normal random
walks drive the intensity updates; the decay rate uses a gamma proposal
with mean at the current value, whose asymmetry is corrected exactly in the
acceptance ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.stats import gamma as gamma_dist

from . import _kernels
from .energy import ModelParams, mark_counts
from .graph import InteractionGraph
from .pattern import PointPattern

__all__ = [
    "Priors",
    "ProposalScales",
    "McmcConfig",
    "PosteriorSamples",
    "ChainState",
    "update_omega",
    "update_theta",
    "update_lambda",
    "run_chain",
    "free_parameter_names",
    "LAMBDA_FLOOR",
]

LAMBDA_FLOOR = 1e-6


@dataclass(frozen=True)
class Priors:
    """Normal priors on the free intensities, gamma prior on the decay."""

    mu_omega: float = 1.0
    sigma_omega: float = 1.0
    mu_theta: float = 0.0
    sigma_theta: float = 1.0
    a_lambda: float = 0.001
    b_lambda: float = 0.001

    def __post_init__(self) -> None:
        if not (self.sigma_omega > 0 and self.sigma_theta > 0):
            raise ValueError("prior standard deviations must be positive")
        if not (self.a_lambda > 0 and self.b_lambda > 0):
            raise ValueError("gamma prior shape and rate must be positive")


@dataclass(frozen=True)
class ProposalScales:
    """Random-walk scales: std devs for the intensities, variance for decay."""

    tau_omega: float = 0.1
    tau_theta: float = 0.1
    tau_lambda: float = 25.0

    def __post_init__(self) -> None:
        if not (self.tau_omega > 0 and self.tau_theta > 0 and self.tau_lambda > 0):
            raise ValueError("proposal scales must be positive")


@dataclass(frozen=True)
class McmcConfig:
    """Chain length and bookkeeping.

    One iteration updates every free parameter once (all free omega
    entries, the free upper triangle of theta, then the decay rate).
    ``lambda_init_range`` bounds the prior draw used to start the decay
    rate: the gamma random walk is effectively frozen when started far
    below 1, so initialization is restricted to a mobile range.
    """

    iterations: int = 10_000
    burn_in_fraction: float = 0.5
    aux_sweeps: int = 1
    n_chains: int = 1
    seed: int = 0
    lambda_init_range: tuple[float, float] = (1.0, 1_000.0)

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < self.burn_in_fraction < 1.0:
            raise ValueError("burn_in_fraction must lie in (0, 1)")
        if self.aux_sweeps < 1:
            raise ValueError("aux_sweeps must be >= 1")
        if self.n_chains < 1:
            raise ValueError("n_chains must be >= 1")
        lo, hi = self.lambda_init_range
        if not (LAMBDA_FLOOR <= lo < hi):
            raise ValueError("lambda_init_range must satisfy floor <= lo < hi")

    @property
    def burn_in(self) -> int:
        return int(self.iterations * self.burn_in_fraction)


def free_parameter_names(Q: int) -> list[str]:
    """Sampled parameter names: omega_q (q < Q), theta_q_q' (q <= q', not QQ), lambda."""
    names = [f"omega_{q}" for q in range(1, Q)]
    for q in range(1, Q + 1):
        for qp in range(q, Q + 1):
            if q == Q and qp == Q:
                continue
            names.append(f"theta_{q}_{qp}")
    names.append("lambda")
    return names


@dataclass
class PosteriorSamples:
    """Per-chain draws for every free parameter plus acceptance counts."""

    draws: dict[str, np.ndarray]  # each (n_chains, iterations)
    accepts: dict[str, np.ndarray]  # each (n_chains,)
    burn_in: int
    Q: int
    config: McmcConfig

    @property
    def n_chains(self) -> int:
        return next(iter(self.draws.values())).shape[0]

    @property
    def iterations(self) -> int:
        return next(iter(self.draws.values())).shape[1]

    @property
    def parameter_names(self) -> list[str]:
        return list(self.draws)

    def pooled(self, parameter: str, burn_in: int | None = None) -> np.ndarray:
        """Post-burn-in draws of one parameter, pooled across chains."""
        burn = self.burn_in if burn_in is None else burn_in
        if burn >= self.iterations:
            raise ValueError("burn-in discards every draw")
        return self.draws[parameter][:, burn:].ravel()

    def acceptance_rates(self) -> dict[str, float]:
        return {
            name: float(acc.sum()) / (self.n_chains * self.iterations)
            for name, acc in self.accepts.items()
        }


@dataclass
class ChainState:
    """Mutable sampler state for a single chain.

    Caches the observed-mark sufficient statistics: the per-mark counts
    never change, the per-edge mark-pair classes never change, and the edge
    decay weights only change when a decay update is accepted.
    """

    omega: np.ndarray
    theta: np.ndarray
    lam: float
    marks: np.ndarray
    graph: InteractionGraph
    Q: int
    obs_counts: np.ndarray = field(init=False)
    obs_pair_idx: np.ndarray = field(init=False)
    w_edges: np.ndarray = field(init=False)  # per edge, for sufficient stats
    w_adj: np.ndarray = field(init=False)  # per adjacency entry, for the kernel
    W_obs: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        g = self.graph
        self.obs_counts = mark_counts(self.marks, self.Q)
        zi, zj = self.marks[g.edge_i], self.marks[g.edge_j]
        self.obs_pair_idx = (np.minimum(zi, zj) - 1) * self.Q + (np.maximum(zi, zj) - 1)
        self._set_lambda(self.lam)

    def _set_lambda(self, lam: float) -> None:
        self.lam = float(lam)
        g = self.graph
        self.w_edges = np.exp(-lam * g.edge_d) if g.n_edges else np.empty(0)
        self.w_adj = self.w_edges[g.adj_edge]
        self.W_obs = self._pair_weights(self.obs_pair_idx, self.w_edges)

    def _pair_weights(self, pair_idx: np.ndarray, weights: np.ndarray) -> np.ndarray:
        if len(pair_idx) == 0:
            return np.zeros((self.Q, self.Q))
        flat = np.bincount(pair_idx, weights=weights, minlength=self.Q * self.Q)
        return flat.reshape(self.Q, self.Q)

    def params(self) -> ModelParams:
        return ModelParams(self.omega.copy(), self.theta.copy(), self.lam)


def _energy(omega: np.ndarray, theta: np.ndarray, counts: np.ndarray, W: np.ndarray) -> float:
    return float(omega @ counts + (theta * W).sum())


def _aux_marks(
    state: ChainState,
    omega: np.ndarray,
    theta: np.ndarray,
    adj_weights: np.ndarray,
    aux_sweeps: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Auxiliary configuration: Gibbs sweeps from the observed marks.

    ``adj_weights`` must be laid out per adjacency entry (one value for
    each direction of each edge), matching the graph's CSR arrays.
    """
    g = state.graph
    if len(adj_weights) != len(g.indices):
        raise ValueError("adjacency weight array does not match the graph layout")
    z = state.marks.copy()
    n = g.n
    sites = np.tile(np.arange(n, dtype=np.int64), aux_sweeps)
    uniforms = rng.random(aux_sweeps * n)
    _kernels.gibbs_scan(z, g.indptr, g.indices, adj_weights, omega, theta, sites, uniforms)
    return z


def _aux_stats(
    state: ChainState, z: np.ndarray, weights: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Counts, pair-class indices, and pair weight sums of a mark vector."""
    g = state.graph
    counts = mark_counts(z, state.Q)
    zi, zj = z[g.edge_i], z[g.edge_j]
    pair_idx = (np.minimum(zi, zj) - 1) * state.Q + (np.maximum(zi, zj) - 1)
    return counts, pair_idx, state._pair_weights(pair_idx, weights)


def _log_normal_pdf(x: float, mu: float, sigma: float) -> float:
    zscore = (x - mu) / sigma
    return -0.5 * zscore * zscore - math.log(sigma) - 0.5 * math.log(2.0 * math.pi)


def _log_gamma_pdf(x: float, shape: float, rate: float) -> float:
    return shape * math.log(rate) - math.lgamma(shape) + (shape - 1.0) * math.log(x) - rate * x


def _accept(rng: np.random.Generator, log_r: float) -> bool:
    u = rng.random()
    # u == 0 corresponds to log u = -inf, which accepts unconditionally
    return u <= 0.0 or math.log(u) < log_r


def update_omega(
    state: ChainState,
    q: int,
    priors: Priors,
    scales: ProposalScales,
    rng: np.random.Generator,
    aux_sweeps: int = 1,
) -> bool:
    """One auxiliary-variable MH update of omega_q (1 <= q <= Q-1)."""
    if not 1 <= q <= state.Q - 1:
        raise ValueError(f"q must lie in 1..{state.Q - 1} (the last entry is fixed)")
    cur = state.omega[q - 1]
    prop = cur + scales.tau_omega * rng.standard_normal()
    omega_star = state.omega.copy()
    omega_star[q - 1] = prop

    z_aux = _aux_marks(state, omega_star, state.theta, state.w_adj, aux_sweeps, rng)
    aux_counts, _, aux_W = _aux_stats(state, z_aux, state.w_edges)

    log_r = (
        -_energy(state.omega, state.theta, aux_counts, aux_W)
        + _energy(state.omega, state.theta, state.obs_counts, state.W_obs)
        - _energy(omega_star, state.theta, state.obs_counts, state.W_obs)
        + _energy(omega_star, state.theta, aux_counts, aux_W)
        + _log_normal_pdf(prop, priors.mu_omega, priors.sigma_omega)
        - _log_normal_pdf(cur, priors.mu_omega, priors.sigma_omega)
    )
    if _accept(rng, log_r):
        state.omega[q - 1] = prop
        return True
    return False


def update_theta(
    state: ChainState,
    q: int,
    qp: int,
    priors: Priors,
    scales: ProposalScales,
    rng: np.random.Generator,
    aux_sweeps: int = 1,
) -> bool:
    """One auxiliary-variable MH update of theta_qq' (mirrored to theta_q'q)."""
    if not (1 <= q <= qp <= state.Q):
        raise ValueError("require 1 <= q <= q' <= Q")
    if q == state.Q and qp == state.Q:
        raise ValueError("theta_QQ is fixed for identifiability")
    cur = state.theta[q - 1, qp - 1]
    prop = cur + scales.tau_theta * rng.standard_normal()
    theta_star = state.theta.copy()
    theta_star[q - 1, qp - 1] = prop
    theta_star[qp - 1, q - 1] = prop

    z_aux = _aux_marks(state, state.omega, theta_star, state.w_adj, aux_sweeps, rng)
    aux_counts, _, aux_W = _aux_stats(state, z_aux, state.w_edges)

    log_r = (
        -_energy(state.omega, state.theta, aux_counts, aux_W)
        + _energy(state.omega, state.theta, state.obs_counts, state.W_obs)
        - _energy(state.omega, theta_star, state.obs_counts, state.W_obs)
        + _energy(state.omega, theta_star, aux_counts, aux_W)
        + _log_normal_pdf(prop, priors.mu_theta, priors.sigma_theta)
        - _log_normal_pdf(cur, priors.mu_theta, priors.sigma_theta)
    )
    if _accept(rng, log_r):
        state.theta[q - 1, qp - 1] = prop
        state.theta[qp - 1, q - 1] = prop
        return True
    return False


def update_lambda(
    state: ChainState,
    priors: Priors,
    scales: ProposalScales,
    rng: np.random.Generator,
    aux_sweeps: int = 1,
) -> bool:
    """One auxiliary-variable MH update of the decay rate.

    The proposal Ga(lam^2 / tau, lam / tau) has mean lam and variance tau;
    it is not symmetric, so the exact forward/backward density ratio enters
    the acceptance probability. Proposals at or below the floor are
    rejected outright.
    """
    lam = state.lam
    shape = lam * lam / scales.tau_lambda
    rate = lam / scales.tau_lambda
    prop = rng.gamma(shape, 1.0 / rate)
    if not np.isfinite(prop) or prop <= LAMBDA_FLOOR:
        return False

    w_star = np.exp(-prop * state.graph.edge_d) if state.graph.n_edges else np.empty(0)
    w_star_adj = w_star[state.graph.adj_edge]
    z_aux = _aux_marks(state, state.omega, state.theta, w_star_adj, aux_sweeps, rng)
    aux_counts, aux_pair_idx, aux_W_star = _aux_stats(state, z_aux, w_star)
    aux_W_cur = state._pair_weights(aux_pair_idx, state.w_edges)
    obs_W_star = state._pair_weights(state.obs_pair_idx, w_star)

    shape_star = prop * prop / scales.tau_lambda
    rate_star = prop / scales.tau_lambda
    log_r = (
        -_energy(state.omega, state.theta, aux_counts, aux_W_cur)
        + _energy(state.omega, state.theta, state.obs_counts, state.W_obs)
        - _energy(state.omega, state.theta, state.obs_counts, obs_W_star)
        + _energy(state.omega, state.theta, aux_counts, aux_W_star)
        + _log_gamma_pdf(prop, priors.a_lambda, priors.b_lambda)
        - _log_gamma_pdf(lam, priors.a_lambda, priors.b_lambda)
        + _log_gamma_pdf(lam, shape_star, rate_star)
        - _log_gamma_pdf(prop, shape, rate)
    )
    if _accept(rng, log_r):
        state.lam = float(prop)
        state.w_edges = w_star
        state.w_adj = w_star_adj
        state.W_obs = obs_W_star
        return True
    return False


def _init_state(
    pattern: PointPattern,
    graph: InteractionGraph,
    priors: Priors,
    config: McmcConfig,
    rng: np.random.Generator,
) -> ChainState:
    """Draw starting parameters from their priors (decay from the truncated prior)."""
    Q = pattern.Q
    omega = np.full(Q, 1.0)
    omega[: Q - 1] = rng.normal(priors.mu_omega, priors.sigma_omega, size=Q - 1)
    theta = np.ones((Q, Q))
    for q in range(1, Q + 1):
        for qp in range(q, Q + 1):
            if q == Q and qp == Q:
                continue
            val = rng.normal(priors.mu_theta, priors.sigma_theta)
            theta[q - 1, qp - 1] = val
            theta[qp - 1, q - 1] = val
    lo, hi = config.lambda_init_range
    dist = gamma_dist(priors.a_lambda, scale=1.0 / priors.b_lambda)
    cdf_lo, cdf_hi = dist.cdf(lo), dist.cdf(hi)
    if cdf_hi > cdf_lo:
        lam = float(dist.ppf(cdf_lo + rng.random() * (cdf_hi - cdf_lo)))
    else:
        lam = lo + rng.random() * (hi - lo)
    lam = min(max(lam, lo), hi)
    return ChainState(
        omega=omega, theta=theta, lam=lam, marks=pattern.marks, graph=graph, Q=Q
    )


def _theta_pairs(Q: int) -> Iterable[tuple[int, int]]:
    for q in range(1, Q + 1):
        for qp in range(q, Q + 1):
            if q == Q and qp == Q:
                continue
            yield q, qp


def run_chain(
    pattern: PointPattern,
    graph: InteractionGraph,
    priors: Priors = Priors(),
    scales: ProposalScales = ProposalScales(),
    config: McmcConfig = McmcConfig(),
) -> PosteriorSamples:
    """Run ``config.n_chains`` independent chains and record every draw.

    Each iteration sweeps the free omega entries, the free upper triangle
    of theta, then the decay rate. Chains get independent RNG streams
    spawned from ``config.seed`` and are reproducible run to run.
    """
    Q = pattern.Q
    names = free_parameter_names(Q)
    iters, n_chains = config.iterations, config.n_chains
    draws = {name: np.empty((n_chains, iters)) for name in names}
    accepts = {name: np.zeros(n_chains) for name in names}

    streams = np.random.SeedSequence(config.seed).spawn(n_chains)
    for chain, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        state = _init_state(pattern, graph, priors, config, rng)
        for it in range(iters):
            for q in range(1, Q):
                name = f"omega_{q}"
                accepts[name][chain] += update_omega(
                    state, q, priors, scales, rng, config.aux_sweeps
                )
                draws[name][chain, it] = state.omega[q - 1]
            for q, qp in _theta_pairs(Q):
                name = f"theta_{q}_{qp}"
                accepts[name][chain] += update_theta(
                    state, q, qp, priors, scales, rng, config.aux_sweeps
                )
                draws[name][chain, it] = state.theta[q - 1, qp - 1]
            accepts["lambda"][chain] += update_lambda(
                state, priors, scales, rng, config.aux_sweeps
            )
            draws["lambda"][chain, it] = state.lam
    return PosteriorSamples(
        draws=draws, accepts=accepts, burn_in=config.burn_in, Q=Q, config=config
    )

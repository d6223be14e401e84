"""Potential energy, Gibbs likelihood, and local conditionals.

The joint mark distribution is the Gibbs measure p(z) = exp(-V(z)) / C with

    V(z) = sum_q omega_q N_q(z)
         + sum over unordered edges (i,j) of theta[z_i, z_j] * exp(-lam * d_ij)

Each unordered edge contributes exactly once through the symmetric theta
entry for its endpoint marks; that convention makes the single-site
conditional below the exact full conditional of V. The normalizing constant
C is never needed for inference (the sampler cancels it); the exact
enumeration here exists as a small-n test oracle only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .graph import InteractionGraph
from .pattern import PointPattern

__all__ = [
    "ModelParams",
    "potential_energy",
    "log_unnormalized_likelihood",
    "local_conditional",
    "exact_log_normalizing_constant",
    "mark_counts",
    "edge_pair_weights",
]

_ENUM_STATE_LIMIT = 10**7


@dataclass(frozen=True)
class ModelParams:
    """First-order intensities, symmetric pair intensities, and decay rate.

    ``omega[q-1]`` is the first-order intensity of mark q and
    ``theta[q-1, q'-1]`` the symmetric second-order intensity of the mark
    pair (q, q'). Inference pins ``omega[Q-1] = theta[Q-1, Q-1] = 1`` for
    identifiability, but evaluation accepts any finite values: the model is
    invariant under adding a constant to all omega entries or to all theta
    entries, and the shift-invariance tests exercise exactly that.
    """

    omega: np.ndarray
    theta: np.ndarray
    lam: float

    def __post_init__(self) -> None:
        omega = np.ascontiguousarray(self.omega, dtype=np.float64)
        theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        if omega.ndim != 1:
            raise ValueError("omega must be a vector")
        Q = len(omega)
        if Q < 2:
            raise ValueError("need at least two mark categories")
        if theta.shape != (Q, Q):
            raise ValueError(f"theta must be {Q}x{Q} to match omega")
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(theta))):
            raise ValueError("parameters must be finite")
        if not np.allclose(theta, theta.T, atol=1e-9, rtol=0.0):
            raise ValueError("theta must be symmetric")
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise ValueError("decay rate lam must be >= 0")
        for arr in (omega, theta):
            arr.flags.writeable = False
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "lam", float(self.lam))

    @property
    def Q(self) -> int:
        return len(self.omega)


def _check_consistent(pattern: PointPattern, graph: InteractionGraph, params: ModelParams) -> None:
    if graph.n != pattern.n:
        raise ValueError("pattern and graph describe different numbers of points")
    if params.Q != pattern.Q:
        raise ValueError("params and pattern disagree on the number of mark categories")


def mark_counts(marks: np.ndarray, Q: int) -> np.ndarray:
    """N_q for q = 1..Q, returned at index q-1."""
    return np.bincount(marks, minlength=Q + 1)[1:].astype(np.float64)


def edge_pair_weights(
    marks: np.ndarray,
    graph: InteractionGraph,
    lam: float,
    Q: int,
    weights: np.ndarray | None = None,
) -> np.ndarray:
    """Sum of decayed edge weights per unordered mark pair.

    Returns a QxQ upper-triangular matrix W with W[a, b] (a <= b, 0-based)
    holding sum of exp(-lam * d) over edges whose endpoint marks are
    {a+1, b+1}. ``weights`` may supply precomputed exp(-lam * d) values.
    """
    if graph.n_edges == 0:
        return np.zeros((Q, Q))
    if weights is None:
        weights = np.exp(-lam * graph.edge_d) if lam != 0.0 else np.ones(graph.n_edges)
    zi = marks[graph.edge_i]
    zj = marks[graph.edge_j]
    a = np.minimum(zi, zj) - 1
    b = np.maximum(zi, zj) - 1
    flat = np.bincount(a * Q + b, weights=weights, minlength=Q * Q)
    return flat.reshape(Q, Q)


def potential_energy(
    pattern: PointPattern, graph: InteractionGraph, params: ModelParams
) -> float:
    """Total energy V(z) of the observed marks under the given parameters."""
    _check_consistent(pattern, graph, params)
    counts = mark_counts(pattern.marks, params.Q)
    first = float(params.omega @ counts)
    if graph.n_edges == 0:
        return first
    W = edge_pair_weights(pattern.marks, graph, params.lam, params.Q)
    return first + float(np.sum(params.theta * W))


def log_unnormalized_likelihood(
    pattern: PointPattern, graph: InteractionGraph, params: ModelParams
) -> float:
    """log of the unnormalized Gibbs probability, i.e. -V(z)."""
    return -potential_energy(pattern, graph, params)


def neighbor_mark_weights(
    marks: np.ndarray, graph: InteractionGraph, lam: float, i: int, Q: int
) -> np.ndarray:
    """Decay-weighted mark tallies over the neighbors of point ``i``."""
    nbrs, d = graph.neighbors(i)
    if len(nbrs) == 0:
        return np.zeros(Q)
    w = np.exp(-lam * d) if lam != 0.0 else np.ones(len(d))
    return np.bincount(marks[nbrs] - 1, weights=w, minlength=Q)


def local_conditional(
    pattern: PointPattern, graph: InteractionGraph, params: ModelParams, i: int
) -> np.ndarray:
    """Full conditional distribution of the mark at point ``i`` (0-based).

    p(q) is proportional to exp(-(omega_q + sum_q' theta[q,q'] * s_q'))
    where s_q' sums exp(-lam*d) over the neighbors of i currently carrying
    mark q'. Computed in log space with max subtraction.
    """
    _check_consistent(pattern, graph, params)
    if not 0 <= i < pattern.n:
        raise IndexError(f"point index {i} out of range for n={pattern.n}")
    s = neighbor_mark_weights(pattern.marks, graph, params.lam, i, params.Q)
    e = params.omega + params.theta @ s
    e -= e.min()
    p = np.exp(-e)
    return p / p.sum()


def _enumerated_energies(
    pattern: PointPattern, graph: InteractionGraph, params: ModelParams, chunk: int = 1 << 14
):
    """Yield V over all Q^n mark configurations, in chunks."""
    n, Q = pattern.n, params.Q
    total = Q**n
    ei, ej = graph.edge_i, graph.edge_j
    w = np.exp(-params.lam * graph.edge_d) if graph.n_edges else np.empty(0)
    powers = Q ** np.arange(n, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // powers[None, :]) % Q  # marks - 1, shape (m, n)
        V = params.omega[digits].sum(axis=1)
        if graph.n_edges:
            V = V + (params.theta[digits[:, ei], digits[:, ej]] * w[None, :]).sum(axis=1)
        yield idx, V


def exact_log_normalizing_constant(
    pattern: PointPattern, graph: InteractionGraph, params: ModelParams
) -> float:
    """log C by full enumeration over Q^n states (test oracle, small n only)."""
    _check_consistent(pattern, graph, params)
    if params.Q**pattern.n > _ENUM_STATE_LIMIT:
        raise ValueError(
            f"state space Q^n = {params.Q}^{pattern.n} exceeds {_ENUM_STATE_LIMIT:.0e}; "
            "exact enumeration is a small-instance oracle, not a production path"
        )
    parts = [logsumexp(-V) for _, V in _enumerated_energies(pattern, graph, params)]
    return float(logsumexp(parts))


def exact_state_log_probs(
    pattern: PointPattern, graph: InteractionGraph, params: ModelParams
) -> np.ndarray:
    """log p for every mark configuration, indexed by sum (z_i - 1) Q^i.

    Same enumeration limit as :func:`exact_log_normalizing_constant`.
    """
    _check_consistent(pattern, graph, params)
    total = params.Q**pattern.n
    if total > _ENUM_STATE_LIMIT:
        raise ValueError("state space too large for enumeration")
    out = np.empty(total)
    for idx, V in _enumerated_energies(pattern, graph, params):
        out[idx] = -V
    return out - logsumexp(out)

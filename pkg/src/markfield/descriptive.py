"""Empirical mark connection functions and cutoff guidance.

The mark connection function at distance d is the empirical probability
that the two endpoints of a pair at that distance carry a given unordered
mark combination. Rising same-mark curves near zero signal attraction,
rising cross-mark curves repulsion; the distance at which the curves
flatten out is evidence for the interaction cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import _grid_pair_blocks
from .pattern import PointPattern

__all__ = ["McfEstimate", "CutoffSuggestion", "mcf", "suggest_c"]

DEFAULT_D_MAX = 0.3
DEFAULT_N_BINS = 60
CUTOFF_CAP = 0.1


def _pair_labels(Q: int) -> list[tuple[int, int]]:
    return [(q, qp) for q in range(1, Q + 1) for qp in range(q, Q + 1)]


@dataclass(frozen=True)
class McfEstimate:
    """Binned pair-mark frequencies.

    ``values[k, p]`` is the fraction of pairs in distance bin k whose
    unordered mark pair is ``pairs[p]``; rows of nonempty bins sum to one
    and empty bins are NaN. ``counts`` holds the raw per-bin pair counts.
    """

    bin_edges: np.ndarray  # (n_bins + 1,)
    pairs: list[tuple[int, int]]  # unordered (q, q'), q <= q'
    counts: np.ndarray  # (n_bins, n_pairs) integer counts
    values: np.ndarray  # (n_bins, n_pairs), NaN where the bin is empty

    @property
    def bin_mid(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def pair_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def curve(self, q: int, qp: int) -> np.ndarray:
        """Values for the unordered mark pair {q, q'} across bins."""
        key = (min(q, qp), max(q, qp))
        return self.values[:, self.pairs.index(key)]


def mcf(
    pattern: PointPattern,
    d_max: float = DEFAULT_D_MAX,
    n_bins: int = DEFAULT_N_BINS,
) -> McfEstimate:
    """Bin all unordered point pairs with d <= d_max by distance.

    Bin k covers [k*w, (k+1)*w) with w = d_max / n_bins; a pair at exactly
    d_max lands in the last bin. Within each bin the value for mark pair
    {q, q'} is its share of the bin's pairs. Pair enumeration uses the same
    grid-bucket index as graph construction, so no pair list is ever
    materialized globally.
    """
    if not d_max > 0:
        raise ValueError("d_max must be positive")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    Q = pattern.Q
    pairs = _pair_labels(Q)
    width = d_max / n_bins
    counts = np.zeros((n_bins, len(pairs)), dtype=np.int64)
    marks = pattern.marks

    for pi, pj, d in _grid_pair_blocks(pattern.xs, pattern.ys, d_max):
        bins = np.minimum((d / width).astype(np.int64), n_bins - 1)
        a = np.minimum(marks[pi], marks[pj])
        b = np.maximum(marks[pi], marks[pj])
        # column of unordered pair (a, b) in the q <= q' enumeration
        cols = (a - 1) * (2 * Q - a + 2) // 2 + (b - a)
        np.add.at(counts, (bins, cols), 1)

    totals = counts.sum(axis=1).astype(np.float64)
    with np.errstate(invalid="ignore", divide="ignore"):
        values = counts / totals[:, None]
    values[totals == 0] = np.nan
    edges = np.linspace(0.0, d_max, n_bins + 1)
    return McfEstimate(bin_edges=edges, pairs=pairs, counts=counts, values=values)


@dataclass(frozen=True)
class CutoffSuggestion:
    """A suggested interaction cutoff plus the evidence behind it.

    ``converged`` is False when no flattening point was found within the
    estimate's range, in which case the capped default is returned;
    ``capped`` reports that the flattening distance exceeded the cap.
    ``per_pair`` maps each mark pair to the bin midpoint after which its
    curve stays inside the tolerance band around its tail mean (NaN when
    that never happens).
    """

    c: float
    converged: bool
    capped: bool
    tolerance: float
    cap: float
    per_pair: dict[tuple[int, int], float]
    tail_means: dict[tuple[int, int], float]

    def __float__(self) -> float:
        return self.c


def suggest_c(
    estimate: McfEstimate,
    tolerance: float = 0.02,
    cap: float = CUTOFF_CAP,
) -> CutoffSuggestion:
    """Pick the smallest distance after which every curve has flattened.

    For each mark-pair curve, the tail mean is taken over the last fifth of
    the nonempty bins; the curve's convergence point is the first bin from
    which it never leaves the tolerance band around that mean. The
    suggestion is the largest convergence midpoint across curves, capped at
    ``cap``; if any curve never settles, the capped default is returned
    with ``converged=False``.
    """
    mids = estimate.bin_mid
    per_pair: dict[tuple[int, int], float] = {}
    tail_means: dict[tuple[int, int], float] = {}
    converged = True
    worst = 0.0
    for col, pair in enumerate(estimate.pairs):
        curve = estimate.values[:, col]
        ok = ~np.isnan(curve)
        if ok.sum() < 2:
            # A curve with almost no pairs carries no evidence either way.
            per_pair[pair] = float("nan")
            tail_means[pair] = float("nan")
            continue
        vals = curve[ok]
        pos = mids[ok]
        tail = max(2, len(vals) // 5)
        tail_mean = float(vals[-tail:].mean())
        tail_means[pair] = tail_mean
        inside = np.abs(vals - tail_mean) <= tolerance
        # first index from which the curve stays inside the band
        settle = len(vals)
        for k in range(len(vals) - 1, -1, -1):
            if not inside[k]:
                break
            settle = k
        if settle >= len(vals):
            per_pair[pair] = float("nan")
            converged = False
            continue
        per_pair[pair] = float(pos[settle])
        worst = max(worst, float(pos[settle]))
    if not per_pair or all(np.isnan(v) for v in per_pair.values()):
        converged = False
    c = cap if not converged else min(worst, cap)
    return CutoffSuggestion(
        c=float(c),
        converged=converged,
        capped=bool(not converged or worst > cap),
        tolerance=tolerance,
        cap=cap,
        per_pair=per_pair,
        tail_means=tail_means,
    )

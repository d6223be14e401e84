"""Thresholded interaction network over a point pattern.

Pairs of points closer than a cutoff ``c`` form the edges of a sparse
undirected graph; each edge stores its Euclidean distance. Construction
uses a uniform grid of cell side ``c``, so only points in adjacent cells
are ever compared and the expected cost is O(n * mean neighbors) rather
than the all-pairs O(n^2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .pattern import PointPattern

__all__ = ["InteractionGraph", "build_graph", "DEFAULT_CUTOFF", "MAX_CUTOFF"]

DEFAULT_CUTOFF = 0.1
MAX_CUTOFF = float(np.sqrt(2.0))  # unit-square diameter; larger cutoffs change nothing


@dataclass(frozen=True)
class InteractionGraph:
    """Sparse neighbor structure: edge arrays plus a CSR adjacency view.

    ``edge_i < edge_j`` for every stored edge and each unordered pair
    appears exactly once. ``indptr``/``indices``/``dists`` form the
    symmetric adjacency (both directions of every edge), which is what the
    samplers iterate over; ``adj_edge`` maps each adjacency entry back to
    its source edge index so per-edge quantities can be gathered onto the
    adjacency layout. Immutable after construction.
    """

    n: int
    c: float
    edge_i: np.ndarray
    edge_j: np.ndarray
    edge_d: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    dists: np.ndarray
    adj_edge: np.ndarray

    def __post_init__(self) -> None:
        for arr in (
            self.edge_i, self.edge_j, self.edge_d,
            self.indptr, self.indices, self.dists, self.adj_edge,
        ):
            arr.flags.writeable = False

    @property
    def n_edges(self) -> int:
        return len(self.edge_i)

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices and distances of point ``i`` (0-based)."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.dists[lo:hi]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Iterate unordered edges as (i, j, d) with i < j."""
        for i, j, d in zip(self.edge_i, self.edge_j, self.edge_d):
            yield int(i), int(j), float(d)


def _grid_pair_blocks(xs: np.ndarray, ys: np.ndarray, cutoff: float):
    """Yield (i, j, d) array blocks for all unordered pairs with d <= cutoff.

    Points are bucketed into square cells of side ``cutoff``; within-cell
    pairs and pairs against the four "forward" neighbor cells cover every
    candidate pair exactly once.
    """
    n = len(xs)
    ncell = max(1, int(np.ceil(1.0 / cutoff)))
    cx = np.minimum((xs / cutoff).astype(np.int64), ncell - 1)
    cy = np.minimum((ys / cutoff).astype(np.int64), ncell - 1)
    cell_of = cx * ncell + cy
    order = np.argsort(cell_of, kind="stable")
    sorted_cells = cell_of[order]
    starts = np.flatnonzero(np.r_[True, sorted_cells[1:] != sorted_cells[:-1]])
    bounds = np.r_[starts, n]
    members = {int(sorted_cells[s]): order[s:e] for s, e in zip(bounds[:-1], bounds[1:])}

    # Forward offsets (dx, dy): east, north-west, north, north-east. Together
    # with within-cell pairs this enumerates each adjacent cell pair once.
    forward = ((1, 0), (-1, 1), (0, 1), (1, 1))
    for cell, mem in members.items():
        ax, ay = divmod(cell, ncell)
        if len(mem) > 1:
            ii, jj = np.triu_indices(len(mem), k=1)
            pi, pj = mem[ii], mem[jj]
            d = np.hypot(xs[pi] - xs[pj], ys[pi] - ys[pj])
            keep = d <= cutoff
            if keep.any():
                yield pi[keep], pj[keep], d[keep]
        for dx, dy in forward:
            bx, by = ax + dx, ay + dy
            if not (0 <= bx < ncell and 0 <= by < ncell):
                continue
            other = members.get(bx * ncell + by)
            if other is None:
                continue
            pi = np.repeat(mem, len(other))
            pj = np.tile(other, len(mem))
            d = np.hypot(xs[pi] - xs[pj], ys[pi] - ys[pj])
            keep = d <= cutoff
            if keep.any():
                yield pi[keep], pj[keep], d[keep]


def build_graph(pattern: PointPattern, c: float = DEFAULT_CUTOFF) -> InteractionGraph:
    """Build the interaction network with inclusive cutoff ``d <= c``."""
    if not (np.isfinite(c) and 0.0 < c <= MAX_CUTOFF):
        raise ValueError(f"cutoff c must lie in (0, {MAX_CUTOFF:.4f}]")
    xs, ys = pattern.xs, pattern.ys
    n = pattern.n

    blocks_i, blocks_j, blocks_d = [], [], []
    for pi, pj, d in _grid_pair_blocks(xs, ys, c):
        blocks_i.append(pi)
        blocks_j.append(pj)
        blocks_d.append(d)
    if blocks_i:
        ei = np.concatenate(blocks_i)
        ej = np.concatenate(blocks_j)
        ed = np.concatenate(blocks_d)
    else:
        ei = np.empty(0, dtype=np.int64)
        ej = np.empty(0, dtype=np.int64)
        ed = np.empty(0, dtype=np.float64)

    # Normalize to i < j and sort edges for a canonical representation.
    lo = np.minimum(ei, ej)
    hi = np.maximum(ei, ej)
    order = np.lexsort((hi, lo))
    ei, ej, ed = lo[order], hi[order], ed[order]

    m = len(ei)
    src = np.concatenate([ei, ej])
    dst = np.concatenate([ej, ei])
    both_d = np.concatenate([ed, ed])
    edge_ids = np.concatenate([np.arange(m, dtype=np.int64)] * 2)
    adj_order = np.argsort(src, kind="stable")
    indices = dst[adj_order]
    dists = both_d[adj_order]
    adj_edge = edge_ids[adj_order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    return InteractionGraph(
        n=n, c=float(c), edge_i=ei, edge_j=ej, edge_d=ed,
        indptr=indptr, indices=indices, dists=dists, adj_edge=adj_edge,
    )

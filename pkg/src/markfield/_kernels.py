"""Compiled inner loops for mark resampling.

The single-site Gibbs scan is the hot path of both synthetic mark
generation and the auxiliary draws inside the posterior sampler, so it is
JIT-compiled. All randomness is passed in as precomputed arrays; the kernel
itself is deterministic.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def gibbs_scan(z, indptr, indices, weights, omega, theta, sites, uniforms):
    """Resample marks in place along the given site visit order.

    z        : int64 marks in 1..Q, modified in place.
    indptr, indices : CSR adjacency of the interaction graph.
    weights  : exp(-lam * d) per adjacency entry (aligned with indices).
    omega    : (Q,) first-order intensities.
    theta    : (Q, Q) symmetric second-order intensities.
    sites    : visit order, one entry per single-site update.
    uniforms : one U(0,1) draw per visit, consumed in order.
    """
    Q = omega.shape[0]
    s = np.empty(Q)
    p = np.empty(Q)
    for k in range(sites.shape[0]):
        i = sites[k]
        for q in range(Q):
            s[q] = 0.0
        for a in range(indptr[i], indptr[i + 1]):
            s[z[indices[a]] - 1] += weights[a]
        # energy per candidate mark, shifted by the minimum for stability
        emin = np.inf
        for q in range(Q):
            acc = omega[q]
            for qp in range(Q):
                acc += theta[q, qp] * s[qp]
            p[q] = acc
            if acc < emin:
                emin = acc
        tot = 0.0
        for q in range(Q):
            p[q] = np.exp(-(p[q] - emin))
            tot += p[q]
        u = uniforms[k] * tot
        acc = 0.0
        new = Q
        for q in range(Q):
            acc += p[q]
            if u <= acc:
                new = q + 1
                break
        z[i] = new

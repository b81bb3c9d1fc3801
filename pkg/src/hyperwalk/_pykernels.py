"""Pure-Python kernels; reference semantics for the compiled twin.

Each walk step consumes exactly one uniform ``u``: ``u < gamma`` jumps to
the reset node, otherwise ``(u - gamma) / (1 - gamma)`` is inverted through
the cumulative weights of the current row.
"""
from bisect import bisect_right

import numpy as np


class WalkGraph:
    __slots__ = ("indptr", "indices", "cdf")

    def __init__(self, indptr, indices, cdf):
        self.indptr = [int(x) for x in indptr]
        self.indices = [int(x) for x in indices]
        self.cdf = [float(x) for x in cdf]


def prepare(indptr, indices, cdf):
    return WalkGraph(indptr, indices, cdf)


def hit_walk(g, reset, gamma, state, target, uniforms):
    """Walk until ``target`` is entered. Returns ``(consumed, state, hit)``."""
    indptr, indices, cdf = g.indptr, g.indices, g.cdf
    scale = 1.0 - gamma
    k = 0
    for u in uniforms.tolist():
        k += 1
        if u < gamma:
            state = reset
        else:
            if gamma > 0.0:
                u = (u - gamma) / scale
            lo = indptr[state]
            hi = indptr[state + 1]
            pos = bisect_right(cdf, u, lo, hi)
            if pos >= hi:
                pos = hi - 1
            state = indices[pos]
        if state == target:
            return k, state, True
    return k, state, False


def cover_walk(g, reset, gamma, state, visited, remaining, uniforms):
    """Walk until every node is visited. ``visited`` (uint8) is updated in place.

    Returns ``(consumed, state, remaining)``.
    """
    indptr, indices, cdf = g.indptr, g.indices, g.cdf
    scale = 1.0 - gamma
    seen = visited.tolist()
    k = 0
    for u in uniforms.tolist():
        if remaining == 0:
            break
        k += 1
        if u < gamma:
            state = reset
        else:
            if gamma > 0.0:
                u = (u - gamma) / scale
            lo = indptr[state]
            hi = indptr[state + 1]
            pos = bisect_right(cdf, u, lo, hi)
            if pos >= hi:
                pos = hi - 1
            state = indices[pos]
        if not seen[state]:
            seen[state] = 1
            remaining -= 1
    visited[:] = seen
    return k, state, remaining


def fixed_walk(g, reset, gamma, state, uniforms):
    """Take exactly ``len(uniforms)`` steps; return the final node."""
    k, state, _ = hit_walk(g, reset, gamma, state, -1, uniforms)
    return state


def deconvolve(p_ij, p_jj, same_node):
    # F(0) = 0 in both cases; delta_ij only touches t = 0.
    n = p_ij.shape[0]
    F = np.zeros(n)
    for t in range(1, n):
        F[t] = p_ij[t] - np.dot(p_jj[t - 1:0:-1], F[1:t])
    return F

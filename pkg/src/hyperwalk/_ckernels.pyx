# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pykernels``; must stay bit-for-bit equivalent."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef class WalkGraph:
    cdef public cnp.int64_t[::1] indptr
    cdef public cnp.int64_t[::1] indices
    cdef public double[::1] cdf

    def __init__(self, indptr, indices, cdf):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.cdf = np.ascontiguousarray(cdf, dtype=np.float64)


def prepare(indptr, indices, cdf):
    return WalkGraph(indptr, indices, cdf)


cdef inline Py_ssize_t _step(const cnp.int64_t* indptr, const cnp.int64_t* indices,
                             const double* cdf, Py_ssize_t reset, double gamma,
                             double scale, Py_ssize_t state, double u) noexcept nogil:
    cdef Py_ssize_t lo, hi, mid, end
    if u < gamma:
        return reset
    if gamma > 0.0:
        u = (u - gamma) / scale
    lo = indptr[state]
    hi = indptr[state + 1]
    end = hi
    # bisect_right over cdf[lo:hi]
    while lo < hi:
        mid = (lo + hi) // 2
        if u < cdf[mid]:
            hi = mid
        else:
            lo = mid + 1
    if lo >= end:
        lo = end - 1
    return indices[lo]


def hit_walk(WalkGraph g, Py_ssize_t reset, double gamma, Py_ssize_t state,
             Py_ssize_t target, const double[::1] uniforms):
    cdef Py_ssize_t k = 0, n = uniforms.shape[0]
    cdef double scale = 1.0 - gamma
    cdef bint hit = False
    cdef const cnp.int64_t* ip = &g.indptr[0]
    cdef const cnp.int64_t* ix = &g.indices[0]
    cdef const double* cd = &g.cdf[0]
    with nogil:
        while k < n:
            state = _step(ip, ix, cd, reset, gamma, scale, state, uniforms[k])
            k += 1
            if state == target:
                hit = True
                break
    return k, state, hit


def cover_walk(WalkGraph g, Py_ssize_t reset, double gamma, Py_ssize_t state,
               cnp.uint8_t[::1] visited, Py_ssize_t remaining, const double[::1] uniforms):
    cdef Py_ssize_t k = 0, n = uniforms.shape[0]
    cdef double scale = 1.0 - gamma
    cdef const cnp.int64_t* ip = &g.indptr[0]
    cdef const cnp.int64_t* ix = &g.indices[0]
    cdef const double* cd = &g.cdf[0]
    with nogil:
        while k < n and remaining > 0:
            state = _step(ip, ix, cd, reset, gamma, scale, state, uniforms[k])
            k += 1
            if not visited[state]:
                visited[state] = 1
                remaining -= 1
    return k, state, remaining


def fixed_walk(WalkGraph g, Py_ssize_t reset, double gamma, Py_ssize_t state,
               const double[::1] uniforms):
    cdef Py_ssize_t k, n = uniforms.shape[0]
    cdef double scale = 1.0 - gamma
    cdef const cnp.int64_t* ip = &g.indptr[0]
    cdef const cnp.int64_t* ix = &g.indices[0]
    cdef const double* cd = &g.cdf[0]
    with nogil:
        for k in range(n):
            state = _step(ip, ix, cd, reset, gamma, scale, state, uniforms[k])
    return state


def deconvolve(const double[::1] p_ij, const double[::1] p_jj, bint same_node):
    cdef Py_ssize_t n = p_ij.shape[0], t, s
    cdef double acc
    F = np.zeros(n)
    cdef double[::1] f = F
    with nogil:
        for t in range(1, n):
            acc = p_ij[t]
            for s in range(1, t):
                acc = acc - p_jj[t - s] * f[s]
            f[t] = acc
    return F

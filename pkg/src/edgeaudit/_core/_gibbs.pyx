# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs sweep; same contract as ``_fallback.gibbs_sweep``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def gibbs_sweep(cnp.uint8_t[:, :, ::1] adj,
                const cnp.int64_t[::1] rows,
                const cnp.int64_t[::1] cols,
                const double[:, ::1] table,
                const double[:, ::1] uniforms):
    cdef Py_ssize_t chains = adj.shape[0]
    cdef Py_ssize_t n = adj.shape[1]
    cdef Py_ssize_t m = rows.shape[0]
    cdef Py_ssize_t c, k, l, i, j
    cdef long s, t
    cdef cnp.uint8_t new
    if uniforms.shape[0] != chains or uniforms.shape[1] != m:
        raise ValueError("uniforms must have shape (chains, edges)")
    with nogil:
        for c in range(chains):
            for k in range(m):
                i = rows[k]
                j = cols[k]
                s = 0
                t = 0
                for l in range(n):
                    s += adj[c, i, l] + adj[c, j, l]
                    t += adj[c, i, l] & adj[c, j, l]
                s -= 2 * adj[c, i, j]
                new = 1 if uniforms[c, k] < table[s, t] else 0
                adj[c, i, j] = new
                adj[c, j, i] = new

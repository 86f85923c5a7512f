"""numpy implementation of the Gibbs sweep, vectorized across chains."""

import numpy as np


def gibbs_sweep(adj, rows, cols, table, uniforms):
    """One lexicographic sweep of single-edge Gibbs updates, in place.

    adj       (chains, n, n) uint8 symmetric adjacency, zero diagonal
    rows/cols 0-based endpoints of the edges, in sweep order
    table     table[s, t] = Pr(edge on | rest) when the two-star change is s
              and the triangle change is t
    uniforms  (chains, len(rows)) draws in [0, 1)
    """
    for k in range(rows.shape[0]):
        i = rows[k]
        j = cols[k]
        ai = adj[:, i, :]
        aj = adj[:, j, :]
        cur = adj[:, i, j].astype(np.int64)
        s = ai.sum(axis=1, dtype=np.int64) + aj.sum(axis=1, dtype=np.int64) - 2 * cur
        t = (ai & aj).sum(axis=1, dtype=np.int64)
        new = (uniforms[:, k] < table[s, t]).astype(np.uint8)
        adj[:, i, j] = new
        adj[:, j, i] = new

"""Compiled Metropolis kernels.

Each read reseeds the generator from its own seed, so the serial and the
thread-parallel kernels return identical states.
"""

import os

import numpy as np
from numba import config, njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    config.THREADING_LAYER = "workqueue"


@njit(cache=True)
def _anneal_read(h, J, indptr, nbrs, eidx, betas, seed, read_sigma, out):
    np.random.seed(seed)
    n = h.size
    hr = h.copy()
    Jr = J.copy()
    if read_sigma > 0.0:
        for i in range(n):
            hr[i] += read_sigma * np.random.standard_normal()
        for e in range(Jr.size):
            Jr[e] += read_sigma * np.random.standard_normal()
    s = np.empty(n, np.int8)
    for i in range(n):
        s[i] = 1 if np.random.random() < 0.5 else -1
    for b in range(betas.size):
        beta = betas[b]
        for i in range(n):
            f = hr[i]
            for k in range(indptr[i], indptr[i + 1]):
                f += Jr[eidx[k]] * s[nbrs[k]]
            dE = -2.0 * s[i] * f
            if dE <= 0.0 or np.random.random() < np.exp(-beta * dE):
                s[i] = -s[i]
    for i in range(n):
        out[i] = s[i]


@njit(cache=True)
def anneal_serial(h, J, indptr, nbrs, eidx, betas, seeds, read_sigma, out):
    for r in range(seeds.size):
        _anneal_read(h, J, indptr, nbrs, eidx, betas, seeds[r], read_sigma, out[r])


@njit(cache=True, parallel=True)
def anneal_parallel(h, J, indptr, nbrs, eidx, betas, seeds, read_sigma, out):
    for r in prange(seeds.size):
        _anneal_read(h, J, indptr, nbrs, eidx, betas, seeds[r], read_sigma, out[r])


def adjacency(n, edges):
    """CSR neighbour lists: for node ``i``, ``nbrs[indptr[i]:indptr[i+1]]`` with coupler ids ``eidx``."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    m = edges.shape[0]
    heads = np.concatenate([edges[:, 0], edges[:, 1]])
    tails = np.concatenate([edges[:, 1], edges[:, 0]])
    ids = np.concatenate([np.arange(m), np.arange(m)])
    order = np.lexsort((tails, heads))
    counts = np.bincount(heads, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, tails[order].astype(np.int64), ids[order].astype(np.int64)

"""Compiled counting kernels for the sampling / statistic hot loop.

Everything here operates on raw edge arrays ``(ei, ej)`` with ``ei < ej``,
sorted lexicographically, as produced by :func:`netboot.graphs.sample_network`.
Triangle-family counts use per-node neighbour bitsets and a hardware popcount,
which keeps a full bootstrap replicate (sample + count) in the tens of
microseconds at the n = 300..600 scale the experiments run at.
"""

from __future__ import annotations

import numba
import numpy as np
from llvmlite import ir
from numba.extending import intrinsic


@intrinsic
def _popcnt64(typingctx, v):
    """Hardware population count on a uint64 (llvm.ctpop)."""
    sig = numba.types.uint64(numba.types.uint64)

    def codegen(context, builder, signature, args):
        (val,) = args
        fn = builder.module.declare_intrinsic("llvm.ctpop", [ir.IntType(64)])
        return builder.call(fn, [val])

    return sig, codegen


@numba.njit(cache=True, nogil=True)
def _neighbor_bits(n, ei, ej, nw):
    bits = np.zeros(n * nw, np.uint64)
    one = np.uint64(1)
    for t in range(ei.shape[0]):
        a = np.int64(ei[t])
        b = np.int64(ej[t])
        bits[a * nw + (b >> 6)] |= one << np.uint64(b & 63)
        bits[b * nw + (a >> 6)] |= one << np.uint64(a & 63)
    return bits


@numba.njit(cache=True, nogil=True)
def degrees(n, ei, ej):
    deg = np.zeros(n, np.int64)
    for t in range(ei.shape[0]):
        deg[ei[t]] += 1
        deg[ej[t]] += 1
    return deg


@numba.njit(cache=True, nogil=True)
def triangle_count(n, ei, ej):
    """Number of triangles; each counted once."""
    nw = (n + 63) >> 6
    bits = _neighbor_bits(n, ei, ej, nw)
    total = np.uint64(0)
    for t in range(ei.shape[0]):
        oa = np.int64(ei[t]) * nw
        ob = np.int64(ej[t]) * nw
        for w in range(nw):
            total += _popcnt64(bits[oa + w] & bits[ob + w])
    # each triangle is seen once per edge
    return np.int64(total) // 3


@numba.njit(cache=True, nogil=True)
def triangles_and_paths(n, ei, ej):
    """(triangle count, number of 2-paths Σ_i C(d_i, 2))."""
    tri = triangle_count(n, ei, ej)
    deg = degrees(n, ei, ej)
    paths = np.int64(0)
    for i in range(n):
        d = deg[i]
        paths += d * (d - 1) // 2
    return tri, paths


@numba.njit(cache=True, nogil=True)
def rooted_triangle_count(n, ei, ej, root):
    """Triangles containing ``root`` = edges within its neighbourhood."""
    nw = (n + 63) >> 6
    mask = np.zeros(nw, np.uint64)
    one = np.uint64(1)
    for t in range(ei.shape[0]):
        if ei[t] == root:
            b = np.int64(ej[t])
            mask[b >> 6] |= one << np.uint64(b & 63)
        elif ej[t] == root:
            a = np.int64(ei[t])
            mask[a >> 6] |= one << np.uint64(a & 63)
    cnt = np.int64(0)
    for t in range(ei.shape[0]):
        a = np.int64(ei[t])
        b = np.int64(ej[t])
        if (mask[a >> 6] >> np.uint64(a & 63)) & one and (
            mask[b >> 6] >> np.uint64(b & 63)
        ) & one:
            cnt += 1
    return cnt


@numba.njit(cache=True, nogil=True)
def csr_arrays(n, ei, ej):
    """Symmetric CSR (indptr, indices) with each neighbour list sorted."""
    m = ei.shape[0]
    deg = np.zeros(n, np.int64)
    for t in range(m):
        deg[ei[t]] += 1
        deg[ej[t]] += 1
    indptr = np.zeros(n + 1, np.int64)
    for i in range(n):
        indptr[i + 1] = indptr[i] + deg[i]
    fill = indptr[:-1].copy()
    indices = np.empty(2 * m, np.int32)
    # first pass appends forward neighbours in increasing order (edges are
    # lexicographically sorted), second pass appends backward neighbours,
    # also increasing; a stable merge of the two passes would be sorted, but
    # interleaving is not, so sort each list once at the end.
    for t in range(m):
        a, b = ei[t], ej[t]
        indices[fill[a]] = b
        fill[a] += 1
        indices[fill[b]] = a
        fill[b] += 1
    for i in range(n):
        indices[indptr[i] : indptr[i + 1]].sort()
    return indptr, indices

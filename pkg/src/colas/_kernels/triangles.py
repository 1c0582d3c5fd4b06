"""Per-node triangle counts T_i on a sorted CSR adjacency."""

import numpy as np

from .._accel import njit, use_numba


@njit(cache=True)
def _node_triangles_nb(indptr, indices):
    n = indptr.shape[0] - 1
    tri = np.zeros(n, dtype=np.int64)
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if v <= u:
                continue
            # merge the tails of N(u) and N(v) above v: each triangle u<v<w once
            a = p + 1
            b = indptr[v]
            bend = indptr[v + 1]
            while b < bend and indices[b] <= v:
                b += 1
            aend = indptr[u + 1]
            while a < aend and b < bend:
                x = indices[a]
                y = indices[b]
                if x == y:
                    tri[u] += 1
                    tri[v] += 1
                    tri[x] += 1
                    a += 1
                    b += 1
                elif x < y:
                    a += 1
                else:
                    b += 1
    return tri


def _node_triangles_np(indptr, indices):
    from scipy import sparse

    n = len(indptr) - 1
    data = np.ones(len(indices), dtype=np.int64)
    A = sparse.csr_matrix((data, indices, indptr), shape=(n, n))
    # (A @ A) restricted to A's pattern counts common neighbours per edge
    common = (A @ A).multiply(A)
    return np.asarray(common.sum(axis=1)).ravel().astype(np.int64) // 2


def node_triangles(indptr, indices):
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if use_numba():
        return _node_triangles_nb(indptr, indices)
    return _node_triangles_np(indptr, indices)

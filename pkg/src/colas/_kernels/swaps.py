"""Greedy double-edge swaps toward a target endpoint assortativity.

Degrees never change under a swap, so r is an affine function of
P = sum over edges of D_u D_v; the kernels track P exactly as an integer.
Proposals (pairs of edge slots) are drawn by the caller so both backends
consume the same random numbers and return the same edge array.
"""

import numpy as np

from .._accel import njit, use_numba

_EMPTY = -1
_TOMB = -2


@njit(cache=True)
def _slot(key, mask):
    h = np.uint64(key) * np.uint64(0x9E3779B97F4A7C15)
    return np.int64(h >> np.uint64(33)) & mask


@njit(cache=True)
def _find(table, key, mask):
    s = _slot(key, mask)
    while True:
        t = table[s]
        if t == key:
            return True
        if t == _EMPTY:
            return False
        s = (s + 1) & mask


@njit(cache=True)
def _insert(table, key, mask):
    """Returns 1 when a fresh (never used) slot was consumed."""
    s = _slot(key, mask)
    while table[s] != _EMPTY and table[s] != _TOMB:
        s = (s + 1) & mask
    fresh = 1 if table[s] == _EMPTY else 0
    table[s] = key
    return fresh


@njit(cache=True)
def _rebuild(table, edges, n, mask):
    table[:] = _EMPTY
    for k in range(edges.shape[0]):
        _insert(table, edges[k, 0] * n + edges[k, 1], mask)
    return edges.shape[0]


@njit(cache=True)
def _remove(table, key, mask):
    s = _slot(key, mask)
    while table[s] != key:
        s = (s + 1) & mask
    table[s] = _TOMB


@njit(cache=True)
def _swap_nb(edges, deg, n, p0, e, mu, den, target, tol, proposals, trace):
    m = edges.shape[0]
    size = 1
    while size < 4 * m + 16:
        size *= 2
    mask = size - 1
    table = np.empty(size, dtype=np.int64)
    used = _rebuild(table, edges, n, mask)
    p = p0
    r = (p / e - mu * mu) / den
    acc = 0
    tried = 0
    if abs(r - target) <= tol:
        return p, acc, tried
    for t in range(proposals.shape[0]):
        tried += 1
        x = proposals[t, 0]
        y = proposals[t, 1]
        if x == y:
            continue
        a = edges[x, 0]
        b = edges[x, 1]
        c = edges[y, 0]
        d = edges[y, 1]
        base = deg[a] * deg[b] + deg[c] * deg[d]
        best_gap = abs(r - target)
        best = -1
        best_dp = 0
        for o in range(2):
            if o == 0:
                u1, v1, u2, v2 = a, c, b, d
            else:
                u1, v1, u2, v2 = a, d, b, c
            if u1 == v1 or u2 == v2:
                continue
            k1 = min(u1, v1) * n + max(u1, v1)
            k2 = min(u2, v2) * n + max(u2, v2)
            if k1 == k2 or _find(table, k1, mask) or _find(table, k2, mask):
                continue
            dp = deg[u1] * deg[v1] + deg[u2] * deg[v2] - base
            gap = abs((((p + dp) / e - mu * mu) / den) - target)
            if gap < best_gap:
                best_gap = gap
                best = o
                best_dp = dp
        if best < 0:
            continue
        if best == 0:
            u1, v1, u2, v2 = a, c, b, d
        else:
            u1, v1, u2, v2 = a, d, b, c
        _remove(table, a * n + b, mask)
        _remove(table, c * n + d, mask)
        edges[x, 0] = min(u1, v1)
        edges[x, 1] = max(u1, v1)
        edges[y, 0] = min(u2, v2)
        edges[y, 1] = max(u2, v2)
        used += _insert(table, edges[x, 0] * n + edges[x, 1], mask)
        used += _insert(table, edges[y, 0] * n + edges[y, 1], mask)
        # tombstones never free a slot; rebuild before probes can run forever
        if used > size // 2:
            used = _rebuild(table, edges, n, mask)
        p += best_dp
        r = (p / e - mu * mu) / den
        trace[acc] = r
        acc += 1
        if best_gap <= tol:
            break
    return p, acc, tried


def _swap_py(edges, deg, n, p0, e, mu, den, target, tol, proposals, trace):
    present = set((edges[:, 0] * n + edges[:, 1]).tolist())
    deg = deg.tolist()
    p = int(p0)
    r = (p / e - mu * mu) / den
    acc = tried = 0
    if abs(r - target) <= tol:
        return p, acc, tried
    for x, y in proposals.tolist():
        tried += 1
        if x == y:
            continue
        a, b = int(edges[x, 0]), int(edges[x, 1])
        c, d = int(edges[y, 0]), int(edges[y, 1])
        base = deg[a] * deg[b] + deg[c] * deg[d]
        best, best_gap, best_dp = None, abs(r - target), 0
        for u1, v1, u2, v2 in ((a, c, b, d), (a, d, b, c)):
            if u1 == v1 or u2 == v2:
                continue
            k1 = min(u1, v1) * n + max(u1, v1)
            k2 = min(u2, v2) * n + max(u2, v2)
            if k1 == k2 or k1 in present or k2 in present:
                continue
            dp = deg[u1] * deg[v1] + deg[u2] * deg[v2] - base
            gap = abs(((p + dp) / e - mu * mu) / den - target)
            if gap < best_gap:
                best, best_gap, best_dp = (u1, v1, u2, v2), gap, dp
        if best is None:
            continue
        u1, v1, u2, v2 = best
        present.discard(a * n + b)
        present.discard(c * n + d)
        edges[x] = (min(u1, v1), max(u1, v1))
        edges[y] = (min(u2, v2), max(u2, v2))
        present.add(int(edges[x, 0]) * n + int(edges[x, 1]))
        present.add(int(edges[y, 0]) * n + int(edges[y, 1]))
        p += best_dp
        r = (p / e - mu * mu) / den
        trace[acc] = r
        acc += 1
        if best_gap <= tol:
            break
    return p, acc, tried


def greedy_swaps(edges, deg, n, p0, e, mu, den, target, tol, proposals):
    """Mutates ``edges`` in place; returns (P, accepted, attempted, r-trace)."""
    trace = np.empty(len(proposals), dtype=np.float64)
    fn = _swap_nb if use_numba() else _swap_py
    p, acc, tried = fn(edges, deg, np.int64(n), np.int64(p0), float(e), float(mu), float(den),
                       float(target), float(tol), proposals, trace)
    return int(p), int(acc), int(tried), trace[:acc]

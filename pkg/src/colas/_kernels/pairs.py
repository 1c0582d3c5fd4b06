"""Radius-bounded pair enumeration on the unit torus.

Both backends bucket the target set into a uniform grid whose cells are at
least ``radius`` wide, then scan the 3^d surrounding cells of every query
point.  When the grid would be narrower than 3 cells the neighbourhood
wraps onto itself, so we scan everything instead.

Output is canonical: ``i < j`` and lexicographically sorted, so the two
backends return identical arrays.
"""

import numpy as np

from .._accel import njit, use_numba


def grid_width(radius, n_points, d):
    width = int(np.floor(1.0 / radius)) if radius > 0 else 1 << 30
    # cap the cell count at ~4 cells per point; wider cells stay correct
    width = min(width, max(1, int(np.floor((4.0 * max(n_points, 1)) ** (1.0 / d)))))
    return max(width, 1)


def cell_coords(pos, width):
    c = np.floor(pos * width).astype(np.int64)
    return np.minimum(c, width - 1)


def flat_cell(coords, width):
    d = coords.shape[1]
    flat = np.zeros(coords.shape[0], dtype=np.int64)
    for k in range(d):
        flat = flat * width + coords[:, k]
    return flat


def offsets(d):
    grids = np.meshgrid(*([np.array([-1, 0, 1])] * d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


def torus_sqdist(xa, xb):
    dx = xa - xb
    dx = dx - np.floor(dx + 0.5)
    return np.sum(dx * dx, axis=-1)


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _sq_nb(pos_a, ia, pos_b, ib, d):
    s = 0.0
    for k in range(d):
        dx = pos_a[ia, k] - pos_b[ib, k]
        dx = dx - np.floor(dx + 0.5)
        s += dx * dx
    return s


@njit(cache=True)
def _pairs_nb(pos_a, ids_a, pos_b, ids_b, r2, width, same, offs):
    na = pos_a.shape[0]
    nb = pos_b.shape[0]
    d = pos_a.shape[1]
    brute = width < 3
    ncell = 1
    for _ in range(d):
        ncell *= width
    cell_b = np.zeros(nb, dtype=np.int64)
    start = np.zeros(ncell + 1, dtype=np.int64)
    order = np.empty(nb, dtype=np.int64)
    if not brute:
        for b in range(nb):
            f = 0
            for k in range(d):
                c = int(np.floor(pos_b[b, k] * width))
                if c > width - 1:
                    c = width - 1
                f = f * width + c
            cell_b[b] = f
            start[f + 1] += 1
        for c in range(ncell):
            start[c + 1] += start[c]
        fill = start[:-1].copy()
        for b in range(nb):
            order[fill[cell_b[b]]] = b
            fill[cell_b[b]] += 1
    noff = offs.shape[0]
    coords = np.empty(d, dtype=np.int64)

    counts = np.zeros(na, dtype=np.int64)
    out_i = np.empty(0, dtype=np.int64)
    out_j = np.empty(0, dtype=np.int64)
    out_d = np.empty(0, dtype=np.float64)
    pos_out = 0
    for sweep in range(2):
        if sweep == 1:
            total = 0
            for a in range(na):
                total += counts[a]
            out_i = np.empty(total, dtype=np.int64)
            out_j = np.empty(total, dtype=np.int64)
            out_d = np.empty(total, dtype=np.float64)
        for a in range(na):
            ida = ids_a[a]
            cnt = 0
            if brute:
                for b in range(nb):
                    idb = ids_b[b]
                    if same:
                        if idb <= ida:
                            continue
                    elif idb == ida:
                        continue
                    s = _sq_nb(pos_a, a, pos_b, b, d)
                    if s <= r2:
                        if sweep == 1:
                            out_i[pos_out] = min(ida, idb)
                            out_j[pos_out] = max(ida, idb)
                            out_d[pos_out] = s
                            pos_out += 1
                        cnt += 1
            else:
                for k in range(d):
                    c = int(np.floor(pos_a[a, k] * width))
                    if c > width - 1:
                        c = width - 1
                    coords[k] = c
                for o in range(noff):
                    f = 0
                    for k in range(d):
                        c = (coords[k] + offs[o, k]) % width
                        f = f * width + c
                    for q in range(start[f], start[f + 1]):
                        b = order[q]
                        idb = ids_b[b]
                        if same:
                            if idb <= ida:
                                continue
                        elif idb == ida:
                            continue
                        s = _sq_nb(pos_a, a, pos_b, b, d)
                        if s <= r2:
                            if sweep == 1:
                                out_i[pos_out] = min(ida, idb)
                                out_j[pos_out] = max(ida, idb)
                                out_d[pos_out] = s
                                pos_out += 1
                            cnt += 1
            if sweep == 0:
                counts[a] = cnt
    return out_i, out_j, out_d


# ---------------------------------------------------------------- numpy path


def _pairs_np(pos_a, ids_a, pos_b, ids_b, r2, width, same, offs):
    na, nb = len(ids_a), len(ids_b)
    if na == 0 or nb == 0:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0)
    chunks_a, chunks_b = [], []
    if width < 3:
        # block over A to bound memory
        step = max(1, 4_000_000 // max(nb, 1))
        for s in range(0, na, step):
            a = np.repeat(np.arange(s, min(s + step, na)), nb)
            b = np.tile(np.arange(nb), min(s + step, na) - s)
            chunks_a.append(a)
            chunks_b.append(b)
    else:
        cb = flat_cell(cell_coords(pos_b, width), width)
        order = np.argsort(cb, kind="stable")
        ncell = width ** pos_b.shape[1]
        counts = np.bincount(cb, minlength=ncell)
        start = np.concatenate(([0], np.cumsum(counts)))
        ca = cell_coords(pos_a, width)
        for off in offs:
            nc = flat_cell((ca + off) % width, width)
            cnt = counts[nc]
            tot = int(cnt.sum())
            if tot == 0:
                continue
            a = np.repeat(np.arange(na), cnt)
            first = np.repeat(np.cumsum(cnt) - cnt, cnt)
            within = np.arange(tot) - first
            b = order[start[nc][a] + within]
            chunks_a.append(a)
            chunks_b.append(b)
    a = np.concatenate(chunks_a) if chunks_a else np.empty(0, dtype=np.int64)
    b = np.concatenate(chunks_b) if chunks_b else np.empty(0, dtype=np.int64)
    ia, ib = ids_a[a], ids_b[b]
    keep = ib > ia if same else ib != ia
    a, b, ia, ib = a[keep], b[keep], ia[keep], ib[keep]
    s = torus_sqdist(pos_a[a], pos_b[b])
    keep = s <= r2
    ia, ib, s = ia[keep], ib[keep], s[keep]
    return np.minimum(ia, ib), np.maximum(ia, ib), s


def _canonical(i, j, s):
    order = np.lexsort((j, i))
    i, j, s = i[order], j[order], s[order]
    if len(i) > 1:
        # cross-set scans of overlapping sets may emit a pair twice
        dup = np.concatenate(([False], (i[1:] == i[:-1]) & (j[1:] == j[:-1])))
        if dup.any():
            i, j, s = i[~dup], j[~dup], s[~dup]
    return i, j, s


def radius_pairs(pos, radius, ids=None):
    """All pairs within torus distance ``radius``: arrays (i, j, sqdist)."""
    pos = np.ascontiguousarray(pos, dtype=np.float64)
    if pos.ndim == 1:
        pos = pos[:, None]
    ids = np.arange(len(pos), dtype=np.int64) if ids is None else np.asarray(ids, dtype=np.int64)
    return cross_pairs(pos, ids, pos, ids, radius, same=True)


def cross_pairs(pos_a, ids_a, pos_b, ids_b, radius, same=False, canonical=True):
    """Pairs (a in A, b in B) within torus distance ``radius``.

    ``canonical=False`` skips the final sort; only safe when A and B are
    disjoint or identical (no pair can then be emitted twice).
    """
    pos_a = np.ascontiguousarray(pos_a, dtype=np.float64)
    pos_b = np.ascontiguousarray(pos_b, dtype=np.float64)
    ids_a = np.ascontiguousarray(ids_a, dtype=np.int64)
    ids_b = np.ascontiguousarray(ids_b, dtype=np.int64)
    d = pos_a.shape[1]
    width = grid_width(radius, len(ids_b), d)
    offs = offsets(d)
    r2 = float(radius) ** 2
    if use_numba():
        out = _pairs_nb(pos_a, ids_a, pos_b, ids_b, r2, width, same, offs)
    else:
        out = _pairs_np(pos_a, ids_a, pos_b, ids_b, r2, width, same, offs)
    return _canonical(*out) if canonical else out


def brute_force_pairs(pos, radius):
    """O(n^2) reference used by the tests and tiny inputs."""
    pos = np.asarray(pos, dtype=np.float64)
    if pos.ndim == 1:
        pos = pos[:, None]
    n = len(pos)
    i, j = np.triu_indices(n, k=1)
    s = torus_sqdist(pos[i], pos[j])
    keep = s <= radius * radius
    return i[keep].astype(np.int64), j[keep].astype(np.int64), s[keep]

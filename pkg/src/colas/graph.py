"""Immutable simple undirected graph in CSR form, plus edge-list I/O."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, ParameterError, ParseError


@dataclass(frozen=True, eq=False)
class Graph:
    """Sorted-neighbour adjacency; ``indices[indptr[i]:indptr[i+1]]`` are the
    neighbours of ``i`` in increasing order."""

    n: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    marks: object = field(default=None, repr=False)
    config: object = field(default=None, repr=False)
    epsilon: float | None = None
    meta: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for a in (self.indptr, self.indices):
            a.setflags(write=False)

    @classmethod
    def from_edges(cls, n, u, v, **kwargs):
        """Build from an undirected edge list; self-loops and repeats are dropped."""
        u = np.asarray(u, dtype=np.int64).ravel()
        v = np.asarray(v, dtype=np.int64).ravel()
        if u.shape != v.shape:
            raise ParameterError("edge endpoint arrays differ in length")
        if len(u) and (min(u.min(), v.min()) < 0 or max(u.max(), v.max()) >= n):
            raise ParameterError("edge endpoint outside 0..n-1")
        a, b = np.minimum(u, v), np.maximum(u, v)
        keep = a != b
        key = np.unique(a[keep] * n + b[keep])
        a, b = key // n, key % n
        src = np.concatenate([a, b])
        dst = np.concatenate([b, a])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(int(n), indptr, dst.astype(np.int64), **kwargs)

    @property
    def degrees(self):
        return np.diff(self.indptr)

    @property
    def n_edges(self):
        return len(self.indices) // 2

    def neighbors(self, i):
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edges(self):
        """(m, 2) array of edges with u < v, lexicographically sorted."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.indices
        return np.stack([src[keep], self.indices[keep]], axis=1)

    def has_edge(self, i, j):
        nb = self.neighbors(i)
        k = np.searchsorted(nb, j)
        return bool(k < len(nb) and nb[k] == j)

    def same_adjacency(self, other):
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def to_scipy(self):
        from scipy import sparse

        data = np.ones(len(self.indices), dtype=np.float64)
        return sparse.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def with_edges(self, edges):
        """Copy with a new edge set, keeping marks/config (used by rewiring)."""
        edges = np.asarray(edges, dtype=np.int64)
        return Graph.from_edges(
            self.n, edges[:, 0], edges[:, 1], marks=self.marks, config=self.config,
            epsilon=self.epsilon, meta=dict(self.meta),
        )

    def write_edge_list(self, path):
        write_edge_list(self, path)


def write_edge_list(graph, path):
    e = graph.edges()
    with open(path, "w") as fh:
        for u, v in e:
            fh.write(f"{u} {v}\n")


def write_metadata(graph, path, extra=None):
    """key=value sidecar describing how the graph was produced."""
    cfg = graph.config
    rows = {"n": graph.n}
    if cfg is not None:
        rows.update(
            regime=cfg.regime.value,
            d=cfg.d,
            rho=repr(float(cfg.rho)),
            lambda_=repr(float(cfg.lam)),
            theta=repr(float(cfg.family.effective_theta)),
            seed=cfg.seed,
        )
    if graph.epsilon is not None:
        rows["epsilon"] = repr(float(graph.epsilon))
    rows["truncation_warnings"] = graph.meta.get("truncation_warnings", 0)
    rows["cap_warnings"] = graph.meta.get("cap_warnings", 0)
    rows.update(extra or {})
    with open(path, "w") as fh:
        for k, v in rows.items():
            fh.write(f"{k.rstrip('_')}={v}\n")


def read_metadata(path):
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError("expected key=value", lineno)
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


@dataclass
class IngestReport:
    graph: Graph
    id_map: np.ndarray
    self_loops: int
    duplicates: int
    lines: int


def read_edge_list(path, marks=None, n_nodes=None):
    """Parse whitespace-separated integer pairs into a simple graph.

    Node labels are compacted to 0..n-1 in increasing label order; ``id_map[k]``
    is the original label of node ``k``.  Blank lines and ``#`` comments are
    skipped.  When ``marks`` or ``n_nodes`` is given, labels are taken as-is
    and must lie in 0..n-1 (isolated nodes survive the round trip).
    """
    us, vs = [], []
    nlines = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ParseError(f"expected two node ids, got {len(parts)} fields", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer node id in {s!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError("node ids must be non-negative", lineno)
            us.append(u)
            vs.append(v)
            nlines += 1
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    loops = int(np.sum(u == v))
    if marks is not None and n_nodes is not None and marks.n != n_nodes:
        raise ConsistencyError(f"marks have n={marks.n} but n_nodes={n_nodes}")
    fixed_n = marks.n if marks is not None else n_nodes
    if fixed_n is not None:
        labels = np.arange(fixed_n, dtype=np.int64)
        if len(u) and max(u.max(), v.max()) >= fixed_n:
            raise ConsistencyError(f"edge list references node {max(u.max(), v.max())} but n={fixed_n}")
        cu, cv = u, v
    else:
        labels, inv = np.unique(np.concatenate([u, v]), return_inverse=True)
        cu, cv = inv[: len(u)], inv[len(u) :]
    a, b = np.minimum(cu, cv), np.maximum(cu, cv)
    keep = a != b
    n = len(labels)
    distinct = len(np.unique(a[keep] * max(n, 1) + b[keep]))
    dups = int(keep.sum()) - distinct
    g = Graph.from_edges(n, cu, cv, marks=marks, meta={"self_loops": loops, "duplicates": dups})
    return IngestReport(g, labels, loops, dups, nlines)

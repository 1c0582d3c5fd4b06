"""Graph observables: motif counts, transitivity, endpoint assortativity,
Hill tail estimates, degree curves and the auxiliary E5 metrics."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats as sps
from scipy.sparse import csgraph

from ._kernels.triangles import node_triangles
from .errors import DegenerateError, DomainError, ParameterError


@dataclass(frozen=True)
class MotifVector:
    """Integer motif totals (T, W, E, Q2, Q3, P) of a simple graph."""

    t_n: int
    w_n: int
    e_n: int
    q2: int
    q3: int
    p_n: int
    n: int

    def __post_init__(self):
        if min(self.t_n, self.w_n, self.e_n, self.q2, self.q3, self.p_n) < 0:
            raise ParameterError("motif counts must be nonnegative")
        if 3 * self.t_n > self.w_n:
            raise ParameterError("3T > W is impossible in a simple graph")

    def scaled(self):
        """Y_n = (T, W, E, Q2, Q3, P) / n."""
        return np.array([self.t_n, self.w_n, self.e_n, self.q2, self.q3, self.p_n], dtype=np.float64) / max(self.n, 1)

    @property
    def transitivity(self):
        return transitivity(self)

    @property
    def assortativity(self):
        return assortativity(self)


def motif_vector(graph, tri=None):
    deg = graph.degrees.astype(np.int64)
    if tri is None:
        tri = node_triangles(graph.indptr, graph.indices)
    e = graph.edges()
    p_n = int(np.dot(deg[e[:, 0]], deg[e[:, 1]])) if len(e) else 0
    return MotifVector(
        t_n=int(tri.sum()) // 3,
        w_n=int(np.sum(deg * (deg - 1) // 2)),
        e_n=graph.n_edges,
        q2=int(np.sum(deg * deg)),
        q3=int(np.sum(deg**3)),
        p_n=p_n,
        n=graph.n,
    )


def transitivity(mv):
    if mv.w_n == 0:
        return 0.0
    return 3.0 * mv.t_n / mv.w_n


def assortativity(mv):
    """Endpoint-degree Pearson correlation from motif totals (exact rationals)."""
    if mv.e_n == 0:
        return 0.0
    two_e = 2 * mv.e_n
    mean = Fraction(mv.q2, two_e)
    num = Fraction(mv.p_n, mv.e_n) - mean * mean
    den = Fraction(mv.q3, two_e) - mean * mean
    if den <= 0:
        return 0.0
    return float(num / den)


def _endpoint_degrees(graph):
    e = graph.edges()
    deg = graph.degrees.astype(np.float64)
    du, dv = deg[e[:, 0]], deg[e[:, 1]]
    return np.concatenate([du, dv]), np.concatenate([dv, du])


def endpoint_assortativity_direct(graph):
    """Pearson correlation over the 2E directed endpoint pairs."""
    if graph.n_edges == 0:
        return 0.0
    x, y = _endpoint_degrees(graph)
    xc = x - x.mean()
    yc = y - y.mean()
    den = math.sqrt(float(np.dot(xc, xc)) * float(np.dot(yc, yc)))
    if den == 0.0:
        return 0.0
    return float(np.dot(xc, yc)) / den


def endpoint_assortativity_spearman(graph):
    """Rank (average-tie) analogue of the endpoint correlation; diagnostic only."""
    if graph.n_edges == 0:
        return 0.0
    x, y = _endpoint_degrees(graph)
    if np.all(x == x[0]):
        return 0.0
    r = sps.spearmanr(x, y).statistic
    return 0.0 if not np.isfinite(r) else float(r)


@dataclass(frozen=True)
class TailEstimate:
    alpha_hat_path: list
    alpha_hat_median: float
    k_range: tuple


def hill_path(values, k_max):
    """alpha_hat(k) for k = 1..k_max over descending order statistics."""
    x = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    if len(x) < k_max + 1:
        raise ParameterError(f"need at least {k_max + 1} values, got {len(x)}")
    top = x[: k_max + 1]
    if np.any(~(top > 0)):
        raise DomainError("Hill estimation needs positive top order statistics")
    logs = np.log(top)
    k = np.arange(1, k_max + 1)
    h = np.cumsum(logs[:-1]) / k - logs[1:]
    return k, h


def hill_estimate(values, k_min=None, k_max=None, threshold=1.0):
    """Hill path and its median over [k_min, k_max].

    Without explicit bounds, k runs over [ceil(0.01 m), ceil(0.10 m)] where m
    counts values >= ``threshold``.
    """
    values = np.asarray(values, dtype=np.float64)
    if k_min is None or k_max is None:
        m = int(np.sum(values >= threshold))
        k_min = max(1, math.ceil(0.01 * m)) if k_min is None else k_min
        k_max = min(max(k_min, math.ceil(0.10 * m)), m - 1) if k_max is None else k_max
    if k_min < 1 or k_max < k_min:
        raise ParameterError(f"bad Hill range [{k_min}, {k_max}]")
    k, h = hill_path(values, k_max)
    sel = k >= k_min
    k, h = k[sel], h[sel]
    if np.any(h <= 0):
        raise DegenerateError("zero log-spacings in the Hill range (ties at the top); alpha_hat is infinite")
    alpha = 1.0 / h
    return TailEstimate(list(zip(k.tolist(), alpha.tolist())), float(np.median(alpha)), (int(k_min), int(k_max)))


def degree_ccdf(graph):
    """[(k, P(D >= k))] for k = 0..max_degree + 1."""
    deg = graph.degrees
    if graph.n == 0:
        return []
    counts = np.bincount(deg, minlength=int(deg.max(initial=0)) + 2)
    tail = np.cumsum(counts[::-1])[::-1] / graph.n
    return [(k, float(tail[k])) for k in range(len(tail))]


def local_clustering(graph, tri=None):
    if tri is None:
        tri = node_triangles(graph.indptr, graph.indices)
    deg = graph.degrees.astype(np.float64)
    pairs = deg * (deg - 1) / 2
    return np.divide(tri, pairs, out=np.zeros(graph.n), where=pairs > 0)


def degree_clustering_curve(graph, tri=None):
    """[(k, mean local clustering over nodes of degree k)] for realized k >= 2."""
    c = local_clustering(graph, tri)
    deg = graph.degrees
    out = []
    for k in np.unique(deg[deg >= 2]):
        out.append((int(k), float(c[deg == k].mean())))
    return out


# ---------------------------------------------------------------- auxiliary


def spectral_radius(graph, tol=1e-8, max_iter=1000):
    """Largest adjacency eigenvalue by power iteration on A + I.

    The shift keeps bipartite components from oscillating; the Rayleigh
    quotient of A is returned.
    """
    if graph.n_edges == 0:
        return 0.0
    A = graph.to_scipy()
    x = np.ones(graph.n) / math.sqrt(graph.n)
    lam = 0.0
    for _ in range(max_iter):
        y = A @ x + x
        nrm = np.linalg.norm(y)
        y /= nrm
        new = float(y @ (A @ y))
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return new
        lam, x = new, y
    return lam


def core_histogram(graph):
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(graph.n))
    g.add_edges_from(map(tuple, graph.edges().tolist()))
    core = np.fromiter(nx.core_number(g).values(), dtype=np.int64, count=graph.n)
    vals, cnt = np.unique(core, return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, cnt)}


def largest_component(graph):
    if graph.n == 0:
        return np.empty(0, dtype=np.int64)
    _, lab = csgraph.connected_components(graph.to_scipy(), directed=False)
    return np.flatnonzero(lab == np.argmax(np.bincount(lab)))


def sample_path_lengths(graph, path_samples, seed=0):
    """Hop distances between uniform random distinct pairs in the LCC."""
    lcc = largest_component(graph)
    if len(lcc) < 2 or path_samples <= 0:
        return np.empty(0, dtype=np.int64)
    gen = np.random.default_rng(seed)
    src = gen.choice(lcc, size=path_samples)
    # uniform over the other LCC nodes
    off = gen.integers(1, len(lcc), size=path_samples)
    pos = np.searchsorted(lcc, src)
    dst = lcc[(pos + off) % len(lcc)]
    A = graph.to_scipy()
    out = np.empty(path_samples, dtype=np.int64)
    for s in np.unique(src):
        dist = csgraph.shortest_path(A, unweighted=True, indices=int(s), directed=False)
        m = src == s
        out[m] = dist[dst[m]].astype(np.int64)
    return out


@dataclass
class AuxiliaryMetrics:
    spectral_radius: float
    core_histogram: dict
    path_lengths: np.ndarray = field(repr=False)
    lcc_size: int = 0


def auxiliary_metrics(graph, path_samples=1000, seed=0):
    return AuxiliaryMetrics(
        spectral_radius(graph),
        core_histogram(graph) if graph.n else {},
        sample_path_lengths(graph, path_samples, seed),
        int(len(largest_component(graph))),
    )


def compare_auxiliary(a, b):
    """KS on path lengths, relative spectral error, L1 between core histograms.

    ``b`` is the reference.  Core histograms are compared as distributions.
    """
    if len(a.path_lengths) and len(b.path_lengths):
        ks = float(sps.ks_2samp(a.path_lengths, b.path_lengths).statistic)
    else:
        ks = float("nan")
    rel = abs(a.spectral_radius - b.spectral_radius) / b.spectral_radius if b.spectral_radius else float("nan")
    keys = set(a.core_histogram) | set(b.core_histogram)
    na = sum(a.core_histogram.values()) or 1
    nb = sum(b.core_histogram.values()) or 1
    l1 = sum(abs(a.core_histogram.get(k, 0) / na - b.core_histogram.get(k, 0) / nb) for k in keys)
    return {"ks_paths": ks, "rel_spectral_error": rel, "l1_core": float(l1)}


# ---------------------------------------------------------------- summary


@dataclass
class StatSummary:
    transitivity: float
    assortativity_pearson: float
    assortativity_spearman: float
    mean_degree: float
    hill: TailEstimate | None
    ck_curve: list
    motifs: MotifVector

    def flat(self):
        row = {
            "n": self.motifs.n,
            "transitivity": self.transitivity,
            "assortativity_pearson": self.assortativity_pearson,
            "assortativity_spearman": self.assortativity_spearman,
            "mean_degree": self.mean_degree,
            "hill_alpha_median": self.hill.alpha_hat_median if self.hill else float("nan"),
        }
        row.update({k: v for k, v in asdict(self.motifs).items() if k != "n"})
        return row


def summarize(graph):
    tri = node_triangles(graph.indptr, graph.indices)
    mv = motif_vector(graph, tri)
    try:
        hill = hill_estimate(graph.degrees)
    except (ParameterError, DegenerateError):
        hill = None
    return StatSummary(
        transitivity=transitivity(mv),
        assortativity_pearson=assortativity(mv),
        assortativity_spearman=endpoint_assortativity_spearman(graph),
        mean_degree=2.0 * mv.e_n / graph.n if graph.n else 0.0,
        hill=hill,
        ck_curve=degree_clustering_curve(graph, tri),
        motifs=mv,
    )


def c_and_r(graph):
    mv = motif_vector(graph)
    return transitivity(mv), assortativity(mv)


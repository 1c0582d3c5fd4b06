import math
from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from conftest import make_graph, random_graph
from colas.copula import CopulaFamily
from colas.errors import DegenerateError, DomainError, ParameterError
from colas.generator import GenConfig, Regime, generate
from colas.stats import (
    MotifVector,
    assortativity,
    auxiliary_metrics,
    compare_auxiliary,
    degree_ccdf,
    degree_clustering_curve,
    endpoint_assortativity_direct,
    endpoint_assortativity_spearman,
    hill_estimate,
    hill_path,
    local_clustering,
    motif_vector,
    spectral_radius,
    summarize,
    transitivity,
)


def mv_tuple(mv):
    return (mv.t_n, mv.w_n, mv.e_n, mv.q2, mv.q3, mv.p_n)


def brute_triangles(g):
    adj = g.to_scipy().toarray().astype(bool)
    return sum(1 for i, j, k in combinations(range(g.n), 3) if adj[i, j] and adj[i, k] and adj[j, k])


def test_motif_examples(p3, k3):
    assert mv_tuple(motif_vector(p3)) == (0, 1, 2, 6, 10, 4)
    assert mv_tuple(motif_vector(k3)) == (1, 3, 3, 12, 24, 12)
    assert mv_tuple(motif_vector(make_graph(5, []))) == (0,) * 6


def test_transitivity_examples(p3, k3, k4):
    assert transitivity(motif_vector(k3)) == 1.0
    assert transitivity(motif_vector(p3)) == 0.0
    mv = motif_vector(k4)
    assert (mv.t_n, mv.w_n) == (4, 12) and transitivity(mv) == 1.0


def test_assortativity_examples(p3, k3, star3, two_edges):
    assert assortativity(motif_vector(p3)) == -1.0
    assert assortativity(motif_vector(star3)) == -1.0
    assert assortativity(motif_vector(k3)) == 0.0
    assert endpoint_assortativity_direct(p3) == pytest.approx(-1.0, abs=1e-15)
    assert endpoint_assortativity_direct(two_edges) == 0.0
    assert assortativity(motif_vector(two_edges)) == 0.0


def test_motif_vector_invariants():
    with pytest.raises(ParameterError):
        MotifVector(2, 3, 3, 0, 0, 0, 3)


def test_r_formula_equals_direct_pearson():
    gen = np.random.default_rng(0)
    for trial in range(200):
        n = int(gen.integers(3, 61))
        p = (0.05, 0.2, 0.5)[trial % 3]
        g = random_graph(n, p, trial)
        r = assortativity(motif_vector(g))
        assert abs(r - endpoint_assortativity_direct(g)) <= 1e-12
        assert -1.0 - 1e-12 <= r <= 1.0 + 1e-12


def test_triangles_match_brute_force():
    gen = np.random.default_rng(1)
    for trial in range(1000):
        n = int(gen.integers(3, 51))
        g = random_graph(n, float(gen.uniform(0.02, 0.6)), 10_000 + trial)
        mv = motif_vector(g)
        assert mv.t_n == brute_triangles(g)
        assert 3 * mv.t_n <= mv.w_n
        assert 0.0 <= transitivity(mv) <= 1.0


def test_motifs_match_networkx_on_generated_graph():
    g = generate(GenConfig(n=5000, rho=8.0, lam=6.0, regime=Regime.FIXED_EXP, family=CopulaFamily.fgm(0.7, 2), seed=3))
    h = nx.Graph(list(map(tuple, g.edges().tolist())))
    h.add_nodes_from(range(g.n))
    mv = motif_vector(g)
    assert mv.t_n == sum(nx.triangles(h).values()) // 3
    assert transitivity(mv) == pytest.approx(nx.transitivity(h), abs=1e-12)
    assert assortativity(mv) == pytest.approx(nx.degree_assortativity_coefficient(h), abs=1e-10)


def test_hill_examples():
    k, h = hill_path([8, 4, 2, 1], 3)
    assert 1.0 / h[2] == pytest.approx(1 / (2 * math.log(2)), rel=1e-14)
    est = hill_estimate([8, 4, 2, 1], 3, 3)
    assert est.alpha_hat_path[0][1] == pytest.approx(0.7213475204444817, rel=1e-12)


def test_hill_pareto_quantiles():
    m = 100_000
    x = (np.arange(1, m + 1) / (m + 1)) ** (-1 / 2.5)
    assert abs(hill_estimate(x).alpha_hat_median - 2.5) <= 0.05


def test_hill_errors():
    with pytest.raises(DegenerateError):
        hill_estimate(np.full(100, 3.0), 1, 10)
    with pytest.raises(ParameterError):
        hill_estimate([5.0, 4.0, 3.0], 1, 5)
    with pytest.raises(DomainError):
        hill_estimate([5.0, 4.0, 0.0, -1.0], 1, 3)


def test_hill_default_range():
    x = np.random.default_rng(2).pareto(2.0, 20_000) + 1
    est = hill_estimate(x)
    assert est.k_range == (200, 2000)
    assert all(a > 0 for _, a in est.alpha_hat_path)


def test_ccdf_and_curve_examples(k3, p3):
    assert degree_ccdf(k3) == [(0, 1.0), (1, 1.0), (2, 1.0), (3, 0.0)]
    assert degree_clustering_curve(k3) == [(2, 1.0)]
    assert degree_clustering_curve(p3) == [(2, 0.0)]
    cc = degree_ccdf(p3)
    assert cc[0] == (0, 1.0) and all(b[1] <= a[1] for a, b in zip(cc, cc[1:]))


def test_wedge_weighted_local_clustering_equals_transitivity():
    g = generate(GenConfig(n=8000, rho=6.0, lam=5.0, regime=Regime.FIXED_EXP, family=CopulaFamily.fgm(0.5), seed=1))
    deg = g.degrees.astype(float)
    wedges = deg * (deg - 1) / 2
    c = local_clustering(g)
    assert np.sum(c * wedges) / np.sum(wedges) == pytest.approx(transitivity(motif_vector(g)), rel=1e-12)
    curve = dict(degree_clustering_curve(g))
    by_k = sum(curve[k] * np.sum(deg == k) * k * (k - 1) / 2 for k in curve)
    assert by_k / np.sum(wedges) == pytest.approx(transitivity(motif_vector(g)), rel=1e-12)


def test_auxiliary_examples(k3, p3):
    aux = auxiliary_metrics(k3, 20, 0)
    assert aux.spectral_radius == pytest.approx(2.0, abs=1e-8)
    assert aux.core_histogram == {2: 3}
    assert set(aux.path_lengths.tolist()) == {1}
    assert spectral_radius(p3) == pytest.approx(math.sqrt(2), abs=1e-7)
    assert spectral_radius(make_graph(4, [])) == 0.0
    empty = auxiliary_metrics(make_graph(3, []), 10)
    assert empty.spectral_radius == 0.0 and len(empty.path_lengths) == 0


def test_auxiliary_against_networkx():
    g = random_graph(150, 0.05, 9)
    h = nx.Graph(list(map(tuple, g.edges().tolist())))
    h.add_nodes_from(range(g.n))
    lam = max(np.linalg.eigvalsh(nx.to_numpy_array(h, nodelist=range(g.n))))
    assert spectral_radius(g) == pytest.approx(lam, rel=1e-6)
    aux = auxiliary_metrics(g, 300, 4)
    lcc = max(nx.connected_components(h), key=len)
    sp = dict(nx.all_pairs_shortest_path_length(h.subgraph(lcc)))
    assert aux.path_lengths.max() <= max(max(d.values()) for d in sp.values())
    assert aux.lcc_size == len(lcc)
    same = compare_auxiliary(aux, aux)
    assert same["ks_paths"] == 0.0 and same["rel_spectral_error"] == 0.0 and same["l1_core"] == 0.0


def test_spearman_diagnostic(star3, k3):
    assert endpoint_assortativity_spearman(k3) == 0.0
    assert endpoint_assortativity_spearman(star3) == pytest.approx(-1.0)


def test_summary_conventions():
    s = summarize(make_graph(5, []))
    assert s.transitivity == 0.0 and s.assortativity_pearson == 0.0 and s.mean_degree == 0.0

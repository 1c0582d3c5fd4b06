import numpy as np
import pytest

from colas.copula import CopulaFamily, WeightMarginal, sample_marks
from colas.errors import ParameterError, RegimeError
from colas.generator import (
    GenConfig,
    Regime,
    count_capped_pairs,
    epsilon_from_rho,
    generate,
    generate_all_pairs,
    mark_set_like,
)
from colas.geometry import torus_distance

REGIMES = [Regime.FIXED_EXP, Regime.FIXED_LINEAR, Regime.HEAVY_TAIL]


def _cfg(regime, n=300, d=1, theta=0.5, seed=0, rho=None, lam=None):
    marginal = WeightMarginal.pareto(2.5) if regime is Regime.HEAVY_TAIL else WeightMarginal.uniform()
    if rho is None:
        rho = 2.0 if regime is Regime.HEAVY_TAIL else 10.0
    return GenConfig(n=n, rho=rho, lam=lam or rho * 0.8, regime=regime, family=CopulaFamily.fgm(theta, d),
                     marginal=marginal, seed=seed)


def test_epsilon_examples():
    assert epsilon_from_rho(10000, 1.0, 2) == pytest.approx(0.01, rel=1e-15)
    assert epsilon_from_rho(1000, 2.0, 1) == pytest.approx(0.002, rel=1e-15)
    assert epsilon_from_rho(1, 1.0, 1) == 1.0
    with pytest.raises(RegimeError):
        generate(GenConfig(n=1, rho=1.0, lam=1.0))


def test_config_validation():
    with pytest.raises(ParameterError):
        GenConfig(n=0, rho=1.0, lam=1.0)
    with pytest.raises(ParameterError):
        GenConfig(n=10, rho=-1.0, lam=1.0)
    with pytest.raises(ParameterError):
        GenConfig(n=10, rho=1.0, lam=0.0)
    with pytest.raises(ParameterError):
        GenConfig(n=10, rho=1.0, lam=1.0, ht_radius_cap=0.5)


def test_vanishing_lambda_gives_no_edges():
    for reg in (Regime.FIXED_EXP, Regime.FIXED_LINEAR):
        g = generate(GenConfig(n=1000, rho=1.0, lam=1e-12, regime=reg, seed=4))
        assert g.n_edges == 0


@pytest.mark.parametrize("regime", REGIMES)
def test_deterministic(regime):
    a = generate(_cfg(regime, n=3000, d=2, seed=5))
    b = generate(_cfg(regime, n=3000, d=2, seed=5))
    assert a.same_adjacency(b) and a.n_edges > 0
    c = generate(_cfg(regime, n=3000, d=2, seed=6))
    assert not a.same_adjacency(c)


@pytest.mark.parametrize("regime", REGIMES)
def test_graph_is_simple_and_symmetric(regime):
    g = generate(_cfg(regime, n=2000, d=2, seed=1))
    e = g.edges()
    assert np.all(e[:, 0] < e[:, 1])
    assert len(np.unique(e, axis=0)) == len(e)
    for i in range(0, g.n, 97):
        nb = g.neighbors(i)
        assert np.all(np.diff(nb) > 0)
        assert all(g.has_edge(int(j), i) for j in nb)


def test_linear_mean_degree():
    # mean degree lam * kappa2 * M with M = 1/4 at theta = 0
    md = [2 * generate(GenConfig(n=50_000, rho=1.0, lam=0.8, regime=Regime.FIXED_LINEAR, seed=s)).n_edges / 50_000
          for s in range(5)]
    assert abs(np.mean(md) - 0.4) <= 0.02


def test_edge_count_stable_across_seeds():
    # expected edges n * lam * kappa2 * M / 2 with M = 1/4 + t/108
    n, lam, theta = 20_000, 2.0, 1.0
    counts = np.array([generate(GenConfig(n=n, rho=4.0, lam=lam, regime=Regime.FIXED_LINEAR,
                                          family=CopulaFamily.fgm(theta), seed=s)).n_edges for s in range(20)])
    expected = n * lam * 2 * (0.25 + 1 / 108) / 2
    se = counts.std(ddof=1) / np.sqrt(len(counts))
    assert abs(counts.mean() - expected) <= 3 * se + 0.005 * expected


def test_sparsity_mean_degree_constant_in_n():
    md = {}
    for n in (5000, 20_000, 80_000):
        g = generate(GenConfig(n=n, rho=5.0, lam=3.0, regime=Regime.FIXED_EXP, family=CopulaFamily.fgm(0.5), seed=2))
        md[n] = 2 * g.n_edges / n
    vals = np.array(list(md.values()))
    assert vals.max() - vals.min() < 0.06 * vals.mean()


@pytest.mark.parametrize("regime", [Regime.FIXED_EXP, Regime.FIXED_LINEAR])
@pytest.mark.parametrize("d", [1, 2])
def test_fixed_range_locality(regime, d):
    cfg = _cfg(regime, n=4000, d=d, seed=3)
    g = generate(cfg)
    eps = cfg.epsilon
    for u, v in g.edges():
        assert torus_distance(g.marks.positions[u], g.marks.positions[v]) <= eps * (1 + 1e-12)


@pytest.mark.parametrize("regime", REGIMES)
def test_cell_list_matches_all_pairs(regime):
    gen = np.random.default_rng(17)
    for seed in range(100):
        n = int(gen.integers(20, 301))
        d = int(gen.integers(1, 3))
        rho = min(2.0 if regime is Regime.HEAVY_TAIL else 10.0, 0.9 * n * 0.45**d)
        cfg = _cfg(regime, n=n, d=d, seed=seed, theta=float(gen.random()), rho=rho)
        assert generate(cfg).same_adjacency(generate_all_pairs(cfg)), (seed, n, d)


def test_heavy_tail_unit_weights_equals_fixed_exp():
    for d in (1, 2):
        fe = GenConfig(n=3000, rho=5.0, lam=4.0, regime=Regime.FIXED_EXP, family=CopulaFamily.product(d), seed=8)
        marks = mark_set_like(sample_marks(3000, fe.family, fe.marginal, 8), np.ones(3000))
        a = generate(fe, marks=marks)
        b = generate(fe.with_(regime=Regime.HEAVY_TAIL), marks=marks)
        assert a.same_adjacency(b) and a.n_edges > 0


def test_linear_truncation_count():
    cfg = GenConfig(n=2000, rho=1.0, lam=3.0, regime=Regime.FIXED_LINEAR, seed=2)
    g = generate(cfg)
    w, pos = g.marks.weights, g.marks.positions[:, 0]
    i, j = np.triu_indices(cfg.n, 1)
    dist = np.abs(pos[i] - pos[j])
    near = np.minimum(dist, 1 - dist) <= cfg.epsilon
    expected = int(np.sum(near & (cfg.lam / cfg.rho * w[i] * w[j] > 1)))
    assert g.meta["truncation_warnings"] == expected > 0


def test_heavy_tail_cap_warnings():
    cfg = GenConfig(n=1500, rho=2.0, lam=2.0, regime=Regime.HEAVY_TAIL, family=CopulaFamily.product(1),
                    marginal=WeightMarginal.pareto(1.2), seed=3, ht_radius_cap=0.2)
    g = generate(cfg)
    w = g.marks.weights
    i, j = np.triu_indices(cfg.n, 1)
    expected = int(np.sum(cfg.epsilon * w[i] * w[j] > 0.2))
    assert g.meta["cap_warnings"] == expected > 0
    assert count_capped_pairs(w, 0.2 / cfg.epsilon) == expected


def test_marks_override_validation():
    cfg = GenConfig(n=100, rho=1.0, lam=1.0)
    with pytest.raises(ParameterError):
        generate(cfg, marks=sample_marks(50, cfg.family, cfg.marginal, 0))

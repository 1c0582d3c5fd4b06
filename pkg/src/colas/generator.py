"""CoLaS graph generation in expected near-linear time.

Candidate pairs come from the grid kernels in :mod:`colas._kernels.pairs`;
edge probabilities and coins are then evaluated vectorised.  The coin for a
pair is ``pair_uniforms(seed, i, j)``, so the edge set does not depend on how
candidates were enumerated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from . import rng
from ._kernels import pairs as _pairs
from .copula import CopulaFamily, MarkSet, WeightMarginal, sample_marks
from .errors import ParameterError, RegimeError
from .geometry import Kernel
from .graph import Graph


class Regime(str, Enum):
    FIXED_EXP = "fixed_exp"
    FIXED_LINEAR = "fixed_linear"
    HEAVY_TAIL = "heavy_tail"

    @property
    def fixed_range(self):
        return self is not Regime.HEAVY_TAIL


@dataclass(frozen=True)
class GenConfig:
    n: int
    rho: float
    lam: float
    regime: Regime = Regime.FIXED_EXP
    kernel: Kernel = field(default_factory=Kernel.indicator)
    family: CopulaFamily = field(default_factory=CopulaFamily.product)
    marginal: WeightMarginal = field(default_factory=WeightMarginal.uniform)
    seed: int = 0
    ht_radius_cap: float = 0.49

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"need n >= 1, got {self.n}")
        if not self.rho > 0:
            raise ParameterError(f"rho must be positive, got {self.rho}")
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if not 0 < self.ht_radius_cap < 0.5:
            raise ParameterError("ht_radius_cap must lie in (0, 1/2)")

    @property
    def d(self):
        return self.family.dim

    @property
    def epsilon(self):
        return epsilon_from_rho(self.n, self.rho, self.d)

    def with_(self, **changes):
        return replace(self, **changes)


def epsilon_from_rho(n, rho, d):
    """Length scale with n * eps^d = rho."""
    if n < 1 or not rho > 0:
        raise ParameterError("need n >= 1 and rho > 0")
    return (rho / n) ** (1.0 / d)


def check_regime(config):
    eps = config.epsilon
    reach = config.kernel.radius * eps
    if reach >= 0.5:
        raise RegimeError(
            f"kernel reach R*eps = {reach:.4g} >= 1/2 at n={config.n}, rho={config.rho}; "
            "reduce rho or increase n"
        )
    if config.regime is Regime.HEAVY_TAIL and reach >= config.ht_radius_cap:
        raise RegimeError(f"base radius {reach:.4g} already exceeds the HT cap {config.ht_radius_cap}")
    return eps


def _coins(seed, i, j, p):
    return rng.pair_uniforms(seed, i, j) < p


def _fixed_range(config, marks, eps):
    R = config.kernel.radius
    i, j, s = _pairs.radius_pairs(marks.positions, R * eps)
    k = config.kernel.at_norm(np.sqrt(s) / eps)
    t = (config.lam / config.rho) * marks.weights[i] * marks.weights[j] * k
    meta = {"candidates": len(i)}
    if config.regime is Regime.FIXED_LINEAR:
        over = t > 1.0
        meta["truncation_warnings"] = int(over.sum())
        p = np.minimum(t, 1.0)
    else:
        p = -np.expm1(-t)
    keep = _coins(config.seed, i, j, p)
    return i[keep], j[keep], meta


def count_capped_pairs(weights, threshold):
    """#{i < j : w_i w_j > threshold} in O(n log n)."""
    w = np.sort(np.asarray(weights, dtype=np.float64))
    n = len(w)
    # for each i, partners j > i (in sorted order) with w_j > threshold / w_i
    first = np.searchsorted(w, threshold / w, side="right")
    first = np.maximum(first, np.arange(n) + 1)
    return int(np.sum(n - first))


def weight_layers(weights):
    return np.floor(np.log2(weights)).astype(np.int64)


def _ht_pair_radius(base, wi, wj, d, cap):
    return np.minimum(base * (wi * wj) ** (1.0 / d), cap)


def _heavy_tail(config, marks, eps):
    d = config.d
    R = config.kernel.radius
    base = R * eps
    cap = config.ht_radius_cap
    w = marks.weights
    pos = marks.positions
    layer = weight_layers(w)
    levels = np.unique(layer)
    members = {lv: np.flatnonzero(layer == lv) for lv in levels}
    chunks_i, chunks_j, chunks_s = [], [], []
    n_cand = 0
    for ai, a in enumerate(levels):
        for b in levels[ai:]:
            # weights in layer l lie in [2^l, 2^(l+1))
            r_ab = min(cap, base * 2.0 ** ((a + b + 2) / d))
            ia, ib = members[a], members[b]
            i, j, s = _pairs.cross_pairs(pos[ia], ia, pos[ib], ib, r_ab, same=(a == b), canonical=False)
            n_cand += len(i)
            r = _ht_pair_radius(base, w[i], w[j], d, cap)
            keep = s <= r * r
            chunks_i.append(i[keep])
            chunks_j.append(j[keep])
            chunks_s.append(s[keep])
    i = np.concatenate(chunks_i)
    j = np.concatenate(chunks_j)
    s = np.concatenate(chunks_s)
    order = np.lexsort((j, i))
    i, j, s = i[order], j[order], s[order]
    return _ht_edges(config, marks, i, j, s, n_cand)


def _ht_edges(config, marks, i, j, s, n_cand):
    d = config.d
    R = config.kernel.radius
    eps = config.epsilon
    w = marks.weights
    r = _ht_pair_radius(R * eps, w[i], w[j], d, config.ht_radius_cap)
    k = config.kernel.at_norm(np.sqrt(s) * R / r)
    p = -np.expm1(-(config.lam / config.rho) * k)
    keep = _coins(config.seed, i, j, p)
    thresh = (config.ht_radius_cap / (R * eps)) ** d
    meta = {"candidates": n_cand, "cap_warnings": count_capped_pairs(w, thresh)}
    return i[keep], j[keep], meta


def generate_all_pairs(config, marks=None):
    """O(n^2) reference generator sharing the per-pair coin function."""
    eps = check_regime(config)
    marks = marks if marks is not None else sample_marks(config.n, config.family, config.marginal, config.seed)
    i, j, s = _pairs.brute_force_pairs(marks.positions, 0.5 * math.sqrt(config.d))
    if config.regime.fixed_range:
        keep = s <= (config.kernel.radius * eps) ** 2
        i, j, s = i[keep], j[keep], s[keep]
        k = config.kernel.at_norm(np.sqrt(s) / eps)
        t = (config.lam / config.rho) * marks.weights[i] * marks.weights[j] * k
        p = np.minimum(t, 1.0) if config.regime is Regime.FIXED_LINEAR else -np.expm1(-t)
        keep = _coins(config.seed, i, j, p)
        u, v = i[keep], j[keep]
    else:
        r = _ht_pair_radius(config.kernel.radius * eps, marks.weights[i], marks.weights[j], config.d, config.ht_radius_cap)
        keep = s <= r * r
        u, v, _ = _ht_edges(config, marks, i[keep], j[keep], s[keep], int(keep.sum()))
    return Graph.from_edges(config.n, u, v, marks=marks, config=config, epsilon=eps)


def generate(config, marks=None):
    """Sample a graph; ``marks`` overrides the seeded mark draw (same n, d)."""
    eps = check_regime(config)
    if marks is None:
        marks = sample_marks(config.n, config.family, config.marginal, config.seed)
    elif marks.n != config.n or marks.d != config.d:
        raise ParameterError("supplied marks do not match (n, d) of the config")
    if config.regime.fixed_range:
        u, v, meta = _fixed_range(config, marks, eps)
    else:
        u, v, meta = _heavy_tail(config, marks, eps)
    meta.setdefault("truncation_warnings", 0)
    meta.setdefault("cap_warnings", 0)
    return Graph.from_edges(config.n, u, v, marks=marks, config=config, epsilon=eps, meta=meta)


def mark_set_like(marks, weights):
    """Same positions, different weights (e.g. degenerate W == 1 checks)."""
    return MarkSet(marks.n, marks.d, weights, marks.positions, marks.family, marks.marginal, marks.seed)

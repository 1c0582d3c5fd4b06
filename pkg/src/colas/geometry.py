"""Torus geometry, connection kernels and their overlap constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, special

from ._kernels import pairs as _pairs
from .copula import ball_volume
from .errors import ParameterError, RegimeError


def torus_displacement(x, y):
    """Signed difference x - y mapped into [-1/2, 1/2)^d."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ParameterError(f"dimension mismatch: {x.shape} vs {y.shape}")
    dx = x - y
    return dx - np.floor(dx + 0.5)


def torus_distance(x, y):
    return float(np.sqrt(np.sum(torus_displacement(x, y) ** 2)))


def _indicator_profile(radius):
    def profile(r):
        return (np.asarray(r) <= radius).astype(np.float64)

    return profile


@dataclass(frozen=True)
class Kernel:
    """Radial connection kernel k(u) = profile(|u|), supported in |u| <= radius.

    Only the indicator ball is built in.  A custom kernel supplies its own
    ``profile`` (vectorised over norms) and ``sup_norm``; it must vanish
    outside ``radius``.
    """

    kind: str = "indicator"
    radius: float = 1.0
    sup_norm: float = 1.0
    profile: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError("kernel support radius must be positive")
        if self.kind == "indicator":
            object.__setattr__(self, "profile", _indicator_profile(self.radius))
            object.__setattr__(self, "sup_norm", 1.0)
        elif self.profile is None:
            raise ParameterError("custom kernels need a profile function")

    @classmethod
    def indicator(cls, radius=1.0):
        return cls("indicator", float(radius))

    @property
    def is_indicator(self):
        return self.kind == "indicator"

    def __call__(self, u):
        """Evaluate k at displacement vectors (last axis = coordinates)."""
        u = np.asarray(u, dtype=np.float64)
        return self.profile(np.sqrt(np.sum(u * u, axis=-1)))

    def at_norm(self, r):
        return self.profile(np.asarray(r, dtype=np.float64))


@dataclass(frozen=True)
class KernelConstants:
    kappa2: float
    kappa3: float
    i2: float
    dim: int
    stderr: dict = field(default_factory=dict, compare=False)
    method: str = "analytic"

    def __post_init__(self):
        for name in ("kappa2", "kappa3", "i2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive and finite, got {v}")


def _lens_volume(r, d, R):
    """Volume of the intersection of two radius-R balls with centres r apart."""
    if r >= 2 * R:
        return 0.0
    return ball_volume(d, R) * special.betainc((d + 1) / 2.0, 0.5, 1.0 - (r / (2.0 * R)) ** 2)


def indicator_kappa3(d, R=1.0):
    """kappa_3 for the indicator ball by radial quadrature of the lens volume."""
    if d == 1:
        return 3.0 * R * R
    surface = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
    val, _ = integrate.quad(
        lambda r: surface * r ** (d - 1) * _lens_volume(r, d, R), 0.0, R, epsabs=0.0, epsrel=1e-12, limit=200
    )
    return val


def _sample_ball(gen, m, d, R):
    g = gen.standard_normal((m, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (R * gen.random(m) ** (1.0 / d))[:, None]


def kernel_constants(kernel, d, mc_samples=200_000, seed=0):
    """Overlap constants kappa_2 = int k, kappa_3 = int int k(u)k(v)k(u-v), I_2 = int k^2."""
    if d < 1:
        raise ParameterError("dimension must be >= 1")
    R = kernel.radius
    if kernel.is_indicator:
        k2 = ball_volume(d, R)
        out = KernelConstants(k2, indicator_kappa3(d, R), k2, d, method="quadrature" if d > 1 else "analytic")
    else:
        if mc_samples < 100_000:
            raise ParameterError("Monte Carlo kernel constants need mc_samples >= 1e5")
        gen = np.random.default_rng(seed)
        vol = ball_volume(d, R)
        u = _sample_ball(gen, mc_samples, d, R)
        v = _sample_ball(gen, mc_samples, d, R)
        ku, kv = kernel(u), kernel(v)
        t2 = vol * ku
        t3 = vol * vol * ku * kv * kernel(u - v)
        ti = vol * ku * ku
        sq = math.sqrt(mc_samples)
        out = KernelConstants(
            float(t2.mean()),
            float(t3.mean()),
            float(ti.mean()),
            d,
            stderr={"kappa2": t2.std() / sq, "kappa3": t3.std() / sq, "i2": ti.std() / sq},
            method="monte_carlo",
        )
    s = kernel.sup_norm
    tol = 1e-9 + 5 * max(out.stderr.values(), default=0.0)
    if out.kappa3 > s * out.kappa2**2 + tol or out.i2 > s * out.kappa2 + tol:
        raise ParameterError("kernel constants violate the sup-norm bounds; check the profile/sup_norm")
    return out


def kappa2_lambda(kernel, d, lam, rho, points=4096):
    """int (1 - exp(-(lam/rho) k(u))) du."""
    a = lam / rho
    if kernel.is_indicator:
        return ball_volume(d, kernel.radius) * -math.expm1(-a)
    surface = 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0) if d > 1 else 2.0
    r = np.linspace(0.0, kernel.radius, points + 1)
    f = surface * r ** (d - 1) * -np.expm1(-a * kernel.at_norm(r))
    return float(integrate.trapezoid(f, r))


@dataclass(frozen=True, eq=False)
class CellIndex:
    """Uniform grid over the torus; immutable after :func:`build_cell_index`."""

    cell_size: float
    width: int
    n: int
    d: int
    positions: np.ndarray = field(repr=False)
    cell_of: np.ndarray = field(repr=False)
    order: np.ndarray = field(repr=False)
    start: np.ndarray = field(repr=False)

    @property
    def degenerate(self):
        return self.width < 3

    def cell_members(self, flat):
        return self.order[self.start[flat] : self.start[flat + 1]]

    def candidates(self, i):
        return candidates(self, i)


def build_cell_index(positions, query_radius):
    pos = np.asarray(positions, dtype=np.float64)
    if pos.ndim == 1:
        pos = pos[:, None]
    if not 0 < query_radius < 0.5:
        raise RegimeError(
            f"query radius {query_radius:.4g} must be in (0, 1/2); reduce rho or increase n"
        )
    n, d = pos.shape
    width = _pairs.grid_width(query_radius, n, d)
    flat = _pairs.flat_cell(_pairs.cell_coords(pos, width), width)
    order = np.argsort(flat, kind="stable").astype(np.int64)
    counts = np.bincount(flat, minlength=width**d)
    start = np.concatenate(([0], np.cumsum(counts))).astype(np.int64)
    return CellIndex(1.0 / width, width, n, d, pos, flat, order, start)


def candidates(index, i):
    """Node ids in the 3^d cells around node ``i`` (excluding ``i``), sorted."""
    if index.degenerate:
        out = np.arange(index.n, dtype=np.int64)
        return out[out != i]
    coords = _pairs.cell_coords(index.positions[i : i + 1], index.width)
    cells = _pairs.flat_cell((coords + _pairs.offsets(index.d)) % index.width, index.width)
    out = np.sort(np.concatenate([index.cell_members(c) for c in np.unique(cells)]))
    return out[out != i]

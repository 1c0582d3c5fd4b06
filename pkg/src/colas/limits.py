"""Large-n limits: degree intensities, mixed-Poisson laws, FGM closed forms
for transitivity and assortativity, the constant-clustering curve and the
tail-inheriting intensity and tail constant."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy import stats as sps

from .copula import CopulaFamily, CopulaKind, MarginalKind, WeightMarginal, ball_volume, conditional_mean
from .errors import DegenerateError, NumericError, ParameterError, UnsupportedError
from .generator import Regime
from .geometry import Kernel, kappa2_lambda, kernel_constants


@dataclass(frozen=True)
class LimitModel:
    lam: float
    rho: float
    theta: float = 0.0
    kernel: Kernel = field(default_factory=Kernel.indicator)
    dim: int = 1
    marginal: WeightMarginal = field(default_factory=WeightMarginal.uniform)
    regime: Regime = Regime.FIXED_LINEAR

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not self.lam > 0 or not self.rho > 0:
            raise ParameterError("lambda and rho must be positive")
        if not 0.0 <= self.theta <= 1.0:
            raise ParameterError(f"theta must lie in [0, 1], got {self.theta}")

    @classmethod
    def from_config(cls, config):
        return cls(config.lam, config.rho, config.family.effective_theta, config.kernel, config.d,
                   config.marginal, config.regime)

    @property
    def family(self):
        if self.theta == 0.0:
            return CopulaFamily.product(self.dim)
        return CopulaFamily.fgm(self.theta, self.dim)

    @property
    def constants(self):
        return kernel_constants(self.kernel, self.dim)

    @property
    def closed_form(self):
        """True when the FGM rational forms for C and r apply exactly."""
        return (
            self.dim == 1
            and self.kernel.is_indicator
            and self.kernel.radius == 1.0
            and self.marginal.kind is MarginalKind.UNIT_UNIFORM
            and self.marginal.cap is None
            and self.regime is Regime.FIXED_LINEAR
            and self.lam <= self.rho
        )

    def with_(self, **changes):
        return replace(self, **changes)


# ---------------------------------------------------------------- closed forms


def _q(v):
    return v if isinstance(v, Fraction) else Fraction(v)


def palm_moments(theta):
    """Edge-Palm moment scalars (M, A, B, C, D) as exact rationals in t = theta^2."""
    t = _q(theta) ** 2
    return (
        Fraction(1, 4) + t / 108,
        Fraction(1, 12) + t / 81,
        Fraction(1, 36) + 37 * t / 3888 + t * t / 6480,
        Fraction(1, 32) + 7 * t / 720 + t * t / 7200,
        Fraction(1, 27) + t / 108,
    )


def fgm_C_exact(lam, rho, theta):
    lam, rho, t = _q(lam), _q(rho), _q(theta) ** 2
    return Fraction(9, 4) * lam / rho * (t + 4) / (4 * t + 27)


def fgm_r_exact(lam, rho, theta):
    lam, rho, t = _q(lam), _q(rho), _q(theta) ** 2
    num = 15 * lam * (2 * rho * t**3 - 36 * rho * t**2 + 810 * rho * t + 45 * t**2 + 1395 * t + 4860)
    den = rho * (
        27 * lam * t**3 - 581 * lam * t**2 + 13905 * lam * t + 18225 * lam
        + 1200 * t**2 + 40500 * t + 218700
    )
    return num / den


def _require_closed_form(model):
    if model.theta and model.family.kind is not CopulaKind.FGM:
        raise UnsupportedError("closed forms are for the FGM family")
    if not model.closed_form:
        raise UnsupportedError(
            "closed forms need d=1, unit indicator kernel, unit-uniform weights, linear link and "
            "lambda <= rho; use clustering_limit_mc instead"
        )


def fgm_limit_C(model):
    _require_closed_form(model)
    return float(fgm_C_exact(model.lam, model.rho, model.theta))


def fgm_limit_r(model):
    _require_closed_form(model)
    return float(fgm_r_exact(model.lam, model.rho, model.theta))


def mean_degree_closed_form(lam, theta, kappa2=2.0):
    """Linear-link mean degree lambda * kappa2 * M(theta)."""
    return float(_q(lam) * _q(kappa2) * palm_moments(theta)[0])


def _check_c(c):
    if not 0.0 < c <= 1.0 / 3.0:
        raise ParameterError(f"target clustering c must lie in (0, 1/3], got {c}")


def lambda_c_exact(c, theta, rho):
    _check_c(c)
    t = _q(theta) ** 2
    return Fraction(4, 9) * _q(c) * _q(rho) * (4 * t + 27) / (t + 4)


def lambda_c_curve(c, theta, rho):
    """lambda at which the linear-link transitivity limit equals c."""
    return float(lambda_c_exact(c, theta, rho))


def r_along_curve(c, theta, rho):
    """Assortativity limit at (lambda_c(theta), theta), by exact composition."""
    return float(fgm_r_exact(lambda_c_exact(c, theta, rho), rho, theta))


# ---------------------------------------------------------------- quadrature


def adaptive_trapezoid(f, a, b, rtol=1e-8, max_points=2**20, start=64):
    """Trapezoid rule on a doubling grid until successive estimates agree."""
    n = start
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    est = h * (y.sum() - 0.5 * (y[0] + y[-1]))
    while n < max_points:
        mid = a + h * (np.arange(n) + 0.5)
        y_mid = f(mid)
        new = 0.5 * est + 0.5 * h * y_mid.sum()
        n *= 2
        h /= 2
        if abs(new - est) <= rtol * abs(new) or (new == 0.0 and est == 0.0):
            return float(new)
        est = new
    raise NumericError(f"quadrature did not reach rtol={rtol} with {max_points} points")


def _link(model):
    a = model.lam / model.rho
    if model.regime is Regime.FIXED_LINEAR:
        return lambda s: np.minimum(a * s, 1.0)
    return lambda s: -np.expm1(-a * s)


def _surface(d):
    return 2.0 if d == 1 else 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _conditional_expectation(model, fn, x1, rtol):
    """E[fn(W') | X_1 = x1] as an integral over the conditional rank u."""
    g = model.theta * (1.0 - 2.0 * x1)

    # u = s^2 resolves the boundary layer at small ranks when w is huge
    def integrand(s):
        u = s * s
        with np.errstate(over="ignore", invalid="ignore"):
            w = model.marginal.quantile(np.clip(u, 0.0, 1.0))
            v = fn(w) * (1.0 + g * (1.0 - 2.0 * u)) * 2.0 * s
        return np.nan_to_num(v, nan=0.0)

    return adaptive_trapezoid(integrand, 0.0, 1.0, rtol=rtol, start=256)


def intensity_fixed(model, w, x, quad_points=64, rtol=1e-8):
    """Fixed-range degree intensity Lambda(w, x) by nested quadrature."""
    if model.regime is Regime.HEAVY_TAIL:
        return ht_intensity(model, w, x)
    if quad_points < 64:
        raise ParameterError("quad_points must be at least 64")
    if w == 0:
        return 0.0
    x1 = float(np.atleast_1d(x)[0])
    link = _link(model)
    k = model.kernel
    d = model.dim
    if k.is_indicator:
        h = _conditional_expectation(model, lambda wp: link(w * wp), x1, rtol)
        return model.rho * ball_volume(d, k.radius) * h

    def radial(r):
        kr = k.at_norm(r)
        return np.array([
            _surface(d) * ri ** (d - 1) * _conditional_expectation(model, lambda wp: link(w * wp * ki), x1, rtol)
            if ki > 0 else 0.0
            for ri, ki in zip(np.atleast_1d(r), np.atleast_1d(kr))
        ])

    return model.rho * adaptive_trapezoid(radial, 0.0, k.radius, rtol=rtol, start=quad_points, max_points=2**12)


def linear_intensity(model, w, x):
    """lambda * kappa2 * w * m1(x); exact for the untruncated linear link."""
    kappa2 = ball_volume(model.dim, model.kernel.radius) if model.kernel.is_indicator else model.constants.kappa2
    return model.lam * kappa2 * w * conditional_mean(model.marginal, model.theta, np.atleast_1d(x)[0])


# vectorised version used inside Monte-Carlo loops; fixed Gauss-Legendre rules
_GL_U = np.polynomial.legendre.leggauss(400)
_GL_R = np.polynomial.legendre.leggauss(64)


def _intensity_vec(model, w, x1):
    link = _link(model)
    nodes, wts = _GL_U
    u = 0.5 * (nodes + 1.0)
    wu = 0.5 * wts
    wp = model.marginal.quantile(u)
    dens = 1.0 + model.theta * (1.0 - 2.0 * x1)[:, None] * (1.0 - 2.0 * u)[None, :]
    k = model.kernel
    d = model.dim
    if k.is_indicator:
        h = (link(w[:, None] * wp[None, :]) * dens) @ wu
        return model.rho * ball_volume(d, k.radius) * h
    rn, rw = _GL_R
    r = 0.5 * k.radius * (rn + 1.0)
    rw = 0.5 * k.radius * rw * _surface(d) * r ** (d - 1)
    kr = k.at_norm(r)
    out = np.zeros(len(w))
    for ri in range(len(r)):
        if kr[ri] > 0:
            out += rw[ri] * ((link(w[:, None] * wp[None, :] * kr[ri]) * dens) @ wu)
    return model.rho * out


# ---------------------------------------------------------------- Monte Carlo


def _draw_marks(model, m, gen):
    x1 = gen.random(m)
    fam = model.family
    u = fam.conditional_rank(gen.random(m), x1)
    u = np.clip(u, 2.0**-60, np.nextafter(1.0, 0.0))
    return model.marginal.quantile(u), x1


def _draw_conditional(model, x1, gen):
    u = model.family.conditional_rank(gen.random(len(x1)), x1)
    u = np.clip(u, 2.0**-60, np.nextafter(1.0, 0.0))
    return model.marginal.quantile(u)


def _draw_ball(gen, m, d, R):
    g = gen.standard_normal((m, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (R * gen.random(m) ** (1.0 / d))[:, None]


def _ratio_estimate(num, den):
    m = len(num)
    N, D = num.mean(), den.mean()
    if not D > 0:
        raise DegenerateError("E[Lambda^2] estimate is not positive")
    cov = np.cov(num, den)
    var = cov[0, 0] / D**2 - 2 * N * cov[0, 1] / D**3 + N**2 * cov[1, 1] / D**4
    return float(N / D), float(math.sqrt(max(var, 0.0) / m))


def clustering_limit_mc(model, mc_samples=100_000, seed=0):
    """Transitivity limit 2 E[tau] / E[Lambda^2] with a delta-method standard error."""
    if mc_samples < 10_000:
        raise ParameterError("clustering_limit_mc needs mc_samples >= 1e4")
    if model.regime is Regime.HEAVY_TAIL:
        raise UnsupportedError("the transitivity limit is implemented for fixed-range links")
    gen = np.random.default_rng(seed)
    d, k = model.dim, model.kernel
    vol = ball_volume(d, k.radius)
    link = _link(model)
    w, x1 = _draw_marks(model, mc_samples, gen)
    w1 = _draw_conditional(model, x1, gen)
    w2 = _draw_conditional(model, x1, gen)
    u = _draw_ball(gen, mc_samples, d, k.radius)
    v = _draw_ball(gen, mc_samples, d, k.radius)
    num = (model.rho * vol) ** 2 * link(w * w1 * k(u)) * link(w * w2 * k(v)) * link(w1 * w2 * k(u - v))
    den = np.empty(mc_samples)
    for s in range(0, mc_samples, 4096):
        den[s : s + 4096] = _intensity_vec(model, w[s : s + 4096], x1[s : s + 4096]) ** 2
    return _ratio_estimate(num, den)


def clustering_linear_leading(model):
    """Small-lambda leading term (lambda/rho)(kappa3/kappa2^2) E[m2^3]/E[m2 m1^2] (unit-uniform FGM)."""
    if model.marginal.kind is not MarginalKind.UNIT_UNIFORM:
        raise UnsupportedError("leading term implemented for unit-uniform weights")
    kc = model.constants
    x = np.linspace(0.0, 1.0, 20001)
    g = model.theta * (1.0 - 2.0 * x)
    m1 = 0.5 - g / 6.0
    m2 = 1.0 / 3.0 - g / 6.0
    from scipy.integrate import simpson

    ratio = simpson(m2**3, x=x) / simpson(m2 * m1**2, x=x)
    return model.lam / model.rho * kc.kappa3 / kc.kappa2**2 * ratio


# ---------------------------------------------------------------- heavy tail


def kappa2_ht(model):
    return kappa2_lambda(model.kernel, model.dim, model.lam, model.rho)


def ht_intensity(model, w, x):
    x1 = np.atleast_1d(np.asarray(x, dtype=np.float64))[..., 0] if np.ndim(x) else float(x)
    return model.rho * kappa2_ht(model) * np.asarray(w) * conditional_mean(model.marginal, model.theta, x1)


def tail_multiplier(theta, x1):
    """Copula density at the top weight rank: 1 + theta (2 x1 - 1)."""
    return 1.0 + theta * (2.0 * np.asarray(x1) - 1.0)


def ht_tail_constant(model, mc_samples=100_000, seed=0):
    """E[l(X) (rho kappa2^(lambda) m1(X))^alpha] by Monte Carlo over X_1."""
    if model.marginal.kind is not MarginalKind.PARETO:
        raise UnsupportedError("the tail constant needs a Pareto marginal")
    x1 = np.random.default_rng(seed).random(mc_samples)
    base = model.rho * kappa2_ht(model) * conditional_mean(model.marginal, model.theta, x1)
    return float(np.mean(tail_multiplier(model.theta, x1) * base**model.marginal.alpha))


# ---------------------------------------------------------------- degree law


@dataclass(frozen=True)
class MixedPoissonPMF:
    pmf: np.ndarray
    tail_mass: float
    intensities: np.ndarray = field(repr=False)

    def tv_distance(self, degrees):
        """Total variation to an empirical degree sample (tails lumped beyond k_max)."""
        degrees = np.asarray(degrees)
        k_max = len(self.pmf) - 1
        emp = np.bincount(np.minimum(degrees, k_max + 1), minlength=k_max + 2) / len(degrees)
        model = np.append(self.pmf, self.tail_mass)
        return 0.5 * float(np.abs(emp - model).sum())


def sample_intensities(model, mc_samples, seed=0):
    gen = np.random.default_rng(seed)
    w, x1 = _draw_marks(model, mc_samples, gen)
    if model.regime is Regime.HEAVY_TAIL:
        return ht_intensity(model, w, x1)
    out = np.empty(mc_samples)
    for s in range(0, mc_samples, 4096):
        out[s : s + 4096] = _intensity_vec(model, w[s : s + 4096], x1[s : s + 4096])
    return out


def mixed_poisson_pmf(model, k_max, mc_samples=100_000, seed=0):
    if mc_samples < 10_000:
        raise ParameterError("mixed_poisson_pmf needs mc_samples >= 1e4")
    lam = sample_intensities(model, mc_samples, seed)
    k = np.arange(k_max + 1)
    pmf = np.zeros(k_max + 1)
    for s in range(0, len(lam), 8192):
        pmf += sps.poisson.pmf(k[:, None], lam[None, s : s + 8192]).sum(axis=1)
    pmf /= len(lam)
    return MixedPoissonPMF(pmf, float(max(0.0, 1.0 - pmf.sum())), lam)

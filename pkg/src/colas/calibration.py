"""One-graph calibration of (lambda, theta).

lambda is set from the mean degree; theta minimises the squared distance
between observed (C_n, r_n) and the closed-form limits; a parametric
bootstrap supplies the covariance for a sandwich (Wald) interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import rng
from .copula import CopulaFamily, sample_marks
from .errors import CalibrationError, OutOfRangeError, ParameterError, UnsupportedError
from .generator import GenConfig, generate
from .limits import fgm_C_exact, fgm_r_exact, palm_moments
from .stats import c_and_r


# ---------------------------------------------------------------- lambda


def fit_lambda_closed_form(mean_degree, theta=0.0, kappa2=2.0):
    """lambda_hat = mean_degree / (kappa2 M(theta)) for the linear link."""
    if not mean_degree > 0:
        raise ParameterError("target mean degree must be positive")
    return float(mean_degree / (kappa2 * float(palm_moments(theta)[0])))


class _SimulatedMeanDegree:
    """Mean degree over fixed seeds as a function of lambda.

    Marks and edge coins depend on the seed only, so for fixed seeds the edge
    set grows with lambda and the average is monotone.
    """

    def __init__(self, template, seeds):
        self.template = template
        self.seeds = list(seeds)
        self.marks = [sample_marks(template.n, template.family, template.marginal, s) for s in self.seeds]
        self.calls = 0

    def __call__(self, lam):
        self.calls += 1
        tot = 0.0
        for s, mk in zip(self.seeds, self.marks):
            g = generate(self.template.with_(lam=lam, seed=s), marks=mk)
            tot += 2.0 * g.n_edges / g.n
        return tot / len(self.seeds)


def fit_lambda_simulated(target, template, n_seeds=20, rtol=0.01, seed=0, lam_max=1e6):
    """Bisection on lambda against the simulated mean degree."""
    if not target > 0:
        raise ParameterError("target mean degree must be positive")
    seeds = [rng.derive_seed(seed, k) for k in range(n_seeds)]
    f = _SimulatedMeanDegree(template, seeds)
    lo, hi = 0.0, max(template.lam, 1e-3)
    while f(hi) < target:
        lo, hi = hi, hi * 4.0
        if hi > lam_max:
            raise CalibrationError(f"no lambda <= {lam_max:g} reaches mean degree {target}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = f(mid)
        if abs(val - target) <= rtol * target or hi - lo <= 1e-9 * hi:
            return mid
        if val < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fit_lambda(target_mean_degree, model, theta=None, template=None, **kwargs):
    """Closed form in the FGM linear-link regime, simulation bisection otherwise."""
    if model.closed_form:
        th = model.theta if theta is None else theta
        return fit_lambda_closed_form(target_mean_degree, th, 2.0 * model.kernel.radius)
    if template is None:
        raise UnsupportedError("outside the closed-form regime fit_lambda needs a generator template")
    return fit_lambda_simulated(target_mean_degree, template, **kwargs)


# ---------------------------------------------------------------- theta


def _limits(lam, rho, theta):
    return float(fgm_C_exact(lam, rho, theta)), float(fgm_r_exact(lam, rho, theta))


def _require(model):
    if not model.closed_form:
        raise UnsupportedError("theta calibration needs the FGM closed-form regime")


@dataclass
class FitReport:
    lambda_hat: float
    theta_hat: float
    residual: float
    observed: tuple
    predicted: tuple
    jacobian: np.ndarray | None = None
    sigma: np.ndarray | None = None
    ci_theta: tuple | None = None
    se_theta: float | None = None
    n: int | None = None
    diagnostics: dict = field(default_factory=dict)

    def flat(self):
        row = {
            "lambda_hat": self.lambda_hat,
            "theta_hat": self.theta_hat,
            "residual": self.residual,
            "c_obs": self.observed[0],
            "r_obs": self.observed[1],
            "c_pred": self.predicted[0],
            "r_pred": self.predicted[1],
        }
        if self.jacobian is not None:
            row.update(g_c=float(self.jacobian[0, 0]), g_r=float(self.jacobian[1, 0]))
        if self.sigma is not None:
            row.update(sigma_cc=float(self.sigma[0, 0]), sigma_cr=float(self.sigma[0, 1]),
                       sigma_rr=float(self.sigma[1, 1]))
        if self.ci_theta is not None:
            row.update(se_theta=self.se_theta, ci_lo=self.ci_theta[0], ci_hi=self.ci_theta[1])
        for k, v in sorted(self.diagnostics.items()):
            row[k] = v
        return row


def fit_theta_minimum_distance(c_obs, r_obs, model, grid=201):
    _require(model)
    if grid < 101:
        raise ParameterError("theta grid needs at least 101 points")
    lam, rho = model.lam, model.rho

    def q(th):
        c, r = _limits(lam, rho, th)
        return (c - c_obs) ** 2 + (r - r_obs) ** 2

    ths = np.linspace(0.0, 1.0, grid)
    vals = np.array([q(t) for t in ths])
    i = int(np.argmin(vals))  # first minimum: ties go to the smaller theta
    a, b = ths[max(i - 1, 0)], ths[min(i + 1, grid - 1)]
    res = optimize.minimize_scalar(q, bounds=(a, b), method="bounded", options={"xatol": 1e-10})
    theta, best = (float(res.x), float(res.fun)) if res.fun < vals[i] else (float(ths[i]), float(vals[i]))
    pred = _limits(lam, rho, theta)
    diag = {"boundary": bool(theta <= 1e-6 or theta >= 1.0 - 1e-6)}
    return FitReport(lam, theta, best, (float(c_obs), float(r_obs)), pred, diagnostics=diag)


def fit_theta_simulated(c_obs, r_obs, template, grid=21, reps=4, seed=0):
    """Grid search on theta against simulated mean (C_n, r_n) at the template's n.

    Avoids finite-n bias of the limits at small n; each grid point uses the
    same replicate seeds.
    """
    if grid < 2 or reps < 1:
        raise ParameterError("need grid >= 2 and reps >= 1")
    ths = np.linspace(0.0, 1.0, grid)
    seeds = [rng.derive_seed(seed, 7, b) for b in range(reps)]
    means = []
    for th in ths:
        fam = CopulaFamily.fgm(th, template.d) if th > 0 else CopulaFamily.product(template.d)
        vals = [c_and_r(generate(template.with_(family=fam, seed=s))) for s in seeds]
        means.append(np.mean(vals, axis=0))
    means = np.array(means)
    q = (means[:, 0] - c_obs) ** 2 + (means[:, 1] - r_obs) ** 2
    i = int(np.argmin(q))
    theta = float(ths[i])
    diag = {"boundary": bool(i in (0, grid - 1)), "method": "simulated_grid"}
    return FitReport(template.lam, theta, float(q[i]), (float(c_obs), float(r_obs)),
                     (float(means[i, 0]), float(means[i, 1])), diagnostics=diag)


def invert_monotone(target, which, model, tol=1e-12):
    """theta with f(theta) = target for f = C or r (both increasing in theta)."""
    _require(model)
    if which not in ("C", "r"):
        raise ParameterError("which must be 'C' or 'r'")
    idx = 0 if which == "C" else 1

    def f(th):
        return _limits(model.lam, model.rho, th)[idx]

    lo, hi = f(0.0), f(1.0)
    if abs(target - lo) <= 1e-12:
        return 0.0
    if abs(target - hi) <= 1e-12:
        return 1.0
    if not lo < target < hi:
        raise OutOfRangeError(f"target {target} outside ({lo:.6g}, {hi:.6g}) attainable on [0, 1]")
    return float(optimize.bisect(lambda th: f(th) - target, 0.0, 1.0, xtol=tol, maxiter=200))


# ---------------------------------------------------------------- uncertainty


def jacobian(model, theta, h=1e-4):
    """d(C, r)/d theta by central differences (one-sided at the boundary)."""
    a, b = max(theta - h, 0.0), min(theta + h, 1.0)
    ca, ra = _limits(model.lam, model.rho, a)
    cb, rb = _limits(model.lam, model.rho, b)
    return np.array([[(cb - ca) / (b - a)], [(rb - ra) / (b - a)]])


def bootstrap_sigma(template, reps, seed=0):
    """n * Cov(C_n, r_n) over parametric regenerations of ``template``."""
    vals = np.array([c_and_r(generate(template.with_(seed=rng.derive_seed(seed, b)))) for b in range(reps)])
    return template.n * np.cov(vals.T), vals


def wald_uncertainty(graph, theta_hat, model, bootstrap_reps=50, seed=0, template=None,
                     sigma_override=None, report=None):
    """Sandwich standard error and 95% interval for theta_hat.

    ``sigma_override`` replaces the bootstrap covariance (test hook).
    """
    _require(model)
    if sigma_override is None and bootstrap_reps < 50:
        raise ParameterError("bootstrap_reps must be at least 50")
    n = graph.n
    G = jacobian(model, theta_hat)
    if np.linalg.norm(G) < 1e-8:
        raise CalibrationError("moment map is locally flat at theta_hat; theta is not identifiable here")
    if sigma_override is not None:
        sigma = np.asarray(sigma_override, dtype=np.float64)
    else:
        if template is None:
            template = _template_from(graph, model, theta_hat)
        sigma, _ = bootstrap_sigma(template, bootstrap_reps, seed)
    gtg = float((G.T @ G)[0, 0])
    var = float((G.T @ sigma @ G)[0, 0]) / gtg**2 / n
    se = math.sqrt(max(var, 0.0))
    ci = (max(0.0, theta_hat - 1.96 * se), min(1.0, theta_hat + 1.96 * se))
    if report is None:
        c, r = c_and_r(graph)
        report = FitReport(model.lam, theta_hat, float("nan"), (c, r), _limits(model.lam, model.rho, theta_hat))
    report.jacobian = G
    report.sigma = sigma
    report.se_theta = se
    report.ci_theta = ci
    report.n = n
    report.diagnostics["ci_unreliable"] = bool(theta_hat <= 1e-6 or theta_hat >= 1.0 - 1e-6)
    return report


def _template_from(graph, model, theta):
    cfg = graph.config
    fam = CopulaFamily.fgm(theta, model.dim) if theta > 0 else CopulaFamily.product(model.dim)
    if cfg is not None:
        return cfg.with_(lam=model.lam, family=fam)
    return GenConfig(n=graph.n, rho=model.rho, lam=model.lam, regime=model.regime, kernel=model.kernel,
                     family=fam, marginal=model.marginal)


def calibrate(graph, model, grid=201, bootstrap_reps=0, seed=0):
    """lambda from density, theta by minimum distance, then one refinement pass.

    ``model`` supplies rho, kernel, dimension and link; its lambda and theta
    are ignored.  With ``bootstrap_reps >= 50`` a Wald interval is attached.
    """
    c_obs, r_obs = c_and_r(graph)
    dbar = 2.0 * graph.n_edges / graph.n
    if dbar == 0:
        raise CalibrationError("graph has no edges; lambda is not identifiable")
    kappa2 = 2.0 * model.kernel.radius
    lam = fit_lambda_closed_form(dbar, 0.0, kappa2)
    rep = fit_theta_minimum_distance(c_obs, r_obs, model.with_(lam=min(lam, model.rho), theta=0.0), grid)
    # mean degree depends on theta through M(theta): refit lambda, then theta once more
    lam = fit_lambda_closed_form(dbar, rep.theta_hat, kappa2)
    m = model.with_(lam=min(lam, model.rho), theta=rep.theta_hat)
    rep = fit_theta_minimum_distance(c_obs, r_obs, m, grid)
    m = m.with_(theta=rep.theta_hat)
    rep.lambda_hat = lam
    rep.n = graph.n
    rep.diagnostics["lambda_clipped"] = bool(lam > model.rho)
    rep.diagnostics["truncation_warnings"] = int(graph.meta.get("truncation_warnings", 0))
    if bootstrap_reps:
        wald_uncertainty(graph, rep.theta_hat, m, bootstrap_reps, seed, report=rep)
    return rep

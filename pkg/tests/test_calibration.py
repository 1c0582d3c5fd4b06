import numpy as np
import pytest

from colas.calibration import (
    calibrate,
    fit_lambda,
    fit_lambda_closed_form,
    fit_lambda_simulated,
    fit_theta_minimum_distance,
    invert_monotone,
    jacobian,
    wald_uncertainty,
)
from colas.copula import CopulaFamily, WeightMarginal
from colas.errors import CalibrationError, OutOfRangeError, ParameterError, UnsupportedError
from colas.generator import GenConfig, Regime, generate
from colas.limits import LimitModel, fgm_limit_C, fgm_limit_r
from colas.stats import c_and_r


def _linear(n, lam, theta, seed, rho=None):
    fam = CopulaFamily.fgm(theta) if theta > 0 else CopulaFamily.product()
    return GenConfig(n=n, rho=rho or lam, lam=lam, regime=Regime.FIXED_LINEAR, family=fam, seed=seed)


def test_fit_lambda_examples():
    m = LimitModel(1.0, 1.0, 0.0)
    assert fit_lambda(0.4, m) == pytest.approx(0.8, rel=1e-15)
    assert fit_lambda(6.0, m) == pytest.approx(12.0, rel=1e-15)
    assert fit_lambda_closed_form(0.4, 0.0) == pytest.approx(0.8, rel=1e-15)
    with pytest.raises(ParameterError):
        fit_lambda(0.0, m)


def test_fit_lambda_round_trip():
    for lam in (0.5, 0.9):
        g = generate(_linear(20_000, lam, 0.6, seed=3, rho=1.0))
        lam_hat = fit_lambda(2 * g.n_edges / g.n, LimitModel(1.0, 1.0, 0.6))
        assert abs(lam_hat - lam) / lam <= 0.05


def test_fit_lambda_simulated_bisection():
    tmpl = GenConfig(n=3000, rho=5.0, lam=1.0, regime=Regime.FIXED_EXP, family=CopulaFamily.fgm(0.3, 2), seed=0)
    lam = fit_lambda_simulated(4.0, tmpl, n_seeds=20, seed=1)
    md = np.mean([2 * generate(tmpl.with_(lam=lam, seed=100 + s)).n_edges / 3000 for s in range(20)])
    assert abs(md - 4.0) / 4.0 < 0.03
    with pytest.raises(CalibrationError):
        # fixed-range degree is capped at rho |S| = 10
        fit_lambda_simulated(50.0, tmpl, n_seeds=2, lam_max=1e4)
    with pytest.raises(UnsupportedError):
        fit_lambda(4.0, LimitModel(1.0, 5.0, regime=Regime.FIXED_EXP))


def test_theta_self_consistency():
    m = LimitModel(1.0, 1.0, 0.0)
    for th in [0.1 * i for i in range(1, 10)]:
        mt = m.with_(theta=th)
        rep = fit_theta_minimum_distance(fgm_limit_C(mt), fgm_limit_r(mt), m)
        assert abs(rep.theta_hat - th) <= 1e-6
        assert rep.residual >= 0 and not rep.diagnostics["boundary"]


def test_theta_boundary():
    rep = fit_theta_minimum_distance(0.9, 0.9, LimitModel(1.0, 1.0))
    assert rep.theta_hat == 1.0 and rep.diagnostics["boundary"] and rep.residual > 0
    with pytest.raises(ParameterError):
        fit_theta_minimum_distance(0.3, 0.3, LimitModel(1.0, 1.0), grid=50)


def test_invert_monotone():
    m = LimitModel(1.0, 1.0)
    assert invert_monotone(1 / 3, "C", m) == 0.0
    th = invert_monotone(0.335, "r", m)
    assert 0 < th < 1 and abs(fgm_limit_r(m.with_(theta=th)) - 0.335) <= 1e-9
    with pytest.raises(OutOfRangeError):
        invert_monotone(0.9, "C", m)
    gen = np.random.default_rng(0)
    for which, f in (("C", fgm_limit_C), ("r", fgm_limit_r)):
        lo, hi = f(m), f(m.with_(theta=1.0))
        for t in gen.uniform(lo, hi, 20):
            assert abs(f(m.with_(theta=invert_monotone(t, which, m))) - t) <= 1e-9


def test_wald_zero_sigma():
    g = generate(_linear(2000, 1.0, 0.5, seed=1))
    rep = wald_uncertainty(g, 0.5, LimitModel(1.0, 1.0), sigma_override=np.zeros((2, 2)))
    assert rep.ci_theta == (0.5, 0.5) and rep.se_theta == 0.0


def test_wald_requires_reps_and_slope():
    g = generate(_linear(2000, 1.0, 0.5, seed=1))
    with pytest.raises(ParameterError):
        wald_uncertainty(g, 0.5, LimitModel(1.0, 1.0), bootstrap_reps=10)
    assert np.linalg.norm(jacobian(LimitModel(1.0, 1.0), 0.5)) > 1e-3


def test_calibrate_report_fields():
    g = generate(_linear(5000, 10.0, 0.75, seed=2))
    rep = calibrate(g, LimitModel(10.0, 10.0), bootstrap_reps=50, seed=1)
    assert 0 <= rep.theta_hat <= 1 and rep.residual >= 0
    lo, hi = rep.ci_theta
    assert lo <= rep.theta_hat <= hi
    assert np.allclose(rep.sigma, rep.sigma.T)
    assert np.all(np.linalg.eigvalsh(rep.sigma) >= -1e-12)
    row = rep.flat()
    for key in ("lambda_hat", "theta_hat", "c_obs", "r_pred", "g_c", "sigma_cr", "ci_lo", "ci_hi", "boundary"):
        assert key in row


@pytest.mark.slow
def test_simulate_calibrate_recovers_theta():
    errs = []
    for b in range(10):
        g = generate(_linear(5000, 10.0, 0.75, seed=1000 + b))
        errs.append(abs(calibrate(g, LimitModel(10.0, 10.0)).theta_hat - 0.75))
    assert np.median(errs) <= 0.25


@pytest.mark.slow
def test_ci_half_width_scales_as_root_n():
    widths = {}
    for n in (2000, 8000):
        hw = []
        for b in range(20):
            g = generate(_linear(n, 10.0, 0.5, seed=b))
            rep = wald_uncertainty(g, 0.5, LimitModel(10.0, 10.0), bootstrap_reps=50, seed=b)
            hw.append(rep.se_theta)
        widths[n] = np.mean(hw)
    assert 1.4 <= widths[2000] / widths[8000] <= 2.8


@pytest.mark.slow
def test_ci_coverage():
    covered = 0
    for b in range(50):
        g = generate(_linear(5000, 10.0, 0.5, seed=5000 + b))
        rep = calibrate(g, LimitModel(10.0, 10.0), bootstrap_reps=50, seed=b)
        covered += rep.ci_theta[0] <= 0.5 <= rep.ci_theta[1]
    assert covered >= 40, covered

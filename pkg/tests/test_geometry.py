import math

import numpy as np
import pytest

from colas._kernels.pairs import brute_force_pairs, radius_pairs
from colas.errors import ParameterError, RegimeError
from colas.geometry import (
    Kernel,
    build_cell_index,
    candidates,
    kappa2_lambda,
    kernel_constants,
    torus_displacement,
    torus_distance,
)

# int_{|u|<=1} lens area of two unit disks at distance |u|, by independent
# high-precision quadrature (equals pi^2 - 3 sqrt(3) pi / 4)
KAPPA3_D2 = 5.78855583156237


def test_torus_displacement_examples():
    assert torus_displacement([0.9], [0.1])[0] == pytest.approx(-0.2)
    assert torus_distance([0.9], [0.1]) == pytest.approx(0.2)
    assert np.array_equal(torus_displacement([0.5, 0.5], [0.5, 0.5]), [0.0, 0.0])
    d = torus_displacement([0.95, 0.0], [0.05, 0.9])
    assert d == pytest.approx([-0.1, 0.1])
    assert torus_distance([0.95, 0.0], [0.05, 0.9]) == pytest.approx(math.sqrt(0.02))


def test_torus_displacement_antisymmetric():
    gen = np.random.default_rng(1)
    x, y = gen.random((500, 3)), gen.random((500, 3))
    d = torus_displacement(x, y)
    ok = np.all(np.abs(np.abs(d) - 0.5) > 1e-9, axis=1)
    assert np.allclose(d[ok], -torus_displacement(y, x)[ok])
    assert np.all((d >= -0.5) & (d < 0.5))


def test_dimension_mismatch():
    with pytest.raises(ParameterError):
        torus_displacement([0.1, 0.2], [0.1])


def test_kernel_constants_1d():
    kc = kernel_constants(Kernel.indicator(), 1)
    assert (kc.kappa2, kc.kappa3, kc.i2) == (2.0, 3.0, 2.0)


def test_kernel_constants_2d():
    kc = kernel_constants(Kernel.indicator(), 2)
    assert kc.kappa2 == pytest.approx(math.pi, rel=1e-14)
    assert kc.kappa3 == pytest.approx(KAPPA3_D2, rel=1e-8)
    assert kc.i2 == kc.kappa2
    assert kc.kappa3 <= kc.kappa2**2


def test_kernel_constants_mc_custom_kernel():
    # a custom kernel equal to the indicator ball goes through the MC path
    k = Kernel("custom", 1.0, 1.0, profile=lambda r: (np.asarray(r) <= 1.0).astype(float))
    kc = kernel_constants(k, 2, mc_samples=200_000, seed=3)
    assert kc.method == "monte_carlo"
    assert abs(kc.kappa3 - KAPPA3_D2) <= 3 * kc.stderr["kappa3"] + 1e-12
    assert kc.kappa2 == pytest.approx(math.pi)


def test_kappa2_lambda():
    assert kappa2_lambda(Kernel.indicator(), 1, 1.0, 1.0) == pytest.approx(2 * (1 - math.exp(-1)))
    assert kappa2_lambda(Kernel.indicator(), 1, 1e-6, 1.0) == pytest.approx(2e-6, rel=1e-5)


def test_cell_index_wraps():
    idx = build_cell_index(np.array([0.1, 0.5, 0.9]), 0.25)
    assert 2 in candidates(idx, 0)


def test_cell_index_regime_error():
    with pytest.raises(RegimeError):
        build_cell_index(np.random.default_rng(0).random((10, 2)), 0.5)


def test_cell_index_superset_of_true_neighbours():
    gen = np.random.default_rng(7)
    for trial in range(100):
        n = int(gen.integers(2, 201))
        d = int(gen.integers(1, 4))
        pos = gen.random((n, d))
        r = float(gen.uniform(0.01, 0.45))
        idx = build_cell_index(pos, r)
        bi, bj, _ = brute_force_pairs(pos, r)
        truth = set(zip(bi.tolist(), bj.tolist()))
        found = set()
        for i in range(n):
            for j in candidates(idx, i):
                if j > i and torus_distance(pos[i], pos[j]) <= r:
                    found.add((i, int(j)))
        assert found == truth, trial


def test_radius_pairs_equal_brute_force():
    gen = np.random.default_rng(8)
    for _ in range(100):
        n = int(gen.integers(2, 300))
        d = int(gen.integers(1, 4))
        pos = gen.random((n, d))
        r = float(gen.uniform(0.01, 0.4))
        a = radius_pairs(pos, r)
        b = brute_force_pairs(pos, r)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        assert np.allclose(a[2], b[2])

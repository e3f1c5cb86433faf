"""Wild-restart solver against exact fixed points and the RK4 oracle."""

import math

import numpy as np
import pytest

import kaclab as kl
from kaclab import ModelParams, SpectralDensity, WildConfig, XiGrid
from kaclab.analysis import energy_and_moments

PARAMS = ModelParams(p=1.0, alpha=1.0)


def test_qplus_preserves_constants():
    grid = XiGrid(1e-4, 32.0, 128)
    ones = SpectralDensity(grid, np.ones(grid.count), q=1.0)
    k = kl.make_kernel(0.4)
    out = kl.qplus(ones, ones, k, PARAMS)
    assert np.max(np.abs(out.values - 1.0)) < 1e-14


def test_qplus_equilibrium_fixed_point():
    grid = XiGrid(1e-4, 32.0, 2048)
    M = kl.equilibrium_spectral(PARAMS, grid)
    k = kl.make_kernel(0.4)
    out = kl.qplus(M, M, k, PARAMS)
    assert np.max(np.abs(out.values - M.values)) < 1e-8


def test_qplus_requires_shared_grid():
    a = kl.equilibrium_spectral(PARAMS, XiGrid(1e-4, 32.0, 64))
    b = kl.equilibrium_spectral(PARAMS, XiGrid(1e-4, 32.0, 65))
    with pytest.raises(ValueError):
        kl.qplus(a, b, kl.make_kernel(0.4), PARAMS)


def test_wild_step_matches_collocation():
    grid = XiGrid(1e-4, 32.0, 512)
    f0 = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    k = kl.make_kernel(0.5)
    dt = math.log(2.0) / k.sigma
    fw = kl.wild_step(f0, k, PARAMS, dt, WildConfig(terms_per_step=20))
    fc = kl.collocation_oracle(f0, k, PARAMS, dt, steps=2)
    assert np.max(np.abs(fw.values - fc.values)) < 1e-5


def test_wild_step_guards():
    grid = XiGrid(1e-4, 32.0, 64)
    f0 = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    k = kl.make_kernel(0.4)
    with pytest.raises(ValueError):
        kl.wild_step(f0, k, PARAMS, -1e-3, WildConfig())
    with pytest.raises(ValueError):
        # sigma*dt above the configured cap
        kl.wild_step(f0, k, PARAMS, 2.0 * math.log(2.0) / k.sigma, WildConfig())
    with pytest.raises(ValueError):
        # truncation tail 0.5^6 far above tail_tol
        kl.wild_step(
            f0, k, PARAMS, math.log(2.0) / k.sigma, WildConfig(terms_per_step=5)
        )


def test_evolve_matches_collocation():
    grid = XiGrid(1e-4, 32.0, 512)
    f0 = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    k = kl.make_kernel(0.4)
    fw = kl.evolve(f0, k, PARAMS, 0.5, WildConfig(terms_per_step=24))
    steps = int(np.ceil(k.sigma * 0.5 / 0.5))
    fc = kl.collocation_oracle(f0, k, PARAMS, 0.5, steps)
    assert np.max(np.abs(fw.values - fc.values)) < 1e-4  # measured 7.0e-9


def test_evolve_time_handling():
    grid = XiGrid(1e-4, 32.0, 64)
    f0 = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    k = kl.make_kernel(0.4)
    assert kl.evolve(f0, k, PARAMS, 0.0) is f0
    with pytest.raises(ValueError):
        kl.evolve(f0, k, PARAMS, -0.1)


def test_equilibrium_stationary_under_evolve():
    grid = XiGrid(1e-4, 32.0, 256)
    M = kl.equilibrium_spectral(PARAMS, grid)
    k = kl.make_kernel(0.4)
    out = kl.evolve(M, k, PARAMS, 0.25, WildConfig(terms_per_step=24))
    assert np.max(np.abs(out.values - M.values)) < 1e-5


def test_condition_a_propagates():
    # the small-xi limit (1 - f)/xi^q stays at alpha along the flow
    grid = XiGrid(1e-4, 32.0, 512)
    f0 = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    k = kl.make_kernel(0.4)
    f1 = kl.evolve(f0, k, PARAMS, 1.0, WildConfig(terms_per_step=24))
    a_eff = (1.0 - f1.values[0]) / grid.xi_min**PARAMS.q
    assert abs(a_eff - PARAMS.alpha) < 0.05 * PARAMS.alpha


def test_representation_exponent_propagates():
    grid = XiGrid(1e-4, 32.0, 128)
    k = kl.make_kernel(0.4)
    g = kl.sample_spectral(kl.gaussian(1.0), PARAMS, grid)
    assert kl.evolve(g, k, PARAMS, 0.1).q == 2.0
    m = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    assert kl.evolve(m, k, PARAMS, 0.1).q == PARAMS.q
    assert kl.qplus(m, m, k, PARAMS).q == PARAMS.q
    assert kl.collocation_oracle(g, k, PARAMS, 0.05, steps=4).q == 2.0


def test_energy_decay_along_flow():
    # mean energy of the cutoff flow is exactly E(0) e^{-L_eps t}
    params = ModelParams(p=0.5, alpha=1.0)
    grid = XiGrid(1e-4, 32.0, 512)
    k = kl.make_kernel(0.4)
    f0 = kl.sample_spectral(kl.gaussian(1.0), params, grid)
    f1 = kl.evolve(f0, k, params, 0.5, WildConfig(terms_per_step=24))
    L = kl.energy_loss_rate(k, params)
    assert abs(energy_and_moments(f1, 2) - math.exp(-L * 0.5)) < 1e-3


def test_collocation_oracle_guards():
    grid = XiGrid(1e-4, 32.0, 64)
    f0 = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    k = kl.make_kernel(0.4)
    with pytest.raises(ValueError):
        kl.collocation_oracle(f0, k, PARAMS, 0.5, steps=0)
    with pytest.raises(ValueError):
        kl.collocation_oracle(f0, k, PARAMS, -0.5, steps=8)
    with pytest.raises(ValueError):
        # sigma * (t/steps) = 3.55 violates the 0.5 stability bound
        kl.collocation_oracle(f0, k, PARAMS, 0.5, steps=5)


def test_collocation_oracle_order():
    # halving the step divides the error by ~16 (classical RK4)
    grid = XiGrid(1e-4, 32.0, 256)
    f0 = kl.sample_spectral(kl.mixture(), PARAMS, grid)
    k = kl.make_kernel(0.5)
    t = 8.0 / k.sigma
    ref = kl.collocation_oracle(f0, k, PARAMS, t, steps=64)
    e16 = np.max(np.abs(kl.collocation_oracle(f0, k, PARAMS, t, 16).values - ref.values))
    e32 = np.max(np.abs(kl.collocation_oracle(f0, k, PARAMS, t, 32).values - ref.values))
    assert 8.0 < e16 / e32 < 30.0


def test_wild_config_validation():
    with pytest.raises(ValueError):
        WildConfig(terms_per_step=0)
    with pytest.raises(ValueError):
        WildConfig(max_sigma_dt=0.0)

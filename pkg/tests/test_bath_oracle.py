"""Discretized bath: grid construction, exact propagator and thermal Monte Carlo."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from excitondecoh import ParameterError, RecurrenceError, SuperpositionSpec
from excitondecoh.amplitudes import u_analytic
from excitondecoh.bath_oracle import (
    WORKERS_ENV,
    BathPropagator,
    build_grid,
    kernel_from_grid,
    oracle_beta,
    propagator,
    thermal_mc_factor,
)
from excitondecoh.model import ModelParams, memory_kernel


def test_grid_example(fig1):
    grid = build_grid(fig1, 50, 2001)
    assert grid.spacing == pytest.approx(0.0025, rel=1e-12)
    assert grid.recurrence_time == pytest.approx(2 * math.pi / 0.0025, rel=1e-12)
    assert grid.count == 2001
    assert grid.frequencies[1000] == fig1.omega
    np.testing.assert_allclose(grid.frequencies - fig1.omega, -(grid.frequencies - fig1.omega)[::-1],
                               atol=1e-10)


def test_grid_weight_matches_truncated_lorentzian(fig1):
    # midpoint sum vs the Lorentzian mass inside the window, (2/pi) arctan(W) M G
    for w in (50, 200):
        grid = build_grid(fig1, w, 4001)
        inside = 2 / math.pi * math.atan(w) * fig1.big_m * fig1.gamma
        assert np.sum(grid.couplings**2) == pytest.approx(inside, rel=1e-3)


def test_grid_rejects_bad_sizes(fig1):
    with pytest.raises(ParameterError):
        build_grid(fig1, 50, 2000)
    with pytest.raises(ParameterError):
        build_grid(fig1, 50, 1)
    with pytest.raises(ParameterError):
        build_grid(fig1, 5, 101)


def test_grid_warns_below_zero_frequency():
    params = ModelParams(1.0, 0.05, 1.0)
    with pytest.warns(UserWarning, match="below zero"):
        build_grid(params, 50, 101)


def test_kernel_from_grid(fig1):
    grid = build_grid(fig1, 50, 2001)
    tau = np.array([0.0, 1 / fig1.gamma])
    k = kernel_from_grid(grid, tau)
    assert np.all(np.abs(k.imag) <= 1e-12)
    np.testing.assert_allclose(k.real[1], memory_kernel(tau[1], fig1), rtol=0.01)
    assert isinstance(kernel_from_grid(grid, 0.0), complex)


def test_recurrence_guard(small_grid, small_prop):
    bad = 0.51 * small_grid.recurrence_time
    with pytest.raises(RecurrenceError):
        small_prop.amplitudes(bad)
    with pytest.raises(RecurrenceError):
        kernel_from_grid(small_grid, bad)
    small_prop.amplitudes(0.49 * small_grid.recurrence_time)


def test_propagator_identity_at_zero(small_prop):
    g = small_prop.matrix(0.0)
    np.testing.assert_allclose(g, np.eye(g.shape[0]), atol=1e-12)
    amp = small_prop.amplitudes(0.0)
    assert amp.u == pytest.approx(1.0, abs=1e-12)
    assert np.abs(amp.v_modes).max() < 1e-12


def test_propagator_matches_matrix_exponential(fig1):
    grid = build_grid(fig1, 20, 41)
    prop = BathPropagator(grid, fig1)
    n = grid.count + 1
    h = np.zeros((n, n))
    h[0, 0] = fig1.omega
    h[0, 1:] = h[1:, 0] = grid.couplings
    h[np.arange(1, n), np.arange(1, n)] = grid.frequencies
    for t in (0.3, 2.0, 7.5):
        np.testing.assert_allclose(prop.matrix(t), expm(-1j * h * t), atol=1e-9)


def test_three_mode_grid_is_unitary(fig1):
    prop = BathPropagator(build_grid(fig1, 10, 3), fig1)
    for t in (0.0, 1.0, 6.0):
        assert prop.unitarity_defect(t) < 1e-13


def test_unitarity_and_conservation(small_prop):
    for t in np.linspace(0, 60, 7):
        amp = small_prop.amplitudes(t)
        assert amp.unitarity_defect < 1e-12
        assert abs(abs(amp.u) ** 2 + amp.env_weight - 1) < 1e-12
        assert small_prop.exciton_row_orthogonality(t) < 1e-12
    assert small_prop.unitarity_defect(37.0) < 1e-12


def test_propagator_is_symmetric(small_prop):
    # h is real symmetric, so G = G^T and in particular |v_j| = |u_j|
    for t in (1.0, 13.0, 60.0):
        g = small_prop.matrix(t)
        np.testing.assert_allclose(g, g.T, atol=1e-13)
        amp = small_prop.amplitudes(t)
        np.testing.assert_allclose(np.abs(amp.v_modes), np.abs(g[0, 1:]), atol=1e-13)


def test_survival_matches_amplitudes(small_prop):
    times = np.array([0.0, 2.0, 45.0])
    fast = small_prop.survival(times)
    np.testing.assert_allclose(fast, [small_prop.amplitudes(t).u for t in times], atol=1e-13)


def test_oracle_tracks_closed_form(wide_prop, fig1):
    for amp in propagator(wide_prop.grid, fig1, [0.0, 1.57, 10.0, 60.0]):
        assert abs(amp.u - u_analytic(amp.t, fig1)) < 1e-3


def test_oracle_beta_zero_temperature(small_grid, fig1):
    assert np.all(oracle_beta(small_grid, fig1, [0.0, 10.0], 0.0) == 0)


def test_oracle_beta_modes(small_grid, small_prop, fig1):
    peak = oracle_beta(small_grid, fig1, [5.0], 20000.0, prop=small_prop)
    exact = oracle_beta(small_grid, fig1, [5.0], 20000.0, "exact_omega_dependent", prop=small_prop)
    assert exact[0] == pytest.approx(peak[0], rel=0.05)
    with pytest.raises(ParameterError):
        oracle_beta(small_grid, fig1, [5.0], 20000.0, "nonsense", prop=small_prop)


# Monte Carlo ---------------------------------------------------------------

T_HOT = 25000.0  # n ~ 1 at 1500 meV


def test_mc_identical_branches_give_one(small_grid, small_prop, fig1):
    spec = SuperpositionSpec(0.3, 0.3)
    mean, se = thermal_mc_factor(small_grid, fig1, spec, [0.0, 5.0, 20.0], T_HOT, 1000, seed=1,
                                 prop=small_prop)
    np.testing.assert_allclose(mean, 1.0, atol=1e-12)
    np.testing.assert_allclose(se, 0.0, atol=1e-12)


def test_mc_zero_temperature_is_deterministic(small_grid, small_prop, fig1, cat01):
    mean, se = thermal_mc_factor(small_grid, fig1, cat01, [0.0, 3.0], 0.0, 100, seed=3, prop=small_prop)
    sv2 = np.sum(np.abs(small_prop.amplitudes(3.0).v_modes) ** 2)
    assert mean[1] == pytest.approx(math.exp(-0.02 * sv2), rel=1e-14)
    assert mean[0] == pytest.approx(1.0)
    assert np.all(se == 0)


def test_mc_full_and_reduced_agree(fig1):
    grid = build_grid(fig1, 20, 101)
    prop = BathPropagator(grid, fig1)
    spec = SuperpositionSpec(0.4 + 0.1j, -0.2j)
    args = (grid, fig1, spec, [0.0, 2.0, 9.0], T_HOT, 300)
    red = thermal_mc_factor(*args, seed=11, method="reduced", prop=prop)
    full = thermal_mc_factor(*args, seed=11, method="full", prop=prop)
    np.testing.assert_allclose(red[0], full[0], atol=1e-13)
    np.testing.assert_allclose(red[1], full[1], atol=1e-13)


def test_mc_independent_of_worker_count(small_grid, small_prop, fig1, cat01, monkeypatch):
    args = (small_grid, fig1, cat01, [1.0, 10.0], T_HOT, 5000)
    one = thermal_mc_factor(*args, seed=5, workers=1, prop=small_prop)
    four = thermal_mc_factor(*args, seed=5, workers=4, prop=small_prop)
    monkeypatch.setenv(WORKERS_ENV, "3")
    env = thermal_mc_factor(*args, seed=5, prop=small_prop)
    for other in (four, env):
        assert np.array_equal(one[0], other[0]) and np.array_equal(one[1], other[1])


def test_mc_stderr_scales_as_inverse_root(small_grid, small_prop, fig1):
    spec = SuperpositionSpec(1.0, -1.0)
    _, se1 = thermal_mc_factor(small_grid, fig1, spec, [20.0], T_HOT, 2000, seed=2, prop=small_prop)
    _, se2 = thermal_mc_factor(small_grid, fig1, spec, [20.0], T_HOT, 32000, seed=2, prop=small_prop)
    assert se1[0] / se2[0] == pytest.approx(4.0, rel=0.15)


def test_mc_requires_seed_and_samples(small_grid, fig1, cat01):
    with pytest.raises(ParameterError):
        thermal_mc_factor(small_grid, fig1, cat01, [1.0], T_HOT, 1000, seed=None)
    with pytest.raises(ParameterError):
        thermal_mc_factor(small_grid, fig1, cat01, [1.0], T_HOT, 10, seed=1)
    with pytest.raises(ParameterError):
        thermal_mc_factor(small_grid, fig1, cat01, [1.0], T_HOT, 1000, seed=1, method="other")


def test_unitarity_bound_dominates_explicit_defect(small_prop):
    bound = small_prop.unitarity_bound()
    assert bound < 1e-11
    for t in (0.0, 17.0, 60.0):
        assert small_prop.unitarity_defect(t) <= bound


def test_mc_magnitude_stderr(small_grid, small_prop, fig1):
    # radial stderr: smaller than the complex one, and calibrated across seeds
    spec = SuperpositionSpec(1.0, -1.0)
    t = [8.0]
    ref, _ = thermal_mc_factor(small_grid, fig1, spec, t, T_HOT, 200_000, seed=99, prop=small_prop)
    z = []
    for seed in range(30):
        mean, se = thermal_mc_factor(small_grid, fig1, spec, t, T_HOT, 2000, seed=seed, prop=small_prop,
                                     stderr_kind="magnitude")
        _, se_c = thermal_mc_factor(small_grid, fig1, spec, t, T_HOT, 2000, seed=seed, prop=small_prop)
        assert se[0] < se_c[0]
        z.append((abs(mean[0]) - abs(ref[0])) / se[0])
    assert 0.5 < np.std(z) < 1.6
    with pytest.raises(ParameterError):
        thermal_mc_factor(small_grid, fig1, spec, t, T_HOT, 200, seed=1, stderr_kind="other")

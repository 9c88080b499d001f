"""Model parameters, derived constants and spectral quantities."""

import math
import warnings

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings
from scipy.integrate import quad

from excitondecoh import ParameterError, PoleProximityError
from excitondecoh.model import (
    CONSTANTS,
    ModelParams,
    Regime,
    coupling_density,
    derive_params,
    kernel_laplace,
    mean_occupation,
    memory_kernel,
    u_laplace,
)

# frozen with mpmath at 30 digits
THETA_FIG1 = 1.99937490231322049572819258113
CURLY_D_FIG1 = 1.00000272077114427860696517413

positive = st.floats(min_value=1e-3, max_value=1e2, allow_nan=False)


def test_fig1_derived(fig1):
    d = derive_params(fig1)
    assert d.regime is Regime.UNDERDAMPED
    assert d.theta.imag == 0
    assert d.theta.real == pytest.approx(THETA_FIG1, rel=1e-14)
    assert d.curly_d == pytest.approx(CURLY_D_FIG1, rel=1e-13)


def test_overdamped_and_critical():
    over = derive_params(ModelParams(100.0, 1.0, 0.1))
    assert over.regime is Regime.OVERDAMPED
    assert over.theta.real == 0 and over.theta.imag == pytest.approx(math.sqrt(0.6))
    crit = derive_params(ModelParams(100.0, 1.0, 0.25))
    assert crit.regime is Regime.CRITICAL
    assert abs(crit.theta) < 1e-6


@settings(max_examples=200, deadline=None)
@given(gamma=positive, big_m=positive)
def test_theta_identity_and_poles(gamma, big_m):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        params = ModelParams(1e4, gamma, big_m)
    d = derive_params(params)
    assert d.theta**2 == pytest.approx(4 * big_m * gamma - gamma**2, rel=1e-9, abs=1e-12 * gamma**2)
    p_plus, p_minus = d.poles
    # roots of p^2 + G p + M G
    assert p_plus + p_minus == pytest.approx(-gamma, rel=1e-12)
    assert p_plus * p_minus == pytest.approx(big_m * gamma, rel=1e-9)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_params_reject_nonpositive(bad):
    with pytest.raises(ParameterError):
        ModelParams(1500.0, bad, 20.0)
    with pytest.raises(ParameterError):
        ModelParams(bad, 0.05, 20.0)


def test_params_warn_when_not_narrow():
    with pytest.warns(UserWarning):
        ModelParams(1.0, 0.5, 1.0)


def test_coupling_density_peak_and_half_width(fig1):
    assert coupling_density(fig1.omega, fig1) == pytest.approx(20 / math.pi, rel=1e-14)
    half = coupling_density(fig1.omega + fig1.gamma, fig1)
    assert half == pytest.approx(10 / math.pi, rel=1e-12)


def test_coupling_density_normalization(fig1):
    g = fig1.gamma
    val, _ = quad(lambda w: coupling_density(w, fig1), fig1.omega - 200 * g, fig1.omega + 200 * g,
                  points=[fig1.omega], limit=500)
    assert val == pytest.approx(fig1.big_m * g, rel=5e-3)


def test_memory_kernel(fig1):
    tau = np.array([0.0, 1.0, -1.0, 20.0])
    k = memory_kernel(tau, fig1)
    np.testing.assert_allclose(k, 1.0 * np.exp(-0.05 * np.abs(tau)), rtol=1e-14)


@pytest.mark.parametrize("p", [0.05, 0.25, 1.0, 3.0])
def test_kernel_laplace_matches_numeric(fig1, p):
    val, _ = quad(lambda t: memory_kernel(t, fig1) * math.exp(-p * t), 0, np.inf)
    assert kernel_laplace(p, fig1) == pytest.approx(val, rel=1e-8)


def test_u_laplace_example(fig1):
    assert u_laplace(0.05, fig1) == pytest.approx(0.099502487562189054726, rel=1e-13)


def test_u_laplace_pole_guard(fig1):
    pole = derive_params(fig1).poles[0]
    with pytest.raises(PoleProximityError):
        u_laplace(pole, fig1)


def test_mean_occupation_examples():
    assert mean_occupation(1.0, 1.0) == pytest.approx(9.12481082930974686e-6, rel=1e-10)
    n300 = mean_occupation(1.0, 300.0)
    assert n300 == pytest.approx(25.3552133980921650, rel=1e-12)
    high_t = CONSTANTS.k_B * 300.0 / 1.0
    assert abs(high_t - n300) / n300 < 0.02
    assert mean_occupation(1500.0, 0.0) == 0.0


def test_mean_occupation_rejects_negative_temperature():
    with pytest.raises(ParameterError):
        mean_occupation(1.0, -1.0)


@given(t1=st.floats(1.0, 1e5), t2=st.floats(1.0, 1e5))
def test_mean_occupation_monotone_in_temperature(t1, t2):
    lo, hi = sorted((t1, t2))
    assert mean_occupation(1500.0, lo) <= mean_occupation(1500.0, hi)

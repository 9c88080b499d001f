"""Closed-form survival amplitude u(t) and bath amplitudes v_j(t).

The survival amplitude is

    u(t) = [cos(theta t / 2) + (gamma / theta) sin(theta t / 2)] exp(-gamma t / 2)

and the bath amplitude created from the initial exciton is
``v_j(t) = g_j * v_hat(t, omega_j)`` with ``v_hat`` the coupling-independent
two-pole expression. All evaluation is done in complex arithmetic so the
overdamped regime (imaginary theta) needs no separate code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RegimeError
from .model import DerivedParams, ModelParams, derive_params

# below this |theta| / gamma the two poles are merged analytically
_CRITICAL_TOL = 1e-6
# below this |z t| the exponential ratios switch to their Taylor series
_SERIES_TOL = 1e-3


def _scalar_or_array(x):
    return x if np.ndim(x) else x[()]


def _check_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("times must be non-negative")
    return t


def _sinc(z):
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 - z**2 / 6 + z**4 / 120, np.sin(safe) / safe)


def _phi(z, t):
    """(exp(z t) - 1) / z, stable at z -> 0."""
    z, t = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(t, dtype=float))
    zt = z * t
    small = np.abs(zt) < _SERIES_TOL
    safe = np.where(small, 1.0, z)
    series = t * (1 + zt / 2 + zt**2 / 6 + zt**3 / 24)
    return np.where(small, series, np.expm1(zt) / safe)


def _dphi(z, t):
    """d/dz of _phi(z, t)."""
    z, t = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(t, dtype=float))
    zt = z * t
    small = np.abs(zt) < _SERIES_TOL
    safe = np.where(small, 1.0, z)
    series = t**2 * (0.5 + zt / 3 + zt**2 / 8 + zt**3 / 30)
    full = (t * np.exp(zt) - np.expm1(zt) / safe) / safe
    return np.where(small, series, full)


def _damped_bracket(x, gt):
    """``[cos x + (gt/2) sin(x)/x] exp(-gt/2)`` without overflow for imaginary ``x``.

    ``|Im x| < gt/2`` always holds, so the exponents ``+-i x - gt/2`` are
    non-positive in real part.
    """
    x = np.asarray(x, dtype=complex)
    gt = np.asarray(gt, dtype=float)
    e_plus = np.exp(1j * x - 0.5 * gt)
    e_minus = np.exp(-1j * x - 0.5 * gt)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    sin_part = np.where(small, _sinc(np.where(small, x, 0)) * np.exp(-0.5 * gt),
                        (e_plus - e_minus) / (2j * safe))
    return 0.5 * (e_plus + e_minus) + 0.5 * gt * sin_part


def u_analytic(t, params: ModelParams, derived: DerivedParams | None = None):
    """Survival amplitude u(t); ``u(0) = 1``.

    Real for every regime (theta is either real or purely imaginary), but
    returned as complex to share a dtype with the oracle.
    """
    t = _check_times(t)
    derived = derived or derive_params(params)
    # (gamma / theta) sin(x) == (gamma t / 2) sinc(x), finite at theta = 0
    out = _damped_bracket(derived.half_theta * t, params.gamma * t)
    return _scalar_or_array(np.asarray(out.real + 0j, dtype=complex))


def env_weight(t, params: ModelParams, derived: DerivedParams | None = None):
    """Weight transferred to the bath, ``1 - |u(t)|^2 = sum_j |u_j(t)|^2``."""
    u = np.asarray(u_analytic(t, params, derived))
    w = 1.0 - np.abs(u) ** 2
    w = np.where((w < 0) & (w > -1e-12), 0.0, w)
    w = np.where((w > 1) & (w < 1 + 1e-12), 1.0, w)
    return _scalar_or_array(w)


def v_hat(t, omega_j, params: ModelParams, derived: DerivedParams | None = None):
    """Bath amplitude per unit coupling, ``v_j(t) / g_j``.

    Lab-frame phase convention: ``v_hat`` carries the ``exp(-i omega_j t)``
    free evolution, so it equals the propagator entry ``G_jb(t) / g_j`` in the
    weak-discretization limit. ``t`` and ``omega_j`` broadcast.
    """
    t = _check_times(t)
    derived = derived or derive_params(params)
    omega_j = np.asarray(omega_j, dtype=float)
    t, omega_j = np.broadcast_arrays(t, omega_j)
    g = params.gamma
    p_plus, p_minus = derived.poles
    delta = omega_j - params.omega
    z_plus = p_plus + 1j * delta
    z_minus = p_minus + 1j * delta
    phi_plus = _phi(z_plus, t)
    phi_minus = _phi(z_minus, t)
    # sum_k A_k phi(z_k) with A_+- = (1 -+ i gamma/theta) / 2, written as
    # mean + (gamma/2) * divided difference to survive theta -> 0
    if abs(derived.theta) < _CRITICAL_TOL * g:
        quotient = _dphi(0.5 * (z_plus + z_minus), t)
    else:
        quotient = (phi_plus - phi_minus) / (z_plus - z_minus)
    total = 0.5 * (phi_plus + phi_minus) + 0.5 * g * quotient
    out = -1j * np.exp(-1j * omega_j * t) * total
    return _scalar_or_array(np.asarray(out))


def v_analytic(t, omega_j, params: ModelParams, coupling, derived: DerivedParams | None = None):
    """Bath amplitude ``v_j(t) = coupling * v_hat(t, omega_j)``.

    ``coupling`` is the effective (real) mode coupling, e.g.
    :attr:`BathGrid.couplings` for a discretized bath.
    """
    return np.asarray(coupling) * v_hat(t, omega_j, params, derived)


def exponent_series(t, params: ModelParams, order: int = 2):
    """Short-time expansion of ``1 - |u(t)|^2``.

    ``order=2`` gives the leading term ``M G t^2``; ``order=3`` adds
    ``-M G^2 t^3 / 3``. There is no linear term.

    Raises
    ------
    RegimeError
        If ``gamma t > 0.1`` or ``|theta| t > 0.1``.
    """
    if order not in (2, 3):
        raise ParameterError("order must be 2 or 3")
    t = _check_times(t)
    derived = derive_params(params)
    if np.any(params.gamma * t > 0.1) or np.any(abs(derived.theta) * t > 0.1):
        raise RegimeError("exponent_series requires gamma t <= 0.1 and |theta| t <= 0.1")
    mg = params.big_m * params.gamma
    out = mg * t**2
    if order == 3:
        out = out - mg * params.gamma * t**3 / 3
    return _scalar_or_array(out)


@dataclass(frozen=True)
class AmplitudeSample:
    t: float
    u: complex
    env_weight: float


def sample(t: float, params: ModelParams) -> AmplitudeSample:
    u = complex(u_analytic(t, params))
    return AmplitudeSample(t=float(t), u=u, env_weight=1.0 - abs(u) ** 2)

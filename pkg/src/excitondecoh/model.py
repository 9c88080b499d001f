"""Physical parameters, coupling density, memory kernel and Laplace-domain objects.

Everything is parameterized by three energies (meV): the quasimode/exciton
energy ``omega``, the quasimode linewidth ``gamma`` and the collective
coupling strength ``big_m``. The microscopic quantities (molecule number,
dipole factor, cavity length) only ever enter through ``big_m``.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PoleProximityError


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 0.6582119569  # meV ps
    k_B: float = 0.0861733  # meV / K


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs, all in meV.

    Parameters
    ----------
    omega : float
        Quasimode centre (= exciton transition) energy.
    gamma : float
        Quasimode decay rate (Lorentzian half width).
    big_m : float
        Collective coupling strength; ``big_m * gamma`` is the total
        spectral weight of the bath.
    """

    omega: float
    gamma: float
    big_m: float

    def __post_init__(self):
        for name in ("omega", "gamma", "big_m"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
            if value <= 0:
                raise ParameterError(f"{name} must be positive, got {value!r}")
        if self.omega < 10 * self.gamma:
            warnings.warn(
                f"omega={self.omega} is not much larger than gamma={self.gamma}; "
                "the extended-bandwidth approximation is poor here",
                stacklevel=3,
            )


class Regime(str, enum.Enum):
    UNDERDAMPED = "underdamped"
    OVERDAMPED = "overdamped"
    CRITICAL = "critical"


@dataclass(frozen=True)
class DerivedParams:
    theta: complex
    regime: Regime
    curly_d: float
    poles: tuple[complex, complex]

    @property
    def half_theta(self) -> complex:
        return self.theta / 2


def _short_time_constant(gamma: float, big_m: float) -> float:
    # (Theta/2)^2 = M*Gamma - Gamma^2/4
    q = big_m * gamma - gamma**2 / 4
    g2 = gamma**2
    num = big_m * gamma * (2 * q + g2) * (q + 2 * g2)
    den = 2 * (q + g2 / 4) ** 2 * (q + 9 * g2 / 4)
    return num / den


def derive_params(params: ModelParams) -> DerivedParams:
    """Oscillation frequency, damping regime, short-time constant and poles.

    The frequency ``theta = sqrt(4 M Gamma - Gamma^2)`` is stored as a complex
    number so the overdamped case (imaginary theta) flows through the same
    formulas.
    """
    if params.gamma <= 0 or params.big_m <= 0:
        raise ParameterError("gamma and big_m must be positive")
    gamma, big_m = params.gamma, params.big_m
    disc = 4 * big_m * gamma - gamma**2
    theta = cmath.sqrt(complex(disc))
    if disc > 0:
        regime = Regime.UNDERDAMPED
    elif disc < 0:
        regime = Regime.OVERDAMPED
    else:
        regime = Regime.CRITICAL
    poles = ((-gamma + 1j * theta) / 2, (-gamma - 1j * theta) / 2)
    return DerivedParams(
        theta=theta,
        regime=regime,
        curly_d=_short_time_constant(gamma, big_m),
        poles=poles,
    )


def coupling_density(omega_j, params: ModelParams):
    """Spectral weight per unit energy, ``J(w) = M G^2 / (pi ((w - W)^2 + G^2))``.

    This is the mode density times the squared collective coupling; its
    integral over the real line is ``M * G``.
    """
    x = np.asarray(omega_j, dtype=float) - params.omega
    g = params.gamma
    out = params.big_m * g**2 / (np.pi * (x**2 + g**2))
    return out if out.ndim else float(out)


def memory_kernel(tau, params: ModelParams):
    """Bath correlation function ``K(tau) = M G exp(-G |tau|)``."""
    tau = np.asarray(tau, dtype=float)
    out = params.big_m * params.gamma * np.exp(-params.gamma * np.abs(tau))
    return out if out.ndim else float(out)


def kernel_laplace(p, params: ModelParams):
    """Laplace transform of the memory kernel, ``M G / (p + G)``."""
    p = np.asarray(p, dtype=complex)
    out = params.big_m * params.gamma / (p + params.gamma)
    return out if out.ndim else complex(out)


def u_laplace(p, params: ModelParams):
    """Laplace transform of the survival amplitude, ``(p + G) / (p^2 + G p + M G)``.

    Raises
    ------
    PoleProximityError
        If ``|p^2 + G p + M G| < 1e-14 |p|^2``.
    """
    p = np.asarray(p, dtype=complex)
    g, m = params.gamma, params.big_m
    den = p**2 + g * p + m * g
    if np.any(np.abs(den) < 1e-14 * np.abs(p) ** 2):
        raise PoleProximityError("u_laplace evaluated at a pole of p^2 + G p + M G")
    out = (p + g) / den
    return out if out.ndim else complex(out)


def mean_occupation(omega, temperature: float):
    """Bose-Einstein occupation ``1 / (exp(w / k_B T) - 1)``; zero at ``T = 0``."""
    if temperature < 0:
        raise ParameterError(f"temperature must be >= 0, got {temperature}")
    omega = np.asarray(omega, dtype=float)
    if temperature == 0:
        out = np.zeros_like(omega)
    else:
        # beyond ~700 the occupation underflows to zero anyway
        x = np.minimum(omega / (CONSTANTS.k_B * temperature), 700.0)
        out = 1.0 / np.expm1(x)
    return out if out.ndim else float(out)

"""Decoherence factors of coherent-state superpositions and characteristic times.

Zero temperature::

    F(t) = exp[(-|a1|^2/2 - |a2|^2/2 + conj(a1) a2) (1 - |u(t)|^2)]

Thermal bath (P-representation average)::

    F(t) = F_0(t) * exp[-|a1 - a2|^2 |u(t)|^2 beta(T, t) / 4]

with ``beta(T, t) = sum_j |v_j(t)|^2 n_j``. ``beta`` can be evaluated by
adaptive quadrature (default), by closed residue forms of the detuning
integrals, by the linear short-time form, or by the discrete oracle sum.

The short-time forms here (``factor_short_paper``, ``beta_short``,
``factor_thermal_short``) are linear in ``t``; the exact onset is quadratic.
They are kept for comparison and feed :mod:`excitondecoh.reports`.
"""

from __future__ import annotations

import cmath
import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import bath_oracle
from .amplitudes import _check_times, _damped_bracket, u_analytic, v_hat
from .errors import ConvergenceError, ParameterError, RegimeError
from .model import CONSTANTS, ModelParams, Regime, coupling_density, derive_params, mean_occupation

NO_DECOHERENCE = math.inf

SHORT_TIME_LIMIT = 0.1


class OccupationMode(str, enum.Enum):
    PEAK = "peak_approximation"
    EXACT = "exact_omega_dependent"


class Method(str, enum.Enum):
    EXACT_ZERO_T = "exact_zero_T"
    PAPER_SHORT_TIME = "paper_short_time"
    THERMAL_EXACT_U = "thermal_exact_u"
    THERMAL_SHORT_TIME = "thermal_short_time"
    THERMAL_HIGH_T = "thermal_high_T"
    ORACLE_MC = "oracle_mc"


def coherent_overlap(alpha1: complex, alpha2: complex) -> complex:
    """``<alpha1|alpha2>``."""
    return complex(np.exp(-0.5 * abs(alpha1) ** 2 - 0.5 * abs(alpha2) ** 2 + np.conj(alpha1) * alpha2))


@dataclass(frozen=True)
class SuperpositionSpec:
    """Initial exciton state ``c1 |alpha1> + c2 |alpha2>``.

    If both coefficients are omitted they are set equal and normalized.
    """

    alpha1: complex
    alpha2: complex
    c1: complex | None = None
    c2: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "alpha1", complex(self.alpha1))
        object.__setattr__(self, "alpha2", complex(self.alpha2))
        if self.c1 is None and self.c2 is None:
            ov = coherent_overlap(self.alpha1, self.alpha2).real
            c = 1 / math.sqrt(2 * (1 + ov))
            object.__setattr__(self, "c1", complex(c))
            object.__setattr__(self, "c2", complex(c))
        else:
            object.__setattr__(self, "c1", complex(self.c1 or 0))
            object.__setattr__(self, "c2", complex(self.c2 or 0))
        if self.c1 == 0 and self.c2 == 0:
            raise ParameterError("c1 and c2 cannot both be zero")
        if abs(self.norm - 1) > 1e-9:
            warnings.warn(f"superposition is not normalized (norm = {self.norm:.12g})", stacklevel=3)

    @classmethod
    def cat(cls, alpha: complex, parity: str = "even") -> "SuperpositionSpec":
        """Even or odd cat state built from ``|alpha>`` and ``|-alpha>``."""
        alpha = complex(alpha)
        ov = math.exp(-2 * abs(alpha) ** 2)
        if parity == "even":
            c = 1 / math.sqrt(2 * (1 + ov))
            return cls(alpha, -alpha, c, c)
        if parity == "odd":
            c = 1 / math.sqrt(2 * (1 - ov))
            return cls(alpha, -alpha, c, -c)
        raise ParameterError(f"parity must be 'even' or 'odd', got {parity!r}")

    @property
    def norm(self) -> float:
        ov = coherent_overlap(self.alpha1, self.alpha2)
        return (abs(self.c1) ** 2 + abs(self.c2) ** 2
                + 2 * (np.conj(self.c1) * self.c2 * ov).real)

    @property
    def exponent_coefficient(self) -> complex:
        """``-|a1|^2/2 - |a2|^2/2 + conj(a1) a2``; real part is ``-|a1 - a2|^2 / 2``."""
        a1, a2 = self.alpha1, self.alpha2
        # real part written as a square so it is never positive in floating point
        return complex(-0.5 * abs(a1 - a2) ** 2, (np.conj(a1) * a2).imag)

    @property
    def separation2(self) -> float:
        return abs(self.alpha1 - self.alpha2) ** 2


@dataclass(frozen=True)
class ThermalSpec:
    temperature: float
    occupation_mode: OccupationMode = OccupationMode.PEAK

    def __post_init__(self):
        if self.temperature < 0:
            raise ParameterError(f"temperature must be >= 0, got {self.temperature}")
        object.__setattr__(self, "occupation_mode", OccupationMode(self.occupation_mode))

    def n_bar(self, params: ModelParams) -> float:
        return mean_occupation(params.omega, self.temperature)


@dataclass(frozen=True, eq=False)
class DecoherenceSeries:
    times: np.ndarray
    factor: np.ndarray
    method: Method
    stderr: np.ndarray | None = field(default=None)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.factor)


def _ret(x):
    x = np.asarray(x)
    return x if x.ndim else x[()]


def _short_time_check(t, params: ModelParams):
    if np.any(params.gamma * np.asarray(t) > SHORT_TIME_LIMIT):
        raise RegimeError(f"short-time form requires gamma t <= {SHORT_TIME_LIMIT}")


# zero temperature ----------------------------------------------------------

def factor_zero_T(spec: SuperpositionSpec, t, params: ModelParams):
    t = _check_times(t)
    weight = 1.0 - np.abs(u_analytic(t, params)) ** 2
    return _ret(np.exp(spec.exponent_coefficient * weight))


def cat_factor(alpha: complex, t, params: ModelParams):
    """``exp[-2|alpha|^2 (1 - |cos(th t/2) + (G/th) sin(th t/2)|^2 exp(-G t))]``."""
    t = _check_times(t)
    d = derive_params(params)
    # (G/th) sin x written as (G t / 2) sin(x)/x so theta = 0 is finite
    bracket = _damped_bracket(d.half_theta * t, params.gamma * t)
    weight = 1.0 - np.abs(bracket) ** 2
    return _ret(np.exp(-2 * abs(alpha) ** 2 * weight).real)


def factor_short_paper(spec: SuperpositionSpec, t, params: ModelParams):
    """Linear short-time form ``exp[(-|a1|^2/2 - |a2|^2/2 + conj(a1) a2) G t]``."""
    t = _check_times(t)
    _short_time_check(t, params)
    return _ret(np.exp(spec.exponent_coefficient * params.gamma * t))


def t_d_zero(spec: SuperpositionSpec, params: ModelParams) -> float:
    """``1 / (Re(|a1|^2/2 + |a2|^2/2 - conj(a1) a2) G)``; infinite if ``a1 == a2``."""
    rate = -spec.exponent_coefficient.real
    if rate <= 0:
        return NO_DECOHERENCE
    return 1.0 / (rate * params.gamma)


# thermal integral beta ---------------------------------------------------

class QuadratureResult(NamedTuple):
    value: float
    error: float
    tail: float


def _quad(f, a, b, points=None, epsabs=1e-10, epsrel=1e-8, limit=10000):
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            if points is not None:
                pts = [p for p in points if a < p < b]
                val, err = quad(f, a, b, points=pts or None, epsabs=epsabs, epsrel=epsrel, limit=limit)
            else:
                val, err = quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit)
        except IntegrationWarning as exc:
            raise ConvergenceError(f"quadrature did not converge on [{a}, {b}]: {exc}") from exc
    return val, err


def _abs2_v_hat_integrand(t: float, params: ModelParams, derived):
    """Scalar ``J(w) |v_hat(t, w)|^2`` as a function of detuning, for quad."""
    g = params.gamma
    if abs(derived.theta) < 1e-6 * g:
        def f(x):
            w = params.omega + x
            return coupling_density(w, params) * abs(v_hat(t, w, params, derived)) ** 2
        return f
    p_plus, p_minus = derived.poles
    a_plus = 0.5 - 0.5j * g / derived.theta
    a_minus = 0.5 + 0.5j * g / derived.theta
    scale = params.big_m * g**2 / np.pi
    g2 = g**2
    exp = cmath.exp

    def phi(z):
        zt = z * t
        if abs(zt) < 1e-3:
            return t * (1 + zt / 2 + zt * zt / 6 + zt**3 / 24)
        return (exp(zt) - 1) / z

    def f(x):
        s = a_plus * phi(p_plus + 1j * x) + a_minus * phi(p_minus + 1j * x)
        return scale / (x * x + g2) * (s.real**2 + s.imag**2)

    return f


def beta_quadrature_detail(thermal: ThermalSpec, t: float, params: ModelParams,
                           window: float = 200.0, epsabs: float = 1e-10,
                           epsrel: float = 1e-8) -> QuadratureResult:
    """Adaptive quadrature of ``beta`` for one time.

    The window ``omega +- window * gamma`` is split at oscillation-scale
    breakpoints; the two tails are integrated separately (with the occupation
    frozen at the window edge in exact mode) and reported as ``tail``.
    """
    t = float(_check_times(t))
    if t == 0:
        return QuadratureResult(0.0, 0.0, 0.0)
    derived = derive_params(params)
    g = params.gamma
    peak = thermal.occupation_mode is OccupationMode.PEAK
    n_peak = thermal.n_bar(params)
    if peak and n_peak == 0:
        return QuadratureResult(0.0, 0.0, 0.0)

    weight = _abs2_v_hat_integrand(t, params, derived)

    if peak:
        # integrate the occupation-free weight and scale, so beta is exactly linear in n
        occ = lambda x: 1.0  # noqa: E731
        scale = n_peak
    else:
        occ = lambda x: mean_occupation(params.omega + x, thermal.temperature)  # noqa: E731
        scale = 1.0

    lo = -window * g
    if not peak:
        lo = max(lo, -params.omega * (1 - 1e-12))
    hi = window * g
    # breakpoints: a few oscillation periods per panel, plus the two poles
    period = 2 * np.pi / t
    n_panels = int(min(4000, max(8, np.ceil((hi - lo) / (4 * period)))))
    edges = np.linspace(lo, hi, n_panels + 1)
    half = abs(derived.half_theta.real)
    extra = sorted({-half, 0.0, half})

    total = 0.0
    err = 0.0
    f = lambda x: weight(x) * occ(x)  # noqa: E731
    for a, b in zip(edges[:-1], edges[1:]):
        val, e = _quad(f, a, b, points=extra, epsabs=epsabs / n_panels, epsrel=epsrel)
        total += val
        err += e

    n_hi = occ(hi)
    tail, e_tail = _quad(lambda x: weight(x) * n_hi, hi, np.inf, epsabs=epsabs, epsrel=1e-6)
    err += e_tail
    if peak:
        tail_lo, e_lo = _quad(weight, -np.inf, lo, epsabs=epsabs, epsrel=1e-6)
        tail += tail_lo
        err += e_lo
    value = total + tail
    if err > max(10 * epsabs, 10 * epsrel * abs(value)):
        raise ConvergenceError(f"beta quadrature error estimate {scale * err:.3g} too large",
                               achieved_error=scale * err)
    return QuadratureResult(scale * value, scale * err, scale * tail)


def beta_quadrature(thermal: ThermalSpec, t, params: ModelParams, **kwargs):
    """``beta(T, t) = int J(w) |v_hat(t, w)|^2 n(w) dw`` by adaptive quadrature."""
    t = _check_times(t)
    out = np.array([beta_quadrature_detail(thermal, ti, params, **kwargs).value for ti in t.ravel()])
    return _ret(out.reshape(t.shape))


def residue_integrals(t, params: ModelParams) -> dict[str, complex]:
    """Closed forms of the four residue integrals (underdamped only).

    With ``a = Theta/2`` and ``D(x) = (x^2 + G^2)(x + a + iG/2)(x - a - iG/2)``:

    ``I_const``  int dx / D(x)
    ``I_osc``    int exp(i(x + a)t - G t/2) / D(x) dx
    ``I_cos``    int cos((x + a)t) / ((x^2 + G^2)((x + a)^2 + G^2/4)) dx
    ``I_plus``   int dx / ((x^2 + G^2)((x + a)^2 + G^2/4)), ``I_minus`` with ``a -> -a``

    ``(Theta/2)^2`` is used wherever the half-frequency appears squared.
    """
    d = derive_params(params)
    if d.regime is not Regime.UNDERDAMPED:
        raise RegimeError("residue forms are derived for the underdamped regime only")
    a = d.half_theta.real
    g = params.gamma
    pi = np.pi
    t = float(t)
    c1 = g * (a + 1.5j * g) * (0.5j * g - a)
    c2 = (2 * a + 1j * g) * (a + 1.5j * g) * (-0.5j * g + a)
    a2 = pi / c1 + 2j * pi / c2
    a3 = pi * np.exp((1j * a - 1.5 * g) * t) / c1 + 2j * pi * np.exp((2j * a - g) * t) / c2
    a4 = (pi * np.exp(-g * t) * ((a**2 - 0.75 * g**2) * np.cos(a * t) + 2 * g * a * np.sin(a * t))
          + 2 * pi * np.exp(-0.5 * g * t) * (a**2 + 0.75 * g**2)) / (
        g * (a**2 + 2.25 * g**2) * (a**2 + 0.25 * g**2))
    a5p = pi * (3 * a + 1.5j * g) / (g * (a + 0.5j * g) * (a**2 + 2.25 * g**2))
    a5m = pi * (3 * a - 1.5j * g) / (g * (a - 0.5j * g) * (a**2 + 2.25 * g**2))
    return {"I_const": complex(a2), "I_osc": complex(a3), "I_cos": complex(a4),
            "I_plus": complex(a5p), "I_minus": complex(a5m)}


def beta_residue(thermal: ThermalSpec, t, params: ModelParams, numerator: str = "half_rate"):
    """``beta`` assembled from the residue integrals of :func:`residue_integrals`.

    Parameters
    ----------
    numerator : {"half_rate", "full_rate"}
        Cross-term numerator. ``"half_rate"`` uses ``1 + exp(-G t/2 + i Th t/2)``,
        the default form; ``"full_rate"`` uses
        ``1 + exp(-G t + i Th t)``, the value implied by squaring the two-pole
        amplitude, and reproduces the quadrature. In both, the diagonal
        terms use ``exp(-G t/2)`` and the integral of ``exp(-i(x - Th/2) t)``
        is mapped onto ``I_osc`` by ``x -> -x``. Occupation is taken at the
        peak.
    """
    if numerator not in ("half_rate", "full_rate"):
        raise ParameterError(f"numerator must be 'half_rate' or 'full_rate', got {numerator!r}")
    t = _check_times(t)
    d = derive_params(params)
    if d.regime is not Regime.UNDERDAMPED:
        raise RegimeError("beta_residue requires the underdamped regime")
    theta = d.theta.real
    g, m = params.gamma, params.big_m
    n = thermal.n_bar(params)
    pre_cross = n * m * g**2 * (theta - 1j * g) ** 2 / (4 * np.pi * theta**2)
    pre_diag = n * m * g**2 * (theta**2 + g**2) / (4 * np.pi * theta**2)
    rate = (-0.5 * g + 0.5j * theta) if numerator == "half_rate" else (-g + 1j * theta)
    out = []
    for ti in t.ravel():
        ints = residue_integrals(ti, params)
        cross = pre_cross * ((1 + np.exp(rate * ti)) * ints["I_const"] - 2 * ints["I_osc"])
        diag = pre_diag * sum((1 + np.exp(-g * ti)) * ints[k] - 2 * np.exp(-0.5 * g * ti) * ints["I_cos"]
                              for k in ("I_plus", "I_minus"))
        out.append((cross + np.conj(cross) + diag).real)
    return _ret(np.array(out).reshape(t.shape))


def beta_short(thermal: ThermalSpec, t, params: ModelParams):
    """Linear short-time form ``n(W) D G t``."""
    t = _check_times(t)
    _short_time_check(t, params)
    d = derive_params(params)
    return _ret(thermal.n_bar(params) * d.curly_d * params.gamma * t)


def beta(thermal: ThermalSpec, t, params: ModelParams, method: str = "quadrature",
         grid: "bath_oracle.BathGrid | None" = None):
    if method == "quadrature":
        return beta_quadrature(thermal, t, params)
    if method == "residue":
        return beta_residue(thermal, t, params)
    if method == "short":
        return beta_short(thermal, t, params)
    if method == "oracle":
        grid = grid or bath_oracle.build_grid(params)
        t = _check_times(t)
        out = bath_oracle.oracle_beta(grid, params, t.ravel(), thermal.temperature,
                                      thermal.occupation_mode.value)
        return _ret(out.reshape(t.shape))
    raise ParameterError(f"unknown beta method {method!r}")


# thermal factors -----------------------------------------------------------

def factor_thermal(spec: SuperpositionSpec, thermal: ThermalSpec, t, params: ModelParams,
                   beta_method: str = "quadrature", grid=None):
    t = _check_times(t)
    u2 = np.abs(u_analytic(t, params)) ** 2
    b = np.asarray(beta(thermal, t, params, beta_method, grid))
    out = np.exp(spec.exponent_coefficient * (1 - u2)) * np.exp(-0.25 * spec.separation2 * u2 * b)
    return _ret(out)


def _thermal_occupation(thermal: ThermalSpec, params: ModelParams, high_temperature: bool) -> float:
    if high_temperature:
        return CONSTANTS.k_B * thermal.temperature / params.omega
    return thermal.n_bar(params)


def factor_thermal_short(spec: SuperpositionSpec, thermal: ThermalSpec, t, params: ModelParams,
                         high_temperature: bool = False):
    """Linear short-time thermal factor; ``high_temperature`` replaces ``n`` by ``k_B T / W``."""
    t = _check_times(t)
    _short_time_check(t, params)
    d = derive_params(params)
    n = _thermal_occupation(thermal, params, high_temperature)
    gt = params.gamma * t
    return _ret(np.exp(spec.exponent_coefficient * gt) * np.exp(-0.25 * n * d.curly_d * spec.separation2 * gt))


def t_d_thermal(spec: SuperpositionSpec, thermal: ThermalSpec, params: ModelParams,
                high_temperature: bool = False) -> float:
    d = derive_params(params)
    n = _thermal_occupation(thermal, params, high_temperature)
    rate = -spec.exponent_coefficient.real + 0.25 * d.curly_d * spec.separation2 * n
    if rate <= 0:
        return NO_DECOHERENCE
    return 1.0 / (rate * params.gamma)


def t_d_cat_high_T(alpha: complex, temperature: float, params: ModelParams) -> float:
    """Cat-state high-temperature time ``1 / (|a|^2 (2 + D k_B T / W) G)``."""
    if alpha == 0:
        return NO_DECOHERENCE
    d = derive_params(params)
    return 1.0 / (abs(alpha) ** 2 * (2 + d.curly_d * CONSTANTS.k_B * temperature / params.omega) * params.gamma)


def decoherence_series(spec: SuperpositionSpec, times, params: ModelParams,
                       method: Method | str = Method.EXACT_ZERO_T,
                       thermal: ThermalSpec | None = None, beta_method: str = "quadrature",
                       grid=None, samples: int = 100_000, seed: int | None = None,
                       workers: int | None = None) -> DecoherenceSeries:
    method = Method(method)
    times = np.atleast_1d(_check_times(times))
    thermal = thermal or ThermalSpec(0.0)
    stderr = None
    if method is Method.EXACT_ZERO_T:
        f = factor_zero_T(spec, times, params)
    elif method is Method.PAPER_SHORT_TIME:
        f = factor_short_paper(spec, times, params)
    elif method is Method.THERMAL_EXACT_U:
        f = factor_thermal(spec, thermal, times, params, beta_method, grid)
    elif method is Method.THERMAL_SHORT_TIME:
        f = factor_thermal_short(spec, thermal, times, params)
    elif method is Method.THERMAL_HIGH_T:
        f = factor_thermal_short(spec, thermal, times, params, high_temperature=True)
    else:
        grid = grid or bath_oracle.build_grid(params)
        est, stderr = bath_oracle.thermal_mc_factor(
            grid, params, spec, times, thermal.temperature, samples, seed,
            occupation_mode=thermal.occupation_mode.value, workers=workers)
        f = np.conj(est)  # overlap <B2|B1> is the conjugate of F
    return DecoherenceSeries(times=times, factor=np.atleast_1d(np.asarray(f, dtype=complex)),
                             method=method, stderr=stderr)

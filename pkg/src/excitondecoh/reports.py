"""Side-by-side comparisons of approximate closed forms against exact evaluations.

Nothing here asserts agreement. Each report tabulates an approximate form next
to its exact counterpart so the size of the deviation can be inspected.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .amplitudes import u_analytic
from .decoherence import (
    SHORT_TIME_LIMIT,
    SuperpositionSpec,
    ThermalSpec,
    residue_integrals,
    beta_quadrature,
    beta_residue,
    beta_short,
)
from .model import ModelParams, derive_params


@dataclass
class Report:
    name: str
    columns: list[str]
    rows: list[tuple]
    notes: dict[str, float | str] = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.notes.items():
            buf.write(f"# {key}: {value}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([f"{x:.11e}" if isinstance(x, float) else x for x in row])
        return buf.getvalue()


def default_short_times(params: ModelParams, count: int = 12) -> np.ndarray:
    return np.geomspace(1e-4, SHORT_TIME_LIMIT, count) / params.gamma


def short_time_report(spec: SuperpositionSpec, params: ModelParams, times=None) -> Report:
    """Decay exponent ``-ln|F|`` at zero temperature: exact, t^2 series, linear form."""
    times = default_short_times(params) if times is None else np.asarray(times, dtype=float)
    half_sep = 0.5 * spec.separation2
    mg = params.big_m * params.gamma
    rows = []
    for t in times:
        exact = half_sep * (1 - abs(complex(u_analytic(t, params))) ** 2)
        series = half_sep * mg * t**2
        linear = half_sep * params.gamma * t
        ratio = linear / exact if exact > 0 else float("nan")
        rows.append((float(t), float(exact), float(series), float(linear), float(ratio)))
    return Report(
        name="short_time_factor",
        columns=["t", "exponent_exact", "exponent_series_t2", "exponent_linear", "ratio_linear_over_exact"],
        rows=rows,
        notes={"crossover_t": 1.0 / params.big_m},
    )


def beta_short_report(thermal: ThermalSpec, params: ModelParams, times=None) -> Report:
    """``beta`` by quadrature vs the linear short-time form."""
    times = default_short_times(params) if times is None else np.asarray(times, dtype=float)
    d = derive_params(params)
    quad_vals = np.atleast_1d(beta_quadrature(thermal, times, params))
    short_vals = np.atleast_1d(beta_short(thermal, times, params))
    rows = []
    for t, bq, bs in zip(times, quad_vals, short_vals):
        ratio = bs / bq if bq > 0 else float("nan")
        rows.append((float(t), float(bq), float(bs), float(ratio)))
    return Report(
        name="beta_short",
        columns=["t", "beta_quadrature", "beta_short", "ratio_short_over_quadrature"],
        rows=rows,
        # n M G t^2 = n D G t  at  t = D / M
        notes={"curly_d": d.curly_d, "crossover_t": d.curly_d / params.big_m,
               "n_bar": thermal.n_bar(params)},
    )


def beta_residue_report(thermal: ThermalSpec, params: ModelParams, times=None) -> Report:
    """Residue assembly (both cross-term numerators) vs quadrature."""
    if times is None:
        times = np.array([0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 3.0]) / params.gamma
    times = np.asarray(times, dtype=float)
    bq = np.atleast_1d(beta_quadrature(thermal, times, params))
    bp = np.atleast_1d(beta_residue(thermal, times, params, numerator="half_rate"))
    bc = np.atleast_1d(beta_residue(thermal, times, params, numerator="full_rate"))
    rows = []
    for t, q, p, c in zip(times, bq, bp, bc):
        rel_p = (p - q) / q if q > 0 else float("nan")
        rel_c = (c - q) / q if q > 0 else float("nan")
        rows.append((float(t), float(q), float(p), float(c), float(rel_p), float(rel_c)))
    return Report(
        name="beta_residue",
        columns=["t", "beta_quadrature", "beta_residue_half_rate", "beta_residue_full_rate",
                 "rel_diff_half_rate", "rel_diff_full_rate"],
        rows=rows,
        notes={"residue_at_t0_half_rate": float(bp[0]) if times[0] == 0 else "n/a",
               "n_bar": thermal.n_bar(params)},
    )


def _cquad(f, half, window):
    out = 0j
    pts = sorted({-half, 0.0, half})
    for part in (np.real, np.imag):
        g = lambda x: float(part(f(x)))  # noqa: E731
        val = quad(g, -window, window, points=pts, limit=5000, epsabs=1e-13, epsrel=1e-11)[0]
        with warnings.catch_warnings():
            # oscillatory tails beyond 200 gamma contribute below 1e-10 relative
            warnings.simplefilter("ignore", IntegrationWarning)
            val += quad(g, window, np.inf, limit=2000, epsabs=1e-13)[0]
            val += quad(g, -np.inf, -window, limit=2000, epsabs=1e-13)[0]
        out += val if part is np.real else 1j * val
    return out


def numeric_residue_integrals(t: float, params: ModelParams) -> dict[str, complex]:
    """The residue integrals evaluated by quadrature over the detuning axis."""
    d = derive_params(params)
    a = d.half_theta.real
    g = params.gamma
    window = 200 * g

    def den(x):
        return (x * x + g * g) * (x + a + 0.5j * g) * (x - a - 0.5j * g)

    return {
        "I_const": _cquad(lambda x: 1 / den(x), a, window),
        "I_osc": _cquad(lambda x: np.exp(1j * (x + a) * t - 0.5 * g * t) / den(x), a, window),
        "I_cos": _cquad(lambda x: np.cos((x + a) * t) / ((x * x + g * g) * ((x + a) ** 2 + g * g / 4)), a, window),
        "I_plus": _cquad(lambda x: 1 / ((x * x + g * g) * ((x + a) ** 2 + g * g / 4)), a, window),
        "I_minus": _cquad(lambda x: 1 / ((x * x + g * g) * ((x - a) ** 2 + g * g / 4)), a, window),
    }


def residue_integral_report(params: ModelParams, times=None) -> Report:
    """Each closed residue formula against direct quadrature."""
    if times is None:
        times = np.array([0.0, 0.5, 1.0, 3.0]) / params.gamma
    rows = []
    for t in times:
        closed = residue_integrals(t, params)
        numeric = numeric_residue_integrals(t, params)
        for key in closed:
            c, n = closed[key], numeric[key]
            rows.append((float(t), key, float(c.real), float(c.imag), float(n.real), float(n.imag),
                         float(abs(c - n) / max(abs(n), 1e-300))))
    return Report(
        name="residue_integrals",
        columns=["t", "integral", "closed_re", "closed_im", "numeric_re", "numeric_im", "rel_diff"],
        rows=rows,
    )


def all_reports(spec: SuperpositionSpec, thermal: ThermalSpec, params: ModelParams) -> list[Report]:
    return [
        short_time_report(spec, params),
        beta_short_report(thermal, params),
        beta_residue_report(thermal, params),
        residue_integral_report(params),
    ]

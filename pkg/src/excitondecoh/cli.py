"""Command-line front end producing plot-ready CSV.

Every CSV starts with ``#`` comment lines holding the format version, the
subcommand and the effective configuration (one JSON object), followed by a
single header row. Passing such a CSV back through ``--config`` reproduces it.

Exit codes: 0 success, 2 configuration error, 3 numerical guard violation
(recurrence horizon, regime), 4 convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import bath_oracle, reports
from .amplitudes import u_analytic
from .decoherence import (
    Method,
    SuperpositionSpec,
    ThermalSpec,
    beta_quadrature,
    beta_residue,
    beta_short,
    decoherence_series,
    factor_thermal,
    factor_zero_T,
    t_d_thermal,
    t_d_zero,
)
from .errors import ExcitonDecohError, ParameterError
from .model import CONSTANTS, ModelParams, Regime, derive_params

FORMAT_VERSION = 1
BETA_METHODS = ("quadrature", "residue", "short", "oracle")

FIGURE1_PRESET = {
    "omega": 1500.0,
    "gamma": 0.05,
    "big_m": 20.0,
    "alpha1_re": 0.1,
    "alpha2_re": -0.1,
    "temperature": 0.0,
    "t_max": 300.0,
    "steps": 3000,
}


class ConfigError(ParameterError):
    pass


@dataclass
class RunConfig:
    omega: Optional[float] = None
    gamma: Optional[float] = None
    big_m: Optional[float] = None
    half_width: float = 50.0
    modes: int = 2001
    alpha1_re: float = 0.1
    alpha1_im: float = 0.0
    alpha2_re: float = -0.1
    alpha2_im: float = 0.0
    c1_re: Optional[float] = None
    c1_im: Optional[float] = None
    c2_re: Optional[float] = None
    c2_im: Optional[float] = None
    temperature: float = 0.0
    occupation_mode: str = "peak_approximation"
    t_max: Optional[float] = None
    steps: int = 300
    samples: int = 100_000
    seed: Optional[int] = None
    beta_method: str = "quadrature"

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - names)
        if unknown:
            raise ConfigError(f"unknown configuration field(s): {', '.join(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, separators=(",", ":"))

    def validate(self) -> None:
        for name in ("omega", "gamma", "big_m"):
            if getattr(self, name) is None:
                raise ConfigError(f"missing required parameter: {name}")
        if self.beta_method not in BETA_METHODS:
            raise ConfigError(f"beta_method must be one of {BETA_METHODS}")
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")
        if self.t_max is not None and self.t_max < 0:
            raise ConfigError("t_max must be >= 0")
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")

    # domain objects
    def model(self) -> ModelParams:
        return ModelParams(float(self.omega), float(self.gamma), float(self.big_m))

    def spec(self) -> SuperpositionSpec:
        a1 = complex(self.alpha1_re, self.alpha1_im)
        a2 = complex(self.alpha2_re, self.alpha2_im)
        if all(v is None for v in (self.c1_re, self.c1_im, self.c2_re, self.c2_im)):
            return SuperpositionSpec(a1, a2)
        c1 = complex(self.c1_re or 0.0, self.c1_im or 0.0)
        c2 = complex(self.c2_re or 0.0, self.c2_im or 0.0)
        return SuperpositionSpec(a1, a2, c1, c2)

    def thermal(self) -> ThermalSpec:
        return ThermalSpec(float(self.temperature), self.occupation_mode)

    def grid(self, params: ModelParams) -> bath_oracle.BathGrid:
        return bath_oracle.build_grid(params, float(self.half_width), int(self.modes))

    def times(self) -> np.ndarray:
        t_max = self.t_max if self.t_max is not None else 3.0 / float(self.gamma)
        if t_max == 0:
            return np.zeros(1)
        return np.linspace(0.0, t_max, int(self.steps) + 1)


# output helpers ------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    x = float(x)
    if np.isnan(x):
        return "nan"
    return f"{x:.11e}"


def render_csv(command: str, config: RunConfig, columns, rows, summary=None) -> str:
    buf = io.StringIO()
    buf.write(f"# format-version: {FORMAT_VERSION}\n")
    buf.write(f"# command: {command}\n")
    buf.write(f"# config: {config.to_json()}\n")
    for key, value in (summary or {}).items():
        buf.write(f"# summary: {key}={_fmt(value)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _time_columns(t):
    return float(t), float(t) * CONSTANTS.hbar


# subcommands ---------------------------------------------------------------

def cmd_derive(config: RunConfig) -> str:
    params = config.model()
    d = derive_params(params)
    grid = config.grid(params)
    spec = config.spec()
    lines = [
        f"# format-version: {FORMAT_VERSION}",
        "# command: derive",
        f"# config: {config.to_json()}",
        f"theta_meV: {d.theta.real:.12g}{d.theta.imag:+.12g}j",
        f"regime: {d.regime.value}",
        f"curly_d: {d.curly_d:.12g}",
        f"pole_plus: {d.poles[0].real:.12g}{d.poles[0].imag:+.12g}j",
        f"pole_minus: {d.poles[1].real:.12g}{d.poles[1].imag:+.12g}j",
        f"grid_modes: {grid.count}",
        f"grid_spacing_meV: {grid.spacing:.12g}",
        f"recurrence_time_hbar_per_meV: {grid.recurrence_time:.12g}",
        f"recurrence_guard_hbar_per_meV: {grid.horizon:.12g}",
        f"t_d_zero_hbar_per_meV: {t_d_zero(spec, params):.12g}",
        f"t_d_thermal_hbar_per_meV: {t_d_thermal(spec, config.thermal(), params):.12g}",
    ]
    return "\n".join(lines) + "\n"


def cmd_amplitudes(config: RunConfig) -> str:
    params = config.model()
    times = config.times()
    u = np.atleast_1d(u_analytic(times, params))
    rows = [(*_time_columns(t), ui.real, ui.imag, abs(ui), 1 - abs(ui) ** 2) for t, ui in zip(times, u)]
    return render_csv("amplitudes", config,
                      ["t_hbar_per_meV", "t_ps", "u_re", "u_im", "u_abs", "env_weight"], rows)


def cmd_factor(config: RunConfig, command: str = "factor") -> str:
    params = config.model()
    spec = config.spec()
    times = config.times()
    if config.temperature == 0:
        method = Method.EXACT_ZERO_T
        f = np.atleast_1d(factor_zero_T(spec, times, params))
    else:
        method = Method.THERMAL_EXACT_U
        grid = config.grid(params) if config.beta_method == "oracle" else None
        f = np.atleast_1d(factor_thermal(spec, config.thermal(), times, params, config.beta_method, grid))
    rows = [(*_time_columns(t), fi.real, fi.imag, abs(fi), method.value) for t, fi in zip(times, f)]
    return render_csv(command, config,
                      ["t_hbar_per_meV", "t_ps", "F_re", "F_im", "F_abs", "method"], rows)


def cmd_thermal(config: RunConfig) -> str:
    if config.seed is None:
        raise ConfigError("missing required parameter: seed (thermal Monte Carlo)")
    params = config.model()
    spec = config.spec()
    thermal = config.thermal()
    times = config.times()
    grid = config.grid(params)
    analytic = np.atleast_1d(factor_thermal(spec, thermal, times, params, config.beta_method,
                                            grid if config.beta_method == "oracle" else None))
    mc = decoherence_series(spec, times, params, Method.ORACLE_MC, thermal=thermal, grid=grid,
                            samples=int(config.samples), seed=int(config.seed))
    n_bar = thermal.n_bar(params)
    rows = []
    for t, fa, fm, se in zip(times, analytic, mc.factor, mc.stderr):
        z = (abs(fm) - abs(fa)) / se if se > 0 else 0.0
        rows.append((*_time_columns(t), abs(fa), abs(fm), se, z, n_bar))
    return render_csv("thermal", config,
                      ["t_hbar_per_meV", "t_ps", "F_abs_analytic", "F_abs_mc", "mc_stderr", "z_score", "n_bar"],
                      rows)


def cmd_beta(config: RunConfig) -> str:
    params = config.model()
    thermal = config.thermal()
    times = config.times()
    d = derive_params(params)
    grid = config.grid(params)
    bq = np.atleast_1d(beta_quadrature(thermal, times, params))
    if d.regime is Regime.UNDERDAMPED:
        br = np.atleast_1d(beta_residue(thermal, times, params))
    else:
        br = np.full(times.shape, np.nan)
    in_short = params.gamma * times <= 0.1
    bs = np.full(times.shape, np.nan)
    if in_short.any():
        bs[in_short] = np.atleast_1d(beta_short(thermal, times[in_short], params))
    bo = bath_oracle.oracle_beta(grid, params, times, thermal.temperature, thermal.occupation_mode.value)
    n_bar = thermal.n_bar(params)

    def ratio(a, b):
        return a / b if b > 0 else float("nan")

    rows = [(t, q, r, s, o, n_bar, ratio(r, q), ratio(s, q), ratio(o, q))
            for t, q, r, s, o in zip(times, bq, br, bs, bo)]
    return render_csv("beta", config,
                      ["t", "beta_quadrature", "beta_residue", "beta_short", "oracle_sum", "n_bar",
                       "ratio_residue_over_quadrature", "ratio_short_over_quadrature",
                       "ratio_oracle_over_quadrature"], rows)


def oracle_comparison(config: RunConfig):
    params = config.model()
    spec = config.spec()
    times = config.times()
    grid = config.grid(params)
    prop = bath_oracle.BathPropagator(grid, params)
    sets = [prop.amplitudes(t) for t in times]
    u_a = np.atleast_1d(u_analytic(times, params))
    f_a = np.abs(np.atleast_1d(factor_zero_T(spec, times, params)))
    rows = []
    for t, ua, fa, s in zip(times, u_a, f_a, sets):
        w_a = 1 - abs(ua) ** 2
        w_o = s.env_weight
        f_o = np.exp(-0.5 * spec.separation2 * w_o)
        gap = float(np.max(np.abs(np.abs(s.v_modes) - np.abs(s.u_modes))))
        rows.append((t, ua.real, ua.imag, s.u.real, s.u.imag, abs(ua - s.u), w_a, w_o, abs(w_a - w_o),
                     fa, f_o, abs(fa - f_o), s.unitarity_defect, gap))
    arr = np.array([r[1:] for r in rows], dtype=float)
    summary = {
        "sup_u_error": arr[:, 4].max(),
        "sup_env_weight_error": arr[:, 7].max(),
        "sup_F_abs_error": arr[:, 10].max(),
        "max_unitarity_defect": arr[:, 11].max(),
        "max_v_u_modulus_gap": arr[:, 12].max(),
    }
    columns = ["t", "u_analytic_re", "u_analytic_im", "u_oracle_re", "u_oracle_im", "u_abs_diff",
               "env_weight_analytic", "env_weight_oracle", "env_weight_abs_diff",
               "F_abs_analytic", "F_abs_oracle", "F_abs_diff", "unitarity_defect", "v_u_modulus_gap"]
    return columns, rows, summary


def cmd_oracle_compare(config: RunConfig) -> str:
    columns, rows, summary = oracle_comparison(config)
    for key, value in summary.items():
        print(f"{key}: {value:.6g}", file=sys.stderr)
    return render_csv("oracle-compare", config, columns, rows, summary)


def cmd_report(config: RunConfig) -> str:
    params = config.model()
    parts = [f"# format-version: {FORMAT_VERSION}\n# command: report\n# config: {config.to_json()}\n"]
    for rep in reports.all_reports(config.spec(), config.thermal(), params):
        parts.append(f"# report: {rep.name}\n" + rep.to_csv())
    return "\n".join(parts)


COMMANDS = {
    "derive": cmd_derive,
    "amplitudes": cmd_amplitudes,
    "factor": cmd_factor,
    "thermal": cmd_thermal,
    "beta": cmd_beta,
    "oracle-compare": cmd_oracle_compare,
    "figure1": lambda c: cmd_factor(c, "figure1"),
    "report": cmd_report,
}


# argument parsing ----------------------------------------------------------

_FLAG_FIELDS = {
    "omega": float, "gamma": float, "big_m": float,
    "alpha1_re": float, "alpha1_im": float, "alpha2_re": float, "alpha2_im": float,
    "c1_re": float, "c1_im": float, "c2_re": float, "c2_im": float,
    "temperature": float, "t_max": float, "steps": int, "modes": int, "half_width": float,
    "samples": int, "seed": int,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="excitondecoh", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file, or a CSV previously written by this tool")
        for field_name, kind in _FLAG_FIELDS.items():
            p.add_argument("--" + field_name.replace("_", "-"), dest=field_name, type=kind, default=None)
        p.add_argument("--beta-method", dest="beta_method", choices=BETA_METHODS, default=None)
        p.add_argument("--occupation-mode", dest="occupation_mode",
                       choices=("peak_approximation", "exact_omega_dependent"), default=None)
        p.add_argument("--out", default=None, help="output path (default: stdout)")
    return parser


def load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for line in text.splitlines():
        if line.startswith("# config: "):
            text = line[len("# config: "):]
            break
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a flat JSON object")
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.command == "figure1":
        data.update(FIGURE1_PRESET)
    if args.config:
        data.update(load_config_file(args.config))
    for name in list(_FLAG_FIELDS) + ["beta_method", "occupation_mode"]:
        value = getattr(args, name)
        if value is not None:
            data[name] = value
    config = RunConfig.from_mapping(data)
    config.validate()
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            text = COMMANDS[args.command](config)
        _emit(text, args.out)
    except ExcitonDecohError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except TypeError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

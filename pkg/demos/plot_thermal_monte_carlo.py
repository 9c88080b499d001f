"""
Thermal decoherence: closed form against Monte Carlo
====================================================

At finite temperature the cavity modes start in a thermal state. The closed
form needs only the thermal integral beta(T, t); the reference instead draws
coherent bath amplitudes from the Glauber P function and averages the exact
environment overlap over many samples.
"""

import numpy as np

from excitondecoh import ModelParams, SuperpositionSpec, ThermalSpec, build_grid, factor_thermal
from excitondecoh.bath_oracle import BathPropagator, thermal_mc_factor
from excitondecoh.decoherence import OccupationMode

params = ModelParams(omega=1500.0, gamma=0.05, big_m=20.0)
spec = SuperpositionSpec.cat(0.1)
grid = build_grid(params, 200, 2001)
prop = BathPropagator(grid, params)
times = np.array([1.57, 10.0, 40.0])

###############################################################################
# Three temperatures spanning mean occupations from about 0.1 to 5.

print("   T (K)    n      t     |F| closed   |F| MC      stderr     z")
for temperature in (8000.0, 25000.0, 100000.0):
    thermal = ThermalSpec(temperature, OccupationMode.EXACT)
    closed = np.abs(factor_thermal(spec, thermal, times, params))
    mean, se = thermal_mc_factor(grid, params, spec, times, temperature, 20000, seed=1, prop=prop)
    for t, a, m, s in zip(times, closed, np.abs(mean), se):
        print(f"{temperature:8.0f}  {thermal.n_bar(params):5.3f}  {t:5.2f}   {a:.6f}   {m:.6f}"
              f"   {s:.2e}   {(m - a) / s:+.2f}")

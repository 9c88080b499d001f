"""
Decoherence of an exciton cat state at zero temperature
=======================================================

An even cat state with mean exciton number 0.01 is coupled to a single
Lorentzian quasimode (linewidth 0.05 meV, coupling scale 20 meV). The
decoherence factor oscillates at the vacuum Rabi frequency while its
envelope decays towards exp(-2 |alpha|^2).
"""

import numpy as np

from excitondecoh import ModelParams, cat_factor, derive_params, t_d_zero, SuperpositionSpec

params = ModelParams(omega=1500.0, gamma=0.05, big_m=20.0)
theta = derive_params(params).theta.real
print(f"Theta = {theta:.7f} meV, half period pi/Theta = {np.pi / theta:.4f} hbar/meV")

###############################################################################
# Sample |F(t)| densely and locate the turning points.

t = np.linspace(0.0, 300.0, 300001)
f = cat_factor(0.1, t, params)
inner = np.arange(1, t.size - 1)
minima = inner[(f[1:-1] < f[:-2]) & (f[1:-1] <= f[2:])]
maxima = inner[(f[1:-1] > f[:-2]) & (f[1:-1] >= f[2:])]

print("\n  k   t_min    (2k+1)pi/Theta   |F| at min   next max")
for k in range(5):
    print(f"  {k}  {t[minima[k]]:7.4f}   {(2 * k + 1) * np.pi / theta:7.4f}"
          f"          {f[minima[k]]:.6f}     {f[maxima[k]]:.6f}")

###############################################################################
# Long-time limit and the short-time decoherence time.

print(f"\n|F(300)| = {f[-1]:.6f}   exp(-0.02) = {np.exp(-0.02):.6f}")
print(f"t_d = {t_d_zero(SuperpositionSpec.cat(0.1), params):.1f} hbar/meV")

###############################################################################
# A coarse text rendering of the first few oscillations.

for ti in np.linspace(0, 12, 25):
    fi = cat_factor(0.1, ti, params)
    bar = int(round((fi - 0.98) / 0.02 * 60))
    print(f"{ti:6.2f} {fi:.5f} " + "#" * bar)

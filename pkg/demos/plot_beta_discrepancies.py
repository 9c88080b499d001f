"""
Approximate forms of the thermal integral
=========================================

beta(T, t) can be evaluated by quadrature, assembled from residue formulas,
or replaced by a linear short-time law. This script tabulates the three side
by side. The comparison reports make no claim of agreement; they show where
each shortcut holds.
"""

from excitondecoh import ModelParams, SuperpositionSpec, ThermalSpec
from excitondecoh.reports import all_reports

params = ModelParams(omega=1500.0, gamma=0.05, big_m=20.0)

for report in all_reports(SuperpositionSpec.cat(0.1), ThermalSpec(25000.0), params):
    print(f"--- {report.name} ---")
    print(report.to_csv())

###############################################################################
# Reading the tables:
#
# * the exact zero-temperature exponent starts quadratically in t, so the
#   linear law overestimates it at short times and crosses over near t = 1/M;
# * the residue assembly with the cross-term numerator exp(-G t/2 + i Th t/2)
#   departs from the quadrature, while the squared two-pole amplitude, whose
#   cross term carries exp(-G t + i Th t), reproduces it.

"""From field map and lifetime to the vacuum coupling rate g0.

The ideal chain: mode volume of the cavity (here a synthetic apodized
standing-wave map), the zero-point field at its maximum, the transition
dipole moment implied by the emitter lifetime, and their product g0.  For
an emitter ensemble spread over the cavity, the spatially averaged
weighting factor F rescales g0; the threshold dependence of F is swept at
the end (an emitter whose local field is below threshold * E_max gets
zero weight).
"""

import math

import numpy as np

from cavitykit import (
    WeightingConfig, ensemble_weighting_factor, effective_g0, ideal_coupling,
    mode_volume, normalized_mode_volume, to_debye,
)
from cavitykit.synthetic import synthetic_field_grid

NU_EMITTER = 475e12   # optical transition frequency (Hz); note the ZPL
                      # wavelength 637 nm corresponds to 470.6 THz, a 1%
                      # discrepancy we do not attempt to reconcile
TAU1 = 16e-9
EPS_DIAMOND = 5.7

grid = synthetic_field_grid()
v = mode_volume(grid)
lam = 299792458.0 / NU_EMITTER
v_norm = normalized_mode_volume(v, lam, math.sqrt(EPS_DIAMOND))
print("synthetic map: V_mode = %.3e m^3 = %.3f (lambda/n)^3" % (v, v_norm))
print()

print("ideal coupling chain at V = 0.5 (lambda/n)^3:")
for eta_dw in (0.02, 0.03):
    est = ideal_coupling(TAU1, NU_EMITTER, eta_dw, v_mode_normalized=0.5,
                         eps_rel_at_max=EPS_DIAMOND)
    print("  eta_DW = %.2f: d = %.2f D, d_ZPL = %.2f D, "
          "E_zpf = %.2e V/m, g0/2pi = %.2f GHz" %
          (eta_dw, to_debye(est.d_perp_cm), to_debye(est.d_zpl_cm),
           est.e_zpf_v_per_m, est.g0_hz / 1e9))
print()

print("ensemble weighting factor vs threshold (region: cavity center box):")
thresholds = np.linspace(0.0, 0.6, 13)
factors = [ensemble_weighting_factor(grid, WeightingConfig(threshold_fraction=t))
           for t in thresholds]
for t, f in zip(thresholds, factors):
    bar = "#" * int(round(60 * f))
    print("  threshold %.2f  F = %.3f  %s" % (t, f, bar))
print("  (isotropic-orientation cap: 1/sqrt(3) = %.3f)" % (1 / math.sqrt(3)))
print()

g0 = ideal_coupling(TAU1, NU_EMITTER, 0.025, v_mode_normalized=0.5).g0_hz
f02 = ensemble_weighting_factor(grid, WeightingConfig(threshold_fraction=0.2))
print("at threshold 0.2: F = %.3f, effective g0/2pi = %.2f GHz "
      "(down from %.2f GHz)" % (f02, effective_g0(g0, f02) / 1e9, g0 / 1e9))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not available; skipping the plot")
else:
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    ax.plot(thresholds, factors, "o-")
    ax.axhline(1 / math.sqrt(3), ls="--", c="gray", lw=0.8)
    ax.set_xlabel("|E_threshold| / |E_max|")
    ax.set_ylabel("weighting factor F")
    fig.tight_layout()
    fig.savefig("demo_03_weighting_factor.png", dpi=150)
    print("wrote demo_03_weighting_factor.png")

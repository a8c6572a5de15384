"""
How much does competition cost?
===============================

The price of anarchy here is the ratio of bargained to competitive rates:
the per-user minimum (delta_min) and the sum-rate ratio (delta_sum). This
script sweeps the three standard experiments and prints the tables. The
same sweeps are available from the command line via ``icbargain sweep``.
"""

import numpy as np

from icbargain import SweepSpec, run_sweep
from icbargain.sim import summarize

# Flat channel, alpha = beta = 0.7, both SNRs from 0 to 40 dB.
spec = SweepSpec.snr_grid(alpha=0.7, beta=0.7, step=2.0)
records = run_sweep(spec)
best = max(records, key=lambda r: r.delta_sum or 0.0)
print(f"largest sum-rate gain {best.delta_sum:.3f} at SNR {best.coords} dB")
diag = [r for r in records if r.coords[0] == r.coords[1]]
for r in diag[::4]:
    print(f"  SNR {r.coords[0]:>4} dB: delta_min={r.delta_min or float('nan'):.3f}")

###############################################################################
# Flat channel at 20 dB, sweeping the cross gains.
spec = SweepSpec.cross_grid(snr_db=20.0, step=0.1)
grid = {r.coords: r.delta_min for r in run_sweep(spec)}
print("delta_min on the alpha = beta diagonal:")
for a in (0.1, 0.2, 0.5, 1.0):
    print(f"  alpha=beta={a}: {grid[(a, a)]:.3f}")

###############################################################################
# Rayleigh bins, 30 dB SNR, cross links 0 to 10 dB weaker.
spec = SweepSpec.rayleigh_selective(trials=25, seed=1)
for row in summarize(run_sweep(spec)):
    print(f"  SIR {row['value']:>4} dB: mean delta_min {row['mean_delta_min']:.3f}, "
          f"mean delta_sum {row['mean_delta_sum']:.3f}")

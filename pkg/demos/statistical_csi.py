"""
Bargaining with only channel statistics
=======================================

When the exact gains are unknown, users can still bargain over expected
rates. The expectations are estimated by Monte Carlo; the resulting game is
solved exactly like a deterministic one.
"""

import numpy as np

from icbargain import (
    FadingSpec,
    expected_rates_statistical,
    solve_two_player,
    statistical_rate_problem,
)

k = 16
scales = np.full((k, 2, 2), 0.2)
scales[:, 0, 0] = np.linspace(0.5, 1.5, k)    # user 1 prefers high bins
scales[:, 1, 1] = np.linspace(1.5, 0.5, k)    # user 2 prefers low bins
fading = FadingSpec.rayleigh(scales, mask=np.ones(k), noise=np.full((2, k), 1e-2))

# Estimates tighten as 1/sqrt(n).
for n in (250, 1000, 4000):
    est = np.array([expected_rates_statistical(fading, n, seed)[0] for seed in range(20)])
    print(f"n={n:>5}: competitive rate mean {est.mean(axis=0).round(3)}, spread {est.std(axis=0).round(4)}")

# The same seed always gives the same estimate.
a = expected_rates_statistical(fading, 2000, seed=1)[1]
b = expected_rates_statistical(fading, 2000, seed=1)[1]
print("reproducible:", np.array_equal(a, b))

out = solve_two_player(statistical_rate_problem(fading, 20_000, seed=3))
print("bins to user 1:", np.flatnonzero(out.allocation.alpha[0] > 0.5).tolist())
print("expected gain over competition:", np.round(out.coop_rates / out.disagreement_rates, 3))

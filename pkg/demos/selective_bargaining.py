"""
Sharing frequency bins under a spectral mask
============================================

Over a frequency-selective channel every user may transmit at the mask in
every bin. Bargaining assigns each bin (or a time share of it) to users.
With two users an exact sort-and-scan algorithm applies; for more users a
convex solver does the job and certifies its answer.
"""

import numpy as np

from icbargain import (
    build_prefix_tables,
    count_shared_bins,
    gen_rayleigh_selective,
    kkt_verify,
    solve_nbs_selective,
    solve_two_player,
)

# 32 Rayleigh bins at 30 dB SNR, cross links 10 dB below the direct ones.
game = gen_rayleigh_selective(2, 32, direct_scale=1.0, cross_scales=0.1,
                              mask=1.0, noise=1e-3, seed=7)
prob = game.rate_problem()
print("competitive rates:", np.round(prob.competitive, 3))
print("interference-free rate totals:", np.round(prob.bin_rates.sum(axis=1), 3))

# Sorting bins by R_1/R_2 puts user 1's relatively best bins first. The
# prefix tables hold the surpluses of every split position.
tables = build_prefix_tables(game)
print("k_min, k_max:", tables.k_min, tables.k_max)

fast = solve_two_player(game, tables)
print("branch:", fast.branch, " shared bin (sorted position):", fast.k_s,
      " fraction:", round(fast.shared_fraction, 4))
print("bins to user 1:", np.flatnonzero(fast.allocation.alpha[0] == 1).tolist())
print("gain over competition:", np.round(fast.coop_rates / fast.disagreement_rates, 3))

###############################################################################
# The general solver reaches the same Nash product.
slow = solve_nbs_selective(game)
print("log Nash product, fast vs convex:", fast.nash_product_log, slow.nash_product_log)
print("convex solver iterations:", slow.iterations, " gap:", f"{slow.optimality_gap:.1e}")

###############################################################################
# Three users: at most three bins end up time-shared, and the KKT
# conditions certify optimality.
game3 = gen_rayleigh_selective(3, 64, 1.0, 10 ** -0.5, 1.0, 1e-3, seed=8)
out3 = solve_nbs_selective(game3)
n_shared, bins = count_shared_bins(out3.allocation)
print("three users: shared bins", bins, " KKT passes:", kkt_verify(game3, out3.allocation).passes())
print("gains:", np.round(out3.coop_rates / out3.disagreement_rates, 3))

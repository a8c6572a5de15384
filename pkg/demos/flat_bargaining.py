"""
Bargaining over a flat-fading band
==================================

Two users share a band. Competing, each spreads its power over the whole
band and suffers the other's interference. Bargaining, they split the band
into disjoint slices. This script walks through when that split pays off
and what it is worth.
"""

import numpy as np

from icbargain import (
    FlatGame,
    UtilityMode,
    competitive_rate_flat,
    f_share,
    nbs_exists_flat,
    solve_nbs_flat,
    two_player_sufficient,
)

# A moderately strong link and a weaker one: 20 dB and 15 dB, with
# asymmetric cross gains.
game = FlatGame.from_db([20.0, 15.0], [[0.0, 0.4], [0.7, 0.0]])
rc = competitive_rate_flat(game)
print("competitive rates [bit/s/Hz]:", np.round(rc, 4))

# Each user needs at least f_n of the band before a private slice beats
# its competitive rate. A split exists when these minima fit in the band.
report = nbs_exists_flat(game)
print("minimal shares:", np.round(report.min_shares, 4), "sum", round(report.share_sum, 4))
print("bargaining possible:", report.exists)

# The Nash bargaining split maximizes the product of rate gains.
out = solve_nbs_flat(game)
rho = out.allocation.alpha[:, 0]
print("band split:", np.round(rho, 5))
print("gain over competition:", np.round(out.coop_rates / rc, 3))

# Bargaining over log-rates weighs relative rather than absolute gains,
# which moves the split.
lr = solve_nbs_flat(game, UtilityMode.LOG_RATE)
print("log-rate split:", np.round(lr.allocation.alpha[:, 0], 5))

###############################################################################
# The minimal share shrinks as interference grows: the noisier the
# competitive outcome, the less band is needed to beat it.
for y in (1.0, 10.0, 40.0, 100.0):
    print(f"f(100, {y:>5}) = {f_share(100.0, y):.6f}")

###############################################################################
# A closed-form sufficient condition covers the two-user case. When it holds,
# the existence test must agree.
for snr_db in (0.0, 5.0, 10.0):
    s = 10 ** (snr_db / 10)
    suff = two_player_sufficient(s, s, 0.7, 0.7)
    exists = nbs_exists_flat(FlatGame.two_player(s, s, 0.7, 0.7)).exists
    print(f"SNR {snr_db:>4} dB: sufficient={suff!s:5} exists={exists}")

###############################################################################
# At low SNR competition is nearly noise-limited and nothing can be gained.
weak = FlatGame.two_player(0.5, 0.5, 0.3, 0.3)
print("weak links:", solve_nbs_flat(weak).status.value)

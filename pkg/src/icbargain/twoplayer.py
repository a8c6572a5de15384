"""Exact two-user Nash bargaining over K bins in O(K log K).

Sorting bins by the rate ratio ``L(k) = R_1(k) / R_2(k)`` turns the bargaining
problem into locating one split point: user 1 takes the bins with the largest
ratios, user 2 the rest, and at most one bin at the boundary is time-shared.
The split is found by comparing ``L(k)`` against the moving threshold
``Gamma_k = A_k / B_k`` of prefix surpluses.

Bin positions ``k`` in :class:`PrefixTables` are 1-based positions in sorted
order, so ``a[k]`` is ``A_k`` and ``b[k]`` is ``B_k`` for ``k = 0..K``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._optim import neumaier_cumsum
from .errors import InvalidGameError
from .game import (
    Allocation,
    BargainOutcome,
    Status,
    _frozen,
    as_rate_problem,
)

PURE_FDM = "pure-FDM"
INTERIOR_SHARE = "interior-share"
KMAX_SHARE = "kmax-share"
DISAGREEMENT = "disagreement"


@dataclass(frozen=True)
class PrefixTables:
    order: np.ndarray        # original bin index of each sorted position
    l_sorted: np.ndarray     # L at sorted positions 1..K (stored 0-based)
    r1_sorted: np.ndarray
    r2_sorted: np.ndarray
    a: np.ndarray            # A_0..A_K
    b: np.ndarray            # B_0..B_K
    k_min: int
    k_max: int
    competitive: np.ndarray

    @property
    def n_bins(self):
        return self.order.size

    def gamma(self, k):
        """``Gamma_k = A_k / B_k``; only meaningful while ``B_k > 0``."""
        if not self.b[k] > 0:
            raise ValueError(f"Gamma_{k} undefined: B_{k} = {self.b[k]!r} is not positive")
        return self.a[k] / self.b[k]

    def gamma_array(self):
        """All ``Gamma_k``, NaN where ``B_k <= 0``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.b > 0, self.a / np.where(self.b > 0, self.b, 1.0), np.nan)


@dataclass(frozen=True)
class TwoPlayerOutcome(BargainOutcome):
    k_s: int | None = None
    branch: str = DISAGREEMENT
    scan_steps: int = 0


def build_prefix_tables(game):
    """Sort bins by rate ratio and tabulate prefix surpluses.

    Ties in ``L(k)`` keep the original bin order.
    """
    prob = as_rate_problem(game)
    if prob.n_players != 2:
        raise InvalidGameError(f"two-player tables need N = 2, got N = {prob.n_players}")
    r1, r2 = prob.bin_rates
    if np.any(r2 <= 0):
        raise InvalidGameError("user 2 needs a positive rate on every bin")
    c1, c2 = prob.competitive
    ratio = r1 / r2
    order = np.argsort(-ratio, kind="stable")
    r1s, r2s = r1[order], r2[order]

    a = np.concatenate(([0.0], neumaier_cumsum(r1s))) - c1
    # B_k = sum_{m > k} R_2(m) - R_2C, built as a reversed cumulative sum
    tail = neumaier_cumsum(r2s[::-1])[::-1]
    b = np.concatenate((tail, [0.0])) - c2

    k = r1.size
    nonneg = np.flatnonzero(a[1:] >= 0)
    k_min = int(nonneg[0]) + 1 if nonneg.size else k + 1
    neg = np.flatnonzero(b[1:] < 0)
    k_max = int(neg[0]) + 1 if neg.size else k + 1
    return PrefixTables(
        _frozen(order, int), _frozen(ratio[order]), _frozen(r1s), _frozen(r2s),
        _frozen(a), _frozen(b), k_min, k_max, _frozen(prob.competitive),
    )


def share_fraction(tables, k_s):
    """``g = 1 + B_ks / (2 R_2(ks)) (1 - Gamma_ks / L(ks))``, the Nash-optimal share of bin ``k_s``.

    Written through ``A_ks`` directly so it also holds when ``B_ks < 0``.
    """
    r1, r2 = tables.r1_sorted[k_s - 1], tables.r2_sorted[k_s - 1]
    return 1.0 + tables.b[k_s] / (2.0 * r2) - tables.a[k_s] / (2.0 * r1)


def _disagreement(tables, steps):
    c = tables.competitive
    return TwoPlayerOutcome(
        Status.DISAGREEMENT, None, c, c, float("-inf"),
        branch=DISAGREEMENT, scan_steps=steps,
    )


def solve_two_player(game, tables=None):
    """Two-user Nash bargaining solution by threshold scan.

    Returns a :class:`TwoPlayerOutcome`; the allocation is reported in the
    original bin order, and ``k_s`` is the 1-based sorted position of the
    shared bin.
    """
    t = build_prefix_tables(game) if tables is None else tables
    K = t.n_bins
    if t.k_min > t.k_max or t.k_min > K:
        return _disagreement(t, 0)

    steps = 0
    k_s = None
    for k in range(t.k_min, t.k_max):
        steps += 1
        if t.l_sorted[k - 1] <= t.gamma(k):
            k_s = k
            break

    if k_s is not None:
        zeta = max(0.0, share_fraction(t, k_s))
        branch = INTERIOR_SHARE if 0.0 < zeta < 1.0 else PURE_FDM
    else:
        k_s = t.k_max
        if k_s > K:
            return _disagreement(t, steps)
        # g < 0 here means the split lies just before k_max with no sharing;
        # that is still a valid agreement whenever A_{k_max - 1} > 0, which the
        # surplus check below decides
        zeta = min(max(0.0, share_fraction(t, k_s)), 1.0)
        branch = KMAX_SHARE if 0.0 < zeta < 1.0 else PURE_FDM

    alpha_sorted = np.zeros(K)
    alpha_sorted[: k_s - 1] = 1.0
    alpha_sorted[k_s - 1] = zeta
    alpha1 = np.empty(K)
    alpha1[t.order] = alpha_sorted
    alpha = np.vstack((alpha1, 1.0 - alpha1))

    r1s, r2s = t.r1_sorted[k_s - 1], t.r2_sorted[k_s - 1]
    surplus = np.array([
        t.a[k_s - 1] + zeta * r1s,
        t.b[k_s] + (1.0 - zeta) * r2s,
    ])
    if np.any(surplus <= 0):
        return _disagreement(t, steps)
    coop = t.competitive + surplus
    shared = (int(t.order[k_s - 1]),) if 0.0 < zeta < 1.0 else ()
    return TwoPlayerOutcome(
        Status.SOLVED,
        Allocation(alpha),
        _frozen(coop),
        t.competitive,
        float(np.sum(np.log(surplus))),
        shared_bins=shared,
        shared_fraction=float(zeta),
        k_s=k_s,
        branch=branch,
        scan_steps=steps,
    )


def validate_outcome(outcome, tables, rtol=1e-9):
    """Check a solved outcome against the single-threshold structure.

    With ``Gamma = A / B`` taken from the outcome's surpluses, bins with
    ``L(k) > Gamma`` must belong to user 1, bins with ``L(k) < Gamma`` to
    user 2, and at most one bin may be split.
    """
    if not outcome.solved or outcome.allocation is None:
        return False
    surplus = np.asarray(outcome.surpluses)
    if np.any(surplus <= 0):
        return False
    gamma = surplus[0] / surplus[1]
    a1 = outcome.allocation.alpha[0][tables.order]
    lo, hi = gamma * (1 - rtol), gamma * (1 + rtol)
    above = tables.l_sorted > hi
    below = tables.l_sorted < lo
    if np.any(a1[above] < 1.0 - 1e-12) or np.any(a1[below] > 1e-12):
        return False
    fractional = np.count_nonzero((a1 > 1e-12) & (a1 < 1.0 - 1e-12))
    return fractional <= 1

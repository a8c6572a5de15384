"""Nash bargaining over FDM band splits for flat-fading interference games.

Users split the band into fractions ``rho`` and transmit interference-free in
their own slice. Bargaining is worthwhile only when every user can be given a
slice that beats its competitive (full-band, interference-limited) rate; the
smallest such slice is :func:`f_share`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ._optim import golden_section_max
from .errors import DomainError, InvalidGameError, NoRoot
from .game import (
    LOG2,
    Allocation,
    BargainOutcome,
    FlatGame,
    Status,
    _frozen,
    competitive_rate_flat,
    disagreement_outcome,
    fdm_rate,
)

_BISECT_XTOL = 1e-15
_BISECT_MAXITER = 200
_RHO_FLOOR = 1e-300


class UtilityMode(str, enum.Enum):
    RATE = "rate"
    LOG_RATE = "lograte"


@dataclass(frozen=True)
class ExistenceReport:
    exists: bool
    min_shares: np.ndarray
    share_sum: float


def _slice_capacity_root(x, target_log):
    """Root in rho of ``rho ln(1 + x/rho) = target_log`` on (0, 1]."""

    def g(rho):
        return rho * np.log1p(x / rho) - target_log

    if g(1.0) <= 0.0:
        return 1.0
    return optimize.bisect(g, _RHO_FLOOR, 1.0, xtol=_BISECT_XTOL, maxiter=_BISECT_MAXITER)


def f_share(x, y):
    """Smallest band fraction on which a user beats its competitive rate.

    Solves ``(1 + x/rho)^rho = 1 + x/(1 + y)`` for ``rho`` in (0, 1), where
    ``x`` is the user's SNR and ``y`` its normalized interference.
    """
    if not (x > 0 and y > 0):
        raise DomainError(f"f_share needs x > 0 and y > 0, got x={x!r}, y={y!r}")
    return _slice_capacity_root(float(x), float(np.log1p(x / (1.0 + y))))


def f_share_residual(x, y, rho):
    """``rho ln(1 + x/rho) - ln(1 + x/(1 + y))``; zero at ``rho = f_share(x, y)``."""
    return rho * np.log1p(x / rho) - np.log1p(x / (1.0 + y))


def h_share(x, z):
    """Band fraction solving ``(1 + x/rho)^rho = 1 + z``.

    The left side never exceeds ``1 + x`` on (0, 1], so there is no root for
    ``z > x``.
    """
    if not (x > 0 and z > 0):
        raise DomainError(f"h_share needs x > 0 and z > 0, got x={x!r}, z={z!r}")
    if z > x:
        raise NoRoot(f"(1 + x/rho)^rho <= 1 + x < 1 + z for all rho in (0, 1] (x={x!r}, z={z!r})")
    return _slice_capacity_root(float(x), float(np.log1p(z)))


def nbs_exists_flat(game):
    """Decide whether an FDM split strictly better than competition exists.

    A bargaining solution exists iff ``sum_n f(SNR_n, I_n) <= 1`` where ``I_n``
    is user ``n``'s normalized interference. Users that see no interference
    need the whole band (``f = 1``).
    """
    interference = game.interference()
    shares = np.array(
        [f_share(s, y) if y > 0 else 1.0 for s, y in zip(game.snr, interference)]
    )
    total = float(shares.sum())
    return ExistenceReport(total <= 1.0 + 1e-12, _frozen(shares), total)


def two_player_sufficient(snr1, snr2, alpha, beta):
    """Closed-form sufficient condition for a two-user bargaining solution."""
    if min(snr1, snr2, alpha, beta) <= 0:
        raise DomainError("all arguments must be positive")
    t1 = 0.5 * (alpha**2 * beta**4) ** (-1.0 / 3.0)
    t2 = 0.5 * (beta**2 * alpha**4) ** (-1.0 / 3.0)
    return bool(snr1 >= t1 and snr2 >= t2)


class _Utility:
    """Per-user utility of a band fraction and its derivative."""

    def __init__(self, game, mode):
        self.snr = game.snr
        self.w = game.bandwidth_w
        self.mode = UtilityMode(mode)
        rc = competitive_rate_flat(game)
        self.competitive_rate = rc
        self.competitive = rc if self.mode is UtilityMode.RATE else np.log(rc)

    def rate(self, n, rho):
        return float(fdm_rate(rho, self.snr[n], self.w))

    def value(self, n, rho):
        r = self.rate(n, rho)
        return r if self.mode is UtilityMode.RATE else np.log(r)

    def slope(self, n, rho):
        s = self.snr[n]
        d = 0.5 * self.w * (np.log1p(s / rho) - s / (rho + s)) / LOG2
        if self.mode is UtilityMode.LOG_RATE:
            d /= self.rate(n, rho)
        return d

    def surplus(self, n, rho):
        return self.value(n, rho) - self.competitive[n]


def _best_share(util, n, lam, lo):
    """Fraction where the marginal log-surplus of user ``n`` equals ``lam``."""

    def h(rho):
        return util.slope(n, rho) - lam * util.surplus(n, rho)

    if h(1.0) >= 0.0:
        return 1.0
    if h(lo) <= 0.0:
        return lo
    return optimize.brentq(h, lo, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def _solve_dual(util, floors):
    """Maximize ``sum_n ln(U_n(rho_n) - U_n^c)`` over the simplex.

    The objective is separable and concave, so at the optimum every user's
    marginal ``U_n' / (U_n - U_n^c)`` equals a common multiplier. Bisect on
    that multiplier until the shares fill the band exactly.
    """
    n = len(floors)

    def shares(log_lam):
        lam = np.exp(log_lam)
        return np.array([_best_share(util, i, lam, floors[i]) for i in range(n)])

    def excess(log_lam):
        return shares(log_lam).sum() - 1.0

    lo, hi = -5.0, 5.0
    while excess(lo) <= 0:
        lo -= 10.0
    while excess(hi) >= 0:
        hi += 10.0
    log_lam = optimize.brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    return shares(log_lam), float(np.exp(log_lam))


def _solve_golden(util, floors):
    """Two-user search on the scalar Nash function over ``rho_1``."""

    def log_nash(r):
        s1, s2 = util.surplus(0, r), util.surplus(1, 1.0 - r)
        if s1 <= 0 or s2 <= 0:
            return -np.inf
        return np.log(s1) + np.log(s2)

    r, _ = golden_section_max(log_nash, floors[0], 1.0 - floors[1], tol=1e-13)
    return np.array([r, 1.0 - r])


def solve_nbs_flat(game, mode=UtilityMode.RATE, method="dual"):
    """Nash bargaining FDM split for a flat-fading game.

    Parameters
    ----------
    game : FlatGame
    mode : UtilityMode
        ``RATE`` bargains over rates, ``LOG_RATE`` over their logarithms.
    method : {"dual", "golden"}
        ``dual`` handles any number of users; ``golden`` is a scalar search
        available for two users only.

    Returns
    -------
    BargainOutcome
        ``allocation.alpha[:, 0]`` holds the band fractions. When no split
        beats competition the status is ``DISAGREEMENT`` and both rate fields
        carry the competitive rates.
    """
    util = _Utility(game, mode)
    report = nbs_exists_flat(game)
    if not report.exists:
        return disagreement_outcome(util.competitive_rate)
    floors = np.asarray(report.min_shares)
    if method == "dual":
        rho, _ = _solve_dual(util, floors)
    elif method == "golden":
        if game.n_players != 2:
            raise InvalidGameError("golden-section search is only defined for two users")
        rho = _solve_golden(util, floors)
    else:
        raise ValueError(f"unknown method {method!r}")

    surplus = np.array([util.surplus(i, r) for i, r in enumerate(rho)])
    if np.any(surplus < 1e-12):
        return disagreement_outcome(util.competitive_rate)
    rates = fdm_rate(rho, game.snr, game.bandwidth_w)
    return BargainOutcome(
        Status.SOLVED,
        Allocation(rho),
        _frozen(rates),
        _frozen(util.competitive_rate),
        float(np.sum(np.log(surplus))),
    )


def marginal_ratios(game, rho, mode=UtilityMode.RATE):
    """``U_n'(rho_n) / (U_n(rho_n) - U_n^c)`` per user; equal at the optimum."""
    util = _Utility(game, mode)
    return np.array([util.slope(i, r) / util.surplus(i, r) for i, r in enumerate(rho)])

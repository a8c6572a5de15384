"""Game data model and rate formulas for Gaussian interference games.

Two channel models are supported:

* :class:`FlatGame` -- N users over a flat channel, described directly in
  terms of per-user SNR and normalized cross gains.
* :class:`SelectiveGame` -- N users over K frequency bins under a PSD mask.

Both reduce, for bargaining purposes, to a :class:`RateProblem`: the rate each
user gets from a bin it holds alone, and the rate it gets competitively.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGameError, NonPositiveSurplus

LOG2 = np.log(2.0)


def db_to_linear(db):
    """Convert a power ratio in dB to linear scale."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def _frozen(a, dtype=float):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FlatGame:
    """N-player flat-fading interference game.

    Parameters
    ----------
    snr : array_like, shape (N,)
        Linear SNR of each user, ``|h_nn|^2 P_n / (W N0 / 2)``.
    cross : array_like, shape (N, N)
        ``cross[n, j] = |h_nj|^2 / |h_jj|^2``, the gain of interferer ``j`` at
        receiver ``n`` normalized by ``j``'s own direct gain. The diagonal is
        ignored and stored as zero.
    bandwidth_w : float
        Bandwidth ``W``; rates carry a ``W/2`` prefactor.
    """

    snr: np.ndarray
    cross: np.ndarray
    bandwidth_w: float = 1.0

    def __post_init__(self):
        snr = np.asarray(self.snr, dtype=float)
        cross = np.array(self.cross, dtype=float)
        if snr.ndim != 1 or snr.size < 2:
            raise InvalidGameError("snr must be a vector with at least 2 entries")
        n = snr.size
        if cross.shape != (n, n):
            raise InvalidGameError(f"cross must have shape ({n}, {n}), got {cross.shape}")
        if not np.all(np.isfinite(snr)) or np.any(snr <= 0):
            raise InvalidGameError("all SNR values must be finite and strictly positive")
        np.fill_diagonal(cross, 0.0)
        if not np.all(np.isfinite(cross)) or np.any(cross < 0):
            raise InvalidGameError("cross gains must be finite and non-negative")
        if not (np.isfinite(self.bandwidth_w) and self.bandwidth_w > 0):
            raise InvalidGameError("bandwidth_w must be positive")
        object.__setattr__(self, "snr", _frozen(snr))
        object.__setattr__(self, "cross", _frozen(cross))
        object.__setattr__(self, "bandwidth_w", float(self.bandwidth_w))

    @property
    def n_players(self):
        return self.snr.size

    @classmethod
    def two_player(cls, snr1, snr2, alpha, beta, bandwidth_w=1.0):
        """Two-user game; ``alpha`` is the cross gain into user 1, ``beta`` into user 2."""
        return cls([snr1, snr2], [[0.0, alpha], [beta, 0.0]], bandwidth_w)

    @classmethod
    def from_db(cls, snr_db, cross, bandwidth_w=1.0):
        return cls(db_to_linear(snr_db), cross, bandwidth_w)

    @classmethod
    def from_physical(cls, h, power, noise_psd, bandwidth_w=1.0):
        """Build from raw channel amplitudes ``h[n, j]``, powers and noise PSD ``N0``.

        ``SNR_n = |h_nn|^2 P_n / (W N0 / 2)`` and ``cross[n, j] = |h_nj|^2 / |h_jj|^2``.
        """
        g = np.abs(np.asarray(h)) ** 2
        power = np.asarray(power, dtype=float)
        direct = np.diag(g)
        if np.any(direct <= 0):
            raise InvalidGameError("direct channel gains must be non-zero")
        snr = direct * power / (bandwidth_w * noise_psd / 2.0)
        return cls(snr, g / direct[None, :], bandwidth_w)

    def interference(self):
        """Normalized interference ``sum_{j != n} cross[n, j] SNR_j`` at each receiver."""
        return self.cross @ self.snr

    def permuted(self, perm):
        perm = np.asarray(perm)
        return FlatGame(self.snr[perm], self.cross[np.ix_(perm, perm)], self.bandwidth_w)


@dataclass(frozen=True)
class SelectiveGame:
    """N-player interference game over K unit-width frequency bins.

    Parameters
    ----------
    gains : array_like, shape (K, N, N)
        Power gains ``|h_ij(k)|^2``; ``gains[k, i, j]`` couples transmitter
        ``j`` into receiver ``i``.
    mask : array_like, shape (K,)
        Common PSD cap ``p(k)``.
    noise : array_like, shape (N, K)
        Receiver noise powers ``sigma_i^2(k)``, strictly positive.
    player_mask : array_like, shape (N, K), optional
        Per-user PSD caps ``p_i(k)``; defaults to the common mask.
    """

    gains: np.ndarray
    mask: np.ndarray
    noise: np.ndarray
    player_mask: np.ndarray | None = None

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=float)
        mask = np.asarray(self.mask, dtype=float)
        noise = np.asarray(self.noise, dtype=float)
        if gains.ndim != 3 or gains.shape[1] != gains.shape[2]:
            raise InvalidGameError(f"gains must have shape (K, N, N), got {gains.shape}")
        k, n, _ = gains.shape
        if n < 1 or k < 1:
            raise InvalidGameError("need at least one player and one bin")
        if mask.shape != (k,):
            raise InvalidGameError(f"mask must have shape ({k},), got {mask.shape}")
        if noise.shape != (n, k):
            raise InvalidGameError(f"noise must have shape ({n}, {k}), got {noise.shape}")
        if not np.all(np.isfinite(gains)) or np.any(gains < 0):
            raise InvalidGameError("gains must be finite and non-negative")
        if np.any(np.einsum("kii->ik", gains) <= 0):
            raise InvalidGameError("direct gains |h_ii(k)|^2 must be strictly positive")
        if not np.all(np.isfinite(mask)) or np.any(mask <= 0):
            raise InvalidGameError("mask must be strictly positive")
        if not np.all(np.isfinite(noise)) or np.any(noise <= 0):
            raise InvalidGameError("noise must be strictly positive (zero noise is non-physical)")
        if self.player_mask is None:
            pm = np.broadcast_to(mask, (n, k))
        else:
            pm = np.asarray(self.player_mask, dtype=float)
            if pm.shape != (n, k):
                raise InvalidGameError(f"player_mask must have shape ({n}, {k})")
            if not np.all(np.isfinite(pm)) or np.any(pm <= 0):
                raise InvalidGameError("player_mask must be strictly positive")
        object.__setattr__(self, "gains", _frozen(gains))
        object.__setattr__(self, "mask", _frozen(mask))
        object.__setattr__(self, "noise", _frozen(noise))
        object.__setattr__(self, "player_mask", _frozen(pm))

    @property
    def n_players(self):
        return self.gains.shape[1]

    @property
    def n_bins(self):
        return self.gains.shape[0]

    def direct_gains(self):
        """``|h_ii(k)|^2`` as an (N, K) array."""
        return np.einsum("kii->ik", self.gains)

    def rate_problem(self):
        return RateProblem(per_bin_rates(self), competitive_rate_selective(self))


@dataclass(frozen=True)
class RateProblem:
    """Bargaining data for the joint FDM/TDM game.

    ``bin_rates[i, k]`` is the rate user ``i`` gets from bin ``k`` when it has
    the bin to itself; ``competitive[i]`` is its disagreement rate. Built from
    a :class:`SelectiveGame` or from statistical channel knowledge.
    """

    bin_rates: np.ndarray
    competitive: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.bin_rates, dtype=float)
        c = np.asarray(self.competitive, dtype=float)
        if r.ndim != 2:
            raise InvalidGameError("bin_rates must be (N, K)")
        if c.shape != (r.shape[0],):
            raise InvalidGameError("competitive must have one entry per player")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(c))):
            raise InvalidGameError("rates must be finite")
        if np.any(r < 0) or np.any(c < 0):
            raise InvalidGameError("rates must be non-negative")
        object.__setattr__(self, "bin_rates", _frozen(r))
        object.__setattr__(self, "competitive", _frozen(c))

    @property
    def n_players(self):
        return self.bin_rates.shape[0]

    @property
    def n_bins(self):
        return self.bin_rates.shape[1]

    def surpluses(self, alpha):
        return np.sum(np.asarray(alpha) * self.bin_rates, axis=1) - self.competitive


def as_rate_problem(game):
    if isinstance(game, RateProblem):
        return game
    if isinstance(game, SelectiveGame):
        return game.rate_problem()
    raise TypeError(f"expected SelectiveGame or RateProblem, got {type(game).__name__}")


@dataclass(frozen=True)
class Allocation:
    """Time-share fractions ``alpha[i, k]`` of user ``i`` on bin ``k``.

    For flat games the band is a single bin and ``alpha[:, 0]`` holds the FDM
    fractions ``rho``.
    """

    alpha: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2:
            raise InvalidGameError("alpha must be an (N, K) array")
        tol = 1e-9
        if np.any(a < -tol) or np.any(a > 1 + tol):
            raise InvalidGameError("alpha entries must lie in [0, 1]")
        if np.any(a.sum(axis=0) > 1 + tol):
            raise InvalidGameError("per-bin shares must sum to at most 1")
        object.__setattr__(self, "alpha", _frozen(a))

    @property
    def n_players(self):
        return self.alpha.shape[0]

    @property
    def n_bins(self):
        return self.alpha.shape[1]


class Status(str, enum.Enum):
    SOLVED = "solved"
    DISAGREEMENT = "disagreement"


@dataclass(frozen=True)
class BargainOutcome:
    status: Status
    allocation: Allocation | None
    coop_rates: np.ndarray
    disagreement_rates: np.ndarray
    nash_product_log: float
    shared_bins: tuple = ()
    shared_fraction: float | None = None

    @property
    def solved(self):
        return self.status is Status.SOLVED

    @property
    def surpluses(self):
        return np.asarray(self.coop_rates) - np.asarray(self.disagreement_rates)


def disagreement_outcome(competitive, **extra):
    """Outcome echoing the competitive rates in both rate fields."""
    c = _frozen(competitive)
    return BargainOutcome(Status.DISAGREEMENT, None, c, c, float("-inf"), **extra)


@dataclass(frozen=True)
class PoaReport:
    delta_min: float
    delta_sum: float


# -- rate formulas ----------------------------------------------------------


def competitive_rate_flat(game):
    """Nash-equilibrium rates under flat power allocation.

    ``R^c_n = (W/2) log2(1 + SNR_n / (1 + sum_{j != n} cross[n, j] SNR_j))``.
    """
    sinr = game.snr / (1.0 + game.interference())
    return 0.5 * game.bandwidth_w * np.log2(1.0 + sinr)


def fdm_rate(rho, snr, bandwidth_w=1.0):
    """``(rho W / 2) log2(1 + snr / rho)``, zero at ``rho = 0``. Vectorized."""
    rho = np.asarray(rho, dtype=float)
    snr = np.asarray(snr, dtype=float)
    safe = np.where(rho > 0, rho, 1.0)
    val = 0.5 * bandwidth_w * rho * np.log1p(snr / safe) / LOG2
    return np.where(rho > 0, val, 0.0)


def fdm_rate_flat(game, rho):
    """Rate of each user when it holds a fraction ``rho[n]`` of the band alone."""
    rho = np.asarray(rho, dtype=float)
    if rho.shape != game.snr.shape:
        raise InvalidGameError(f"rho must have shape {game.snr.shape}")
    if np.any(rho < 0) or np.any(rho > 1):
        raise InvalidGameError("rho entries must lie in [0, 1]")
    if rho.sum() > 1 + 1e-12:
        raise InvalidGameError(f"band fractions sum to {rho.sum()!r} > 1")
    return fdm_rate(rho, game.snr, game.bandwidth_w)


def competitive_rate_selective(game):
    """Full-mask competitive rates ``R_iC`` summed over bins."""
    g = game.gains
    p = game.player_mask  # (N, K)
    # received[k, i, j] = |h_ij(k)|^2 p_j(k)
    received = g * p.T[:, None, :]
    signal = np.einsum("kii->ik", received)
    interference = received.sum(axis=2).T - signal
    return np.sum(np.log2(1.0 + signal / (interference + game.noise)), axis=1)


def per_bin_rates(game):
    """Interference-free rates ``R_i(k) = log2(1 + |h_ii(k)|^2 p_i(k) / sigma_i^2(k))``, shape (N, K)."""
    return np.log2(1.0 + game.direct_gains() * game.player_mask / game.noise)


def per_bin_rate(game, i, k):
    n, nb = game.n_players, game.n_bins
    if not (0 <= i < n and 0 <= k < nb):
        raise IndexError(f"(i, k) = ({i}, {k}) outside ({n}, {nb})")
    return float(np.log2(1.0 + game.gains[k, i, i] * game.player_mask[i, k] / game.noise[i, k]))


def tdm_fdm_rate_selective(game, alloc):
    """``R_i(alpha_i) = sum_k alpha_i(k) R_i(k)`` for every user."""
    alpha = alloc.alpha if isinstance(alloc, Allocation) else np.asarray(alloc, dtype=float)
    if alpha.shape != (game.n_players, game.n_bins):
        raise InvalidGameError(
            f"allocation shape {alpha.shape} does not match game ({game.n_players}, {game.n_bins})"
        )
    return np.sum(alpha * per_bin_rates(game), axis=1)


def nash_product_log(coop, disagreement):
    """Log of the Nash product, ``sum_n ln(coop[n] - disagreement[n])``."""
    s = np.asarray(coop, dtype=float) - np.asarray(disagreement, dtype=float)
    bad = np.flatnonzero(~(s > 0))
    if bad.size:
        raise NonPositiveSurplus(int(bad[0]), float(s[bad[0]]))
    return float(np.sum(np.log(s)))

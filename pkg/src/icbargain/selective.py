"""Joint FDM/TDM Nash bargaining for N users over K frequency bins.

The bargaining problem

    maximize    sum_i ln S_i(alpha),   S_i = sum_k alpha_i(k) R_i(k) - R_iC
    subject to  sum_i alpha_i(k) = 1,  alpha_i(k) >= 0

is concave with one probability simplex per bin. It is solved in two phases:
a max-min linear program that decides whether every user can gain at all,
then projected gradient ascent on the log Nash product started from the LP
point. Optimality is certified through the KKT conditions (:func:`kkt_verify`).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ._optim import project_columns_to_simplex
from .errors import InvalidGameError, IterationLimit, NonPositiveSurplus
from .game import (
    Allocation,
    BargainOutcome,
    RateProblem,
    SelectiveGame,
    Status,
    _frozen,
    as_rate_problem,
    competitive_rate_selective,
    per_bin_rates,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverSettings:
    max_outer_iterations: int = 500
    objective_tolerance: float = 1e-10
    sharing_tolerance: float = 1e-7
    feasibility_margin: float = 1e-9

    def __post_init__(self):
        for name in ("max_outer_iterations", "objective_tolerance",
                     "sharing_tolerance", "feasibility_margin"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SelectiveOutcome(BargainOutcome):
    iterations: int = 0
    optimality_gap: float = float("nan")
    max_min_surplus: float = float("nan")
    objective_history: tuple = ()


@dataclass(frozen=True)
class KktReport:
    lam: np.ndarray
    mu: np.ndarray
    delta: np.ndarray
    stationarity_residual: float
    complementarity_residual: float

    def passes(self, tol=1e-6):
        scale = float(np.max(self.lam))
        return (self.stationarity_residual <= tol * scale
                and self.complementarity_residual <= tol * scale
                and not np.any(self.delta))


def ratio_matrix(game, i, j):
    """``L_ij(k) = R_i(k) / R_j(k)``; +inf where ``R_j(k) = 0``."""
    r = as_rate_problem(game).bin_rates
    num, den = r[i], r[j]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    if i == j:
        out = np.ones_like(out)
    return out


def count_shared_bins(alloc, eps=1e-7):
    """Number and indices of bins used by two or more users above ``eps``."""
    alpha = alloc.alpha if isinstance(alloc, Allocation) else np.asarray(alloc)
    bins = np.flatnonzero(np.count_nonzero(alpha > eps, axis=0) >= 2)
    return int(bins.size), tuple(int(b) for b in bins)


def max_min_surplus(prob):
    """Phase 1: ``max_alpha min_i S_i(alpha)`` as a linear program.

    Returns ``(t, alpha)``.
    """
    n, k = prob.n_players, prob.n_bins
    r = prob.bin_rates
    nv = n * k + 1
    c = np.zeros(nv)
    c[-1] = -1.0
    # t - sum_k alpha_ik R_ik <= -R_iC
    a_ub = np.zeros((n, nv))
    for i in range(n):
        a_ub[i, i * k:(i + 1) * k] = -r[i]
    a_ub[:, -1] = 1.0
    b_ub = -np.asarray(prob.competitive)
    a_eq = np.zeros((k, nv))
    for i in range(n):
        a_eq[np.arange(k), i * k + np.arange(k)] = 1.0
    b_eq = np.ones(k)
    bounds = [(0.0, 1.0)] * (n * k) + [(None, None)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"phase-1 linear program failed: {res.message}")
    alpha = project_columns_to_simplex(res.x[:-1].reshape(n, k))
    return float(res.x[-1]), alpha


def _objective(prob, alpha):
    s = prob.surpluses(alpha)
    if np.any(s <= 0):
        return -np.inf, s
    return float(np.sum(np.log(s))), s


def frank_wolfe_gap(prob, alpha, surplus=None):
    """Upper bound on ``f* - f(alpha)`` for the log Nash product.

    ``sum_k (max_i G_ik - sum_i alpha_ik G_ik)`` with ``G = R / S``; zero
    exactly at the optimum.
    """
    if surplus is None:
        surplus = prob.surpluses(alpha)
    grad = prob.bin_rates / surplus[:, None]
    return float(np.sum(grad.max(axis=0) - np.sum(alpha * grad, axis=0)))


def _ascend(prob, alpha, settings):
    """Projected gradient ascent with Barzilai-Borwein steps and Armijo backtracking."""
    f, s = _objective(prob, alpha)
    r = prob.bin_rates
    step = 1.0 / float(np.max(np.sum(r**2, axis=1) / s**2))
    history = [f]
    prev = None
    gap = frank_wolfe_gap(prob, alpha, s)
    it = 0
    while gap > settings.objective_tolerance:
        if it >= settings.max_outer_iterations:
            return alpha, s, f, gap, it, history, False
        it += 1
        grad = r / s[:, None]
        if prev is not None:
            dx = alpha - prev[0]
            dg = grad - prev[1]
            curv = -float(np.sum(dx * dg))
            if curv > 0:
                step = float(np.sum(dx * dx)) / curv
        prev = (alpha, grad)
        t = step
        # near the optimum f is flat to rounding while the gap is still visible;
        # steps that keep f within rounding and shrink the gap are accepted then
        f_noise = 16.0 * np.finfo(float).eps * max(1.0, abs(f))
        cand, fc, sc, gc = alpha, f, s, gap
        while t >= 1e-30:
            trial = project_columns_to_simplex(alpha + t * grad)
            ft, st = _objective(prob, trial)
            if ft >= f + 1e-4 * float(np.sum(grad * (trial - alpha))) and ft > f:
                cand, fc, sc, gc = trial, ft, st, frank_wolfe_gap(prob, trial, st)
                break
            if ft >= f - f_noise:
                gt = frank_wolfe_gap(prob, trial, st)
                if gt < gap:
                    cand, fc, sc, gc = trial, ft, st, gt
                    break
            t *= 0.5
        stalled = cand is alpha
        alpha, f, s, gap = cand, fc, sc, gc
        history.append(f)
        if stalled:
            # no representable ascent step remains
            break
    return alpha, s, f, gap, it, history, gap <= settings.objective_tolerance


def _disagreement(prob, t_star=float("nan")):
    c = _frozen(prob.competitive)
    return SelectiveOutcome(Status.DISAGREEMENT, None, c, c, float("-inf"),
                            max_min_surplus=t_star)


def solve_nbs_selective(game, settings=None):
    """Nash bargaining FDM/TDM allocation for any number of users.

    Parameters
    ----------
    game : SelectiveGame or RateProblem
    settings : SolverSettings, optional

    Returns
    -------
    SelectiveOutcome

    Raises
    ------
    IterationLimit
        If the optimality gap is still above tolerance after
        ``max_outer_iterations``; the best iterate is attached.
    """
    settings = settings or SolverSettings()
    prob = as_rate_problem(game)
    t_star, alpha0 = max_min_surplus(prob)
    if t_star <= settings.feasibility_margin:
        return _disagreement(prob, t_star)

    alpha, s, f, gap, it, history, converged = _ascend(prob, alpha0, settings)
    n_shared, shared = count_shared_bins(alpha, settings.sharing_tolerance)
    outcome = SelectiveOutcome(
        Status.SOLVED,
        Allocation(alpha),
        _frozen(prob.competitive + s),
        _frozen(prob.competitive),
        f,
        shared_bins=shared,
        iterations=it,
        optimality_gap=gap,
        max_min_surplus=t_star,
        objective_history=tuple(history),
    )
    if not converged:
        raise IterationLimit(
            f"optimality gap {gap:.3e} above {settings.objective_tolerance:.1e} "
            f"after {it} iterations", outcome=outcome, residual=gap)
    log.debug("selective NBS converged in %d iterations, gap %.2e", it, gap)
    return outcome


def kkt_verify(game, alloc, surpluses=None, eps=1e-7):
    """KKT certificate for a candidate bargaining allocation.

    With ``S_i`` the surpluses, the bin multiplier is
    ``lambda_k = max_i R_i(k) / S_i`` and ``mu_i(k) = lambda_k - R_i(k) / S_i``.
    Users holding part of a bin (``alpha > eps``) must attain the maximum.
    """
    prob = as_rate_problem(game)
    alpha = alloc.alpha if isinstance(alloc, Allocation) else np.asarray(alloc, dtype=float)
    if alpha.shape != prob.bin_rates.shape:
        raise InvalidGameError("allocation does not match the game dimensions")
    s = prob.surpluses(alpha) if surpluses is None else np.asarray(surpluses, dtype=float)
    bad = np.flatnonzero(~(s > 0))
    if bad.size:
        raise NonPositiveSurplus(int(bad[0]), float(s[bad[0]]))
    ratios = prob.bin_rates / s[:, None]
    lam = ratios.max(axis=0)
    mu = lam[None, :] - ratios
    active = alpha > eps
    stationarity = float(np.max(mu[active], initial=0.0))
    complementarity = float(np.max(mu * alpha, initial=0.0))
    return KktReport(_frozen(lam), _frozen(mu), np.zeros(prob.n_players),
                     stationarity, complementarity)


# -- statistical channel knowledge ------------------------------------------


@dataclass(frozen=True)
class FadingSpec:
    """Per-link fading statistics over K bins.

    Each ``h_ij(k)`` is ``los[k, i, j] + CN(0, scatter[k, i, j])``: a fixed
    line-of-sight amplitude plus circularly-symmetric complex Gaussian
    scatter of the given mean power. ``los = 0`` gives Rayleigh fading,
    ``scatter = 0`` a deterministic channel.
    """

    scatter: np.ndarray
    mask: np.ndarray
    noise: np.ndarray
    los: np.ndarray | None = None

    def __post_init__(self):
        sc = np.asarray(self.scatter, dtype=float)
        if sc.ndim != 3 or sc.shape[1] != sc.shape[2] or np.any(sc < 0):
            raise InvalidGameError("scatter must be a non-negative (K, N, N) array")
        los = np.zeros(sc.shape) if self.los is None else np.asarray(self.los, dtype=complex)
        if los.shape != sc.shape:
            raise InvalidGameError("los must match scatter's shape")
        object.__setattr__(self, "scatter", _frozen(sc))
        object.__setattr__(self, "los", _frozen(los, complex))
        object.__setattr__(self, "mask", _frozen(self.mask))
        object.__setattr__(self, "noise", _frozen(self.noise))

    @classmethod
    def rayleigh(cls, scales, mask, noise):
        return cls(scales, mask, noise)

    def mean_game(self):
        """Game with deterministic gains ``|los|^2`` (exact when scatter is zero)."""
        return SelectiveGame(np.abs(self.los) ** 2, self.mask, self.noise)


_CHUNK = 1024


def expected_rates_statistical(fading, n_samples, seed=0):
    """Monte Carlo estimates of expected competitive and per-bin rates.

    Returns ``(competitive, bin_rates)`` with shapes (N,) and (N, K).
    Samples are drawn in fixed-size chunks, each from its own Philox stream
    spawned from ``seed``, so results do not depend on evaluation order.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    if not np.any(fading.scatter):
        game = fading.mean_game()
        return competitive_rate_selective(game), per_bin_rates(game)

    k, n, _ = fading.scatter.shape
    n_chunks = -(-n_samples // _CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    rc_sum = np.zeros(n)
    r_sum = np.zeros((n, k))
    amp = np.sqrt(fading.scatter / 2.0)
    for c, child in enumerate(children):
        m = min(_CHUNK, n_samples - c * _CHUNK)
        rng = np.random.Generator(np.random.Philox(child))
        z = rng.standard_normal((m, k, n, n, 2))
        h = fading.los + amp * (z[..., 0] + 1j * z[..., 1])
        g = np.abs(h) ** 2
        p = np.broadcast_to(fading.mask, (n, k))
        received = g * p.T[None, :, None, :]
        signal = np.einsum("mkii->mik", received)
        interference = received.sum(axis=3).transpose(0, 2, 1) - signal
        noise = fading.noise[None]
        rc_sum += np.log2(1.0 + signal / (interference + noise)).sum(axis=(0, 2))
        r_sum += np.log2(1.0 + signal / noise).sum(axis=0)
    return rc_sum / n_samples, r_sum / n_samples


def statistical_rate_problem(fading, n_samples, seed=0):
    """Bargaining problem built from expected rates; solve it like any other."""
    rc, r = expected_rates_statistical(fading, n_samples, seed)
    return RateProblem(r, rc)

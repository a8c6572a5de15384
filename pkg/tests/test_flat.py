import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icbargain import (
    DomainError,
    FlatGame,
    NoRoot,
    Status,
    UtilityMode,
    competitive_rate_flat,
    f_share,
    h_share,
    nbs_exists_flat,
    solve_nbs_flat,
    two_player_sufficient,
)
from icbargain.flat import f_share_residual, marginal_ratios
from icbargain.game import fdm_rate

# grid scan for the sign change, then 200 mpmath bisection steps at 40 digits
F_100_40 = 0.19844262099669719481
# mpmath findroot on the defining equations
F_100_10 = 0.42253523006374535138
H_100_10 = 0.4419078778376165235


class TestFShare:
    def test_reference_value(self):
        f = f_share(100.0, 40.0)
        assert f == pytest.approx(F_100_40, abs=1e-13)
        assert abs(f_share_residual(100.0, 40.0, f)) < 1e-10

    def test_vanishing_interference_needs_whole_band(self):
        assert f_share(10.0, 1e-9) > 1 - 1e-6

    def test_decreasing_in_interference(self):
        assert f_share(100.0, 10.0) > f_share(100.0, 50.0)
        assert f_share(100.0, 10.0) == pytest.approx(F_100_10, abs=1e-13)

    @pytest.mark.parametrize("x,y", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (1.0, -3.0)])
    def test_domain(self, x, y):
        with pytest.raises(DomainError):
            f_share(x, y)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(1e-3, 1e5), st.floats(1e-3, 1e5))
    def test_root_properties(self, x, y):
        f = f_share(x, y)
        assert 0 < f < 1
        assert abs(f_share_residual(x, y, f)) < 1e-10
        assert f_share(x, y * 1.5) < f


class TestHShare:
    def test_reference_value(self):
        assert h_share(100.0, 10.0) == pytest.approx(H_100_10, abs=1e-13)

    @pytest.mark.parametrize("x", [0.01, 1.0, 37.0, 1e4])
    def test_full_band_when_z_equals_x(self, x):
        assert h_share(x, x) == 1.0

    def test_exceeds_f_at_ratio(self):
        # z = x / y > x / (1 + y)
        x, y = 100.0, 10.0
        assert h_share(x, x / y) > f_share(x, y)

    def test_decreasing_in_snr(self):
        assert h_share(10.0, 2.0) > h_share(100.0, 2.0)

    def test_no_root(self):
        with pytest.raises(NoRoot):
            h_share(2.0, 3.0)


class TestExistence:
    def test_no_interference(self):
        rep = nbs_exists_flat(FlatGame([10.0, 20.0, 5.0], np.zeros((3, 3))))
        np.testing.assert_array_equal(rep.min_shares, [1.0, 1.0, 1.0])
        assert rep.share_sum == 3.0
        assert not rep.exists

    @pytest.mark.parametrize("a", [0.2, 0.5, 0.9, 1.0])
    def test_symmetric_threshold(self, a):
        snr = 1.01 / (2 * a * a)
        assert nbs_exists_flat(FlatGame.two_player(snr, snr, a, a)).exists

    def test_low_snr_impossibility(self, rng):
        for _ in range(200):
            a, b = rng.uniform(0, 1, 2)
            if a + b >= 1:
                continue
            total = rng.uniform(0, 1) * (1 - a - b) / (a * b)
            s1 = rng.uniform(0.01, 0.99) * total
            assert not nbs_exists_flat(FlatGame.two_player(s1, total - s1, a, b)).exists

    def test_report_consistency(self, rng):
        g = FlatGame(rng.uniform(1, 1e3, 4), rng.uniform(0, 1, (4, 4)))
        rep = nbs_exists_flat(g)
        assert rep.share_sum == pytest.approx(rep.min_shares.sum())
        assert rep.exists == (rep.share_sum <= 1)
        assert np.all((rep.min_shares > 0) & (rep.min_shares < 1))


class TestSufficientCondition:
    def test_direct_substitution(self):
        assert two_player_sufficient(0.6, 0.6, 1.0, 1.0)
        assert not two_player_sufficient(0.4, 0.6, 1.0, 1.0)

    @pytest.mark.parametrize("a", [0.1, 0.5, 0.8])
    def test_symmetric_special_case(self, a):
        snr = 1 / (2 * a * a)
        assert two_player_sufficient(snr * (1 + 1e-12), snr * (1 + 1e-12), a, a)

    def test_implies_existence(self, rng):
        hits = 0
        for _ in range(2000):
            a, b = rng.uniform(0.01, 1, 2)
            s1, s2 = 10 ** rng.uniform(-1, 4, 2)
            if two_player_sufficient(s1, s2, a, b):
                hits += 1
                assert nbs_exists_flat(FlatGame.two_player(s1, s2, a, b)).exists
        assert hits > 100


def _rho(outcome):
    return outcome.allocation.alpha[:, 0]


class TestSolveFlat:
    def test_symmetric_game_splits_evenly(self):
        out = solve_nbs_flat(FlatGame.two_player(200.0, 200.0, 0.6, 0.6))
        np.testing.assert_allclose(_rho(out), [0.5, 0.5], atol=1e-12)

    def test_reference_point_gains(self):
        g = FlatGame.two_player(100.0, 10**1.5, 0.4, 0.7)
        t0 = time.perf_counter()
        out = solve_nbs_flat(g)
        elapsed = time.perf_counter() - t0
        ratio = out.coop_rates / out.disagreement_rates
        assert 1.45 <= ratio[0] <= 1.75 and 3.5 <= ratio[1] <= 4.5
        assert elapsed < 1.0

    def test_matches_grid_search(self):
        g = FlatGame.two_player(100.0, 10**1.5, 0.4, 0.7)
        rc = competitive_rate_flat(g)
        rho = np.linspace(0.0, 1.0, 1_000_001)
        s1 = fdm_rate(rho, g.snr[0]) - rc[0]
        s2 = fdm_rate(1 - rho, g.snr[1]) - rc[1]
        nash = np.where((s1 > 0) & (s2 > 0), s1 * s2, -np.inf)
        best = rho[np.argmax(nash)]
        assert _rho(solve_nbs_flat(g))[0] == pytest.approx(best, abs=1e-5)

    @pytest.mark.parametrize("mode", list(UtilityMode))
    def test_optimality_and_dominance(self, rng, mode):
        for _ in range(30):
            n = int(rng.integers(2, 5))
            g = FlatGame(10 ** rng.uniform(1, 4, n), rng.uniform(0.2, 1, (n, n)))
            out = solve_nbs_flat(g, mode)
            if not out.solved:
                assert not nbs_exists_flat(g).exists
                continue
            rho = _rho(out)
            assert rho.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(out.coop_rates > out.disagreement_rates)
            m = marginal_ratios(g, rho, mode)
            np.testing.assert_allclose(m, m[0], rtol=1e-6)

    @pytest.mark.parametrize("mode", list(UtilityMode))
    def test_golden_and_dual_agree(self, rng, mode):
        checked = 0
        for _ in range(50):
            s1, s2 = 10 ** rng.uniform(0, 4, 2)
            a, b = rng.uniform(0, 1, 2)
            g = FlatGame.two_player(s1, s2, a, b)
            d = solve_nbs_flat(g, mode, method="dual")
            gs = solve_nbs_flat(g, mode, method="golden") if d.solved else None
            if d.solved:
                checked += 1
                np.testing.assert_allclose(_rho(d), _rho(gs), atol=1e-6)
        assert checked > 10

    def test_modes_differ_but_both_dominate(self):
        g = FlatGame.two_player(100.0, 10**1.5, 0.4, 0.7)
        r = solve_nbs_flat(g, UtilityMode.RATE)
        lr = solve_nbs_flat(g, UtilityMode.LOG_RATE)
        assert abs(_rho(r)[0] - _rho(lr)[0]) > 1e-3
        for out in (r, lr):
            assert _rho(out).sum() == pytest.approx(1.0)
            assert np.all(out.coop_rates > out.disagreement_rates)

    def test_disagreement_echoes_competitive(self):
        g = FlatGame([10.0, 20.0], np.zeros((2, 2)))
        out = solve_nbs_flat(g)
        assert out.status is Status.DISAGREEMENT
        assert out.allocation is None
        np.testing.assert_array_equal(out.coop_rates, competitive_rate_flat(g))
        np.testing.assert_array_equal(out.disagreement_rates, competitive_rate_flat(g))

    def test_golden_needs_two_users(self):
        g = FlatGame([100.0] * 3, np.full((3, 3), 0.5))
        with pytest.raises(ValueError):
            solve_nbs_flat(g, method="golden")

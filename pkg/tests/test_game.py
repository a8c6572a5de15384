import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from icbargain import (
    Allocation,
    FlatGame,
    InvalidGameError,
    NonPositiveSurplus,
    SelectiveGame,
    competitive_rate_flat,
    competitive_rate_selective,
    fdm_rate_flat,
    nash_product_log,
    per_bin_rate,
    per_bin_rates,
    tdm_fdm_rate_selective,
)
from oracles import rayleigh_game

# 40-digit evaluations of the competitive-rate and FDM-rate formulas (mpmath)
REF_COMPETITIVE = (1.5288537696668221411, 0.26573001777859351288)
HALF_BAND_SNR100 = 1.9127629227947321536


def reference_game():
    return FlatGame.two_player(100.0, 10**1.5, 0.4, 0.7)


class TestFlatGame:
    def test_validation(self):
        with pytest.raises(InvalidGameError):
            FlatGame([10.0], [[0.0]])
        with pytest.raises(InvalidGameError):
            FlatGame([10.0, -1.0], np.zeros((2, 2)))
        with pytest.raises(InvalidGameError):
            FlatGame([10.0, 1.0], [[0, -0.1], [0, 0]])
        with pytest.raises(InvalidGameError):
            FlatGame([10.0, 1.0], np.zeros((3, 3)))

    def test_diagonal_ignored_and_frozen(self):
        g = FlatGame([1.0, 2.0], [[5.0, 0.3], [0.2, 7.0]])
        assert np.all(np.diag(g.cross) == 0)
        with pytest.raises(ValueError):
            g.snr[0] = 3.0
        with pytest.raises(AttributeError):
            g.bandwidth_w = 2.0  # type: ignore[misc]

    def test_from_physical(self):
        h = np.array([[1.0, 0.5], [0.3, 2.0]])
        g = FlatGame.from_physical(h, power=[2.0, 1.0], noise_psd=0.5, bandwidth_w=2.0)
        # noise power W N0 / 2 = 0.5
        np.testing.assert_allclose(g.snr, [4.0, 8.0])
        np.testing.assert_allclose(g.cross, [[0.0, 0.25 / 4.0], [0.09, 0.0]])


class TestCompetitiveFlat:
    def test_no_interference_is_point_to_point(self):
        g = FlatGame([7.0, 30.0], np.zeros((2, 2)))
        np.testing.assert_allclose(competitive_rate_flat(g), 0.5 * np.log2(1 + g.snr))

    def test_reference_operating_point(self):
        np.testing.assert_allclose(competitive_rate_flat(reference_game()), REF_COMPETITIVE, rtol=1e-14)

    def test_bandwidth_scales_rates(self):
        g = reference_game()
        g2 = FlatGame(g.snr, g.cross, bandwidth_w=3.0)
        np.testing.assert_allclose(competitive_rate_flat(g2), 3.0 * competitive_rate_flat(g))

    def test_permutation_equivariance(self, rng):
        snr = rng.uniform(1, 100, 4)
        cross = rng.uniform(0, 1, (4, 4))
        g = FlatGame(snr, cross)
        perm = np.array([2, 0, 3, 1])
        np.testing.assert_allclose(competitive_rate_flat(g.permuted(perm)),
                                   competitive_rate_flat(g)[perm])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.1, 1e4), min_size=3, max_size=3),
           st.floats(0.0, 2.0), st.floats(1e-3, 1.0), st.integers(0, 5))
    def test_decreasing_in_every_cross_gain(self, snr, base, bump, which):
        pairs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        n, j = pairs[which]
        cross = np.full((3, 3), base)
        g0 = FlatGame(snr, cross)
        cross[n, j] += bump
        g1 = FlatGame(snr, cross)
        assert competitive_rate_flat(g1)[n] < competitive_rate_flat(g0)[n]


class TestFdmRateFlat:
    def test_full_band_and_empty(self):
        g = reference_game()
        r = fdm_rate_flat(g, [1.0, 0.0])
        assert r[0] == pytest.approx(0.5 * np.log2(101.0), rel=1e-15)
        assert r[1] == 0.0

    def test_half_band(self):
        g = FlatGame([100.0, 1.0], np.zeros((2, 2)))
        assert fdm_rate_flat(g, [0.5, 0.5])[0] == pytest.approx(HALF_BAND_SNR100, rel=1e-15)

    def test_rejects_bad_fractions(self):
        g = reference_game()
        with pytest.raises(InvalidGameError):
            fdm_rate_flat(g, [-0.1, 0.5])
        with pytest.raises(InvalidGameError):
            fdm_rate_flat(g, [0.6, 0.5])
        fdm_rate_flat(g, [0.5, 0.5 + 5e-13])

    @pytest.mark.parametrize("snr", [0.01, 1.0, 100.0, 1e4])
    def test_increasing_and_concave(self, snr):
        g = FlatGame([snr, 1.0], np.zeros((2, 2)))
        rho = np.linspace(1e-3, 1.0, 2001)
        r = np.array([fdm_rate_flat(g, [x, 0.0])[0] for x in rho])
        assert np.all(np.diff(r) > 0)
        assert np.all(np.diff(r, 2) < 0)


class TestSelectiveRates:
    def test_per_bin_rate_one_bit(self):
        g = SelectiveGame([[[2.0, 0.1], [0.1, 1.0]]], [0.5], [[1.0], [0.25]])
        assert per_bin_rate(g, 0, 0) == 1.0
        assert per_bin_rate(g, 1, 0) == pytest.approx(np.log2(3.0))
        with pytest.raises(IndexError):
            per_bin_rate(g, 2, 0)

    def test_zero_noise_forbidden(self):
        with pytest.raises(InvalidGameError):
            SelectiveGame(np.ones((1, 2, 2)), [1.0], [[0.0], [1.0]])

    def test_zero_cross_gives_full_rates(self, rng):
        g = rayleigh_game(rng, n_bins=8)
        gains = np.array(g.gains)
        gains[:, 0, 1] = gains[:, 1, 0] = 0.0
        g0 = SelectiveGame(gains, g.mask, g.noise)
        np.testing.assert_allclose(competitive_rate_selective(g0), per_bin_rates(g0).sum(axis=1))

    def test_single_bin_matches_flat_with_w2(self):
        gains = np.array([[[2.0, 0.3], [0.5, 1.5]]])
        # flat games share one noise level across receivers
        noise = np.array([[0.1], [0.1]])
        g = SelectiveGame(gains, [1.0], noise)
        snr = np.array([2.0 / 0.1, 1.5 / 0.1])
        cross = np.array([[0.0, 0.3 / 1.5], [0.5 / 2.0, 0.0]])
        flat = FlatGame(snr, cross, bandwidth_w=2.0)
        np.testing.assert_allclose(competitive_rate_selective(g), competitive_rate_flat(flat))

    def test_competitive_matches_summation_oracle(self, rng):
        g = rayleigh_game(rng, n_bins=8, sir_db=3.0)
        expected = np.zeros(2)
        for i in range(2):
            for k in range(8):
                sig = g.gains[k, i, i] * g.mask[k]
                intf = sum(g.gains[k, i, j] * g.mask[k] for j in range(2) if j != i)
                expected[i] += np.log2(1 + sig / (intf + g.noise[i, k]))
        np.testing.assert_allclose(competitive_rate_selective(g), expected, rtol=1e-13)

    def test_tdm_fdm_rate(self, rng):
        g = rayleigh_game(rng, n_bins=8, n_players=3)
        alpha = rng.dirichlet(np.ones(3), size=8).T
        expected = [sum(alpha[i, k] * per_bin_rate(g, i, k) for k in range(8)) for i in range(3)]
        np.testing.assert_allclose(tdm_fdm_rate_selective(g, Allocation(alpha)), expected, rtol=1e-13)
        np.testing.assert_allclose(tdm_fdm_rate_selective(g, Allocation(alpha / 2)),
                                   np.array(expected) / 2, rtol=1e-13)
        full = np.zeros((3, 8))
        full[1] = 1.0
        r = tdm_fdm_rate_selective(g, Allocation(full))
        assert r[1] == pytest.approx(per_bin_rates(g)[1].sum())
        assert r[0] == r[2] == 0.0
        with pytest.raises(InvalidGameError):
            tdm_fdm_rate_selective(g, Allocation(np.full((2, 8), 0.5)))

    def test_indicator_allocation_gives_per_bin_rate(self, rng):
        g = rayleigh_game(rng, n_bins=5)
        for i in range(2):
            for k in range(5):
                a = np.zeros((2, 5))
                a[i, k] = 1.0
                assert tdm_fdm_rate_selective(g, a)[i] == per_bin_rate(g, i, k)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(1, 16))
    def test_interference_never_helps(self, seed, n, k):
        r = np.random.default_rng(seed)
        g = rayleigh_game(r, n_bins=k, n_players=n, sir_db=r.uniform(-5, 15))
        assert np.all(competitive_rate_selective(g) < per_bin_rates(g).sum(axis=1))
        gains = np.array(g.gains)
        gains[:, 0, 1:] = 0.0
        g0 = SelectiveGame(gains, g.mask, g.noise)
        assert competitive_rate_selective(g0)[0] == pytest.approx(per_bin_rates(g0)[0].sum(), rel=1e-14)


class TestAllocation:
    def test_invariants(self):
        Allocation([[0.5, 1.0], [0.5, 0.0]])
        with pytest.raises(InvalidGameError):
            Allocation([[0.7, 1.0], [0.5, 0.0]])
        with pytest.raises(InvalidGameError):
            Allocation([[-0.1], [0.5]])


class TestNashProductLog:
    def test_values(self):
        assert nash_product_log([2.0], [1.0]) == 0.0
        assert nash_product_log([np.e + 1, np.e], [1.0, 0.0]) == pytest.approx(2.0)

    def test_homogeneity_and_permutation(self, rng):
        d = rng.uniform(0, 1, 5)
        c = d + rng.uniform(0.1, 2, 5)
        base = nash_product_log(c, d)
        assert nash_product_log(d + 3.0 * (c - d), d) == pytest.approx(base + 5 * np.log(3.0))
        perm = rng.permutation(5)
        assert nash_product_log(c[perm], d[perm]) == pytest.approx(base)

    def test_non_positive_surplus(self):
        with pytest.raises(NonPositiveSurplus) as exc:
            nash_product_log([1.0, 2.0, 3.0], [0.5, 2.0, 1.0])
        assert exc.value.player == 1

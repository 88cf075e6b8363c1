"""Properties of the network model: geometry, channels, energy ledger, rates."""
import numpy as np
import pytest
from scipy import stats

from conftest import constant_renewable, flat_channels, make_instance
from ehrelay.errors import ConfigError, DomainError
from ehrelay.model import (
    ENERGY_CONSUMPTION, PEAK_POWER, SELECTION_BINARY, STORAGE_CAPACITY,
    ChannelSet, ContinuousDecision, Geometry, SelectionMatrix, SystemParams, UtilityKind,
    amplification_gain, check_feasible, consumed_energy, harvest_components, harvested_energy,
    path_loss, path_loss_db, roll_ledger, sample_channels, sample_geometry, sample_renewable,
    snr_and_rate, utility,
)
from ehrelay.model.channel import _rician


class TestSystemParams:

    def test_default_initial_charge_is_half_capacity(self):
        params = SystemParams(L=4, Es_max=3.0)
        np.testing.assert_allclose(params.initial_charge, [1.5] * 4)

    def test_scalar_initial_charge_broadcasts(self):
        params = SystemParams(L=3, B_init=(0.7,))
        assert params.B_init == (0.7, 0.7, 0.7)

    def test_relay_count_change_resets_charge(self):
        params = SystemParams(L=2, B_init=(1.0, 2.0)).with_updates(L=3)
        assert params.B_init == (2.5, 2.5, 2.5)

    @pytest.mark.parametrize("changes", [{"L": 0}, {"B": -1}, {"eta_RF": 1.5}, {"Pr_max": -1.0}, {"T_c": 0.0}])
    def test_invalid_parameters_rejected(self, changes):
        with pytest.raises(ConfigError):
            SystemParams(**changes)


class TestGeometry:

    def test_path_loss_reference_value(self):
        params = SystemParams()
        assert path_loss_db(50.0, params) == pytest.approx(74.21, abs=0.005)

    def test_path_loss_grows_with_distance(self):
        params = SystemParams()
        d = np.linspace(1.0, 100.0, 50)
        assert np.all(np.diff(path_loss_db(d, params)) > 0)

    def test_path_loss_includes_extra_loss(self):
        base = path_loss_db(10.0, SystemParams())
        assert path_loss_db(10.0, SystemParams(PL_LoS=3.0)) == pytest.approx(base + 3.0)

    @pytest.mark.parametrize("distance", [0.0, -1.0])
    def test_nonpositive_distance_is_domain_error(self, distance):
        with pytest.raises(DomainError):
            path_loss_db(distance, SystemParams())

    def test_relays_inside_circle(self):
        params = SystemParams(L=200, D=40.0)
        geom = sample_geometry(params, seed=1)
        assert np.all(np.linalg.norm(geom.relay_positions, axis=1) <= 20.0)
        np.testing.assert_allclose(geom.terminal_positions, [[-20.0, 0.0], [20.0, 0.0]])

    def test_same_seed_same_layout(self):
        params = SystemParams(L=5)
        a, b = sample_geometry(params, 9), sample_geometry(params, 9)
        np.testing.assert_array_equal(a.relay_positions, b.relay_positions)

    def test_terminal_distance_matches_d(self):
        params = SystemParams(D=50.0)
        geom = sample_geometry(params, 0)
        assert geom.distance("S1", "S2") == pytest.approx(50.0)
        assert path_loss("S1", "S2", params, geom) == pytest.approx(74.21, abs=0.005)

    def test_relay_outside_circle_rejected(self):
        with pytest.raises(ConfigError):
            Geometry(relay_positions=[[0.0, 30.0]], terminal_positions=[[-25.0, 0.0], [25.0, 0.0]])


class TestChannels:

    def test_shapes_and_reciprocity(self):
        params = SystemParams(L=4, B=5)
        ch = sample_channels(params, sample_geometry(params, 2), 3)
        assert ch.h1r.shape == (4, 5) and ch.hrr.shape == (4, 4, 5)
        np.testing.assert_array_equal(ch.hrr, np.transpose(ch.hrr, (1, 0, 2)))
        assert np.all(ch.grr[np.arange(4), np.arange(4)] == 0)

    def test_channels_are_read_only(self):
        params = SystemParams(L=2, B=2)
        ch = sample_channels(params, sample_geometry(params, 2), 3)
        with pytest.raises(ValueError):
            ch.h1r[0, 0] = 1.0

    def test_seed_determinism(self):
        params = SystemParams(L=3, B=4)
        geom = sample_geometry(params, 2)
        a, b = sample_channels(params, geom, 11), sample_channels(params, geom, 11)
        np.testing.assert_array_equal(a.h1r, b.h1r)
        np.testing.assert_array_equal(a.hrr, b.hrr)

    def test_rician_fading_has_unit_power(self):
        rng = np.random.default_rng(42)
        fading = _rician(rng, 7.78, 200_000)
        assert np.mean(np.abs(fading) ** 2) == pytest.approx(1.0, rel=0.01)

    def test_pure_line_of_sight_magnitude(self):
        params = SystemParams(L=2, B=3, rician_K=float('inf'))
        geom = sample_geometry(params, 5)
        ch = sample_channels(params, geom, 6)
        expected = 10 ** (-path_loss_db(geom.distance("S1", 0), params) / 20)
        np.testing.assert_allclose(np.abs(ch.h1r[0]), expected, rtol=1e-12)

    def test_mismatched_shapes_rejected(self):
        with pytest.raises(ConfigError):
            ChannelSet(np.ones((2, 2)), np.ones((2, 3)), np.zeros((2, 2, 2)))


class TestRenewable:

    def test_truncated_normal_mean(self):
        params = SystemParams(L=100, B=1000)
        phi = sample_renewable(params, seed=42).phi
        sigma = np.sqrt(params.re_var)
        a, b = (params.re_low - params.re_mean) / sigma, (params.re_high - params.re_mean) / sigma
        oracle = stats.truncnorm.mean(a, b, loc=params.re_mean, scale=sigma)
        assert phi.mean() == pytest.approx(oracle, rel=0.01)
        assert phi.min() >= 0.0 and phi.max() <= 2.4

    def test_zero_variance_gives_mean(self):
        phi = sample_renewable(SystemParams(re_var=0.0, re_mean=1.3), seed=0).phi
        np.testing.assert_array_equal(phi, 1.3)

    @pytest.mark.parametrize("low,high", [(-0.5, 2.0), (1.0, 1.0), (2.0, 1.0)])
    def test_bad_truncation_interval(self, low, high):
        with pytest.raises(ConfigError):
            sample_renewable(SystemParams(re_low=low, re_high=high), seed=0)


class TestSelectionMatrix:

    def test_integer_encoding(self):
        sel = SelectionMatrix([[1, 0], [0, 1]])
        assert sel.to_int() == 0b1001
        np.testing.assert_array_equal(SelectionMatrix.from_int(0b1001, 2, 2).eps, sel.eps)

    def test_non_binary_rejected(self):
        with pytest.raises(DomainError):
            SelectionMatrix([[0.5, 1.0]])

    def test_selected_and_silent_slots(self):
        sel = SelectionMatrix([[1, 0, 0], [1, 0, 1]])
        assert sel.selected(0) == [0, 1]
        assert sel.silent_slots() == [1]


class TestEnergy:

    def test_renewable_harvest_of_selected_relay(self):
        params = SystemParams(L=1, B=1)
        ch = flat_channels(1, 1)
        dec = ContinuousDecision([[1.0]], [[0.0]])
        energy = harvested_energy(0, 0, [[1]], dec, ch, constant_renewable(1, 1, 2.0), params)
        assert energy == pytest.approx(0.105, rel=1e-12)

    def test_idle_consumption(self):
        params = SystemParams(L=1, B=1)
        dec = ContinuousDecision.zeros(1, 1)
        assert consumed_energy(0, 0, [[0]], dec, params) == pytest.approx(0.21021, rel=1e-12)

    def test_zero_power_model_consumes_nothing(self):
        params = SystemParams(L=1, B=1, a0=0.0, a_r=0.0, a_t=0.0)
        dec = ContinuousDecision([[0.5]], [[1e-3]])
        assert consumed_energy(0, 0, [[1]], dec, params) == 0.0

    def test_single_slot_ledger(self):
        params = SystemParams(L=1, B=1, B_init=(1.0,), E_leak=0.01)
        ch = flat_channels(1, 1, h1=0.0, h2=0.0, hrr=0.0)
        ledger = roll_ledger([[0]], ContinuousDecision.zeros(1, 1), ch, constant_renewable(1, 1, 2.0), params)
        assert ledger.harvested[0, 0] == pytest.approx(0.105)
        assert ledger.consumed[0, 0] == pytest.approx(0.21021)
        assert ledger.stored[0, 1] == pytest.approx(0.88479, rel=1e-12)

    def test_zero_dynamics(self):
        params = SystemParams(L=2, B=3, B_init=(0.0,), a0=0.0, a_r=0.0, a_t=0.0, E_leak=0.0)
        ch = flat_channels(2, 3, h1=0.0, h2=0.0, hrr=0.0)
        ledger = roll_ledger(np.zeros((2, 3)), ContinuousDecision.zeros(2, 3), ch, constant_renewable(2, 3, 0.0), params)
        np.testing.assert_array_equal(ledger.stored, 0.0)

    def test_ledger_telescopes(self):
        rng = np.random.default_rng(42)
        for seed in range(10):
            params, ch, re = make_instance(L=3, B=6, seed=seed)
            eps = rng.integers(0, 2, size=(3, 6))
            dec = ContinuousDecision(rng.random((3, 6)), rng.random((3, 6)) * params.Pr_max)
            ledger = roll_ledger(eps, dec, ch, re, params)
            net = (ledger.harvested - ledger.consumed - params.E_leak).sum(axis=1)
            np.testing.assert_allclose(ledger.stored[:, -1] - ledger.stored[:, 0], net, rtol=1e-12, atol=1e-12)

    @pytest.mark.slow
    def test_feasible_ledgers_stay_within_capacity(self):
        rng = np.random.default_rng(7)
        feasible = 0
        for seed in range(20):
            params, ch, re = make_instance(L=2, B=4, seed=seed, B_init=(float(rng.uniform(0.0, 5.0)),))
            for _ in range(5000):
                eps = rng.integers(0, 2, size=(2, 4))
                dec = ContinuousDecision(rng.random((2, 4)), rng.random((2, 4)) * params.Pr_max)
                if not check_feasible(eps, dec, ch, re, params):
                    continue
                feasible += 1
                ledger = roll_ledger(eps, dec, ch, re, params)
                assert ledger.stored.min() >= -1e-9
                assert ledger.stored.max() <= params.Es_max * (1 + 1e-9)
                net = (ledger.harvested - ledger.consumed - params.E_leak).sum(axis=1)
                np.testing.assert_allclose(ledger.stored[:, -1] - ledger.stored[:, 0], net, rtol=1e-12, atol=1e-12)
        assert feasible >= 10_000

    def test_rf_harvest_decreases_in_beta(self):
        params, ch, re = make_instance(L=2, B=2, seed=1)
        eps = np.ones((2, 2))
        previous = None
        for beta in np.linspace(0.0, 1.0, 11):
            dec = ContinuousDecision(np.full((2, 2), beta), np.full((2, 2), params.Pr_max))
            rf, _ = harvest_components(eps, dec, ch, re, params)
            if previous is not None:
                assert np.all(rf < previous)
            previous = rf

    def test_rf_harvest_scales_with_channel_power(self):
        params, ch, re = make_instance(L=3, B=2, seed=4)
        eps = np.array([[1, 0], [0, 1], [0, 0]])
        dec = ContinuousDecision(np.full((3, 2), 0.4), np.full((3, 2), params.Pr_max))
        scaled = ChannelSet(ch.h1r * 0.5, ch.h2r * 0.5, ch.hrr * 0.5)
        rf, _ = harvest_components(eps, dec, ch, re, params)
        rf_scaled, _ = harvest_components(eps, dec, scaled, re, params)
        np.testing.assert_allclose(rf_scaled, rf * 0.25, rtol=1e-12)

    def test_idle_relay_harvests_from_transmitting_relay(self):
        params = SystemParams(L=2, B=1, P_1=0.0, P_2=0.0, eta_RE=0.0)
        ch = flat_channels(2, 1, hrr=1e-2)
        dec = ContinuousDecision([[0.5], [0.0]], [[1e-3], [0.0]])
        rf, _ = harvest_components([[1], [0]], dec, ch, constant_renewable(2, 1), params)
        assert rf[0, 0] == 0.0
        assert rf[1, 0] == pytest.approx(params.eta_RF * 1e-3 * 1e-4 * params.T_c / 2)


class TestFeasibility:

    def test_silent_relays_with_large_battery(self):
        params, ch, re = make_instance(L=3, B=8, B_init=(100.0,), Es_max=1e6)
        assert check_feasible(np.zeros((3, 8)), ContinuousDecision.zeros(3, 8), ch, re, params)

    def test_power_above_budget(self):
        params, ch, re = make_instance(L=2, B=2)
        p = np.zeros((2, 2))
        p[1, 0] = params.Pr_max + 1.0
        verdict = check_feasible(np.ones((2, 2)), ContinuousDecision(np.full((2, 2), 0.5), p), ch, re, params)
        assert not verdict.feasible
        assert verdict.violation.constraint == PEAK_POWER
        assert (verdict.violation.relay, verdict.violation.slot) == (1, 0)

    def test_empty_battery_cannot_forward(self):
        params, ch, re = make_instance(L=2, B=2, B_init=(0.0,))
        eps = np.array([[1, 0], [0, 0]])
        dec = ContinuousDecision(np.where(eps, 0.5, 0.0), np.where(eps, 1e-4, 0.0))
        verdict = check_feasible(eps, dec, ch, re, params)
        assert verdict.violation.constraint == ENERGY_CONSUMPTION
        assert verdict.violation.slot == 0

    def test_overflowing_battery(self):
        params, ch, re = make_instance(L=1, B=2, B_init=(5.0,), Es_max=5.0)
        verdict = check_feasible(np.zeros((1, 2)), ContinuousDecision.zeros(1, 2), ch, re, params)
        assert verdict.violation.constraint == STORAGE_CAPACITY

    def test_fractional_selection_flagged(self):
        params, ch, re = make_instance(L=1, B=1)
        verdict = check_feasible([[0.5]], ContinuousDecision.zeros(1, 1), ch, re, params)
        assert verdict.violation.constraint == SELECTION_BINARY

    def test_matches_direct_constraint_check(self):
        rng = np.random.default_rng(42)
        outcomes = set()
        for seed in range(60):
            params, ch, re = make_instance(L=2, B=4, seed=seed, B_init=(float(rng.uniform(0.0, 1.2)),),
                                           Es_max=float(rng.uniform(0.6, 1.5)))
            eps = rng.integers(0, 2, size=(2, 4))
            dec = ContinuousDecision(rng.random((2, 4)), rng.random((2, 4)) * params.Pr_max)
            expected = _direct_check(eps, dec, ch, re, params)
            assert bool(check_feasible(eps, dec, ch, re, params)) == expected
            outcomes.add(expected)
        assert outcomes == {True, False}


def _direct_check(eps, dec, ch, re, params, tol=1e-9):
    L, B = eps.shape
    stored = list(params.initial_charge)
    for b in range(B):
        for l in range(L):
            harvest = harvested_energy(l, b, eps, dec, ch, re, params)
            spend = consumed_energy(l, b, eps, dec, params)
            if spend + params.E_leak > stored[l] + tol * max(1.0, abs(stored[l])):
                return False
            if stored[l] + harvest > params.Es_max + tol * max(1.0, params.Es_max):
                return False
            stored[l] = stored[l] + harvest - spend - params.E_leak
    return True


class TestRates:

    def test_zero_power_zero_gain(self):
        params, ch, _ = make_instance(L=1, B=1)
        dec = ContinuousDecision([[0.5]], [[0.0]])
        assert amplification_gain(0, 0, dec, ch, params) == 0.0

    def test_gain_with_received_power_equal_to_noise(self):
        params = SystemParams(L=1, B=1)
        h1 = np.sqrt(params.N0 / params.P_1)
        ch = ChannelSet([[h1]], [[0.0]], np.zeros((1, 1, 1)))
        dec = ContinuousDecision([[1.0]], [[1e-3]])
        expected = np.sqrt(1e-3 / (2 * params.N0))
        assert amplification_gain(0, 0, dec, ch, params) == pytest.approx(expected, rel=1e-12)

    def test_neglecting_noise_never_lowers_gain(self):
        rng = np.random.default_rng(42)
        params, ch, _ = make_instance(L=3, B=4)
        for _ in range(20):
            dec = ContinuousDecision(rng.uniform(0.01, 1.0, (3, 4)), rng.random((3, 4)) * params.Pr_max)
            for l in range(3):
                for b in range(4):
                    exact = amplification_gain(l, b, dec, ch, params)
                    assert amplification_gain(l, b, dec, ch, params, neglect_noise=True) >= exact

    def test_zero_denominator_is_domain_error(self):
        params = SystemParams(L=1, B=1, N0=0.0)
        ch = ChannelSet([[0.0]], [[0.0]], np.zeros((1, 1, 1)))
        with pytest.raises(DomainError):
            amplification_gain(0, 0, ContinuousDecision([[1.0]], [[1e-3]]), ch, params)

    def test_no_active_relay_no_rate(self):
        params, ch, _ = make_instance(L=3, B=4)
        result = snr_and_rate(np.zeros((3, 4)), ContinuousDecision.zeros(3, 4), ch, params)
        np.testing.assert_array_equal(result.snr, 0.0)
        np.testing.assert_array_equal(result.rate, 0.0)

    def test_rate_formula(self):
        params, ch, _ = make_instance(L=2, B=3)
        dec = ContinuousDecision(np.full((2, 3), 0.6), np.full((2, 3), params.Pr_max))
        result = snr_and_rate(np.ones((2, 3)), dec, ch, params)
        np.testing.assert_allclose(result.rate, 2e6 * 0.175 / 2 * np.log2(1 + result.snr), rtol=1e-12)
        assert 2e6 * 0.175 / 2 * np.log2(1 + 3) == pytest.approx(0.35e6)

    def test_symmetric_single_relay(self):
        params = SystemParams(L=1, B=2)
        ch = flat_channels(1, 2, h1=1e-4, h2=1e-4)
        dec = ContinuousDecision(np.full((1, 2), 0.7), np.full((1, 2), 1e-3))
        snr = snr_and_rate(np.ones((1, 2)), dec, ch, params).snr
        np.testing.assert_allclose(snr[:, 0], snr[:, 1], rtol=1e-12)

    def test_single_relay_snr_grows_with_power(self):
        params, ch, _ = make_instance(L=1, B=1)
        snrs = [snr_and_rate([[1]], ContinuousDecision([[0.5]], [[p]]), ch, params, neglect_noise=True).snr
                for p in np.linspace(1e-6, 1e-3, 20)]
        assert np.all(np.diff(np.array(snrs), axis=0) >= 0)


class TestUtility:
    max_min_column = [2.44, 2.84, 3.36, 2.88, 3.44, 2.60, 3.20, 2.88]

    def test_max_min_of_reported_rates(self):
        assert utility(self.max_min_column, "max-min") == pytest.approx(2.44)

    def test_max_sum_of_reported_rates(self):
        assert utility(self.max_min_column, UtilityKind.MAX_SUM) == pytest.approx(23.63, abs=0.02)

    @pytest.mark.parametrize("kind", ["max-sum", "max-min"])
    def test_zero_rates(self, kind):
        assert utility(np.zeros((8, 2)), kind) == 0.0

    def test_unknown_utility(self):
        with pytest.raises(DomainError):
            utility([1.0], "max-mean")

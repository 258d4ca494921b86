import numpy as np
import pytest

from secgrowth.errors import DegenerateMode, NonTransversalPotential
from secgrowth.propagators import ThermalParams
from secgrowth.quadrature import envelope_maxima, fit_growth_exponent
from secgrowth.scalar_ed import (
    ExternalPotential,
    SpatialCutoff,
    _zbinv_inner_tables,
    corrected_total_smeared,
    coulomb_gauge_test_potential,
    kms_smeared_zeroth,
    linear_secular_coefficient,
    magnetic_cancellation_residual,
    magnetic_invariant_C,
    mode_cancellation_residual,
    oscillating_remainder_scan,
    scalar_mode_family_sums,
    smeared_first_order_W,
    z_b_inv,
    za_smeared_components,
)
from secgrowth.switching import SpacetimePoint, SwitchFunction, TestFunction as Packet

KMS = ThermalParams(1.0, 1.0)
CHI = SwitchFunction(epsilon=1.0, k=5)
F = Packet(center=SpacetimePoint(0.0, (0.5, 0.0, 0.0)))
G = Packet(center=SpacetimePoint(0.0, (-0.5, 0.0, 0.0)))
POT = ExternalPotential("scalar_linear", 1.0, axis=0)


class TestModeCancellation:
    def test_reference_point(self):
        assert mode_cancellation_residual(1.2, 2.0, 1.0) < 1e-14

    def test_random_draws(self):
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(100):
            wp, wk = rng.uniform(1.0, 10.0, 2)
            if abs(wp - wk) < 1e-6:
                wk += 0.1
            worst = max(worst, mode_cancellation_residual(wp, wk, rng.uniform(0.1, 5.0)))
        assert worst < 1e-12

    def test_ground_state_limit(self):
        assert mode_cancellation_residual(1.2, 2.0, np.inf) < 1e-14

    def test_degenerate_mode_raises(self):
        with pytest.raises(DegenerateMode):
            mode_cancellation_residual(2.0, 2.0, 1.0)

    def test_family_sums_have_nontrivial_pieces(self):
        # the cancellation is between O(1) terms, not a trivial 0 = 0
        sums = scalar_mode_family_sums(1.2, 2.0, 1.0)
        assert sums.shape == (4,)


class TestSmearedGrowth:
    def test_linear_coefficient_matches_displayed_integral(self):
        parts = za_smeared_components(60.0, F, G, POT, KMS, CHI, 1e-8)
        oracle = linear_secular_coefficient(F, G, POT, KMS)
        assert abs(parts.linear_coeff - oracle) < 1e-6 * abs(oracle)

    def test_linear_in_coupling(self):
        p1 = za_smeared_components(60.0, F, G, POT, KMS, CHI, 1e-8)
        pot2 = ExternalPotential("scalar_linear", 2.0, axis=0)
        p2 = za_smeared_components(60.0, F, G, pot2, KMS, CHI, 1e-8)
        assert abs(p2.total - 2.0 * p1.total) < 1e-12 * abs(p2.total)

    def test_off_shell_packets_suppress_slope(self):
        f_off = Packet(
            center=SpacetimePoint(0.0, (0.5, 0, 0)), time_width=3.0, time_freq=5.0
        )
        base = abs(linear_secular_coefficient(F, G, POT, KMS))
        off = abs(linear_secular_coefficient(f_off, G, POT, KMS))
        assert off < 1e-3 * base

    def test_no_offset_means_no_slope(self):
        f0 = Packet(center=SpacetimePoint(0.0))
        g0 = Packet(center=SpacetimePoint(0.0))
        parts = za_smeared_components(50.0, f0, g0, POT, KMS, CHI, 1e-8)
        assert abs(parts.linear_coeff) < 1e-14

    def test_growth_and_magnitude(self):
        ts = np.linspace(60.0, 300.0, 13)
        scan = [(t, smeared_first_order_W(t, F, G, POT, KMS, CHI, 1e-7)) for t in ts]
        fit = fit_growth_exponent(scan, (60, 300))
        assert abs(fit.exponent - 1.0) < 0.05

    def test_oscillating_remainder_decays(self):
        ts = np.linspace(50.0, 300.0, 41)
        scan = oscillating_remainder_scan(ts, F, G, POT, KMS, CHI, 1e-7)
        env = envelope_maxima([t for t, _ in scan], [y for _, y in scan])
        fit = fit_growth_exponent(env, (50, 300))
        assert fit.exponent <= 0.0


class TestZbInv:
    @pytest.fixture(scope="class")
    @staticmethod
    def setup():
        pot = ExternalPotential("scalar_general", 0.7, a0_hat=lambda q: np.exp(-0.25 * q * q))
        cut = SpatialCutoff("gaussian", 2.0)
        tables = _zbinv_inner_tables(pot, cut, KMS, 0.3)
        return pot, cut, tables

    @staticmethod
    def pt(t):
        return SpacetimePoint(t, (0.3, 0.0, 0.0))

    def test_time_translation_invariance(self, setup):
        pot, cut, tables = setup
        a = z_b_inv(self.pt(3.0), self.pt(1.0), pot, cut, KMS, _tables=tables)
        for shift in (5.0, 50.0):
            b = z_b_inv(
                self.pt(3.0 + shift), self.pt(1.0 + shift), pot, cut, KMS, _tables=tables
            )
            assert abs(a - b) <= 1e-8 * abs(a)

    def test_hermiticity(self, setup):
        pot, cut, tables = setup
        a = z_b_inv(self.pt(3.0), self.pt(1.0), pot, cut, KMS, _tables=tables)
        b = z_b_inv(self.pt(1.0), self.pt(3.0), pot, cut, KMS, _tables=tables)
        assert abs(b - np.conj(a)) <= 1e-8 * abs(a)

    def test_vanishes_at_zero_coupling(self, setup):
        _, cut, _ = setup
        pot0 = ExternalPotential(
            "scalar_general", 0.0, a0_hat=lambda q: np.exp(-0.25 * q * q)
        )
        assert z_b_inv(self.pt(3.0), self.pt(1.0), pot0, cut, KMS) == 0.0


class TestMagnetic:
    POT_M = ExternalPotential(
        "vector_coulomb_gauge", 1.0, a_hat=coulomb_gauge_test_potential()
    )

    def test_transversality_validation_rejects(self):
        with pytest.raises(NonTransversalPotential):
            ExternalPotential(
                "vector_coulomb_gauge", 1.0,
                a_hat=lambda q: np.ones_like(np.asarray(q, dtype=float)),
            )

    def test_cancellation_residual_random_draws(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(50):
            wp, wk = rng.uniform(1.01, 6.0, 2)
            beta = rng.uniform(0.2, 4.0)
            worst = max(
                worst,
                magnetic_cancellation_residual(wp, wk, beta, self.POT_M, rng=rng),
            )
        assert worst < 1e-12

    def test_invariant_correction_time_translation(self):
        x = SpacetimePoint(2.0, (0.6, 0.0, 0.0))
        y = SpacetimePoint(0.5, (-0.4, 0.2, 0.0))
        a = magnetic_invariant_C(x, y, self.POT_M, KMS)
        xs = SpacetimePoint(12.0, (0.6, 0.0, 0.0))
        ys = SpacetimePoint(10.5, (-0.4, 0.2, 0.0))
        b = magnetic_invariant_C(xs, ys, self.POT_M, KMS)
        assert abs(a - b) <= 1e-8 * max(abs(a), 1e-300)

    def test_zero_coupling(self):
        pot0 = ExternalPotential(
            "vector_coulomb_gauge", 0.0, a_hat=coulomb_gauge_test_potential()
        )
        x = SpacetimePoint(2.0, (0.6, 0.0, 0.0))
        y = SpacetimePoint(0.5, (-0.4, 0.2, 0.0))
        assert magnetic_invariant_C(x, y, pot0, KMS) == 0.0


class TestCorrectedTotal:
    def test_time_translation_stability(self):
        base = corrected_total_smeared(60.0, F, G, POT, KMS, CHI)
        for a in (10.0, 25.0, 50.0):
            moved = corrected_total_smeared(60.0 + a, F, G, POT, KMS, CHI)
            assert abs(moved - base) < 1e-6 * abs(base)

    def test_zeroth_order_positive(self):
        val = kms_smeared_zeroth(F, G, KMS)
        assert val.real > 0
        assert abs(val.imag) < 1e-10 * val.real

import numpy as np
import pytest

from secgrowth.errors import InvalidMass
from secgrowth.switching import SwitchFunction
from secgrowth.toymodel import (
    MassQuench,
    bogoliubov_step,
    bogoliubov_step_at,
    fit_order_growth,
    order_growth_scan,
    oscillating_term_O,
    perturbative_order_term,
    solve_mode,
)


class TestBogoliubovStep:
    def test_no_quench(self):
        pair = bogoliubov_step(0.7, 1.0, 0.0)
        assert pair.alpha == 1.0 and pair.beta == 0.0

    def test_closed_form_p0(self):
        pair = bogoliubov_step(0.0, 1.0, 3.0)
        assert pair.alpha == pytest.approx(3.0 / (2.0 * np.sqrt(2.0)), rel=1e-14)
        assert pair.beta == pytest.approx(1.0 / (2.0 * np.sqrt(2.0)), rel=1e-14)
        assert abs(pair.alpha) ** 2 - abs(pair.beta) ** 2 == pytest.approx(1.0, abs=1e-14)

    def test_large_momentum_tail(self):
        # beta_p -> dm2/(4 p^2)
        for p in (20.0, 50.0, 100.0):
            pair = bogoliubov_step(p, 1.0, 1.0)
            assert pair.beta.real * 4.0 * p * p == pytest.approx(1.0, rel=5e-3)

    def test_invalid_mass(self):
        with pytest.raises(InvalidMass):
            bogoliubov_step(0.0, 1.0, -2.0)


class TestSolveMode:
    @pytest.mark.parametrize("k", [3, 5, 7])
    def test_wronskian_normalization(self, k):
        q = MassQuench(1.0, 1.0, SwitchFunction(epsilon=1.0, k=k))
        for p in (0.0, 0.5, 1.0, 2.0, 5.0):
            pair = solve_mode(q, p, 1.0)
            assert abs(pair.normalization_defect) < 1e-8

    def test_sharp_limit_matches_closed_form(self):
        # smoothstep with eps = 1e-3 against the step at the ramp midpoint
        q = MassQuench(1.0, 3.0, SwitchFunction(epsilon=1e-3, k=5))
        pair = solve_mode(q, 0.0, 0.5, 1e-12)
        ref = bogoliubov_step_at(0.0, 1.0, 3.0, -1.5e-3)
        assert abs(pair.alpha - ref.alpha) < 1e-3
        assert abs(pair.beta - ref.beta) < 1e-3

    def test_no_quench_is_identity(self):
        q = MassQuench(1.0, 0.0, SwitchFunction(epsilon=1.0, k=5))
        pair = solve_mode(q, 0.7, 1.0, 1e-12)
        assert abs(pair.alpha - 1.0) < 1e-9
        assert abs(pair.beta) < 1e-9

    def test_sharp_shape_returns_closed_form(self):
        q = MassQuench(1.0, 3.0, SwitchFunction(epsilon=1.0, shape="sharp"))
        pair = solve_mode(q, 0.4, 1.0)
        ref = bogoliubov_step(0.4, 1.0, 3.0)
        assert pair.alpha == ref.alpha and pair.beta == ref.beta

    def test_smooth_switch_suppresses_beta_at_high_momentum(self):
        q = MassQuench(1.0, 1.0, SwitchFunction(epsilon=1.0, k=7))
        b0 = abs(solve_mode(q, 0.0, 1.0).beta)
        b20 = abs(solve_mode(q, 20.0, 1.0).beta)
        assert b20 < 1e-6 * b0


class TestOscillatingTerm:
    def test_zero_shift_vanishes(self):
        q = MassQuench(1.0, 0.0)
        assert oscillating_term_O(5.0, q) == 0.0

    def test_real_output(self):
        q = MassQuench(1.0, 0.5)
        val = oscillating_term_O(30.0, q, 0.0, 1e-9)
        assert isinstance(val, float)

    def test_decay_exponent(self):
        q = MassQuench(1.0, 0.5)
        ts = np.arange(20.0, 201.0, 1.0)
        scan = [(t, abs(oscillating_term_O(t, q, 0.0, 1e-9))) for t in ts]
        fit = fit_order_growth(scan, (20, 200))
        assert abs(fit.exponent - (-1.5)) < 0.15


class TestOrderTerms:
    def test_order_one_still_decays(self):
        ts = np.arange(20.0, 201.0, 4.0)
        scan = order_growth_scan(1, ts, 1.0, 0.5, 1e-9)
        fit = fit_order_growth(scan, (20, 200))
        assert abs(fit.exponent - (-0.5)) < 0.1

    def test_stencil_spacing_insensitivity(self):
        a = perturbative_order_term(2, 80.0, 1.0, 0.5, 1e-10, h_frac=0.05)
        b = perturbative_order_term(2, 80.0, 1.0, 0.5, 1e-10, h_frac=0.025)
        assert a == pytest.approx(b, rel=2e-2)

    def test_order_bounds(self):
        with pytest.raises(ValueError):
            perturbative_order_term(6, 30.0)

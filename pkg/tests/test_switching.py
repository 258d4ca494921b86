import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from secgrowth.switching import (
    SpacetimePoint,
    SwitchFunction,
    TestFunction as Packet,
    chi,
    chi_ddot,
    chi_dot,
    chi_dot_hat,
    chi_dot_hat_deriv,
    chi_hat_core_neg,
    test_hat as hat,
    test_hat_dp0 as hat_dp0,
    test_hat_grad_p as hat_grad,
)

SMOOTH = SwitchFunction(epsilon=1.0, k=5)
SHARP = SwitchFunction(epsilon=0.5, shape="sharp")


class TestChi:
    def test_plateau_values(self):
        for s in (SMOOTH, SHARP):
            assert chi(s, 0.0) == 1.0
        assert chi(SMOOTH, -3.0 * SMOOTH.epsilon) == 0.0
        assert chi(SMOOTH, -SMOOTH.epsilon) == pytest.approx(1.0, abs=1e-14)

    def test_chidot_integrates_to_one(self):
        val = quad(lambda t: chi_dot(SMOOTH, t), -2.0, -1.0)[0]
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_monotone(self):
        ts = np.linspace(-2.2, -0.8, 200)
        vals = chi(SMOOTH, ts)
        assert np.all(np.diff(vals) >= -1e-15)

    def test_finite_differences_match_derivatives(self):
        rng = np.random.default_rng(2)
        h = 1e-6
        for t in rng.uniform(-2.0, -1.0, 20):
            fd1 = (chi(SMOOTH, t + h) - chi(SMOOTH, t - h)) / (2 * h)
            assert abs(fd1 - chi_dot(SMOOTH, t)) < 1e-8
            fd2 = (chi_dot(SMOOTH, t + h) - chi_dot(SMOOTH, t - h)) / (2 * h)
            assert abs(fd2 - chi_ddot(SMOOTH, t)) < 1e-6

    def test_smoothstep_needs_k_at_least_3(self):
        with pytest.raises(ValueError):
            SwitchFunction(epsilon=1.0, k=2)


class TestChiDotHat:
    def test_unity_at_zero(self):
        for s in (SMOOTH, SHARP, SwitchFunction(epsilon=0.3, k=7)):
            assert chi_dot_hat(s, 0.0) == 1.0 + 0.0j

    def test_sharp_is_identically_one(self):
        assert chi_dot_hat(SHARP, 17.3) == 1.0 + 0.0j

    def test_modulus_bounded_by_one(self):
        oms = np.linspace(-40, 40, 101)
        assert np.all(np.abs(chi_dot_hat(SMOOTH, oms)) <= 1.0 + 1e-12)

    @pytest.mark.parametrize("omega", [0.5, 3.0, 10.0, 20.0, 40.0])
    def test_matches_direct_quadrature(self, omega):
        direct = (
            quad(lambda t: chi_dot(SMOOTH, t) * np.cos(omega * t), -2, -1)[0]
            + 1j * quad(lambda t: chi_dot(SMOOTH, t) * np.sin(omega * t), -2, -1)[0]
        )
        assert abs(chi_dot_hat(SMOOTH, omega) - direct) < 1e-12

    def test_high_frequency_decay(self):
        # |hat| <= C / omega^4 checked through the ratio at doubling omegas
        v10, v20, v40 = (abs(chi_dot_hat(SMOOTH, om)) for om in (10.0, 20.0, 40.0))
        assert v20 / v10 < 2.0 ** (-4) * 3.0  # factor 3 slack for the oscillation
        assert v40 / v20 < 2.0 ** (-4) * 3.0

    @pytest.mark.parametrize("order", [1, 2, 4, 6])
    def test_derivatives_consistent(self, order):
        om, h = 1.7, 1e-4
        lower = (
            chi_dot_hat(SMOOTH, om + h) - chi_dot_hat(SMOOTH, om - h)
            if order == 1
            else chi_dot_hat_deriv(SMOOTH, om + h, order - 1)
            - chi_dot_hat_deriv(SMOOTH, om - h, order - 1)
        )
        fd = lower / (2 * h)
        assert abs(fd - chi_dot_hat_deriv(SMOOTH, om, order)) < 1e-6 * abs(
            chi_dot_hat_deriv(SMOOTH, om, order)
        ) + 1e-10

    def test_core_phase_identity(self):
        for order in (0, 1, 2):
            for om in (0.7, 4.2):
                lhs = chi_dot_hat_deriv(SMOOTH, -om, order)
                rhs = np.exp(1.5j * SMOOTH.epsilon * om) * chi_hat_core_neg(
                    SMOOTH, om, order
                )
                assert abs(lhs - rhs) < 1e-12 * (1 + abs(lhs))


class TestTestFunction:
    def test_zero_frequency_normalization(self):
        f = Packet(time_width=0.7, space_width=1.1, amplitude=2.0)
        got = hat(f, 0.0, [0, 0, 0])
        assert got == pytest.approx(2.0 * (2 * np.pi) ** 2 * 0.7 * 1.1**3, rel=1e-14)

    def test_translation_is_phase(self):
        f = Packet(center=SpacetimePoint(0.0, (0.3, 0.0, 0.0)))
        base = hat(f, 0.8, [0.2, -0.1, 0.4])
        shifted = hat(
            Packet(center=SpacetimePoint(2.5, (0.3, 0.0, 0.0))), 0.8,
            [0.2, -0.1, 0.4],
        )
        assert abs(shifted) == pytest.approx(abs(base), rel=1e-14)
        assert shifted == pytest.approx(np.exp(1j * 0.8 * 2.5) * base, rel=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(
        st.floats(-3, 3), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2)
    )
    def test_conjugation_symmetry(self, p0, px, py, pz):
        f = Packet(center=SpacetimePoint(0.4, (0.2, -0.5, 0.1)), amplitude=1.3)
        a = hat(f, -p0, [-px, -py, -pz])
        b = np.conj(hat(f, p0, [px, py, pz]))
        assert abs(a - b) < 1e-12 * (1 + abs(a))

    def test_width_to_zero_is_flat(self):
        # at fixed amplitude x volume the transform becomes constant
        w = 1e-3
        amp = 1.0 / ((2 * np.pi) ** 2 * w * w**3)
        f = Packet(time_width=w, space_width=w, amplitude=amp)
        vals = [hat(f, p0, [p, 0, 0]) for p0, p in [(0, 0), (1, 0.5), (-2, 1.5)]]
        assert max(abs(v - vals[0]) for v in vals) < 1e-4 * abs(vals[0])

    def test_gradients(self):
        f = Packet(
            center=SpacetimePoint(0.2, (0.3, 0.0, -0.2)), time_width=0.7,
            space_width=1.1, amplitude=2.0,
        )
        p0, p = 0.4, np.array([0.1, 0.2, -0.3])
        g = hat_grad(f, p0, p)
        h = 1e-6
        for i in range(3):
            dp, dm = p.copy(), p.copy()
            dp[i] += h
            dm[i] -= h
            fd = (hat(f, p0, dp) - hat(f, p0, dm)) / (2 * h)
            assert abs(fd - g[i]) < 1e-6 * (1 + abs(g[i]))
        fd0 = (hat(f, p0 + h, p) - hat(f, p0 - h, p)) / (2 * h)
        assert abs(fd0 - hat_dp0(f, p0, p)) < 1e-6

    def test_off_shell_recentering(self):
        f = Packet(time_width=2.0, time_freq=5.0)
        assert abs(hat(f, 5.0, [0, 0, 0])) > 1e3 * abs(hat(f, 1.0, [0, 0, 0]))

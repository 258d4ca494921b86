"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line with its measured numbers at the stated tolerance.

Run with `pytest tests/test_acceptance.py -v -s` for the full report.
"""

import time

import numpy as np
import pytest

from secgrowth.cli import load_config, run as cli_run
from secgrowth.cumulants import (
    commutator_truncation_residual,
    decay_product_bound,
    random_ops,
    random_state,
)
from secgrowth.dirac_ed import (
    bogoliubov_mode_residuals,
    current_expectation,
    fermi_decomposition_residual,
    fit_probe_growth,
    full_current_pipeline,
    probe_scan,
)
from secgrowth.gamma_algebra import DIRAC_BASIS, ETA, gamma_trace
from secgrowth.loops import (
    CompactLegConfig,
    StateProfile,
    adiabatic_growth_scan,
    adiabatic_growth_slope,
    compact_A_scan,
    linear_slope,
    phi3_vacuum_spectral,
    smoothed_phi3_weight,
    spectral_numeric,
    thermal_loop_spectral,
)
from secgrowth.propagators import (
    PropagatorKind,
    ThermalParams,
    decay_envelope,
)
from secgrowth.quadrature import fit_growth_exponent
from secgrowth.scalar_ed import (
    ExternalPotential,
    corrected_total_smeared,
    coulomb_gauge_test_potential,
    linear_secular_coefficient,
    magnetic_cancellation_residual,
    mode_cancellation_residual,
    smeared_first_order_W,
)
from secgrowth.switching import SpacetimePoint, SwitchFunction, TestFunction as Packet
from secgrowth.toymodel import (
    MassQuench,
    bogoliubov_step_at,
    fit_order_growth,
    order_growth_scan,
    solve_mode,
)

KMS = ThermalParams(1.0, 1.0)
GROUND = ThermalParams(np.inf, 1.0)
CHI = SwitchFunction(epsilon=1.0, k=5)


def report(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


# ----------------------------------------------------------------------
# 1. toy-model growth exponents, runtime < 2 min
# ----------------------------------------------------------------------


def test_toy_model_growth_exponents():
    t0 = time.time()
    ts = np.arange(20.0, 201.0, 2.0)
    fits = {}
    for n in (2, 3):
        scan = order_growth_scan(n, ts, 1.0, 0.5, 1e-9)
        fits[n] = fit_order_growth(scan, (20.0, 200.0))
    runtime = time.time() - t0
    ok = (
        abs(fits[2].exponent - 0.5) <= 0.1
        and abs(fits[3].exponent - 1.5) <= 0.1
        and runtime < 120.0
    )
    report(
        "toy growth exponents n=2,3",
        ok,
        f"n=2: {fits[2].exponent:+.3f} (want 0.5+-0.1), "
        f"n=3: {fits[3].exponent:+.3f} (want 1.5+-0.1), runtime {runtime:.0f}s < 120s",
    )


# ----------------------------------------------------------------------
# 2. Bogoliubov normalization + sharp-step closed form
# ----------------------------------------------------------------------


def test_bogoliubov_normalization():
    worst = 0.0
    for k in (3, 5, 7):
        q = MassQuench(1.0, 1.0, SwitchFunction(epsilon=1.0, k=k))
        for p in (0.0, 0.5, 1.0, 2.0, 5.0):
            worst = max(worst, abs(solve_mode(q, p, 1.0).normalization_defect))
    q_sharp = MassQuench(1.0, 3.0, SwitchFunction(epsilon=1e-3, k=5))
    pair = solve_mode(q_sharp, 0.0, 0.5, 1e-12)
    ref = bogoliubov_step_at(0.0, 1.0, 3.0, -1.5e-3)
    step_err = max(abs(pair.alpha - ref.alpha), abs(pair.beta - ref.beta))
    ok = worst < 1e-8 and step_err < 1e-3
    report(
        "Bogoliubov normalization",
        ok,
        f"|alpha|^2-|beta|^2-1 worst {worst:.1e} (<1e-8), "
        f"sharp-step mismatch {step_err:.1e} (<1e-3 at eps=1e-3)",
    )


# ----------------------------------------------------------------------
# 3. the t^{-3/2} decay envelopes
# ----------------------------------------------------------------------


def test_decay_envelopes():
    env = decay_envelope(
        PropagatorKind.FERMI_SMOOTH_PART, KMS, [2, 4, 8, 16, 32, 64], 0.0, 1e-9
    )
    vals = [v for _, v in env]
    ratio = max(vals) / min(vals)
    env_v = decay_envelope(PropagatorKind.SCALAR_VACUUM, GROUND, [10, 20, 40, 80, 100])
    asym = np.sqrt(np.pi / 2.0) / (4.0 * np.pi**2)
    dev = max(abs(v / asym - 1.0) for _, v in env_v)
    ok = ratio < 10.0 and dev < 0.05
    report(
        "decay envelopes",
        ok,
        f"thermal smooth-part max/min {ratio:.2f} (<10), "
        f"vacuum envelope vs Bessel asymptote {dev:.1%} (<5%)",
    )


# ----------------------------------------------------------------------
# 4. first-order secular slope (scalar ED, adiabatic limit)
# ----------------------------------------------------------------------


@pytest.fixture(scope="module")
def secular_packets():
    f = Packet(center=SpacetimePoint(0.0, (0.5, 0.0, 0.0)))
    g = Packet(center=SpacetimePoint(0.0, (-0.5, 0.0, 0.0)))
    pot = ExternalPotential("scalar_linear", 1.0, axis=0)
    return f, g, pot


def test_secular_slope_scalar(secular_packets):
    f, g, pot = secular_packets
    ts = np.linspace(50.0, 400.0, 22)
    scan = [(t, smeared_first_order_W(t, f, g, pot, KMS, CHI, 1e-7)) for t in ts]
    fit = fit_growth_exponent(scan, (50.0, 400.0))
    coeff = abs(linear_secular_coefficient(f, g, pot, KMS))
    t_ref, w_ref = scan[10]
    slope_dev = abs(w_ref / t_ref - coeff) / coeff
    ok = abs(fit.exponent - 1.0) <= 0.05 and slope_dev < 0.02
    report(
        "scalar ED secular slope",
        ok,
        f"exponent {fit.exponent:.4f} (1.0+-0.05), slope vs displayed integral "
        f"{slope_dev:.2%} at t={t_ref:.0f} (<2%)",
    )


# ----------------------------------------------------------------------
# 5. mode cancellation + corrected-state stability
# ----------------------------------------------------------------------


def test_mode_cancellation_and_stability(secular_packets):
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        wp, wk = rng.uniform(1.0, 10.0, 2)
        if abs(wp - wk) < 1e-6:
            wk += 0.1
        worst = max(worst, mode_cancellation_residual(wp, wk, rng.uniform(0.1, 5.0)))
    f, g, pot = secular_packets
    base = corrected_total_smeared(60.0, f, g, pot, KMS, CHI)
    drift = max(
        abs(corrected_total_smeared(60.0 + a, f, g, pot, KMS, CHI) - base)
        for a in (5.0, 20.0, 50.0)
    )
    ok = worst < 1e-12 and drift < 1e-6 * abs(base)
    report(
        "scalar mode cancellation",
        ok,
        f"residual worst of 100: {worst:.1e} (<1e-12), corrected-state drift "
        f"{drift / abs(base):.1e} relative (<1e-6)",
    )


# ----------------------------------------------------------------------
# 6. magnetic transversality cancellation
# ----------------------------------------------------------------------


def test_magnetic_transversality():
    pot = ExternalPotential("vector_coulomb_gauge", 1.0, a_hat=coulomb_gauge_test_potential())
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        wp, wk = rng.uniform(1.01, 6.0, 2)
        worst = max(
            worst,
            magnetic_cancellation_residual(wp, wk, rng.uniform(0.2, 4.0), pot, rng=rng),
        )
    ok = worst < 1e-12
    report("magnetic transversality cancellation", ok, f"worst of 50: {worst:.1e} (<1e-12)")


# ----------------------------------------------------------------------
# 7. Dirac suite
# ----------------------------------------------------------------------


def test_dirac_suite():
    from secgrowth.scalar_ed import SpatialCutoff

    cliff = max(
        np.max(np.abs(DIRAC_BASIS.anticommutator(mu, nu) + 2 * ETA[mu, nu] * np.eye(4)))
        for mu in range(4)
        for nu in range(4)
    )
    tr2 = max(
        abs(gamma_trace((mu, nu)) + 4 * ETA[mu, nu]) for mu in range(4) for nu in range(4)
    )
    tr3 = abs(gamma_trace((0, 1, 2)))
    tr4 = abs(gamma_trace((0, 1, 0, 1)) - 4.0)
    rng = np.random.default_rng(1)
    fermi_worst = max(
        fermi_decomposition_residual(b, wp, wk)
        for b, wp, wk in rng.uniform(0.2, 6.0, (100, 3))
    )
    res_worst = 0.0
    for _ in range(100):
        wp, wk = rng.uniform(1.0, 10.0, 2)
        if abs(wp - wk) < 1e-6:
            wk += 0.1
        ra, rb = bogoliubov_mode_residuals(wp, wk, rng.uniform(0.1, 5.0))
        res_worst = max(res_worst, ra, rb)

    cut = SpatialCutoff("gaussian", 3.0)
    x = SpacetimePoint(0.0, (0.2, 0.0, 0.0))
    v1 = full_current_pipeline(x, 0.5, cut, KMS, CHI, 5.0)
    v2 = full_current_pipeline(x, 0.5, cut, KMS, CHI, 25.0)
    drift = abs(v1 - v2) / abs(v1)
    cold = abs(current_expectation(x, 0.5, cut, ThermalParams(np.inf, 1.0)))

    ts = np.linspace(20.0, 200.0, 16)
    fit4 = fit_probe_growth(probe_scan(4, ts, 1.0, KMS, CHI), (20, 200))
    fit2 = fit_probe_growth(probe_scan(2, ts, 1.0, KMS, CHI), (20, 200))

    ok = (
        max(cliff, tr2, tr3, tr4) < 1e-12
        and fermi_worst < 1e-14
        and res_worst < 1e-12
        and drift < 1e-6
        and cold == 0.0
        and abs(fit4.exponent - 0.5) <= 0.15
        and abs(fit2.exponent + 0.5) <= 0.15
    )
    report(
        "Dirac suite",
        ok,
        f"Clifford/traces {max(cliff, tr2, tr3, tr4):.1e} (<1e-12), Fermi identity "
        f"{fermi_worst:.1e} (<1e-14), bulk residuals {res_worst:.1e} (<1e-12), "
        f"current drift {drift:.1e} (<1e-6), beta=inf value {cold}, probe n=4 "
        f"{fit4.exponent:+.3f} (0.5+-0.15), n=2 {fit2.exponent:+.3f} (-0.5+-0.15)",
    )


# ----------------------------------------------------------------------
# 8. loop dichotomy
# ----------------------------------------------------------------------


def test_loop_dichotomy():
    kms_profile = StateProfile.kms(1.0, 1.0)
    vac = StateProfile.vacuum(1.0)
    s4 = thermal_loop_spectral(kms_profile, 4)
    ts = np.linspace(10.0, 120.0, 12)
    pg = np.linspace(0.05, 4.0, 8)
    fit = adiabatic_growth_slope(s4, pg, ts)
    scan_v = adiabatic_growth_scan(phi3_vacuum_spectral(1.0), pg, ts)
    vac_ratio = abs(linear_slope(scan_v)) / fit.coefficient

    cfg = CompactLegConfig(f_width=1.0, h_width=4.0, mass=1.0)
    scan_c = compact_A_scan([10.0, 50.0, 100.0, 150.0, 200.0], s4, cfg, n_p0=40, n_p=14)
    bound_ratio = max(v for _, v in scan_c) / scan_c[0][1]

    probes = [(3.0, 0.0), (3.5, 0.5), (4.0, 1.0), (2.6, 0.3), (5.0, 2.0)]
    pulls = []
    for i, (p0, pm) in enumerate(probes):
        s = spectral_numeric(3, vac, p0, pm, 0.4, 300_000, seed=100 + i)
        oracle = smoothed_phi3_weight(p0, pm, 1.0, 0.4)
        pulls.append(abs(s.value - oracle) / s.stderr)

    ok = (
        abs(fit.exponent - 1.0) <= 0.1
        and fit.r_squared > 0.99
        and vac_ratio < 1e-3
        and bound_ratio < 2.0
        and max(pulls) < 3.0
    )
    report(
        "loop dichotomy",
        ok,
        f"thermal slope exponent {fit.exponent:.3f} (1.0+-0.1) r2 {fit.r_squared:.4f} "
        f"(>0.99), phi3/thermal slope {vac_ratio:.1e} (<1e-3), compact bound ratio "
        f"{bound_ratio:.2f} (<2), MC pulls max {max(pulls):.2f} sigma (<3)",
    )


# ----------------------------------------------------------------------
# 9. cumulant identity + decay-bound integral
# ----------------------------------------------------------------------


def test_cumulant_identity_and_decay_bound():
    worst = 0.0
    for trial in range(20):
        for n in (2, 3, 4):
            st = random_state(5, 1000 + 31 * trial + n)
            ops = random_ops(5, n + 1, 5000 + 17 * trial + n)
            worst = max(worst, commutator_truncation_residual(st, ops, n))
    from scipy.integrate import quad

    d, eps = 1.0, 0.5
    closed2 = 2.0 / (eps * d**eps)
    exact2 = quad(lambda u: (abs(u) + d) ** (-1 - eps), -np.inf, np.inf, limit=400)[0]
    n2_dev = abs(exact2 - closed2) / closed2
    res3 = decay_product_bound(3, d, eps, 400_000)
    n3_dev = abs(res3.estimate - res3.closed_form) / res3.closed_form
    ok = worst < 1e-10 and n2_dev < 1e-8 and n3_dev < 0.02
    report(
        "cumulant identity + decay bound",
        ok,
        f"commutator residual worst {worst:.1e} (<1e-10, 20 trials x n<=4), "
        f"n=2 quadrature vs closed {n2_dev:.1e} (exact), n=3 MC {n3_dev:.2%} (<2%)",
    )


# ----------------------------------------------------------------------
# 10. CLI determinism
# ----------------------------------------------------------------------


def test_cli_determinism(tmp_path):
    outputs = []
    for sub in ("a", "b"):
        cfg = load_config(None, "decay", {"seed": 17})
        cli_run(cfg, tmp_path / sub)
        outputs.append((tmp_path / sub / "decay.csv").read_bytes())
    same_decay = outputs[0] == outputs[1]
    outputs = []
    for sub in ("c", "d"):
        cfg = load_config(None, "cancel-scalar", {"seed": 23, "trials": 40})
        cli_run(cfg, tmp_path / sub)
        outputs.append((tmp_path / sub / "cancel_scalar.csv").read_bytes())
    same_cancel = outputs[0] == outputs[1]
    ok = same_decay and same_cancel
    report("CLI determinism", ok, f"decay byte-identical {same_decay}, cancel {same_cancel}")

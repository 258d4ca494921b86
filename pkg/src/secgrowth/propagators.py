"""Free two-point functions: scalar and Dirac, vacuum and KMS.

Vacuum kinds use the closed Bessel-K1 representation of the massive
ground-state two-point function (analytically continued across the light
cone via Hankel functions); thermal corrections, which carry Bose/Fermi
occupation factors and decay rapidly in momentum, are evaluated with the
oscillatory radial engine.  Splitting KMS = vacuum + thermal keeps the
singular support in the closed form and the quadrature absolutely
convergent, and it makes the beta -> infinity limit exact.

The scalar vacuum kind additionally has a pure-quadrature evaluation
(`scalar_vacuum_via_quadrature`) used to cross-check the closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .errors import NonPositiveEnergy, SingularSeparation
from .gamma_algebra import G0, IDENTITY4, gamma_spatial_dot
from .quadrature import oscillatory_shell_integral
from .switching import SpacetimePoint

LIGHTCONE_TOL = 1e-6


@dataclass(frozen=True)
class ThermalParams:
    """Inverse temperature (beta = inf selects the ground state) and mass."""

    beta: float
    mass: float

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive (use np.inf for the ground state)")

    @property
    def is_ground(self) -> bool:
        return np.isinf(self.beta)


@dataclass(frozen=True)
class OccupationFactors:
    bose_plus: float  # 1/(1 - e^{-beta w})
    bose_minus: float  # 1/(e^{beta w} - 1)
    fermi: float  # 1/(1 + e^{beta w})


def occupation(params: ThermalParams, omega: float) -> OccupationFactors:
    if omega < params.mass * (1.0 - 1e-12) or omega <= 0:
        raise NonPositiveEnergy(f"omega={omega} below mass shell m={params.mass}")
    if params.is_ground:
        return OccupationFactors(1.0, 0.0, 0.0)
    x = params.beta * omega
    e = np.exp(-x)
    return OccupationFactors(1.0 / (1.0 - e), e / (1.0 - e), e / (1.0 + e))


class PropagatorKind(Enum):
    SCALAR_VACUUM = "scalar_vacuum"
    SCALAR_KMS = "scalar_kms"
    SCALAR_PAULI_JORDAN = "scalar_pauli_jordan"
    SCALAR_RETARDED = "scalar_retarded"
    SCALAR_ADVANCED = "scalar_advanced"
    SCALAR_FEYNMAN = "scalar_feynman"
    DIRAC_PLUS = "dirac_plus"
    DIRAC_MINUS = "dirac_minus"
    DIRAC_KMS_PLUS = "dirac_kms_plus"
    DIRAC_KMS_MINUS = "dirac_kms_minus"
    DIRAC_PAULI_JORDAN = "dirac_pauli_jordan"
    DIRAC_FEYNMAN = "dirac_feynman"
    FERMI_SMOOTH_PART = "fermi_smooth_part"


_SMOOTH_KINDS = {PropagatorKind.FERMI_SMOOTH_PART}


# ----------------------------------------------------------------------
# closed-form vacuum building blocks
# ----------------------------------------------------------------------


def _K_cont(n: int, y: float) -> complex:
    """K_n(i y) for y > 0 via Hankel functions: (pi/2)(-i)^{n+1} H^(2)_n(y)."""
    return (np.pi / 2.0) * (-1j) ** (n + 1) * (special.jv(n, y) - 1j * special.yv(n, y))


def _vacuum_phi_and_derivative(t: float, r: float, m: float):
    """omega2_inf as Phi(lambda), lambda = r^2 - (t - i0)^2, plus dPhi/dlambda.

    Phi = (m^2/4pi^2) K_1(u)/u, u = m sqrt(lambda);  dPhi/dlambda =
    -(m^4/8pi^2) K_2(u)/u^2 from d/du[u^{-1}K_1] = -u^{-1}K_2.
    """
    lam = r * r - t * t
    if abs(lam) < LIGHTCONE_TOL:
        raise SingularSeparation(f"|t^2-r^2| = {abs(lam):.2e} is on the light cone")
    if lam > 0:  # spacelike
        u = m * np.sqrt(lam)
        phi = (m * m / (4 * np.pi**2)) * special.kv(1, u) / u
        dphi = -(m**4 / (8 * np.pi**2)) * special.kv(2, u) / u**2
        return complex(phi), complex(dphi)
    if t < 0:
        phi, dphi = _vacuum_phi_and_derivative(-t, r, m)
        return np.conj(phi), np.conj(dphi)
    tau = np.sqrt(-lam)
    u = 1j * m * tau  # principal sqrt of lambda + i0 for t > 0
    k1 = _K_cont(1, m * tau)
    k2 = _K_cont(2, m * tau)
    phi = (m * m / (4 * np.pi**2)) * k1 / u
    dphi = -(m**4 / (8 * np.pi**2)) * k2 / u**2
    return complex(phi), complex(dphi)


def _separation(x: SpacetimePoint, y: SpacetimePoint):
    dz = x.spatial() - y.spatial()
    return x.t - y.t, float(np.linalg.norm(dz)), dz


def vacuum_scalar(t: float, rvec, m: float):
    """(value, d/dt value, gradient) of the ground-state two-point function at z=(t,rvec)."""
    rvec = np.asarray(rvec, dtype=float)
    r = float(np.linalg.norm(rvec))
    phi, dphi = _vacuum_phi_and_derivative(t, r, m)
    return phi, -2.0 * t * dphi, 2.0 * rvec * dphi


def scalar_vacuum_via_quadrature(
    t: float, r: float, m: float, rel_tol: float = 1e-8
) -> complex:
    """omega2_inf by the radial oscillatory engine (cross-check route)."""
    amp = lambda p: 1.0 / (2.0 * np.sqrt(p * p + m * m))
    sigma = -1 if t >= 0 else +1
    val = oscillatory_shell_integral(
        amp, sigma, m, abs(t), radius=r, rel_tol=rel_tol
    )
    return val / (2.0 * np.pi**2)


# ----------------------------------------------------------------------
# thermal corrections (rapidly decaying amplitudes)
# ----------------------------------------------------------------------


def _bose_amp(params: ThermalParams):
    b, m = params.beta, params.mass

    def amp(p):
        w = np.sqrt(p * p + m * m)
        e = np.exp(-b * w)
        return e / (1.0 - e) / (2.0 * w)

    return amp


def _fermi_amp(params: ThermalParams, weight: str):
    b, m = params.beta, params.mass

    def amp(p):
        w = np.sqrt(p * p + m * m)
        f = np.exp(-b * w) / (1.0 + np.exp(-b * w))
        if weight == "1/2w":
            return f / (2.0 * w)
        if weight == "w/2w":  # i.e. f/2
            return f / 2.0
        raise ValueError(weight)

    return amp


def _thermal_scalar_correction(params, dt, r, rel_tol) -> complex:
    """omega2_kms - omega2_vac = int (d3p/(2pi)^3) b^- (e^{-iw dt} + e^{iw dt}) e^{ip.z} / 2w."""
    if params.is_ground:
        return 0.0 + 0.0j
    amp = _bose_amp(params)
    m = params.mass
    tot = 0.0 + 0.0j
    for sigma in (-1, +1):
        eff = sigma if dt >= 0 else -sigma
        tot += oscillatory_shell_integral(
            amp, eff, m, abs(dt), radius=r, rel_tol=rel_tol
        )
    return tot / (2.0 * np.pi**2)


def scalar_two_point(
    kind: PropagatorKind,
    params: ThermalParams,
    x: SpacetimePoint,
    y: SpacetimePoint,
    rel_tol: float = 1e-8,
) -> complex:
    dt, r, _ = _separation(x, y)
    m = params.mass
    k = PropagatorKind(kind)

    if k == PropagatorKind.SCALAR_VACUUM:
        return vacuum_scalar(dt, x.spatial() - y.spatial(), m)[0]
    if k == PropagatorKind.SCALAR_KMS:
        if params.is_ground:
            return vacuum_scalar(dt, x.spatial() - y.spatial(), m)[0]
        vac = vacuum_scalar(dt, x.spatial() - y.spatial(), m)[0]
        return vac + _thermal_scalar_correction(params, dt, r, rel_tol)
    if k == PropagatorKind.SCALAR_PAULI_JORDAN:
        if abs(dt) < 1e-14:
            return 0.0 + 0.0j  # sin(w*0) = 0 mode by mode
        w_plus = vacuum_scalar(dt, x.spatial() - y.spatial(), m)[0]
        w_swap = vacuum_scalar(-dt, y.spatial() - x.spatial(), m)[0]
        return -1j * (w_plus - w_swap)
    if k == PropagatorKind.SCALAR_RETARDED:
        if dt <= 0:
            return 0.0 + 0.0j
        return scalar_two_point(PropagatorKind.SCALAR_PAULI_JORDAN, params, x, y, rel_tol)
    if k == PropagatorKind.SCALAR_ADVANCED:
        return scalar_two_point(PropagatorKind.SCALAR_RETARDED, params, y, x, rel_tol)
    if k == PropagatorKind.SCALAR_FEYNMAN:
        if dt >= 0:
            return scalar_two_point(PropagatorKind.SCALAR_KMS, params, x, y, rel_tol)
        return scalar_two_point(PropagatorKind.SCALAR_KMS, params, y, x, rel_tol)
    raise ValueError(f"{kind} is not a scalar kind")


# ----------------------------------------------------------------------
# Dirac kinds
# ----------------------------------------------------------------------


def _dirac_vacuum_plus(t, rvec, m):
    """S2^+(z) = (i gamma^mu d_mu + m) omega2_inf(z)."""
    phi, dphi_t, grad = vacuum_scalar(t, rvec, m)
    return 1j * (G0 * dphi_t + gamma_spatial_dot(grad)) + m * phi * IDENTITY4


def _dirac_vacuum_minus(t, rvec, m):
    """S2^-(z) = -(i gamma^mu d_mu + m) omega2_inf(-z)."""
    phi, dphi_t, grad = vacuum_scalar(-t, -np.asarray(rvec, dtype=float), m)
    return 1j * (G0 * dphi_t + gamma_spatial_dot(grad)) - m * phi * IDENTITY4


def fermi_smooth_part(
    params: ThermalParams, t: float, rvec, rel_tol: float = 1e-8
) -> np.ndarray:
    """W_beta^+(z) = S2^{beta,+} - S2^+, a smooth Fermi-weighted integral."""
    if params.is_ground:
        return np.zeros((4, 4), dtype=complex)
    rvec = np.asarray(rvec, dtype=float)
    r = float(np.linalg.norm(rvec))
    m = params.mass
    a1 = _fermi_amp(params, "1/2w")
    aw = _fermi_amp(params, "w/2w")

    def shell(amp, sigma, kernel="sinc", power=2):
        # real amplitudes: a negative time argument flips the phase sign
        eff = sigma if t >= 0 else -sigma
        return oscillatory_shell_integral(
            amp, eff, m, abs(t), radius=r, power=power, kernel=kernel, rel_tol=rel_tol
        )

    i1 = shell(a1, -1) + shell(a1, +1)
    iw = shell(aw, +1) - shell(aw, -1)
    mat = G0 * iw + m * i1 * IDENTITY4
    if r > 0:
        jj = shell(a1, -1, kernel="j1", power=3) + shell(a1, +1, kernel="j1", power=3)
        mat = mat - 1j * gamma_spatial_dot(rvec / r) * jj
    return -(1.0 / (2.0 * np.pi**2)) * mat


def dirac_two_point(
    kind: PropagatorKind,
    params: ThermalParams,
    x: SpacetimePoint,
    y: SpacetimePoint,
    rel_tol: float = 1e-8,
) -> np.ndarray:
    dt, r, dz = _separation(x, y)
    m = params.mass
    k = PropagatorKind(kind)

    if k == PropagatorKind.FERMI_SMOOTH_PART:
        return fermi_smooth_part(params, dt, dz, rel_tol)
    if k == PropagatorKind.DIRAC_PLUS:
        return _dirac_vacuum_plus(dt, dz, m)
    if k == PropagatorKind.DIRAC_MINUS:
        return _dirac_vacuum_minus(dt, dz, m)
    if k == PropagatorKind.DIRAC_KMS_PLUS:
        return _dirac_vacuum_plus(dt, dz, m) + fermi_smooth_part(params, dt, dz, rel_tol)
    if k == PropagatorKind.DIRAC_KMS_MINUS:
        return _dirac_vacuum_minus(dt, dz, m) - fermi_smooth_part(params, dt, dz, rel_tol)
    if k == PropagatorKind.DIRAC_PAULI_JORDAN:
        plus = _dirac_vacuum_plus(dt, dz, m)
        minus = _dirac_vacuum_minus(dt, dz, m)
        return (plus + minus) / 1j
    if k == PropagatorKind.DIRAC_FEYNMAN:
        if dt >= 0:
            return dirac_two_point(PropagatorKind.DIRAC_KMS_PLUS, params, x, y, rel_tol)
        return -dirac_two_point(PropagatorKind.DIRAC_KMS_MINUS, params, x, y, rel_tol)
    raise ValueError(f"{kind} is not a Dirac kind")


# ----------------------------------------------------------------------
# decay envelopes (the t^{-3/2} bound)
# ----------------------------------------------------------------------


def decay_envelope(
    kind: PropagatorKind,
    params: ThermalParams,
    t_grid,
    spatial_offset: float = 0.0,
    rel_tol: float = 1e-8,
) -> list[tuple[float, float]]:
    """Samples (t, t^{3/2} |value|) along a timelike ray; bounded per the decay bound."""
    t_grid = list(t_grid)
    if not t_grid:
        raise ValueError("t_grid must be nonempty")
    if min(t_grid) <= 1.0:
        raise ValueError("decay envelopes require t > 1")
    if spatial_offset < 0 or spatial_offset >= min(t_grid):
        raise ValueError("configuration must stay timelike: offset < min(t)")
    origin = SpacetimePoint(0.0)
    out = []
    for t in t_grid:
        pt = SpacetimePoint(float(t), (spatial_offset, 0.0, 0.0))
        k = PropagatorKind(kind)
        if k in (
            PropagatorKind.SCALAR_VACUUM,
            PropagatorKind.SCALAR_KMS,
            PropagatorKind.SCALAR_PAULI_JORDAN,
            PropagatorKind.SCALAR_RETARDED,
            PropagatorKind.SCALAR_ADVANCED,
            PropagatorKind.SCALAR_FEYNMAN,
        ):
            mag = abs(scalar_two_point(k, params, pt, origin, rel_tol))
        else:
            mag = float(np.max(np.abs(dirac_two_point(k, params, pt, origin, rel_tol))))
        out.append((float(t), float(t) ** 1.5 * mag))
    return out

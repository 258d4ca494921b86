"""Switch-on functions and Gaussian smearing packets.

The switch-on ramp chi rises from 0 to 1 on [-2*eps, -eps] (sharp-step is
the eps -> 0 limit, a Heaviside step at t = 0, so its derivative transform
is identically 1).  Smoothstep ramps are regularized incomplete beta
functions: chi_dot is proportional to x^k (1-x)^k, which gives closed
forms for chi, chi_dot, chi_ddot and a Bessel-function expression for the
Fourier transform of chi_dot.

Fourier conventions, fixed package-wide:

    chi_dot_hat(w) = int chi_dot(t) e^{i w t} dt
    f_hat(p0, p)   = int f(t, x) e^{i p0 t - i p.x} dt d^3x

so a time translation f_t(x) = f(t_x - t, x) transforms to e^{i p0 t} f_hat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special


@dataclass(frozen=True)
class SpacetimePoint:
    """Event (t, x) in Minkowski coordinates, metric (-,+,+,+), hbar = c = 1."""

    t: float
    x: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def spatial(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)


@dataclass(frozen=True)
class SwitchFunction:
    """Time cutoff chi: 0 before -2*eps, 1 after -eps, monotone in between."""

    epsilon: float = 1.0
    shape: str = "smoothstep"  # or "sharp"
    k: int = 5

    def __post_init__(self):
        if self.shape not in ("smoothstep", "sharp"):
            raise ValueError(f"unknown shape {self.shape!r}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.shape == "smoothstep" and self.k < 3:
            raise ValueError("smoothstep order k must be >= 3")

    @property
    def ramp_center(self) -> float:
        """First moment of chi_dot: -1.5*eps for smoothstep ramps, 0 for sharp."""
        return 0.0 if self.shape == "sharp" else -1.5 * self.epsilon


def chi(s: SwitchFunction, t):
    t = np.asarray(t, dtype=float)
    if s.shape == "sharp":
        out = np.where(t >= 0.0, 1.0, 0.0)
        return out if out.ndim else float(out)
    x = np.clip((t + 2.0 * s.epsilon) / s.epsilon, 0.0, 1.0)
    out = special.betainc(s.k + 1, s.k + 1, x)
    return out if out.ndim else float(out)


def chi_dot(s: SwitchFunction, t):
    t = np.asarray(t, dtype=float)
    if s.shape == "sharp":
        # weak-limit derivative is a delta at t=0; pointwise value is 0
        out = np.zeros_like(t)
        return out if out.ndim else float(out)
    x = (t + 2.0 * s.epsilon) / s.epsilon
    inside = (x > 0.0) & (x < 1.0)
    xs = np.where(inside, x, 0.5)
    B = special.beta(s.k + 1, s.k + 1)
    out = np.where(inside, xs**s.k * (1.0 - xs) ** s.k / (B * s.epsilon), 0.0)
    return out if out.ndim else float(out)


def chi_ddot(s: SwitchFunction, t):
    t = np.asarray(t, dtype=float)
    if s.shape == "sharp":
        out = np.zeros_like(t)
        return out if out.ndim else float(out)
    x = (t + 2.0 * s.epsilon) / s.epsilon
    inside = (x > 0.0) & (x < 1.0)
    xs = np.where(inside, x, 0.5)
    B = special.beta(s.k + 1, s.k + 1)
    k = s.k
    out = np.where(
        inside,
        k * xs ** (k - 1) * (1.0 - xs) ** (k - 1) * (1.0 - 2.0 * xs) / (B * s.epsilon**2),
        0.0,
    )
    return out if out.ndim else float(out)


# ----------------------------------------------------------------------
# Fourier transform of chi_dot: Bessel closed form with derivatives
# ----------------------------------------------------------------------


_G_SERIES: dict = {}


def _g_series_coeffs(nu: float) -> np.ndarray:
    if nu not in _G_SERIES:
        j = np.arange(6)
        _G_SERIES[nu] = (-1.0) ** j / (
            2.0 ** (nu + 2 * j) * special.factorial(j) * special.gamma(nu + j + 1)
        )
    return _G_SERIES[nu]


def _G(nu: float, z):
    """z^{-nu} J_nu(z), entire in z^2, with dG/dz = -z * G_{nu+1}(z)."""
    if np.isscalar(z) or np.ndim(z) == 0:
        za = abs(float(z))
        if za < 0.1:
            c = _g_series_coeffs(nu)
            z2 = za * za
            return float(
                c[0] + z2 * (c[1] + z2 * (c[2] + z2 * (c[3] + z2 * (c[4] + z2 * c[5]))))
            )
        return float(special.jv(nu, za) / za**nu)
    z = np.abs(np.asarray(z, dtype=float))  # even function of z
    small = z < 0.1
    c = _g_series_coeffs(nu)
    z2 = np.where(small, z * z, 0.0)
    series = c[0] + z2 * (c[1] + z2 * (c[2] + z2 * (c[3] + z2 * (c[4] + z2 * c[5]))))
    zb = np.where(small, 1.0, z)
    big = np.where(small, 0.0, special.jv(nu, zb) / zb**nu)
    return np.where(small, series, big)


def chi_dot_hat(s: SwitchFunction, omega) -> complex:
    """int chi_dot(t) e^{i omega t} dt; exactly 1 at omega = 0, modulus <= 1."""
    if s.shape == "sharp":
        om = np.asarray(omega, dtype=float)
        out = np.ones_like(om, dtype=complex)
        return out if out.ndim else complex(out)
    om = np.asarray(omega, dtype=float)
    a = s.epsilon * om
    nu = s.k + 0.5
    norm = 2.0**nu * special.gamma(nu + 1.0)
    out = np.exp(-1.5j * a) * norm * _G(nu, a / 2.0)
    return out if out.ndim else complex(out)


def chi_dot_hat_deriv(s: SwitchFunction, omega: float, order: int) -> complex:
    """d^order/d omega^order of chi_dot_hat at omega (order 0..8).

    Uses the recursion d/dz [z^{-nu} J_nu] = -z^{-nu} J_{nu+1}; each term is
    tracked as coef * a^m * G_{nu+l}(a/2) * e^{-1.5 i a} with a = eps*omega.
    """
    if order == 0:
        return complex(chi_dot_hat(s, omega))
    if s.shape == "sharp":
        return 0.0 + 0.0j
    if order > 8:
        raise ValueError("chi_dot_hat_deriv supports order <= 8")
    nu = s.k + 0.5
    norm = 2.0**nu * special.gamma(nu + 1.0)
    # term list: (coef, power m, shift l) meaning coef * a^m * G_{nu+l}(a/2)
    terms = {(0, 0): complex(norm)}
    for _ in range(order):
        new: dict = {}

        def add(key, val):
            new[key] = new.get(key, 0.0 + 0.0j) + val

        for (m, l), c in terms.items():
            add((m, l), -1.5j * c)  # phase factor derivative
            if m > 0:
                add((m - 1, l), m * c)  # power rule
            add((m + 1, l + 1), -0.25 * c)  # dG_l(a/2)/da = -(a/4) G_{l+1}(a/2)
        terms = new
    a = s.epsilon * float(omega)
    val = sum(
        c * a**m * _G(nu + l, a / 2.0) for (m, l), c in terms.items()
    )
    return complex(np.exp(-1.5j * a) * val * s.epsilon**order)


_CORE_TERMS: dict = {}


def _core_terms(k: int, order: int) -> list:
    """Memoized Leibniz terms (coef, power m, Bessel shift l) for chi_hat cores."""
    key = (k, order)
    if key not in _CORE_TERMS:
        nu = k + 0.5
        norm = 2.0**nu * special.gamma(nu + 1.0)
        terms = {(0, 0): complex(norm)}
        for _ in range(order):
            new: dict = {}
            for (m, l), c in terms.items():
                new[(m, l)] = new.get((m, l), 0.0 + 0.0j) - 1.5j * c
                if m > 0:
                    new[(m - 1, l)] = new.get((m - 1, l), 0.0 + 0.0j) + m * c
                new[(m + 1, l + 1)] = new.get((m + 1, l + 1), 0.0 + 0.0j) - 0.25 * c
            terms = new
        _CORE_TERMS[key] = [(c, m, l) for (m, l), c in terms.items()]
    return _CORE_TERMS[key]


def chi_hat_core_neg(s: SwitchFunction, Omega, order: int = 0):
    """Core(Omega) with chi_dot_hat^{(order)}(-Omega) = e^{1.5 i eps Omega} Core(Omega).

    Splitting off the pure phase leaves real and imaginary parts that are
    smooth real functions of Omega, so oscillatory radial quadratures can
    absorb the phase into a shifted time and keep real amplitudes.
    """
    if s.shape == "sharp":
        if np.ndim(Omega) == 0:
            return 1.0 + 0.0j if order == 0 else 0.0 + 0.0j
        out = np.ones(np.shape(Omega), dtype=complex) if order == 0 else np.zeros(
            np.shape(Omega), dtype=complex
        )
        return out
    nu = s.k + 0.5
    a = -s.epsilon * np.asarray(Omega, dtype=float)
    val = sum(c * a**m * _G(nu + l, a / 2.0) for c, m, l in _core_terms(s.k, order))
    out = val * s.epsilon**order
    return out if np.ndim(out) else complex(out)


# ----------------------------------------------------------------------
# Gaussian test functions
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Gaussian packet a e^{-i mu (t-t0)} exp(-(t-t0)^2/(2 st^2) - |x-x0|^2/(2 ss^2)).

    Schwartz class rather than compactly supported: the secular coefficients
    only see the transform on the mass shell, and the Gaussian transform is
    exact (documented deviation from bump functions).  A nonzero carrier
    frequency mu = time_freq recenters the transform at p0 = mu, which is how
    packets far off the mass shell are built.
    """

    center: SpacetimePoint = field(default_factory=lambda: SpacetimePoint(0.0))
    time_width: float = 1.0
    space_width: float = 1.0
    amplitude: complex = 1.0
    time_freq: float = 0.0

    def __post_init__(self):
        if self.time_width <= 0 or self.space_width <= 0:
            raise ValueError("widths must be positive")

    @property
    def is_real(self) -> bool:
        return self.time_freq == 0.0 and abs(complex(self.amplitude).imag) == 0.0

    def norm_factor(self) -> float:
        """Zero-frequency value of the transform for unit amplitude and mu = 0."""
        return (2.0 * math.pi) ** 2 * self.time_width * self.space_width**3


def test_hat(f: TestFunction, p0: float, p) -> complex:
    """Closed-form transform int f(t,x) e^{i p0 t - i p.x} dt d^3x."""
    p = np.asarray(p, dtype=float)
    st, ss = f.time_width, f.space_width
    x0 = f.center.spatial()
    phase = np.exp(1j * p0 * f.center.t - 1j * float(np.dot(p, x0)))
    gauss = np.exp(
        -0.5 * st * st * (p0 - f.time_freq) ** 2 - 0.5 * ss * ss * float(np.dot(p, p))
    )
    return complex(f.amplitude * phase * f.norm_factor() * gauss)


def test_hat_grad_p(f: TestFunction, p0: float, p) -> np.ndarray:
    """Gradient of test_hat with respect to the spatial momentum p."""
    p = np.asarray(p, dtype=float)
    base = test_hat(f, p0, p)
    return (-1j * f.center.spatial() - f.space_width**2 * p) * base


def test_hat_dp0(f: TestFunction, p0: float, p) -> complex:
    """d/dp0 of test_hat."""
    base = test_hat(f, p0, p)
    return complex((1j * f.center.t - f.time_width**2 * (p0 - f.time_freq)) * base)

"""Oscillatory radial-momentum quadrature engine.

Evaluates half-line integrals of the form

    I = int_0^oo dp p^2 a(p) sinc(p r) exp(i sigma omega_p t),
    omega_p = sqrt(p^2 + m^2),

plus the regularized half-line moments, windowed Fourier transforms,
principal values and log-log growth fitting used by every scan in the
package.

Strategy for the phase factor: for t >= 1 the integral is transformed with
w = (omega_p - m) t, split into a constant part (a regularized half-line
moment) and a remainder integrated by parts twice, which trades the
oscillatory tail for an absolutely convergent one.  For t < 1 plain
adaptive Gauss-Kronrod on a truncated interval is used when the amplitude
decays rapidly; slowly decaying amplitudes take the w-path for any t > 0.
At t = 0 the sinc oscillation is handled with QUADPACK's Fourier-weight
rules after subtracting the (Abel-summable) constant tail of p*a(p).

Amplitudes must be even in p (physically: functions of |p| through
omega_p or p^2) and vectorized.  Real-valued amplitudes that accept
complex arguments get machine-accurate derivatives via complex-step;
anything else falls back to central differences.
"""

from __future__ import annotations

import math
import warnings
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate


@contextmanager
def _quiet():
    """Silence QUADPACK warnings; convergence is policed via error estimates."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        warnings.simplefilter("ignore", RuntimeWarning)
        yield

from .errors import (
    InsufficientSamples,
    InvalidTolerance,
    NonConvergent,
    NonPositiveValue,
    UnsupportedExponent,
)

_CS_STEP = 1e-100  # complex-step size; exact first derivatives
_FD_STEP = 1e-6  # fallback central-difference step
_P_PROBE_MAX = 1e6  # beyond this the amplitude is treated as non-decaying


@dataclass(frozen=True)
class RadialIntegrand:
    """Radial momentum integrand p^2 a(p) e^{i sigma omega_p t}.

    amplitude must be finite at p = 0 and even in p; phase_sign is the
    sign sigma of the oscillatory phase; mass sets omega_p; time the
    phase scale t >= 0.
    """

    amplitude: Callable[[np.ndarray], np.ndarray]
    phase_sign: int
    mass: float
    time: float

    def __post_init__(self):
        if self.phase_sign not in (+1, -1):
            raise ValueError("phase_sign must be +1 or -1")
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.time < 0:
            raise ValueError("time must be nonnegative")


@dataclass(frozen=True)
class GrowthFit:
    """Least-squares power law y = coefficient * t^exponent over a window."""

    exponent: float
    coefficient: float
    r_squared: float
    window: tuple[float, float]


# ----------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------


def regularized_halfline_moment(k_half: float, sigma: int) -> complex:
    """lim_{eps->0+} int_0^oo w^k e^{(i sigma - eps) w} dw, principal branch.

    Equals Gamma(k+1) (-i sigma)^{-(k+1)} = Gamma(k+1) e^{i sigma pi (k+1)/2}.
    """
    if sigma not in (+1, -1):
        raise ValueError("sigma must be +1 or -1")
    if k_half not in (0.5, 1.5, 2.5):
        raise UnsupportedExponent(f"k_half must be in {{1/2, 3/2, 5/2}}, got {k_half}")
    return _moment(k_half, sigma)


def _moment(mu: float, sigma: int) -> complex:
    return math.gamma(mu + 1.0) * np.exp(1j * sigma * np.pi * (mu + 1.0) / 2.0)


def windowed_fourier(a: float, t: float, weight: str = "1") -> complex:
    """int_{-t}^{t} dr W(r) e^{i r a} for W = 1 or W = |r| (exact closed forms)."""
    if t <= 0:
        raise ValueError("t must be positive")
    x = a * t
    if weight in ("1", 1):
        if abs(x) < 1e-4:
            return complex(2.0 * t * (1.0 - x * x / 6.0 + x**4 / 120.0))
        return complex(2.0 * math.sin(x) / a)
    if weight in ("|r|", "abs"):
        if abs(x) < 1e-4:
            return complex(t * t * (1.0 - x * x / 4.0 + x**4 / 72.0))
        return complex(2.0 * ((math.cos(x) - 1.0) / a**2 + t * math.sin(x) / a))
    raise ValueError("weight must be '1' or '|r|'")


def fejer_window(a: float, t: float) -> float:
    """t*W_1(a) - W_|r|(a) = 2(1 - cos(at))/a^2, the kernel of the linear-growth term."""
    x = a * t
    if abs(x) < 1e-4:
        return t * t * (1.0 - x * x / 12.0 + x**4 / 360.0)
    return 2.0 * (1.0 - math.cos(x)) / (a * a)


# ----------------------------------------------------------------------
# growth fitting
# ----------------------------------------------------------------------


def fit_growth_exponent(
    samples: Sequence[tuple[float, float]], window: tuple[float, float]
) -> GrowthFit:
    """Least-squares slope of log y vs log t inside the window."""
    t_min, t_max = window
    if not t_min < t_max:
        raise ValueError("window must satisfy t_min < t_max")
    ts, ys = [], []
    for t, y in samples:
        if t_min <= t <= t_max:
            ts.append(t)
            ys.append(y)
    if len(ts) < 8:
        raise InsufficientSamples(f"need >= 8 samples in window, got {len(ts)}")
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.any(np.diff(ts) <= 0):
        raise ValueError("sample times must be strictly increasing")
    if np.any(ys <= 0):
        raise NonPositiveValue("all y values must be positive for a log-log fit")
    lt, ly = np.log(ts), np.log(ys)
    slope, intercept = np.polyfit(lt, ly, 1)
    resid = ly - (slope * lt + intercept)
    ss_res = float(np.dot(resid, resid))
    ss_tot = float(np.dot(ly - ly.mean(), ly - ly.mean()))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return GrowthFit(float(slope), float(np.exp(intercept)), min(r2, 1.0), (t_min, t_max))


def envelope_maxima(
    ts: Sequence[float], ys: Sequence[float]
) -> list[tuple[float, float]]:
    """Local maxima of |y| over a scan, for fitting oscillating signals.

    Scans of oscillatory quantities pass through near-zeros; the power law
    claimed for them concerns the envelope, so fits run on these maxima.
    """
    ts = np.asarray(ts, dtype=float)
    ys = np.abs(np.asarray(ys, dtype=float))
    out = []
    for i in range(1, len(ts) - 1):
        if ys[i] >= ys[i - 1] and ys[i] >= ys[i + 1] and ys[i] > 0:
            out.append((float(ts[i]), float(ys[i])))
    if not out:  # monotone signal: keep everything
        out = [(float(t), float(y)) for t, y in zip(ts, ys) if y > 0]
    return out


# ----------------------------------------------------------------------
# principal values
# ----------------------------------------------------------------------


def principal_value_1d(
    f: Callable[[float], float], s0: float, halfwidth: float, rel_tol: float = 1e-8
) -> float:
    """PV int_{s0-h}^{s0+h} f(s)/(s-s0) ds by symmetric subtraction."""
    if halfwidth <= 0:
        raise ValueError("halfwidth must be positive")

    def g(u):
        return (f(s0 + u) - f(s0 - u)) / u

    val, err = integrate.quad(g, 0.0, halfwidth, epsrel=rel_tol, epsabs=0.0, limit=200)
    _check_quad(val, err, rel_tol, "principal_value_1d")
    return val


def pv_integrate(
    f: Callable[[float], float],
    pole: float,
    lo: float,
    hi: float,
    rel_tol: float = 1e-8,
    window_frac: float = 0.1,
) -> float:
    """PV int_lo^hi f(s)/(s-pole) ds; symmetric window of 10% local scale at the pole."""
    if not (lo < pole < hi):
        raise ValueError("pole must lie inside (lo, hi)")
    delta = window_frac * min(pole - lo, hi - pole)
    core = principal_value_1d(f, pole, delta, rel_tol)
    left = integrate.quad(
        lambda s: f(s) / (s - pole), lo, pole - delta, epsrel=rel_tol, limit=200
    )[0]
    right = integrate.quad(
        lambda s: f(s) / (s - pole), pole + delta, hi, epsrel=rel_tol, limit=200
    )[0]
    return core + left + right


# ----------------------------------------------------------------------
# derivative helpers
# ----------------------------------------------------------------------


def _complex_step_ok(g: Callable) -> bool:
    """True when g is real on the reals and complex-step reproduces a coarse FD slope."""
    try:
        with _quiet():
            ref = complex(g(np.float64(0.3)))
            if abs(ref.imag) > 1e-14 * (1.0 + abs(ref)):
                return False
            cs = np.imag(complex(g(np.complex128(0.3 + 1j * _CS_STEP)))) / _CS_STEP
            fd = (complex(g(0.3 + 1e-4)).real - complex(g(0.3 - 1e-4)).real) / 2e-4
        scale = max(abs(fd), abs(ref), 1e-30)
        return np.isfinite(cs) and abs(cs - fd) <= 1e-2 * scale
    except Exception:
        return False


class _SmoothFn:
    """Scalar smooth function on [0, oo) with first/second derivatives.

    Real-analytic amplitudes get machine-exact d1 via complex step and
    ~1e-10 d2 via differenced complex steps; anything else (including
    complex-valued amplitudes) falls back to central differences.
    """

    def __init__(self, g: Callable):
        self.g = g
        self.complex_step = _complex_step_ok(g)

    def value(self, v: float) -> complex:
        return complex(self.g(v))

    def d1(self, v: float) -> complex:
        if self.complex_step:
            return float(np.imag(self.g(v + 1j * _CS_STEP)) / _CS_STEP)
        h = _FD_STEP * max(1.0, abs(v))
        if v < h:
            return (-3 * self.value(v) + 4 * self.value(v + h) - self.value(v + 2 * h)) / (
                2 * h
            )
        return (self.value(v + h) - self.value(v - h)) / (2 * h)

    def d2(self, v: float) -> complex:
        if self.complex_step:
            h = 1e-5 * max(1.0, abs(v))
            if v < h:
                return (-3 * self.d1(v) + 4 * self.d1(v + h) - self.d1(v + 2 * h)) / (2 * h)
            return (self.d1(v + h) - self.d1(v - h)) / (2 * h)
        h = 1e-4 * max(1.0, abs(v))
        vv = max(v, h)
        return (self.value(vv + h) - 2 * self.value(vv) + self.value(vv - h)) / (h * h)


# ----------------------------------------------------------------------
# the engine
# ----------------------------------------------------------------------


def _check_quad(val, err, rel_tol, where):
    scale = abs(val) if abs(val) > 0 else 1.0
    if not np.isfinite(val):
        raise NonConvergent(f"{where}: non-finite result")
    if err > 200.0 * rel_tol * scale + 1e-13:
        raise NonConvergent(f"{where}: error estimate {err:.2e} vs value {scale:.2e}")


def _cquad(f, a, b, rel_tol, limit=300, **kw):
    with _quiet():
        re, re_err = integrate.quad(
            lambda x: np.real(f(x)), a, b, epsrel=rel_tol, epsabs=1e-300, limit=limit, **kw
        )
        im, im_err = integrate.quad(
            lambda x: np.imag(f(x)), a, b, epsrel=rel_tol, epsabs=1e-300, limit=limit, **kw
        )
    return re + 1j * im, re_err + im_err


def _sinc(x):
    """sin(x)/x, safe at 0, complex-capable."""
    if np.ndim(x) == 0:
        if abs(x) < 1e-6:
            return 1.0 - x * x / 6.0
        return np.sin(x) / x
    x = np.asarray(x)
    small = np.abs(x) < 1e-6
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(xs) / xs)


def _j1_over_x(x):
    """j1(x)/x = sin(x)/x^3 - cos(x)/x^2, even, safe at 0, complex-capable."""
    if np.ndim(x) == 0:
        if abs(x) < 1e-4:
            return 1.0 / 3.0 - x * x / 30.0 + x**4 / 840.0
        return (np.sin(x) / x - np.cos(x)) / (x * x)
    x = np.asarray(x)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    series = 1.0 / 3.0 - x * x / 30.0 + x**4 / 840.0
    full = (np.sin(xs) / xs - np.cos(xs)) / (xs * xs)
    return np.where(small, series, full)


def _decay_cutoff(weighted: Callable, rel_tol: float):
    """Smallest probe point beyond which |p^q a(p)| < rel_tol * peak, or None."""
    ps = np.geomspace(1e-3, _P_PROBE_MAX, 120)
    with _quiet():
        vals = np.abs(np.asarray([weighted(p) for p in ps], dtype=complex))
    # overflow of e^{+beta*omega}-style factors at huge p reads as decayed
    vals = np.nan_to_num(vals, nan=0.0, posinf=np.inf)
    peak = vals[np.isfinite(vals)].max() if np.any(np.isfinite(vals)) else np.inf
    if not np.isfinite(peak):
        return None
    if peak == 0.0:
        return 1.0
    thresh = rel_tol * peak * 1e-2
    idx = np.nonzero(vals > thresh)[0]
    if len(idx) == 0:
        return 1.0
    last = idx[-1]
    if last >= len(ps) - 2:
        return None  # no decay within probe range
    return float(ps[last + 1])


def oscillatory_shell_integral(
    amplitude: Callable,
    sigma: int,
    mass: float,
    time: float,
    radius: float = 0.0,
    power: int = 2,
    kernel: str = "sinc",
    rel_tol: float = 1e-8,
    method: str = "auto",
) -> complex:
    """int_0^oo dp p^power a(p) K(p*radius) e^{i sigma omega_p time}.

    kernel 'sinc' pairs with power 2, 'j1' with power 3 (the two angular
    reductions of isotropic 3D integrals).  The j1 case is rewritten as
    p^4 [r * a * j1(pr)/(pr)] so the effective amplitude stays even in p.
    """
    if not (1e-14 < rel_tol < 1e-2):
        raise InvalidTolerance(f"rel_tol {rel_tol} outside (1e-14, 1e-2)")
    m = float(mass)
    r = float(radius)
    t = float(time)

    if kernel == "sinc":
        if power != 2:
            raise ValueError("sinc kernel expects power 2")
        q_eff = 2

        def a_eff(p):
            return amplitude(p) * (_sinc(p * r) if r != 0.0 else 1.0)

    elif kernel == "j1":
        if power != 3:
            raise ValueError("j1 kernel expects power 3")
        if r == 0.0:
            return 0.0 + 0.0j  # j1(0) = 0
        q_eff = 4

        def a_eff(p):
            return amplitude(p) * r * _j1_over_x(p * r)

    else:
        raise ValueError("kernel must be 'sinc' or 'j1'")

    def weighted(p):
        return p**q_eff * a_eff(p)

    cut = _decay_cutoff(weighted, rel_tol)

    if t == 0.0:
        return _equal_time_integral(amplitude, a_eff, q_eff, r, cut, rel_tol)
    if method == "panels":
        if cut is None:
            raise NonConvergent("panel path needs a decaying amplitude")
        return _panel_integral(weighted, sigma, m, t, cut)
    use_direct = method == "direct" or (method == "auto" and cut is not None and t < 1.0)
    if use_direct:
        if cut is None:
            raise NonConvergent("direct path needs a decaying amplitude")
        val, err = _cquad(
            lambda p: weighted(p) * np.exp(1j * sigma * np.sqrt(p * p + m * m) * t),
            0.0,
            cut,
            rel_tol,
            limit=max(300, int(40 * t) + 100),
        )
        _check_quad(val, err, rel_tol, "oscillatory_shell_integral[direct]")
        return val
    return _w_substitution_integral(a_eff, q_eff, sigma, m, t, rel_tol, p_cut=cut)


_PANEL_NODES = np.polynomial.legendre.leggauss(12)


def _panel_integral(weighted, sigma, m, t, p_cut):
    """Composite Gauss-Legendre resolving the phase, vectorized amplitude.

    Twelve nodes per <= pi/2 of phase gives machine-level accuracy for
    smooth rapidly-decaying amplitudes at any t; used for the package's own
    vectorized integrands inside time scans.
    """
    n_panels = int(np.ceil(p_cut * max(t, 1.0) / np.pi * 2.0)) + 16
    n_panels = min(n_panels, 400_000)
    edges = np.linspace(0.0, p_cut, n_panels + 1)
    x, wts = _PANEL_NODES
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    nodes = (mids[:, None] + half * x[None, :]).ravel()
    weights = np.broadcast_to(half * wts[None, :], (n_panels, len(wts))).ravel()
    with _quiet():
        vals = weighted(nodes) * np.exp(1j * sigma * np.sqrt(nodes * nodes + m * m) * t)
    return complex(np.dot(weights, vals))


def _equal_time_integral(amplitude, a_eff, q_eff, r, cut, rel_tol):
    if cut is not None:
        val, err = _cquad(a_eff if q_eff == 0 else (lambda p: p**q_eff * a_eff(p)),
                          0.0, cut, rel_tol)
        _check_quad(val, err, rel_tol, "equal_time_integral")
        return val
    if r == 0.0:
        raise NonConvergent("amplitude does not decay and no sinc oscillation at r=0")
    # p^2 a sinc(pr) = p a(p) sin(pr)/r; subtract the constant tail of p*a(p)
    if q_eff != 2:
        raise NonConvergent("slow-decay equal-time path only supports the sinc kernel")

    def f(p):
        return p * amplitude(p)

    c_inf = complex(f(0.5e6))
    c_chk = complex(f(1.0e6))
    if abs(c_chk - c_inf) > 1e-3 * (abs(c_inf) + 1e-300):
        raise NonConvergent("amplitude tail is neither decaying nor constant")

    def residual(p):
        return f(p) - c_inf

    with _quiet():
        re = integrate.quad(
            lambda p: np.real(residual(p)), 0.0, np.inf, weight="sin", wvar=r,
            limit=400, limlst=200,
        )
        im = integrate.quad(
            lambda p: np.imag(residual(p)), 0.0, np.inf, weight="sin", wvar=r,
            limit=400, limlst=200,
        )
    _check_quad(re[0] + 1j * im[0], re[1] + im[1], rel_tol, "equal_time_integral[qawf]")
    # Abel: int_0^oo sin(pr) dp = 1/r
    return (re[0] + 1j * im[0] + c_inf / r) / r


def _w_substitution_integral(a_eff, q_eff, sigma, m, t, rel_tol, p_cut=None):
    """Substitution w = (omega - m) t, then constant split + double IBP.

    I = t^{-(q+1)/2} e^{i sigma m t} [ g(0) M_mu + R ],  mu = (q-1)/2,
    g(v) = (v+2m)^{(q-1)/2} (v+m) a_eff(p(v)),  p(v) = sqrt(v(v+2m)).
    """
    mu = (q_eff - 1) / 2.0

    def g_raw(v):
        p = np.sqrt(v * (v + 2.0 * m))
        return (v + 2.0 * m) ** mu * (v + m) * a_eff(p)

    g = _SmoothFn(g_raw)
    g0 = g.value(0.0)

    def C(v):
        return (
            mu * (mu - 1.0) * (g.value(v) - g0)
            + 2.0 * mu * v * g.d1(v)
            + v * v * g.d2(v)
        )

    w1 = 8.0 * np.pi
    if mu == 0.5:
        # R = - int_0^oo w^{-3/2} C(w/t) e^{i sigma w} dw; integrable at both ends
        # (C ~ v near 0, and the leading large-v parts of C cancel exactly).
        head, err_h = _cquad(
            lambda w: w ** (-1.5) * C(w / t) * np.exp(1j * sigma * w),
            0.0,
            w1,
            rel_tol,
        )
        scale0 = max(abs(head), abs(g0), 1e-30)
        tail_osc, err_t = _fourier_tail(
            lambda w: w ** (-1.5) * C(w / t), w1, sigma, rel_tol,
            epsabs=0.5 * rel_tol * scale0,
        )
        R = -(head + tail_osc)
    elif mu == 1.5:
        C_inf = -0.75 * g0  # g, v g', v^2 g'' all decay
        head, err_h = _cquad(
            lambda w: w ** (-0.5) * (C(w / t) - C_inf) * np.exp(1j * sigma * w),
            0.0,
            w1,
            rel_tol,
        )
        scale0 = max(abs(head), abs(g0), 1e-30)
        tail, err_t = _fourier_tail(
            lambda w: w ** (-0.5) * (C(w / t) - C_inf), w1, sigma, rel_tol,
            epsabs=0.5 * rel_tol * scale0,
        )
        R = -(head + tail + C_inf * _moment(-0.5, sigma))
    else:
        raise ValueError(f"unsupported moment index mu={mu}")

    total = g0 * _moment(mu, sigma) + R
    value = t ** (-(q_eff + 1) / 2.0) * np.exp(1j * sigma * m * t) * total
    scale = max(abs(total), abs(g0), 1e-300)
    if (err_h + err_t) > 1e3 * rel_tol * scale + 1e-12:
        raise NonConvergent(
            f"w-substitution error estimate {err_h + err_t:.2e} vs scale {scale:.2e}"
        )
    return value


def _fourier_tail(f, w1, sigma, rel_tol, epsabs=None):
    """int_{w1}^oo f(w) e^{i sigma w} dw for decaying f, via QAWF; returns (val, err).

    QUADPACK's QAWF rule works to an absolute tolerance only, so the caller
    passes one scaled to the size of the answer.
    """
    epsabs = 1.49e-8 if epsabs is None else max(epsabs, 1e-14)
    kw = dict(wvar=1.0, limit=400, limlst=300, epsabs=epsabs)
    with _quiet():
        re_c, err1 = integrate.quad(lambda w: np.real(f(w)), w1, np.inf, weight="cos", **kw)
        re_s, err2 = integrate.quad(lambda w: np.real(f(w)), w1, np.inf, weight="sin", **kw)
        im_c, err3 = integrate.quad(lambda w: np.imag(f(w)), w1, np.inf, weight="cos", **kw)
        im_s, err4 = integrate.quad(lambda w: np.imag(f(w)), w1, np.inf, weight="sin", **kw)
    cos_part = re_c + 1j * im_c
    sin_part = re_s + 1j * im_s
    return cos_part + 1j * sigma * sin_part, err1 + err2 + err3 + err4


def integrate_radial_oscillatory(
    integrand: RadialIntegrand, sinc_radius: float = 0.0, rel_tol: float = 1e-8
) -> complex:
    """int_0^oo dp p^2 a(p) sinc(p * sinc_radius) e^{i sigma omega_p t}."""
    if sinc_radius < 0:
        raise ValueError("sinc_radius must be nonnegative")
    return oscillatory_shell_integral(
        integrand.amplitude,
        integrand.phase_sign,
        integrand.mass,
        integrand.time,
        radius=sinc_radius,
        power=2,
        kernel="sinc",
        rel_tol=rel_tol,
    )

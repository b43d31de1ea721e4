"""Closed-form distributional quantities of the reset process.

Everything here is deterministic: direct formulas plus one-dimensional
adaptive quadrature.  Bivariate Gaussian probabilities are reduced to a
single quadrature of a conditional normal CDF against the earlier marginal,
so no bivariate special function is needed.  Semi-infinite integrals against
an exponential weight are mapped to (0, 1) by s = -log(1-q)/lam before
quadrature; integrals whose integrand varies on the sqrt(s) scale are
computed after the substitution s = q**2.
"""

import math

import numpy as np
from scipy.special import ndtr

from ._kernels import _numpy as _ref
from .errors import DomainError, ParameterError, UnsupportedInputError
from .numerics import adaptive_quad
from .params import AsymParams, ModelParams

__all__ = [
    "norm_cdf", "norm_pdf", "norm_sf",
    "sup_cdf_drifted_bm", "sup_sf_drifted_bm",
    "reset_cdf_1d",
    "stationary_pdf", "stationary_cdf", "stationary_sf",
    "alpha_param",
    "joint_cdf", "joint_density", "stationary_joint_cdf",
    "win_min_joint", "inf_window_exact",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_TAIL_CLIP = 40.0  # standard normal mass beyond 40 sigma is < 1e-300


def norm_cdf(x):
    """Standard normal CDF (abs. accuracy below 1e-15 via erf)."""
    out = ndtr(x)
    return float(out) if np.ndim(x) == 0 else out


def norm_pdf(x):
    """Standard normal density."""
    out = np.exp(-0.5 * np.square(x)) / _SQRT_2PI
    return float(out) if np.ndim(x) == 0 else out


def norm_sf(x):
    """Standard normal upper tail, computed as norm_cdf(-x) (no cancellation)."""
    out = ndtr(np.negative(x))
    return float(out) if np.ndim(x) == 0 else out


def sup_cdf_drifted_bm(u, T, c=0.0, sigma=1.0):
    """CDF of sup over [0, T] of W_t - c*t, where Var(W_t) = sigma^2 * t.

    Reflection formula:

        F(u, T) = Phi((u + c T)/(sigma sqrt(T)))
                  - exp(-2 u c / sigma^2) * Psi((u - c T)/(sigma sqrt(T)))

    with F(u, T) = 0 for u <= 0.  The exponential factor is folded into log
    space so the formula stays stable for any sign of c.
    """
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    if not (sigma > 0):
        raise ParameterError(f"need sigma > 0, got {sigma}")
    return _ref.drifted_sup_cdf(u, T, c, sigma)


def sup_sf_drifted_bm(u, T, c=0.0, sigma=1.0):
    """1 - sup_cdf_drifted_bm as a sum of two positive terms (tail-accurate)."""
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    if not (sigma > 0):
        raise ParameterError(f"need sigma > 0, got {sigma}")
    return _ref.drifted_sup_sf(u, T, c, sigma)


def reset_cdf_1d(u, t, params: ModelParams):
    """One-time CDF P(X_t <= u) of the reset process started at fixed x0.

    Last-reset-age decomposition:

        e^{-lam t} Phi((u - x0 + c t)/(sigma sqrt(t)))
        + lam * int_0^t Phi((u - xr + c s)/(sigma sqrt(s))) e^{-lam s} ds

    The integral is evaluated after s = q^2 (the integrand varies on the
    sqrt(s) scale near zero) by adaptive quadrature with abs tol 1e-10.
    """
    if not (t > 0):
        raise ParameterError(f"need t > 0, got {t}")
    if params.stationary_start:
        raise UnsupportedInputError(
            "reset_cdf_1d requires a fixed x0; use stationary_cdf for the "
            "stationary law")
    lam, c, sigma = params.lam, params.c, params.sigma
    x0 = params.fixed_x0()
    head = math.exp(-lam * t) * float(ndtr((u - x0 + c * t) / (sigma * math.sqrt(t))))
    a = u - params.xr

    def integrand(q):
        s = q * q
        return 2.0 * q * np.exp(-lam * s) * ndtr((a + c * s) / (sigma * q))

    tail = lam * adaptive_quad(integrand, 0.0, math.sqrt(t), tol=1e-10,
                               vectorized=True).value
    return min(1.0, max(0.0, head + tail))


def _stationary_rates(params: ModelParams):
    """(beta, rate above xr, rate below xr), beta = sqrt(c^2 + 2 lam sigma^2).

    Orientation follows the exponential-age representation
    X_inf = xr + sqrt(S) W_1 - c S (S ~ Exp(lam)): a downward drift (c > 0)
    lightens the upper flank, so the decay rate above the reset level is
    (beta + c)/sigma^2 and the one below is (beta - c)/sigma^2.
    """
    beta = math.sqrt(params.c * params.c + 2.0 * params.lam * params.sigma ** 2)
    s2 = params.sigma ** 2
    return beta, (beta + params.c) / s2, (beta - params.c) / s2


def stationary_pdf(x, params: ModelParams):
    """Density of the stationary law: asymmetric Laplace peaked at xr.

    f(x) = lam / beta * exp(-c (x - xr)/sigma^2 - beta |x - xr|/sigma^2),
    beta = sqrt(c^2 + 2 lam sigma^2); the exact exponential mixture of the
    Gaussian kernel over the last-reset age.
    """
    beta, a_up, a_dn = _stationary_rates(params)
    x = np.asarray(x, dtype=float)
    d = x - params.xr
    out = params.lam / beta * np.exp(np.where(d >= 0.0, -a_up * d, a_dn * d))
    return float(out) if out.ndim == 0 else out


def stationary_cdf(x, params: ModelParams):
    """CDF of the stationary law (exact piecewise-exponential antiderivative)."""
    beta, a_up, a_dn = _stationary_rates(params)
    p_up = (beta - params.c) / (2.0 * beta)
    x = np.asarray(x, dtype=float)
    d = x - params.xr
    out = np.where(d >= 0.0,
                   1.0 - p_up * np.exp(-a_up * np.maximum(d, 0.0)),
                   (1.0 - p_up) * np.exp(a_dn * np.minimum(d, 0.0)))
    return float(out) if out.ndim == 0 else out


def stationary_sf(x, params: ModelParams):
    """Upper tail of the stationary law; for x >= xr this is exactly
    prefactor * exp(-alpha (x - xr)) with the constants of alpha_param."""
    beta, a_up, a_dn = _stationary_rates(params)
    p_up = (beta - params.c) / (2.0 * beta)
    x = np.asarray(x, dtype=float)
    d = x - params.xr
    out = np.where(d >= 0.0,
                   p_up * np.exp(-a_up * np.maximum(d, 0.0)),
                   1.0 - (1.0 - p_up) * np.exp(a_dn * np.minimum(d, 0.0)))
    return float(out) if out.ndim == 0 else out


def alpha_param(params: ModelParams) -> AsymParams:
    """Upper-tail rate alpha = (beta + c)/sigma^2 and tail prefactor
    (beta - c)/(2 beta) of the stationary law; alpha = sqrt(2 lam)/sigma
    when the drift vanishes."""
    beta, a_up, _ = _stationary_rates(params)
    return AsymParams(alpha=a_up, prefactor=(beta - params.c) / (2.0 * beta))


def _bvn_drift(s, t, a, b, c, sigma, tol=1e-9):
    """P(W_s - c s <= a, W_t - c t <= b) for 0 < s < t.

    Conditions on the standardized value y of W_s and integrates the
    conditional normal CDF of the remaining increment against phi(y).
    """
    za = (a + c * s) / (sigma * math.sqrt(s))
    if za <= -_TAIL_CLIP:
        return 0.0
    hi = min(za, _TAIL_CLIP)
    rs = sigma * math.sqrt(s)
    rg = sigma * math.sqrt(t - s)
    shift = b + c * t

    def integrand(y):
        return np.exp(-0.5 * y * y) / _SQRT_2PI * ndtr((shift - rs * y) / rg)

    return adaptive_quad(integrand, -_TAIL_CLIP, hi, tol=tol,
                         vectorized=True).value


def joint_cdf(s, t, u, w, params: ModelParams, tol=1e-8):
    """Two-time CDF P(X_s <= u, X_t <= w) for 0 <= s < t, fixed x0.

    Four contributions, split by whether resets occur before s and in
    (s, t]: no resets at all; last reset before s persisting past t; and the
    product term where a reset in (s, t] decouples the two epochs.
    """
    if not (0 <= s < t):
        raise ParameterError(f"need 0 <= s < t, got s={s}, t={t}")
    if params.stationary_start:
        raise UnsupportedInputError(
            "joint_cdf requires a fixed x0; use stationary_joint_cdf")
    lam, c, sigma = params.lam, params.c, params.sigma
    x0 = params.fixed_x0()
    xr = params.xr
    if s == 0.0:
        return (reset_cdf_1d(w, t, params) if x0 <= u else 0.0)

    gap = t - s
    no_reset = math.exp(-lam * t) * _bvn_drift(s, t, u - x0, w - x0, c, sigma,
                                               tol=0.1 * tol)

    def c_integrand(x):
        return np.array([
            math.exp(-lam * xi) * _bvn_drift(xi, gap + xi, u - xr, w - xr,
                                             c, sigma, tol=0.1 * tol)
            for xi in np.atleast_1d(x)
        ])

    straddle = math.exp(-lam * gap) * lam * adaptive_quad(
        c_integrand, 0.0, s, tol=tol, vectorized=True).value

    def age_integrand(q, level):
        x = q * q
        return 2.0 * q * np.exp(-lam * x) * ndtr(
            (level - xr + c * x) / (sigma * q))

    left = math.exp(-lam * s) * float(ndtr((u - x0 + c * s) / (sigma * math.sqrt(s))))
    left += lam * adaptive_quad(lambda q: age_integrand(q, u), 0.0,
                                math.sqrt(s), tol=0.1 * tol, vectorized=True).value
    right = lam * adaptive_quad(lambda q: age_integrand(q, w), 0.0,
                                math.sqrt(gap), tol=0.1 * tol, vectorized=True).value
    return min(1.0, max(0.0, no_reset + straddle + left * right))


def _gauss_kernel(v, s, c, sigma):
    """Density of W_s - c*s at v."""
    v = np.asarray(v, dtype=float)
    s = np.asarray(s, dtype=float)
    return np.exp(-np.square(v + c * s) / (2.0 * sigma * sigma * s)) / (
        sigma * np.sqrt(2.0 * math.pi * s))


def joint_density(s, t, u, w, params: ModelParams, tol=1e-10):
    """Joint density of (X_s, X_t), 0 < s < t, fixed x0.

    Same three-part structure as joint_cdf with Gaussian kernels in place
    of CDFs; the straddling-reset term factorizes because the time gap in
    the second kernel is constant in the reset age.
    """
    if not (0 < s < t):
        raise ParameterError(f"need 0 < s < t, got s={s}, t={t}")
    if params.stationary_start:
        raise UnsupportedInputError("joint_density requires a fixed x0")
    lam, c, sigma = params.lam, params.c, params.sigma
    x0 = params.fixed_x0()
    xr = params.xr
    gap = t - s

    def age_kernel_integral(upper, a):
        # int_0^upper p_x(a) e^{-lam x} dx, via x = q^2
        def integrand(q):
            x = q * q
            return 2.0 * q * np.exp(-lam * x) * _gauss_kernel(a, x, c, sigma)

        return adaptive_quad(integrand, 0.0, math.sqrt(upper), tol=tol,
                             vectorized=True).value

    no_reset = math.exp(-lam * t) * float(
        _gauss_kernel(u - x0, s, c, sigma) * _gauss_kernel(w - u, gap, c, sigma))
    straddle = (math.exp(-lam * gap) * lam *
                float(_gauss_kernel(w - u, gap, c, sigma)) *
                age_kernel_integral(s, u - xr))
    left = (math.exp(-lam * s) * float(_gauss_kernel(u - x0, s, c, sigma)) +
            lam * age_kernel_integral(s, u - xr))
    right = lam * age_kernel_integral(gap, w - xr)
    return max(0.0, no_reset + straddle + left * right)


def stationary_joint_cdf(delta, u, w, params: ModelParams, tol=1e-8):
    """Stationary two-time CDF P(Y_0 <= u, Y_delta <= w).

    Exponential-age representation: with S ~ Exp(lam),

        e^{-lam delta} P(W^{(c)}_S <= u - xr, W^{(c)}_{delta+S} <= w - xr)
        + P(X_inf <= u) * P(W^{(c)}_S <= w - xr, S <= delta).

    The S-average is a semi-infinite integral mapped to (0,1) by
    s = -log(1-q)/lam.
    """
    if not (delta > 0):
        raise ParameterError(f"need delta > 0, got {delta}")
    lam, c, sigma = params.lam, params.c, params.sigma
    xr = params.xr

    def joint_integrand(q):
        out = np.empty_like(np.atleast_1d(q))
        for i, qi in enumerate(np.atleast_1d(q)):
            si = -math.log1p(-qi) / lam
            out[i] = _bvn_drift(si, si + delta, u - xr, w - xr, c, sigma,
                                tol=0.1 * tol)
        return out

    term1 = math.exp(-lam * delta) * adaptive_quad(
        joint_integrand, 0.0, 1.0, tol=tol, vectorized=True).value

    def window_integrand(q):
        x = q * q
        return 2.0 * q * np.exp(-lam * x) * ndtr((w - xr + c * x) / (sigma * q))

    term2 = float(stationary_cdf(u, params)) * lam * adaptive_quad(
        window_integrand, 0.0, math.sqrt(delta), tol=0.1 * tol,
        vectorized=True).value
    return min(1.0, max(0.0, term1 + term2))


def win_min_joint(s, delta, u, w, c, sigma, tol=1e-8):
    """P(inf over [s-delta, s] of (W_t - c t) > u, W_{s-delta} > w).

    Conditions on the value x of the driving BM at the window start: the
    window clears u iff the continuation stays above it, which by reflection
    is one minus a sup-CDF with the drift reversed.

    When the effective lower endpoint z_lo of the standardized integral is
    positive, the Gaussian factor phi(z_lo)*exp(-z_lo*h - h^2/2) is pulled
    out so the quadrature tolerance applies to an O(1) reduced integrand;
    the returned value then carries the correct relative accuracy however
    deep in the tail it lies.
    """
    if not (0 < delta < s):
        raise ParameterError(f"need 0 < delta < s, got delta={delta}, s={s}")
    if not (sigma > 0):
        raise ParameterError(f"need sigma > 0, got {sigma}")
    age = s - delta
    rs = sigma * math.sqrt(age)
    lo = max(w, u + c * age)
    zlo = lo / rs
    if zlo >= _TAIL_CLIP:
        return 0.0

    if zlo > 0.0:
        # tilted form: integral = phi(zlo) * int_0^H e^{-zlo h - h^2/2} G(h) dh
        span = math.sqrt(zlo * zlo + 100.0) - zlo  # zlo*H + H^2/2 = 50

        def reduced(h):
            start_gap = rs * (zlo + h) - c * age - u
            return (np.exp(-zlo * h - 0.5 * h * h) *
                    _ref.drifted_sup_cdf(start_gap, delta, -c, sigma))

        j = adaptive_quad(reduced, 0.0, span, tol=1e-10, vectorized=True).value
        return math.exp(-0.5 * zlo * zlo) / _SQRT_2PI * j

    zlo = max(zlo, -_TAIL_CLIP)

    def integrand(y):
        start_gap = rs * y - c * age - u
        return (np.exp(-0.5 * y * y) / _SQRT_2PI *
                _ref.drifted_sup_cdf(start_gap, delta, -c, sigma))

    return adaptive_quad(integrand, zlo, _TAIL_CLIP, tol=tol,
                         vectorized=True).value


def inf_window_exact(T, Delta, u, v, params: ModelParams, tol=1e-8):
    """P(inf over [T, T+Delta] of X > u, X_T > v) for u > xr, fixed x0.

    Conditions on the age of the last reset before T; a reset inside the
    window would pin the process at xr < u, so only the no-window-reset
    event survives:

        e^{-lam (T+Delta)} * G(T+Delta; x0 shift)
        + e^{-lam Delta} * int_0^T lam e^{-lam s} G(s+Delta; xr shift) ds

    where G is win_min_joint with the start-point constraint expressed on
    the driving (undrifted) BM.
    """
    if not (T > 0 and Delta > 0):
        raise ParameterError(f"need T > 0 and Delta > 0, got T={T}, Delta={Delta}")
    if not (u > params.xr):
        raise DomainError(
            f"decomposition requires u > xr, got u={u}, xr={params.xr}")
    if params.stationary_start:
        raise UnsupportedInputError("inf_window_exact requires a fixed x0")
    lam, c, sigma = params.lam, params.c, params.sigma
    x0 = params.fixed_x0()
    xr = params.xr
    v_eff = max(u, v)  # X_T >= inf of the window > u already forces X_T > u

    term1 = math.exp(-lam * (T + Delta)) * win_min_joint(
        T + Delta, Delta, u - x0, v_eff - x0 + c * T, c, sigma, tol=0.1 * tol)

    def point(si):
        return lam * math.exp(-lam * si) * win_min_joint(
            si + Delta, Delta, u - xr, v_eff - xr + c * si, c, sigma,
            tol=0.1 * tol)

    def integrand(svec):
        return np.array([point(si) for si in np.atleast_1d(svec)])

    # the stated tolerance governs at ordinary scales; deep in the tail the
    # tolerance follows the integrand's own magnitude so ratio checks
    # against the asymptotics stay meaningful
    pilot = max(point(T), point(0.5 * T), point(0.25 * T)) * T
    tol_eff = min(tol, max(1e-6 * pilot, 1e-300))
    term2 = math.exp(-lam * Delta) * adaptive_quad(
        integrand, 0.0, T, tol=tol_eff, vectorized=True).value
    return min(1.0, max(0.0, term1 + term2))

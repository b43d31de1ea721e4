"""Large-level asymptotics for the supremum and infimum-window tails.

Each evaluator enforces the regime it was proved in (unit volatility,
origin start, or zero drift where required) and tags its output with the
regime that produced it; nothing is silently rescaled beyond the proved
hypotheses.
"""

import math
from dataclasses import dataclass

import numpy as np

from .analytic import norm_cdf, norm_pdf, norm_sf
from .errors import (DomainError, ParameterError, UncoveredCaseError,
                     UnsupportedRegimeError)
from .numerics import adaptive_quad
from .params import ModelParams

__all__ = [
    "AsymValue", "sup_tail_asym", "K_const", "L_func", "inf_window_asym",
    "stationary_sup_tail_asym", "stationary_joint_asym",
    "stationary_joint_z0_bracket", "first_reset_layer_tail",
]


@dataclass(frozen=True)
class AsymValue:
    """An asymptotic value tagged with the case that produced it."""

    value: float
    regime: str

    def __post_init__(self):
        if self.value < 0:
            raise ParameterError(f"asymptotic value must be >= 0, got {self.value}")


def _require_unit_sigma_origin(params: ModelParams, need_x0=True):
    if params.sigma != 1.0:
        raise UnsupportedRegimeError(
            f"result proved for sigma = 1 only, got sigma={params.sigma}; "
            "no rescaling is applied")
    if need_x0 and (params.stationary_start or params.fixed_x0() != 0.0):
        raise UnsupportedRegimeError(
            f"result proved for fixed x0 = 0 only, got x0={params.x0!r}")


def sup_tail_asym(u, T, params: ModelParams) -> AsymValue:
    """Leading-order tail of P(sup over [0, T] > u), unit sigma, x0 = 0.

    Nonpositive reset level: 2 e^{-lam T} Psi((u + c T)/sqrt(T)).
    Positive reset level: 4 lam T^2 e^{-lam T} u^{-2}
    Psi((u + c T - xr)/sqrt(T)); the extra u^{-2} comes from the vanishing
    window in which an early reset can still reach u from the shifted level.
    """
    _require_unit_sigma_origin(params)
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    lam, c, xr = params.lam, params.c, params.xr
    rt = math.sqrt(T)
    if xr <= 0:
        value = 2.0 * math.exp(-lam * T) * norm_sf((u + c * T) / rt)
        return AsymValue(value=value, regime="T3-i")
    if not (u > 0):
        raise ParameterError(f"positive-reset-level case needs u > 0, got {u}")
    value = (4.0 * lam * T * T * math.exp(-lam * T) / (u * u)
             * norm_sf((u + c * T - xr) / rt))
    return AsymValue(value=value, regime="T3-ii")


def K_const(c, Delta):
    """Window constant 2/sqrt(Delta) phi(c sqrt(Delta)) - 2c Psi(c sqrt(Delta)),
    strictly positive for every drift (Mills' bound)."""
    if not (Delta > 0):
        raise ParameterError(f"need Delta > 0, got {Delta}")
    x = c * math.sqrt(Delta)
    k = 2.0 / math.sqrt(Delta) * norm_pdf(x) - 2.0 * c * norm_sf(x)
    if not (k > 0.0):
        raise ParameterError(
            f"window constant underflowed to {k} at c={c}, Delta={Delta}")
    return k


def L_func(y):
    """Boundary-layer correction: 1 on (-inf, 0], e^{-y}(1+y) beyond."""
    if y <= 0.0:
        return 1.0
    return math.exp(-y) * (1.0 + y)


def inf_window_asym(u, r, T, Delta, params: ModelParams) -> AsymValue:
    """Leading-order tail of P(inf over [T, T+Delta] > u, X_T > v) with
    v = u + r/(u + c T), unit sigma, fixed x0.

    Starting below the reset level the dominant scenario is a late last
    reset (cubic power); starting at or above it the no-reset path from x0
    dominates (linear power).
    """
    if params.sigma != 1.0:
        raise UnsupportedRegimeError(
            f"result proved for sigma = 1 only, got sigma={params.sigma}")
    if params.stationary_start:
        raise UnsupportedRegimeError("result proved for fixed x0 only")
    if r < 0:
        raise ParameterError(f"need r >= 0, got {r}")
    if not (T > 0 and Delta > 0):
        raise ParameterError("need T > 0 and Delta > 0")
    if not (u > 0):
        raise ParameterError(f"need u > 0, got {u}")
    lam, c, xr = params.lam, params.c, params.xr
    x0 = params.fixed_x0()
    k = K_const(c, Delta)
    lf = L_func(r / T)
    rt = math.sqrt(T)
    if x0 < xr:
        value = (2.0 * lam * math.exp(-lam * (T + Delta)) * k * lf
                 * T ** 3 / u ** 3 * norm_sf((u - xr + c * T) / rt))
        return AsymValue(value=value, regime="T4-i")
    value = (math.exp(-lam * (T + Delta)) * k * lf * T / u
             * norm_sf((u - x0 + c * T) / rt))
    return AsymValue(value=value, regime="T4-ii")


def _stationary_bracket(T, params: ModelParams):
    """Phi(alpha sigma sqrt(T)) + lam * int_0^T Phi(alpha sigma sqrt(s)) ds."""
    alpha = math.sqrt(2.0 * params.lam) / params.sigma
    asig = alpha * params.sigma

    def integrand(q):
        return 2.0 * q * np.asarray(norm_cdf(asig * q))

    integral = adaptive_quad(integrand, 0.0, math.sqrt(T), tol=1e-10,
                             vectorized=True).value
    return norm_cdf(asig * math.sqrt(T)) + params.lam * integral, alpha


def stationary_sup_tail_asym(u, T, params: ModelParams) -> AsymValue:
    """Tail of the stationary supremum (zero drift):

        e^{alpha xr} [Phi(alpha sigma sqrt(T))
                      + lam int_0^T Phi(alpha sigma sqrt(s)) ds] e^{-alpha u},

    alpha = sqrt(2 lam)/sigma.
    """
    if params.c != 0.0:
        raise UnsupportedRegimeError(
            f"stationary supremum asymptotics require c = 0, got c={params.c}")
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    bracket, alpha = _stationary_bracket(T, params)
    value = math.exp(alpha * params.xr) * bracket * math.exp(-alpha * u)
    return AsymValue(value=value, regime="T6")


def stationary_joint_asym(u, z, T, params: ModelParams) -> AsymValue:
    """Joint tail of (sup over [0, T], terminal value) of the stationary
    zero-drift process, for the terminal constraint Y_T > u z.

    z < 0 reproduces the plain supremum tail; 0 < z < 1 keeps only the
    no-reset bracket factor; z >= 1 is an exact identity (the terminal
    value alone realizes the supremum constraint).  z = 0 is an open case
    and raises; stationary_joint_z0_bracket gives the proven envelope.
    """
    if params.c != 0.0:
        raise UnsupportedRegimeError(
            f"stationary joint asymptotics require c = 0, got c={params.c}")
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    if z == 0.0:
        raise UncoveredCaseError(
            "z = 0 is an open case (only an envelope is known); "
            "see stationary_joint_z0_bracket")
    if z < 0.0:
        base = stationary_sup_tail_asym(u, T, params)
        return AsymValue(value=base.value, regime="T7-zneg")
    alpha = math.sqrt(2.0 * params.lam) / params.sigma
    if z < 1.0:
        value = (math.exp(alpha * params.xr)
                 * norm_cdf(alpha * params.sigma * math.sqrt(T))
                 * math.exp(-alpha * u))
        return AsymValue(value=value, regime="T7-zmid")
    if u * z < params.xr:
        raise DomainError(
            f"exact identity requires u*z >= xr, got u*z={u * z}, xr={params.xr}")
    value = 0.5 * math.exp(-alpha * (u * z - params.xr))
    return AsymValue(value=value, regime="T7-zlarge-exact")


def stationary_joint_z0_bracket(u, T, params: ModelParams):
    """Proven envelope (lower, upper) of the z = 0 joint-tail constant,
    both scaled by e^{-alpha u}."""
    if params.c != 0.0:
        raise UnsupportedRegimeError("bracket requires c = 0")
    bracket, alpha = _stationary_bracket(T, params)
    scale = math.exp(alpha * params.xr) * math.exp(-alpha * u)
    lower = scale * norm_cdf(alpha * params.sigma * math.sqrt(T))
    upper = scale * bracket
    return lower, upper


def first_reset_layer_tail(u, T, params: ModelParams):
    """Quadrature oracle for the positive-reset-level supremum tail.

    Integrates, over first-reset times x inside the shrinking layer
    log(u)^2 / u^2, the no-reset tail of the restarted process on the
    remaining horizon:

        int_0^{log^2 u / u^2} 2 e^{-lam (T-x)}
            Psi((u - xr + c (T-x)) / sqrt(T-x)) lam e^{-lam x} dx.

    Computable at levels far beyond Monte Carlo reach; the positive-level
    asymptotic is its leading term.
    """
    _require_unit_sigma_origin(params)
    if not (params.xr > 0):
        raise DomainError(f"layer oracle applies to xr > 0, got {params.xr}")
    if not (u > max(1.0, params.xr)):
        raise ParameterError(f"need u > max(1, xr), got u={u}")
    lam, c, xr = params.lam, params.c, params.xr
    layer = math.log(u) ** 2 / (u * u)
    if layer >= T / 2.0:
        raise ParameterError(f"layer {layer} not small against T={T}; raise u")

    def integrand(x):
        rem = T - np.asarray(x, dtype=float)
        return (2.0 * np.exp(-lam * rem) * norm_sf((u - xr + c * rem) / np.sqrt(rem))
                * lam * np.exp(-lam * np.asarray(x, dtype=float)))

    scale = float(integrand(0.0)) * layer
    return adaptive_quad(integrand, 0.0, layer, tol=max(1e-8 * scale, 1e-300),
                         vectorized=True).value

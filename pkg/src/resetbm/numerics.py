"""Shared numerical kernels.

Adaptive Gauss-Kronrod quadrature, bisection inversion of monotone
functions, Poisson tail probabilities and golden-section minimization.
All functions are pure and thread-safe.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .errors import BracketError, EvaluationError, ParameterError

__all__ = [
    "QuadResult",
    "adaptive_quad",
    "invert_monotone",
    "poisson_tail",
    "golden_minimize",
]

# Gauss-Kronrod 7-15 pair on [-1, 1].  Odd-indexed nodes are the embedded
# Gauss-7 rule.
_XGK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WGK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_WG = np.array([
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870,
])


@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.abs_error_estimate < 0 or self.evaluations < 1:
            raise ParameterError("invalid QuadResult fields")


def _gk15(f, a, b, vectorized):
    """One Gauss-Kronrod panel on [a, b]: (value, error_estimate)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _XGK
    if vectorized:
        y = np.asarray(f(x), dtype=float)
    else:
        y = np.array([f(xi) for xi in x], dtype=float)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise EvaluationError(f"integrand returned a non-finite value at x={bad!r}",
                              abscissa=float(bad))
    k = half * float(_WGK @ y)
    g = half * float(_WG @ y[1::2])
    return k, abs(k - g)


def adaptive_quad(f, a, b, tol=1e-10, limit=4096, vectorized=False):
    """Integrate f over [a, b] to absolute tolerance tol.

    Bisection-refined Gauss-Kronrod 7-15 panels; the panel with the largest
    error estimate is split first.  With ``vectorized=True`` the integrand is
    called once per panel on an array of 15 abscissae.

    Returns a QuadResult; raises EvaluationError if f produces a non-finite
    value (the offending abscissa is attached to the exception).
    """
    a = float(a)
    b = float(b)
    if not (a < b):
        raise ParameterError(f"need a < b, got a={a}, b={b}")
    if not (tol > 0):
        raise ParameterError(f"need tol > 0, got {tol}")

    value, err = _gk15(f, a, b, vectorized)
    evals = 15
    # heap of (-error, panel_id, value, a, b); ids break ties deterministically
    heap = [(-err, 0, value, a, b)]
    next_id = 1
    total_err = err
    while total_err > tol and len(heap) < limit:
        neg_err, _, v, pa, pb = heapq.heappop(heap)
        pm = 0.5 * (pa + pb)
        if pm <= pa or pm >= pb:  # interval at floating-point resolution
            heapq.heappush(heap, (neg_err, next_id, v, pa, pb))
            next_id += 1
            break
        v1, e1 = _gk15(f, pa, pm, vectorized)
        v2, e2 = _gk15(f, pm, pb, vectorized)
        evals += 30
        heapq.heappush(heap, (-e1, next_id, v1, pa, pm))
        heapq.heappush(heap, (-e2, next_id + 1, v2, pm, pb))
        next_id += 2
        total_err += e1 + e2 - (-neg_err)
    value = math.fsum(item[2] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return QuadResult(value=value, abs_error_estimate=total_err, evaluations=evals)


def invert_monotone(f, target, lo, hi, tol=1e-10):
    """Invert a nondecreasing function by bisection.

    Returns x with bracket width <= tol such that f(x) straddles target.
    Bisection is deliberate: it is robust to flat regions and to kinks.
    """
    lo = float(lo)
    hi = float(hi)
    if not (lo < hi):
        raise ParameterError(f"need lo < hi, got lo={lo}, hi={hi}")
    flo = f(lo)
    fhi = f(hi)
    if not (flo <= target <= fhi):
        raise BracketError(
            f"target {target} outside [f(lo), f(hi)] = [{flo}, {fhi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def poisson_tail(n, mu):
    """P(Poisson(mu) > n), computed via the regularized incomplete gamma.

    The identity P(Poisson(mu) <= n) = Q(n+1, mu) gives the tail as
    P(n+1, mu), which is stable for tails far below machine epsilon of 1.
    """
    if not (mu > 0):
        raise ParameterError(f"need mu > 0, got {mu}")
    if n < 0:
        return 1.0
    return float(gammainc(n + 1, mu))


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_minimize(f, lo, hi, tol=1e-8):
    """Golden-section search for the minimum of a unimodal function.

    Returns (argmin, min) where argmin is the midpoint of the final bracket
    of width <= tol.  Unimodality is assumed, not checked.
    """
    lo = float(lo)
    hi = float(hi)
    if not (lo < hi):
        raise ParameterError(f"need lo < hi, got lo={lo}, hi={hi}")
    if not (tol > 0):
        raise ParameterError(f"need tol > 0, got {tol}")
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1 = f(x1)
    f2 = f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            if x1 >= x2:  # bracket exhausted at float resolution
                break
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            if x2 <= x1:
                break
            f2 = f(x2)
    xm = 0.5 * (lo + hi)
    return xm, f(xm)

# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot kernels.

Mirrors the API of ``_numpy``; selected at import time when available.
All inner loops run without the GIL so callers may thread over chunks.
"""

from libc.math cimport erfc, exp, log, log1p, sqrt

import numpy as np

BACKEND_NAME = "compiled"

cdef double SQRT_HALF = 0.7071067811865476
cdef double LOG_SQRT_2PI = 0.9189385332046727


cdef inline double _log_psi(double z) noexcept nogil:
    # log of the standard normal upper tail; Mills-series branch past the
    # range where erfc underflows (relative error < 1e-13 at the switch)
    cdef double z2, w
    if z < 30.0:
        return log(0.5 * erfc(z * SQRT_HALF))
    z2 = z * z
    w = 1.0 / z2
    return (-0.5 * z2 - log(z) - LOG_SQRT_2PI
            + log1p(w * (-1.0 + w * (3.0 + w * (-15.0 + 105.0 * w)))))


cdef inline double _sup_cdf(double u, double t, double c, double sigma) noexcept nogil:
    cdef double rt, zp, zm, val
    if u <= 0.0:
        return 0.0
    if t <= 0.0:
        return 1.0
    rt = sigma * sqrt(t)
    zp = (u + c * t) / rt
    zm = (u - c * t) / rt
    val = 0.5 * erfc(-zp * SQRT_HALF) - exp(
        -2.0 * u * c / (sigma * sigma) + _log_psi(zm))
    if val < 0.0:
        return 0.0
    if val > 1.0:
        return 1.0
    return val


cdef inline double _sup_sf(double u, double t, double c, double sigma) noexcept nogil:
    cdef double rt, zp, zm, val
    if u <= 0.0:
        return 1.0
    if t <= 0.0:
        return 0.0
    rt = sigma * sqrt(t)
    zp = (u + c * t) / rt
    zm = (u - c * t) / rt
    val = exp(_log_psi(zp)) + exp(-2.0 * u * c / (sigma * sigma) + _log_psi(zm))
    if val > 1.0:
        return 1.0
    return val


def drifted_sup_cdf(u, t, c, sigma):
    """Scalar/array port of the reflection formula; see the numpy backend."""
    cdef double cc = c, ss = sigma
    cdef Py_ssize_t k, n
    cdef double[::1] uv, tv, ov
    if np.ndim(u) == 0 and np.ndim(t) == 0:
        return _sup_cdf(float(u), float(t), cc, ss)
    ub, tb = np.broadcast_arrays(np.asarray(u, dtype=float),
                                 np.asarray(t, dtype=float))
    out = np.empty(ub.shape, dtype=float)
    uv = np.ascontiguousarray(ub).ravel()
    tv = np.ascontiguousarray(tb).ravel()
    ov = out.ravel()
    n = uv.shape[0]
    with nogil:
        for k in range(n):
            ov[k] = _sup_cdf(uv[k], tv[k], cc, ss)
    return out


def drifted_sup_sf(u, t, c, sigma):
    """Scalar/array survival counterpart of drifted_sup_cdf."""
    cdef double cc = c, ss = sigma
    cdef Py_ssize_t k, n
    cdef double[::1] uv, tv, ov
    if np.ndim(u) == 0 and np.ndim(t) == 0:
        return _sup_sf(float(u), float(t), cc, ss)
    ub, tb = np.broadcast_arrays(np.asarray(u, dtype=float),
                                 np.asarray(t, dtype=float))
    out = np.empty(ub.shape, dtype=float)
    uv = np.ascontiguousarray(ub).ravel()
    tv = np.ascontiguousarray(tb).ravel()
    ov = out.ravel()
    n = uv.shape[0]
    with nogil:
        for k in range(n):
            ov[k] = _sup_sf(uv[k], tv[k], cc, ss)
    return out


def table_product_stats(tbl0, tblR, double inv_dt, draws, s_vals):
    """Per-s mean and ddof=1 variance of the series product; see _numpy."""
    cdef double[::1] t0 = np.ascontiguousarray(tbl0, dtype=float)
    cdef double[::1] tR = np.ascontiguousarray(tblR, dtype=float)
    cdef double[:, ::1] dw = np.ascontiguousarray(draws, dtype=float)
    cdef double[::1] sv = np.atleast_1d(np.asarray(s_vals, dtype=float))
    if t0.shape[0] != tR.shape[0]:
        raise ValueError("tbl0 and tblR must share one grid")
    cdef Py_ssize_t n_s = sv.shape[0]
    cdef Py_ssize_t m_samples = dw.shape[0]
    cdef Py_ssize_t width = dw.shape[1]
    cdef long kmax = t0.shape[0] - 2
    means_arr = np.empty(n_s, dtype=float)
    vars_arr = np.empty(n_s, dtype=float)
    cdef double[::1] means = means_arr
    cdef double[::1] variances = vars_arr
    cdef Py_ssize_t j, k, i
    cdef long idx
    cdef double scale, x, fr, p, mean, m2, delta
    with nogil:
        for j in range(n_s):
            scale = sv[j] * inv_dt
            mean = 0.0
            m2 = 0.0
            for k in range(m_samples):
                x = dw[k, 0] * scale
                idx = <long>x
                if idx > kmax:
                    idx = kmax
                fr = x - idx
                p = t0[idx] * (1.0 - fr) + t0[idx + 1] * fr
                for i in range(1, width):
                    x = dw[k, i] * scale
                    idx = <long>x
                    if idx > kmax:
                        idx = kmax
                    fr = x - idx
                    p *= tR[idx] * (1.0 - fr) + tR[idx + 1] * fr
                delta = p - mean
                mean += delta / (k + 1)
                m2 += delta * (p - mean)
            means[j] = mean
            variances[j] = m2 / (m_samples - 1) if m_samples > 1 else 0.0
    return means_arr, vars_arr


def segment_sup_quantile(probs, durations, double c, double sigma, double xtol=1e-9):
    """Elementwise quantile of the drifted-BM running supremum, by bisection."""
    pb, db = np.broadcast_arrays(np.asarray(probs, dtype=float),
                                 np.asarray(durations, dtype=float))
    scalar = pb.ndim == 0
    out = np.empty(np.atleast_1d(pb).shape, dtype=float)
    cdef double[::1] pv = np.ascontiguousarray(np.atleast_1d(pb))
    cdef double[::1] dv = np.ascontiguousarray(np.atleast_1d(db))
    cdef double[::1] ov = out
    cdef Py_ssize_t k, n = pv.shape[0]
    cdef int it
    cdef double p, d, lo, hi, mid
    with nogil:
        for k in range(n):
            p = pv[k]
            d = dv[k]
            hi = 9.0 * sigma * sqrt(d) + (-c if c < 0.0 else 0.0) * d + 1e-300
            for it in range(200):
                if _sup_cdf(hi, d, c, sigma) >= p:
                    break
                hi *= 2.0
            lo = 0.0
            while hi - lo > xtol:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if _sup_cdf(mid, d, c, sigma) < p:
                    lo = mid
                else:
                    hi = mid
            ov[k] = 0.5 * (lo + hi)
    if scalar:
        return float(out[0])
    return out

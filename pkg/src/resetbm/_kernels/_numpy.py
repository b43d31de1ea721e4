"""NumPy fallback implementations of the hot kernels.

The compiled extension (``_ckern``) exposes the same functions; either
backend may be selected at import time.  Everything here is vectorized,
deterministic, and free of hidden state.
"""

import numpy as np
from scipy.special import log_ndtr, ndtr

BACKEND_NAME = "numpy"


def drifted_sup_cdf(u, t, c, sigma):
    """P(sup over [0, t] of (W_s - c*s) <= u) for BM with Var(W_s)=sigma^2*s.

    Closed reflection formula, evaluated without cancellation: the second
    term exp(-2*u*c/sigma^2) * Psi((u - c*t)/(sigma*sqrt(t))) is computed in
    log space so large |u*c| neither overflows nor loses the tail.
    Zero for u <= 0; one for t == 0 and u > 0.  Broadcasts over u and t.
    """
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    u, t = np.broadcast_arrays(u, t)
    out = np.zeros(u.shape, dtype=float)
    pos = u > 0.0
    live = pos & (t > 0.0)
    out[pos & (t <= 0.0)] = 1.0
    if np.any(live):
        uu = u[live]
        tt = t[live]
        rt = sigma * np.sqrt(tt)
        zp = (uu + c * tt) / rt
        zm = (uu - c * tt) / rt
        val = ndtr(zp) - np.exp(-2.0 * uu * c / (sigma * sigma) + log_ndtr(-zm))
        out[live] = np.clip(val, 0.0, 1.0)
    return out if out.ndim else float(out)


def drifted_sup_sf(u, t, c, sigma):
    """1 - drifted_sup_cdf, as a sum of two positive terms (no cancellation)."""
    u = np.asarray(u, dtype=float)
    t = np.asarray(t, dtype=float)
    u, t = np.broadcast_arrays(u, t)
    out = np.ones(u.shape, dtype=float)
    live = (u > 0.0) & (t > 0.0)
    out[(u > 0.0) & (t <= 0.0)] = 0.0
    if np.any(live):
        uu = u[live]
        tt = t[live]
        rt = sigma * np.sqrt(tt)
        zp = (uu + c * tt) / rt
        zm = (uu - c * tt) / rt
        val = np.exp(log_ndtr(-zp)) + np.exp(
            -2.0 * uu * c / (sigma * sigma) + log_ndtr(-zm))
        out[live] = np.clip(val, 0.0, 1.0)
    return out if out.ndim else float(out)


def table_product_stats(tbl0, tblR, inv_dt, draws, s_vals):
    """Per-s mean and sample variance of the renewal-series product.

    tbl0, tblR : equally spaced tables (same grid) of the first-factor and
                 repeat-factor sup-CDFs as functions of segment duration
    inv_dt     : reciprocal of the table spacing
    draws      : (M, n+1) array of normalized simplex draws (rows sum to 1);
                 column 0 is looked up in tbl0, the rest in tblR
    s_vals     : horizons at which to evaluate; every s*inv_dt must lie
                 within the tables

    Returns (means, variances) arrays of len(s_vals); variance uses ddof=1.
    """
    tbl0 = np.ascontiguousarray(tbl0, dtype=float)
    tblR = np.ascontiguousarray(tblR, dtype=float)
    draws = np.ascontiguousarray(draws, dtype=float)
    s_vals = np.atleast_1d(np.asarray(s_vals, dtype=float))
    if tbl0.shape != tblR.shape:
        raise ValueError("tbl0 and tblR must share one grid")
    m_samples = draws.shape[0]
    kmax = tbl0.shape[0] - 2
    means = np.empty(s_vals.shape[0])
    variances = np.empty(s_vals.shape[0])
    for j, s in enumerate(s_vals):
        x = draws * (s * inv_dt)
        idx = x.astype(np.int64)
        np.clip(idx, 0, kmax, out=idx)
        frac = x - idx
        head = tbl0[idx[:, 0]] * (1.0 - frac[:, 0]) + tbl0[idx[:, 0] + 1] * frac[:, 0]
        rest_lo = tblR[idx[:, 1:]]
        rest_hi = tblR[idx[:, 1:] + 1]
        rest = rest_lo * (1.0 - frac[:, 1:]) + rest_hi * frac[:, 1:]
        p = head * rest.prod(axis=1)
        mu = p.mean()
        means[j] = mu
        if m_samples > 1:
            variances[j] = p.var(ddof=1)
        else:
            variances[j] = 0.0
    return means, variances


def segment_sup_quantile(probs, durations, c, sigma, xtol=1e-9):
    """Quantiles of the running supremum of drifted BM, by bisection.

    Solves drifted_sup_cdf(x, d, c, sigma) = p elementwise for x >= 0.
    Vectorized bisection; robust to the flat region at x <= 0.
    """
    probs = np.asarray(probs, dtype=float)
    durations = np.asarray(durations, dtype=float)
    probs, durations = np.broadcast_arrays(probs, durations)
    probs = np.ascontiguousarray(probs)
    durations = np.ascontiguousarray(durations)
    lo = np.zeros(probs.shape)
    hi = 9.0 * sigma * np.sqrt(durations) + np.maximum(-c, 0.0) * durations + 1e-300
    # expand until the bracket covers every requested probability
    for _ in range(200):
        bad = drifted_sup_cdf(hi, durations, c, sigma) < probs
        if not np.any(bad):
            break
        hi[bad] *= 2.0
    span = float(np.max(hi)) if hi.size else 0.0
    n_iter = max(1, int(np.ceil(np.log2(max(span, xtol) / xtol))) + 1)
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        below = drifted_sup_cdf(mid, durations, c, sigma) < probs
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return out if out.ndim else float(out)

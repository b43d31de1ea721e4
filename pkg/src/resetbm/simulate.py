"""Path sampling for the reset process.

Two families of samplers live here.  Discretized trajectories follow the
pathwise construction: exact Poisson reset epochs, Gaussian increments on
the merged grid (regular grid plus epochs), value pinned to the reset level
immediately after each epoch (cadlag), with the pre-jump value retained so
segment extremes are not lost.  Exact functional samplers avoid time
discretization entirely: per-segment suprema are drawn by inverting the
closed-form sup-CDF, and values at fixed times come from the last-reset-age
representation.

Every sampler takes an explicit RngStream; there is no hidden global state.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import segment_sup_quantile
from .errors import ParameterError
from .params import ModelParams

__all__ = [
    "RngStream", "Trajectory", "PathFunctionals",
    "sample_stationary_init", "sample_path", "sample_segment_sup",
    "sample_sup", "path_functionals", "sample_last_reset_age",
    "sample_sup_batch", "sample_sup_grid_batch", "sample_pair_at",
    "sample_value_at", "sample_window_inf_batch", "trajectory_to_csv",
]


class RngStream:
    """Reproducible random stream.

    A fresh RngStream with the same (seed, stream_id) reproduces the same
    draw sequence; distinct stream_ids are statistically independent.
    """

    def __init__(self, seed, stream_id=0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.gen = np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,)))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def _gen(rng):
    """Accept an RngStream or a bare numpy Generator."""
    if isinstance(rng, RngStream):
        return rng.gen
    if isinstance(rng, np.random.Generator):
        return rng
    raise ParameterError(f"rng must be RngStream or numpy Generator, got {type(rng)!r}")


@dataclass(frozen=True)
class Trajectory:
    """A sampled path.

    times            : strictly increasing grid starting at 0
    values           : path values on the grid; at a reset epoch this is the
                       post-jump value (the reset level)
    reset_epochs     : exact Poisson jump times in (0, T]
    pre_reset_values : left limits of the path at the reset epochs
    """

    times: np.ndarray
    values: np.ndarray
    reset_epochs: np.ndarray
    pre_reset_values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.values):
            raise ParameterError("times and values must have equal length")
        if len(self.reset_epochs) != len(self.pre_reset_values):
            raise ParameterError("reset_epochs and pre_reset_values must align")


@dataclass(frozen=True)
class PathFunctionals:
    """Supremum, infimum, terminal value and first passage over a grid path."""

    sup: float
    inf: float
    last: float
    fpt: float | None


def sample_stationary_init(rng, params: ModelParams):
    """One exact draw from the stationary law via xr + sqrt(S) W_1 - c S,
    S ~ Exp(lam) independent of the Gaussian W_1 (no rejection, no inversion)."""
    g = _gen(rng)
    s = g.exponential(1.0 / params.lam)
    z = g.standard_normal()
    return params.xr + params.sigma * math.sqrt(s) * z - params.c * s


def _stationary_init_batch(g, params: ModelParams, n):
    s = g.exponential(1.0 / params.lam, size=n)
    z = g.standard_normal(n)
    return params.xr + params.sigma * np.sqrt(s) * z - params.c * s


def _draw_epochs(g, T, lam):
    """Exact Poisson epochs in (0, T] via exponential gaps."""
    epochs = []
    t = g.exponential(1.0 / lam)
    while t <= T:
        epochs.append(t)
        t += g.exponential(1.0 / lam)
    return np.array(epochs)


def _init_value(g, params: ModelParams):
    if params.stationary_start:
        s = g.exponential(1.0 / params.lam)
        z = g.standard_normal()
        return params.xr + params.sigma * math.sqrt(s) * z - params.c * s
    return params.fixed_x0()


def sample_path(T, step, params: ModelParams, rng) -> Trajectory:
    """Sample one trajectory on the merged grid (regular grid plus epochs)."""
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    if not (0 < step <= T):
        raise ParameterError(f"need 0 < step <= T, got {step}")
    g = _gen(rng)
    x = _init_value(g, params)
    epochs = _draw_epochs(g, T, params.lam)
    grid = np.arange(0.0, T, step)
    times = np.union1d(np.append(grid, T), epochs)
    values = np.empty_like(times)
    values[0] = x
    sigma, c, xr = params.sigma, params.c, params.xr

    epoch_pos = np.searchsorted(times, epochs)
    pre_vals = np.empty(len(epochs))
    bounds = np.concatenate((epoch_pos, [len(times) - 1]))
    start_idx = 0
    for j, stop_idx in enumerate(bounds):
        if stop_idx > start_idx:
            dts = np.diff(times[start_idx:stop_idx + 1])
            incs = g.standard_normal(len(dts)) * sigma * np.sqrt(dts) - c * dts
            values[start_idx + 1:stop_idx + 1] = values[start_idx] + np.cumsum(incs)
        if j < len(epochs):
            pre_vals[j] = values[stop_idx]
            values[stop_idx] = xr
        start_idx = stop_idx
    return Trajectory(times=times, values=values, reset_epochs=epochs,
                      pre_reset_values=pre_vals)


def _quantile_tol(duration, sigma):
    return max(1e-12, 1e-7 * sigma * math.sqrt(max(duration, 0.0)))


def sample_segment_sup(duration, start, params: ModelParams, rng):
    """Exact draw of the supremum over one inter-reset segment.

    Inverse-CDF sampling: a uniform is pushed through the quantile of the
    drifted-BM running supremum, so there is no discretization bias.
    """
    if not (duration > 0):
        raise ParameterError(f"need duration > 0, got {duration}")
    g = _gen(rng)
    q = segment_sup_quantile(np.array([g.random()]), np.array([duration]),
                             params.c, params.sigma,
                             _quantile_tol(duration, params.sigma))
    return start + float(q[0])


def sample_sup(T, params: ModelParams, rng):
    """Exact draw of the running supremum of the reset process over [0, T].

    Draws the reset epochs, then the exact supremum of each inter-reset
    segment (first segment from the initial value, later ones from the
    reset level); the path supremum is their maximum.
    """
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    g = _gen(rng)
    x = _init_value(g, params)
    epochs = _draw_epochs(g, T, params.lam)
    cuts = np.concatenate(([0.0], epochs, [T]))
    durations = np.diff(cuts)
    starts = np.full(len(durations), params.xr)
    starts[0] = x
    probs = g.random(len(durations))
    sups = starts + segment_sup_quantile(
        probs, durations, params.c, params.sigma,
        _quantile_tol(float(durations.max()), params.sigma))
    return float(np.max(sups))


def sample_sup_batch(T, params: ModelParams, rng, n):
    """Vectorized exact supremum draws (law identical to sample_sup).

    Uses the order-statistics representation of the epochs: given the count
    k, the k+1 segment durations are T times normalized unit exponentials.
    """
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    g = _gen(rng)
    counts = g.poisson(params.lam * T, size=n)
    if params.stationary_start:
        inits = _stationary_init_batch(g, params, n)
    else:
        inits = np.full(n, params.fixed_x0())
    seg_counts = counts + 1
    total = int(seg_counts.sum())
    exps = g.standard_exponential(total)
    offsets = np.concatenate(([0], np.cumsum(seg_counts)))[:-1]
    path_sums = np.add.reduceat(exps, offsets)
    durations = exps * np.repeat(T / path_sums, seg_counts)
    starts = np.full(total, params.xr)
    starts[offsets] = inits
    probs = g.random(total)
    sups = starts + segment_sup_quantile(
        probs, durations, params.c, params.sigma,
        _quantile_tol(T, params.sigma))
    return np.maximum.reduceat(sups, offsets)


def path_functionals(traj: Trajectory, level) -> PathFunctionals:
    """Grid functionals of a trajectory; extremes include the pre-reset left
    limits so nothing recorded at an epoch is lost.  fpt is the first grid
    time (or epoch, via its left limit) at which the path exceeds level,
    absent when the supremum does not."""
    if len(traj.times) == 0:
        raise ParameterError("trajectory is empty")
    sup = float(traj.values.max())
    inf = float(traj.values.min())
    if len(traj.pre_reset_values):
        sup = max(sup, float(traj.pre_reset_values.max()))
        inf = min(inf, float(traj.pre_reset_values.min()))
    candidates = []
    over = np.nonzero(traj.values > level)[0]
    if len(over):
        candidates.append(traj.times[over[0]])
    pre_over = np.nonzero(traj.pre_reset_values > level)[0]
    if len(pre_over):
        candidates.append(traj.reset_epochs[pre_over[0]])
    fpt = float(min(candidates)) if candidates else None
    return PathFunctionals(sup=sup, inf=inf, last=float(traj.values[-1]), fpt=fpt)


def sample_last_reset_age(T, lam, rng):
    """Age of the last reset before T, conditioned on at least one reset:
    truncated exponential on (0, T), drawn by CDF inversion."""
    if not (T > 0):
        raise ParameterError(f"need T > 0, got {T}")
    if not (lam > 0):
        raise ParameterError(f"need lam > 0, got {lam}")
    g = _gen(rng)
    u = g.random()
    return -math.log1p(-u * (-math.expm1(-lam * T))) / lam


def _grid_segment(t0, t1, step):
    """Interior regular grid points of (t0, t1] plus the endpoint t1."""
    k_lo = math.floor(t0 / step) + 1
    k_hi = math.ceil(t1 / step) - 1
    pts = step * np.arange(k_lo, k_hi + 1)
    pts = pts[(pts > t0) & (pts < t1)]
    return np.append(pts, t1)


def sample_sup_grid_batch(T, step, params: ModelParams, rng, n):
    """Discretized supremum draws: per-path merged grid of spacing `step`.

    The recorded maximum includes the value at every epoch's left limit and
    at T, but misses excursions between grid points, so estimates of
    P(sup > u) from this sampler are biased low relative to sample_sup.
    """
    if not (T > 0) or not (0 < step <= T):
        raise ParameterError("need T > 0 and 0 < step <= T")
    g = _gen(rng)
    sigma, c, xr, lam = params.sigma, params.c, params.xr, params.lam
    out = np.empty(n)
    for i in range(n):
        x = _init_value(g, params)
        sup = x
        t0 = 0.0
        t_next = g.exponential(1.0 / lam)
        while True:
            t1 = min(t_next, T)
            pts = _grid_segment(t0, t1, step)
            dts = np.diff(pts, prepend=t0)
            vals = x + np.cumsum(g.standard_normal(len(dts)) * sigma * np.sqrt(dts)
                                 - c * dts)
            m = vals.max()
            if m > sup:
                sup = m
            if t_next > T:
                break
            x = xr
            t0 = t_next
            t_next += g.exponential(1.0 / lam)
        out[i] = sup
    return out


def sample_value_at(t, params: ModelParams, rng, n):
    """Exact draws of X_t via the last-reset-age representation."""
    if not (t > 0):
        raise ParameterError(f"need t > 0, got {t}")
    g = _gen(rng)
    lam, sigma, c, xr = params.lam, params.sigma, params.c, params.xr
    if params.stationary_start:
        inits = _stationary_init_batch(g, params, n)
    else:
        inits = np.full(n, params.fixed_x0())
    has_reset = g.random(n) < -np.expm1(-lam * t)
    ages = -np.log1p(-g.random(n) * (-np.expm1(-lam * t))) / lam
    elapsed = np.where(has_reset, ages, t)
    base = np.where(has_reset, xr, inits)
    z = g.standard_normal(n)
    return base + sigma * np.sqrt(elapsed) * z - c * elapsed


def sample_pair_at(s, t, params: ModelParams, rng, n):
    """Exact draws of (X_s, X_t), 0 < s < t.

    X_s comes from the last-reset-age representation; if no reset lands in
    (s, t] the same path continues with one Gaussian increment, otherwise
    X_t restarts from the reset level with its own age.
    """
    if not (0 < s < t):
        raise ParameterError(f"need 0 < s < t, got s={s}, t={t}")
    g = _gen(rng)
    lam, sigma, c, xr = params.lam, params.sigma, params.c, params.xr
    xs = sample_value_at(s, params, rng, n)
    gap = t - s
    has_reset = g.random(n) < -np.expm1(-lam * gap)
    ages = -np.log1p(-g.random(n) * (-np.expm1(-lam * gap))) / lam
    elapsed = np.where(has_reset, ages, gap)
    base = np.where(has_reset, xr, xs)
    z = g.standard_normal(n)
    xt = base + sigma * np.sqrt(elapsed) * z - c * elapsed
    return xs, xt


def sample_window_inf_batch(T, Delta, step, params: ModelParams, rng, n,
                            chunk=2048):
    """Discretized (window infimum, X_T) draws for the window [T, T+Delta].

    X_T is sampled exactly; the window is discretized at spacing `step`.
    Paths without a window reset share one rectangular Gaussian scan; paths
    with resets are walked segment by segment (the post-jump value xr at
    each epoch is included in the minimum).
    """
    if not (T > 0 and Delta > 0) or not (0 < step <= Delta):
        raise ParameterError("need T > 0, Delta > 0, 0 < step <= Delta")
    g = _gen(rng)
    lam, sigma, c, xr = params.lam, params.sigma, params.c, params.xr
    x_at_T = sample_value_at(T, params, rng, n)
    first_gap = g.exponential(1.0 / lam, size=n)
    inf_out = np.empty(n)

    m = int(math.ceil(Delta / step))
    dts = np.full(m, step)
    dts[-1] = Delta - step * (m - 1)
    clean = first_gap > Delta
    idx_clean = np.nonzero(clean)[0]
    for lo in range(0, len(idx_clean), chunk):
        sel = idx_clean[lo:lo + chunk]
        incs = (g.standard_normal((len(sel), m)) * (sigma * np.sqrt(dts))
                - c * dts)
        np.cumsum(incs, axis=1, out=incs)
        inf_out[sel] = x_at_T[sel] + np.minimum(incs.min(axis=1), 0.0)

    for i in np.nonzero(~clean)[0]:
        x = x_at_T[i]
        low = x
        t0 = 0.0
        t_next = first_gap[i]
        while True:
            t1 = min(t_next, Delta)
            pts = _grid_segment(t0, t1, step)
            seg_dts = np.diff(pts, prepend=t0)
            vals = x + np.cumsum(
                g.standard_normal(len(seg_dts)) * sigma * np.sqrt(seg_dts)
                - c * seg_dts)
            low = min(low, vals.min())
            if t_next > Delta:
                break
            x = xr
            low = min(low, xr)
            t0 = t_next
            t_next += g.exponential(1.0 / lam)
        inf_out[i] = low
    return inf_out, x_at_T


def trajectory_to_csv(traj: Trajectory, path, sidecar_path=None):
    """Write (t, x) rows; reset epochs and their left limits go to a sidecar."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "x"])
        for t, x in zip(traj.times, traj.values):
            writer.writerow([repr(float(t)), repr(float(x))])
    if sidecar_path is not None:
        with open(sidecar_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "pre_reset_value"])
            for t, x in zip(traj.reset_epochs, traj.pre_reset_values):
                writer.writerow([repr(float(t)), repr(float(x))])

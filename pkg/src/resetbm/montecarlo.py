"""Monte Carlo estimator harness.

Samples are assigned to fixed blocks of 4096 indices; block b draws from
RngStream(seed, b).  The partition depends only on (seed, n), never on the
worker count, so estimates are reproducible for any degree of parallelism.
Confidence intervals are the normal approximation with z = 1.96.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, ParameterError, ResetBMError
from .simulate import RngStream

__all__ = ["Estimate", "estimate_prob", "estimate_mean", "BLOCK_SIZE"]

BLOCK_SIZE = 4096
_Z95 = 1.96


class SamplerFailure(ResetBMError, RuntimeError):
    """A user sampler raised; carries the index of the failing sample."""


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate with a 95% confidence half-width.

    half_width_95 is fixed at 1.96 * std_err by convention.
    """

    value: float
    half_width_95: float
    n: int
    std_err: float

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f"need n >= 2, got {self.n}")
        if self.std_err < 0 or self.half_width_95 < 0:
            raise ParameterError("negative error fields")


def _make_estimate(value, std_err, n):
    return Estimate(value=value, half_width_95=_Z95 * std_err, n=n,
                    std_err=std_err)


def _blocks(n):
    for b in range(0, (n + BLOCK_SIZE - 1) // BLOCK_SIZE):
        start = b * BLOCK_SIZE
        yield b, start, min(n, start + BLOCK_SIZE)


def _run_blocks(worker, n, workers):
    blocks = list(_blocks(n))
    if workers <= 1 or len(blocks) <= 1:
        return [worker(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, blocks))


def _draw_block(sampler, block, seed, batch):
    b, start, stop = block
    g = RngStream(seed, b).gen
    m = stop - start
    try:
        if batch:
            vals = np.asarray(sampler(g, m), dtype=float)
            if vals.shape != (m,):
                raise ContractViolationError(
                    f"batch sampler returned shape {vals.shape}, wanted ({m},)")
        else:
            vals = np.fromiter((sampler(g) for _ in range(m)), dtype=float,
                               count=m)
    except ContractViolationError:
        raise
    except Exception as exc:
        raise SamplerFailure(
            f"sampler failed within samples [{start}, {stop})") from exc
    return vals


def estimate_prob(indicator_sampler, n, seed, workers=1, batch=False):
    """Estimate a probability from {0,1} draws.

    indicator_sampler(gen) -> 0/1, or with batch=True
    indicator_sampler(gen, m) -> array of m indicator values.
    """
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    if workers < 1:
        raise ParameterError(f"need workers >= 1, got {workers}")

    def worker(block):
        vals = _draw_block(indicator_sampler, block, seed, batch)
        if np.any((vals != 0.0) & (vals != 1.0)):
            raise ContractViolationError("indicator sampler produced values "
                                         "outside {0, 1}")
        return float(vals.sum())

    hits = sum(_run_blocks(worker, n, workers))
    p = hits / n
    std_err = math.sqrt(max(p * (1.0 - p), 0.0) / n)
    return _make_estimate(p, std_err, n)


def estimate_mean(real_sampler, n, seed, workers=1, batch=False):
    """Estimate a mean with Welford-style per-block accumulation and an
    exact deterministic merge in block order."""
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    if workers < 1:
        raise ParameterError(f"need workers >= 1, got {workers}")

    def worker(block):
        vals = _draw_block(real_sampler, block, seed, batch)
        m = len(vals)
        mean = float(vals.mean())
        m2 = float(np.sum((vals - mean) ** 2))
        return m, mean, m2

    count, mean, m2 = 0, 0.0, 0.0
    for bc, bmean, bm2 in _run_blocks(worker, n, workers):
        delta = bmean - mean
        total = count + bc
        mean += delta * bc / total
        m2 += bm2 + delta * delta * count * bc / total
        count = total
    var = m2 / (count - 1)
    std_err = math.sqrt(max(var, 0.0) / count)
    return _make_estimate(mean, std_err, count)

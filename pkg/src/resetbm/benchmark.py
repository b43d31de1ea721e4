"""Benchmark of the compiled kernel against the NumPy fallback.

Workloads mirror the real hot paths: the renewal-series table-product scan
(dominates the mean-FPT table reproduction) and the vectorized quantile
bisection behind the exact supremum sampler.  Both backends are exercised
on identical inputs; agreement is asserted before timing.
"""

import time

import numpy as np

from ._kernels import BACKEND, available_backends
from ._kernels import _numpy as _ref

__all__ = ["run_benchmark"]


def _workloads(seed):
    rng = np.random.default_rng(seed)
    span = 30.0
    n_pts = 65536
    t = np.linspace(0.0, span, n_pts + 1)
    tbl = _ref.drifted_sup_cdf(1.0, t, 0.0, 1.0)
    exps = rng.standard_exponential((4000, 41))
    draws = exps / exps.sum(axis=1, keepdims=True)
    s_vals = np.linspace(0.5, span, 160)
    probs = rng.random(200_000)
    durs = rng.exponential(0.5, 200_000) + 1e-3
    uu = rng.uniform(-1, 4, 1_000_000)
    tt = rng.uniform(0.01, 3.0, 1_000_000)
    return {
        "series_product_scan": (
            lambda mod: mod.table_product_stats(tbl, tbl, n_pts / span, draws,
                                                s_vals),
            draws.size * len(s_vals)),
        "segment_sup_quantile": (
            lambda mod: mod.segment_sup_quantile(probs, durs, 0.5, 1.0, 1e-9),
            len(probs)),
        "drifted_sup_cdf": (
            lambda mod: mod.drifted_sup_cdf(uu, tt, 0.5, 1.0),
            len(uu)),
    }


def run_benchmark(seed=0, repeat=3):
    """Time each workload per backend; returns a JSON-ready report."""
    backends = available_backends()
    work = _workloads(seed)
    results = {}
    for wname, (fn, units) in work.items():
        per_backend = {}
        outputs = {}
        for bname, mod in backends.items():
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                out = fn(mod)
                best = min(best, time.perf_counter() - t0)
            outputs[bname] = out
            per_backend[bname] = {
                "seconds": round(best, 6),
                "ns_per_unit": round(1e9 * best / units, 3),
            }
        if len(outputs) == 2:
            a, b = (np.asarray(o[0] if isinstance(o, tuple) else o)
                    for o in outputs.values())
            agree = float(np.max(np.abs(a - b)))
            per_backend["max_abs_disagreement"] = agree
            names = list(per_backend)
            per_backend["speedup"] = round(
                per_backend["numpy"]["seconds"]
                / per_backend["compiled"]["seconds"], 2) \
                if "compiled" in names and "numpy" in names else None
        results[wname] = per_backend
    return {"active_backend": BACKEND, "workloads": results}

"""Command-line front end.

Subcommands reproduce the reference figures and tables and expose every
evaluator.  Options resolve with precedence: explicit flag > JSON config
file (--config) > environment (RESETBM_<NAME>) > built-in default.  All
outputs are deterministic given the same configuration and seed.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, analytic, asymptotics, benchmark, series, validation
from ._kernels import BACKEND
from .errors import ResetBMError
from .params import ModelParams
from .simulate import RngStream, sample_path, sample_sup_grid_batch, \
    trajectory_to_csv

VERSION_STRING = f"resetbm {__version__} ({BACKEND} kernels)"

_TABLE1_LAMBDAS = [0.1, 0.269812, 0.769812, 1.069812, 1.169812, 1.269812,
                   1.369812, 1.469812, 1.769812, 2.269812, 4.269812]
_TABLE_LEVELS = {2: [2.5, 3.0, 3.5, 4.0, 4.5], 3: [2.0, 2.5, 3.0, 3.5, 4.0]}


def _env_name(name):
    return "RESETBM_" + name.replace("-", "_").upper()


class _Options:
    """Layered option lookup: flags > config file > environment > default."""

    def __init__(self, args):
        self.args = vars(args)
        self.file = {}
        cfg_path = self.args.get("config")
        if cfg_path:
            with open(cfg_path) as fh:
                self.file = json.load(fh)

    def get(self, name, default=None, cast=float):
        key = name.replace("-", "_")
        val = self.args.get(key)
        if val is None:
            val = self.args.get(key + "_")  # dests like lambda_
        if val is not None:
            return val
        if name in self.file:
            raw = self.file[name]
        elif key in self.file:
            raw = self.file[key]
        elif _env_name(name) in os.environ:
            raw = os.environ[_env_name(name)]
        else:
            return default
        if cast is bool and isinstance(raw, str):
            return raw.lower() in ("1", "true", "yes")
        return cast(raw)

    def echo(self):
        flags = {k: v for k, v in self.args.items()
                 if v is not None and k not in ("func", "command")}
        return {"flags": flags, "config_file": self.file,
                "version": VERSION_STRING}


def _model(opt):
    stationary = opt.get("x0-stationary", False, bool)
    x0 = None if stationary else opt.get("x0", 0.0)
    return ModelParams(sigma=opt.get("sigma", 1.0),
                       lam=opt.get("lambda", 1.0),
                       c=opt.get("c", 0.0),
                       x0=x0,
                       xr=opt.get("xr", 0.0))


def _series_cfg(opt, n_max=60, mc_samples=5000):
    scale = opt.get("scale", 1.0)
    return series.SeriesConfig(
        n_max=int(opt.get("n-max", n_max, int)),
        mc_samples=max(50, int(round(opt.get("mc-samples", mc_samples, int)
                                     * scale))),
        seed=int(opt.get("seed", 20260808, int)),
        t_max=opt.get("t-max", 30.0),
        grid_step=opt.get("grid-step", 0.01),
        workers=int(opt.get("workers", 1, int)))


def _write_rows(path, header, rows, fmt):
    if fmt == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps({"version": VERSION_STRING, "rows": payload},
                          sort_keys=True, indent=2) + "\n"
        _write_text(path, text)
    else:
        out = sys.stdout if path in (None, "-") else open(path, "w", newline="")
        try:
            w = csv.writer(out)
            w.writerow(header)
            for row in rows:
                w.writerow([repr(v) if isinstance(v, float) else v
                            for v in row])
        finally:
            if out is not sys.stdout:
                out.close()


def _write_text(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_simulate(opt):
    # defaults reproduce the showcase trajectory: downward unit drift,
    # resets from the origin start up to level 1 at intensity 2
    stationary = opt.get("x0-stationary", False, bool)
    params = ModelParams(sigma=opt.get("sigma", 1.0),
                         lam=opt.get("lambda", 2.0),
                         c=opt.get("c", 1.0),
                         x0=None if stationary else opt.get("x0", 0.0),
                         xr=opt.get("xr", 1.0))
    T = opt.get("T", 3.0)
    step = opt.get("step", 1e-3)
    seed = int(opt.get("seed", 20260808, int))
    out = opt.get("out", "trajectory.csv", str)
    traj = sample_path(T, step, params, RngStream(seed))
    sidecar = os.path.splitext(out)[0] + ".resets.csv"
    trajectory_to_csv(traj, out, sidecar)
    print(f"wrote {out} ({len(traj.times)} points) and {sidecar} "
          f"({len(traj.reset_epochs)} resets)")
    return 0


def cmd_sup_cdf(opt):
    lam_spec = opt.get("lambda-list", "0.1,0.5,1,2,3,5", str)
    lams = [float(x) for x in str(lam_spec).split(",") if x]
    T = opt.get("T", 1.0)
    u_grid = np.arange(opt.get("u-min", 0.01), opt.get("u-max", 3.0) + 1e-12,
                       opt.get("u-step", 0.01))
    cfg = _series_cfg(opt, n_max=100, mc_samples=6000)
    rows = []
    for lam in lams:
        params = ModelParams(sigma=opt.get("sigma", 1.0), lam=lam,
                             c=opt.get("c", 0.0), x0=opt.get("x0", 0.0),
                             xr=opt.get("xr", 0.0))
        for u, res in zip(u_grid, series.sup_cdf_curve(u_grid, T, params, cfg)):
            rows.append((lam, float(u), res.value, res.mc_std_err,
                         res.truncation_bound))
    _write_rows(opt.get("out", None, str),
                ["lambda", "u", "cdf", "mc_std_err", "truncation_bound"],
                rows, opt.get("format", "csv", str))
    return 0


def cmd_table1(opt):
    cfg = _series_cfg(opt)
    u = opt.get("u", 1.0)
    sigma = opt.get("sigma", 1.0)
    rows = []
    for lam in _TABLE1_LAMBDAS:
        params = ModelParams(sigma=sigma, lam=lam, c=0.0, x0=0.0, xr=0.0)
        est = series.mean_fpt_series(u, params, cfg)
        rows.append((lam, est.value, est.std_err,
                     series.mean_fpt_exact(u, lam, sigma)))
    _write_rows(opt.get("out", None, str),
                ["lambda", "appr", "appr_std_err", "exact"],
                rows, opt.get("format", "csv", str))
    return 0


def _table_ratio(opt, lam, table_key):
    n = max(100, int(round(20000 * opt.get("scale", 1.0))))
    step = opt.get("step", 1e-4)
    seed = int(opt.get("seed", 20260808, int))
    params = ModelParams(sigma=opt.get("sigma", 1.0), lam=lam, c=0.0,
                         x0=None, xr=opt.get("xr", 1.0))
    sups = sample_sup_grid_batch(1.0, step, params, RngStream(seed), n)
    rows = []
    for u in _TABLE_LEVELS[table_key]:
        mcm = float((sups > u).mean())
        hw = 1.96 * float(np.sqrt(max(mcm * (1 - mcm), 0.0) / n))
        asym = asymptotics.stationary_sup_tail_asym(u, 1.0, params).value
        rows.append((u, mcm, hw, asym, mcm / asym))
    _write_rows(opt.get("out", None, str),
                ["u", "mcm", "mcm_half_width_95", "asym", "ratio"],
                rows, opt.get("format", "csv", str))
    return 0


def cmd_table2(opt):
    return _table_ratio(opt, opt.get("lambda", 2.0), 2)


def cmd_table3(opt):
    return _table_ratio(opt, opt.get("lambda", 3.0), 3)


def cmd_validate(opt):
    only = opt.get("checks", None, str)
    report = validation.run_validation(
        seed=int(opt.get("seed", 20260808, int)),
        scale=opt.get("scale", 1.0),
        workers=int(opt.get("workers", 1, int)),
        tol_override=opt.get("tol", None),
        only=set(str(only).split(",")) if only else None)
    report["config"]["echo"] = opt.echo()
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    _write_text(opt.get("out", None, str), text)
    for chk in report["checks"]:
        status = "pass" if chk["passed"] else "FAIL"
        print(f"[{status}] {chk['name']}: observed={chk['observed']:.3g} "
              f"tol={chk['tolerance']:.3g} ({chk['seconds']}s)",
              file=sys.stderr)
    return 0 if report["passed"] else 1


_EVALUATORS = {}


def _evaluator(name):
    def wrap(fn):
        _EVALUATORS[name] = fn
        return fn
    return wrap


@_evaluator("cdf")
def _eval_cdf(opt):
    return {"value": analytic.reset_cdf_1d(opt.get("u", 0.0),
                                           opt.get("T", 1.0), _model(opt))}


@_evaluator("sup-cdf-drifted")
def _eval_sup_cdf_drifted(opt):
    return {"value": analytic.sup_cdf_drifted_bm(
        opt.get("u", 0.0), opt.get("T", 1.0), opt.get("c", 0.0),
        opt.get("sigma", 1.0))}


@_evaluator("stationary-cdf")
def _eval_stat_cdf(opt):
    return {"value": analytic.stationary_cdf(opt.get("u", 0.0), _model(opt))}


@_evaluator("stationary-pdf")
def _eval_stat_pdf(opt):
    return {"value": analytic.stationary_pdf(opt.get("u", 0.0), _model(opt))}


@_evaluator("stationary-sf")
def _eval_stat_sf(opt):
    return {"value": analytic.stationary_sf(opt.get("u", 0.0), _model(opt))}


@_evaluator("alpha")
def _eval_alpha(opt):
    ap = analytic.alpha_param(_model(opt))
    return {"value": ap.alpha, "prefactor": ap.prefactor}


@_evaluator("joint-cdf")
def _eval_joint(opt):
    return {"value": analytic.joint_cdf(
        opt.get("s", 0.3), opt.get("T", 1.0), opt.get("u", 0.0),
        opt.get("w", 0.0), _model(opt))}


@_evaluator("joint-density")
def _eval_joint_density(opt):
    return {"value": analytic.joint_density(
        opt.get("s", 0.3), opt.get("T", 1.0), opt.get("u", 0.0),
        opt.get("w", 0.0), _model(opt))}


@_evaluator("stationary-joint-cdf")
def _eval_stat_joint(opt):
    return {"value": analytic.stationary_joint_cdf(
        opt.get("delta", 0.5), opt.get("u", 0.0), opt.get("w", 0.0),
        _model(opt))}


@_evaluator("win-min-joint")
def _eval_win_min(opt):
    return {"value": analytic.win_min_joint(
        opt.get("s", 1.5), opt.get("delta", 0.5), opt.get("u", 0.0),
        opt.get("w", 0.0), opt.get("c", 0.0), opt.get("sigma", 1.0))}


@_evaluator("inf-window-exact")
def _eval_inf_window(opt):
    u = opt.get("u", 1.0)
    return {"value": analytic.inf_window_exact(
        opt.get("T", 1.0), opt.get("delta", 0.5), u, opt.get("v", u),
        _model(opt))}


@_evaluator("sup-cdf-series")
def _eval_series(opt):
    res = series.sup_cdf_series(opt.get("u", 1.0), opt.get("T", 1.0),
                                _model(opt), _series_cfg(opt))
    return {"value": res.value, "mc_std_err": res.mc_std_err,
            "truncation_bound": res.truncation_bound}


@_evaluator("fpt-survival")
def _eval_fpt_survival(opt):
    res = series.fpt_survival(opt.get("u", 1.0), opt.get("T", 1.0),
                              _model(opt), _series_cfg(opt))
    return {"value": res.value, "mc_std_err": res.mc_std_err,
            "truncation_bound": res.truncation_bound}


@_evaluator("sup-bounds")
def _eval_bounds(opt):
    lo, hi = series.sup_cdf_bounds(opt.get("u", 1.0), opt.get("T", 1.0),
                                   _model(opt))
    return {"lower": lo, "upper": hi}


@_evaluator("mean-fpt")
def _eval_mean_fpt(opt):
    est = series.mean_fpt_series(opt.get("u", 1.0), _model(opt),
                                 _series_cfg(opt))
    return {"value": est.value, "std_err": est.std_err,
            "half_width_95": est.half_width_95}


@_evaluator("mean-fpt-exact")
def _eval_mean_fpt_exact(opt):
    return {"value": series.mean_fpt_exact(
        opt.get("u", 1.0), opt.get("lambda", 1.0), opt.get("sigma", 1.0))}


@_evaluator("optimize-lambda")
def _eval_opt_lambda(opt):
    lam, val = series.optimal_lambda(opt.get("u", 1.0), opt.get("sigma", 1.0))
    return {"lambda_star": lam, "mean_fpt": val}


@_evaluator("sup-tail-asym")
def _eval_sup_tail_asym(opt):
    av = asymptotics.sup_tail_asym(opt.get("u", 1.0), opt.get("T", 1.0),
                                   _model(opt))
    return {"value": av.value, "regime": av.regime}


@_evaluator("inf-window-asym")
def _eval_inf_window_asym(opt):
    av = asymptotics.inf_window_asym(
        opt.get("u", 1.0), opt.get("r", 0.0), opt.get("T", 1.0),
        opt.get("delta", 0.5), _model(opt))
    return {"value": av.value, "regime": av.regime}


@_evaluator("stationary-sup-asym")
def _eval_stat_sup_asym(opt):
    av = asymptotics.stationary_sup_tail_asym(opt.get("u", 1.0),
                                              opt.get("T", 1.0), _model(opt))
    return {"value": av.value, "regime": av.regime}


@_evaluator("stationary-joint-asym")
def _eval_stat_joint_asym(opt):
    av = asymptotics.stationary_joint_asym(
        opt.get("u", 1.0), opt.get("z", 0.5), opt.get("T", 1.0), _model(opt))
    return {"value": av.value, "regime": av.regime}


@_evaluator("k-const")
def _eval_k_const(opt):
    return {"value": asymptotics.K_const(opt.get("c", 0.0),
                                         opt.get("delta", 1.0))}


@_evaluator("l-func")
def _eval_l_func(opt):
    return {"value": asymptotics.L_func(opt.get("z", 0.0))}


def cmd_eval(opt):
    name = opt.args.get("evaluator")
    fn = _EVALUATORS.get(name)
    if fn is None:
        known = ", ".join(sorted(_EVALUATORS))
        print(f"unknown evaluator {name!r}; choose from: {known}",
              file=sys.stderr)
        return 2
    result = fn(opt)
    if opt.get("format", "text", str) == "json":
        print(json.dumps({"evaluator": name, "version": VERSION_STRING,
                          **result}, sort_keys=True))
    else:
        for k, v in result.items():
            print(f"{k} = {v}")
    return 0


def cmd_benchmark(opt):
    report = benchmark.run_benchmark(seed=int(opt.get("seed", 0, int)))
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    _write_text(opt.get("out", None, str), text)
    return 0


def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--sigma", type=float, help="volatility (> 0)")
    p.add_argument("--lambda", dest="lambda_", type=float,
                   help="reset intensity (> 0)")
    p.add_argument("--c", type=float, help="drift magnitude (drift is -c)")
    p.add_argument("--x0", type=float, help="fixed initial value")
    p.add_argument("--x0-stationary", action="store_const", const=True,
                   dest="x0_stationary", help="start from the stationary law")
    p.add_argument("--xr", type=float, help="reset level")
    p.add_argument("--T", type=float, help="time horizon")
    p.add_argument("--u", type=float, help="level")
    p.add_argument("--w", type=float, help="second level (joint laws)")
    p.add_argument("--v", type=float, help="terminal-value level (window laws)")
    p.add_argument("--s", type=float, help="earlier time (joint laws)")
    p.add_argument("--z", type=float, help="terminal scaling (joint asymptotics)")
    p.add_argument("--r", type=float, help="boundary-layer offset (window asym)")
    p.add_argument("--delta", type=float, help="window length")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--workers", type=int, help="parallel workers")
    p.add_argument("--n-max", type=int, help="series truncation index")
    p.add_argument("--mc-samples", type=int, help="simplex MC draws per term")
    p.add_argument("--step", type=float, help="path discretization step")
    p.add_argument("--grid-step", type=float, help="survival-integral step")
    p.add_argument("--t-max", type=float, help="survival-integral horizon")
    p.add_argument("--out", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=["csv", "json", "text"],
                   help="output format")
    p.add_argument("--scale", type=float,
                   help="budget multiplier (1.0 = reference configuration)")
    p.add_argument("--tol", type=float, help="override check tolerances")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="resetbm",
        description="Brownian motion with exponential resetting: exact laws, "
                    "renewal series, asymptotics, simulation.")
    ap.add_argument("--version", action="version", version=VERSION_STRING)
    sub = ap.add_subparsers(dest="command", required=True)
    specs = [
        ("simulate", cmd_simulate, "sample one trajectory to CSV"),
        ("sup-cdf", cmd_sup_cdf, "supremum CDF curves over a level grid"),
        ("table1", cmd_table1, "mean first-passage table (series vs exact)"),
        ("table2", cmd_table2, "stationary supremum tail, intensity 2"),
        ("table3", cmd_table3, "stationary supremum tail, intensity 3"),
        ("validate", cmd_validate, "run the cross-oracle invariant suites"),
        ("eval", cmd_eval, "evaluate a single quantity by name"),
        ("benchmark", cmd_benchmark, "compare kernel backends"),
    ]
    for name, fn, help_ in specs:
        p = sub.add_parser(name, help=help_)
        if name == "eval":
            p.add_argument("evaluator", help="evaluator name")
        if name == "sup-cdf":
            p.add_argument("--lambda-list", dest="lambda_list",
                           help="comma-separated intensities")
            p.add_argument("--u-min", dest="u_min", type=float)
            p.add_argument("--u-max", dest="u_max", type=float)
            p.add_argument("--u-step", dest="u_step", type=float)
        if name == "validate":
            p.add_argument("--checks", help="comma-separated check names "
                                            "(default: all)")
        _add_common(p)
        p.set_defaults(func=fn)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    opt = _Options(args)
    try:
        return args.func(opt)
    except ResetBMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

import math

import numpy as np
import pytest

import resetbm.analytic as an
from resetbm.errors import ContractViolationError, ParameterError
from resetbm.numerics import adaptive_quad, poisson_tail
from resetbm.params import ModelParams
from resetbm.series import (SeriesConfig, SeriesResult, fpt_survival,
                            mean_fpt_exact, mean_fpt_series, optimal_lambda,
                            sample_dirichlet_simplex, simplex_term_mc,
                            stationary_sup_cdf_series, sup_cdf_bounds,
                            sup_cdf_curve, sup_cdf_series,
                            _stationary_first_factor_table)
from resetbm.simulate import RngStream, sample_sup_batch

P_SYM = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=0.0, xr=0.0)
P_SPLIT = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=0.0, xr=1.0)


class TestDirichletSimplex:
    def test_support(self):
        g = RngStream(1)
        for _ in range(2000):
            d = sample_dirichlet_simplex(4, 2.0, g)
            assert np.all(d > 0) and d.sum() < 2.0

    def test_component_mean(self):
        g = RngStream(2)
        draws = np.array([sample_dirichlet_simplex(3, 1.0, g)
                          for _ in range(40_000)])
        want = 1.0 / 4.0
        se = draws.std(axis=0) / math.sqrt(len(draws))
        assert np.all(np.abs(draws.mean(axis=0) - want) <= 3 * se)

    def test_single_component_is_uniform(self):
        g = RngStream(3)
        draws = np.array([sample_dirichlet_simplex(1, 1.0, g)[0]
                          for _ in range(50_000)])
        grid = np.linspace(0.05, 0.95, 19)
        ks = max(abs(float((draws <= q).mean()) - q) for q in grid)
        assert ks <= 0.005


class TestSimplexTermMC:
    def test_volume_n2(self):
        val, se = simplex_term_mc(2, 1.0, lambda s: 1.0, 200, RngStream(4))
        assert val == pytest.approx(0.5, abs=1e-12)
        assert se == 0.0

    def test_volume_n3_t2(self):
        val, _ = simplex_term_mc(3, 2.0, lambda s: 1.0, 50, RngStream(5))
        assert val == pytest.approx(8.0 / 6.0, abs=1e-12)

    def test_against_quadrature_n1(self):
        u, T = 1.0, 1.0

        def integrand(s):
            return (an.sup_cdf_drifted_bm(u, float(s[0]), 0.0, 1.0)
                    * an.sup_cdf_drifted_bm(u, T - float(s[0]), 0.0, 1.0))

        val, se = simplex_term_mc(1, T, integrand, 40_000, RngStream(6))
        quad = adaptive_quad(
            lambda s: an.sup_cdf_drifted_bm(u, s, 0.0, 1.0)
            * an.sup_cdf_drifted_bm(u, T - s, 0.0, 1.0),
            0.0, T, tol=1e-10).value
        assert abs(val - quad) <= 3 * se

    def test_contract_violation(self):
        with pytest.raises(ContractViolationError):
            simplex_term_mc(2, 1.0, lambda s: 1.5, 10, RngStream(7))


class TestSupCdfSeries:
    def test_levels_between_start_and_reset_are_closed_form(self):
        res = sup_cdf_series(0.5, 1.0, P_SPLIT)
        want = math.exp(-2.0) * (2 * an.norm_cdf(0.5) - 1.0)
        assert res.value == pytest.approx(want, abs=1e-12)
        assert res.mc_std_err == 0.0
        assert res.truncation_bound == 0.0

    def test_level_below_start(self):
        res = sup_cdf_series(-0.2, 1.0, P_SPLIT)
        assert res.value == 0.0

    def test_large_level_normalizes(self):
        cfg = SeriesConfig(n_max=60, mc_samples=2000, seed=11)
        res = sup_cdf_series(40.0, 1.0, P_SYM, cfg)
        assert abs(res.value - 1.0) <= res.truncation_bound \
            + 3 * res.mc_std_err + 1e-9

    def test_matches_exact_sampler(self):
        cfg = SeriesConfig(n_max=60, mc_samples=20_000, seed=12)
        res = sup_cdf_series(1.0, 1.0, P_SYM, cfg)
        sups = sample_sup_batch(1.0, P_SYM, RngStream(13), 200_000)
        emp = float((sups <= 1.0).mean())
        se = math.sqrt(emp * (1 - emp) / 200_000)
        assert abs(res.value - emp) <= 3 * math.hypot(se, res.mc_std_err)

    def test_truncation_bound_is_poisson_tail(self):
        cfg = SeriesConfig(n_max=10, mc_samples=100, seed=14)
        res = sup_cdf_series(1.0, 1.0, P_SYM, cfg)
        assert res.truncation_bound == pytest.approx(poisson_tail(10, 2.0),
                                                     abs=1e-15)

    def test_stationary_start_routes_to_stationary_series(self):
        p = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=None, xr=1.0)
        cfg = SeriesConfig(n_max=40, mc_samples=500, seed=15)
        a = sup_cdf_series(2.0, 1.0, p, cfg)
        b = stationary_sup_cdf_series(2.0, 1.0, p, cfg)
        assert a == b


class TestBounds:
    def test_ordering_on_grid(self):
        for u in np.linspace(-0.5, 3.0, 50):
            lo, hi = sup_cdf_bounds(u, 1.0, P_SPLIT)
            assert lo <= hi + 1e-15

    def test_nonpositive_level_lower_bound(self):
        lo, _ = sup_cdf_bounds(-0.3, 1.0, P_SYM)
        assert lo == pytest.approx(math.exp(-2.0), abs=1e-14)

    def test_series_inside_sandwich(self):
        cfg = SeriesConfig(n_max=80, mc_samples=4000, seed=16)
        for u in np.linspace(0.1, 2.6, 25):
            res = sup_cdf_series(u, 1.0, P_SYM, cfg)
            lo, hi = sup_cdf_bounds(u, 1.0, P_SYM)
            exceed = 1.0 - res.value
            slack = 3 * res.mc_std_err + res.truncation_bound
            assert lo - slack <= exceed <= hi + slack


class TestFptSurvival:
    def test_short_horizon(self):
        res = fpt_survival(1.0, 1e-9, P_SYM)
        assert res.value == pytest.approx(1.0, abs=1e-6)

    def test_identical_to_sup_series(self):
        cfg = SeriesConfig(n_max=30, mc_samples=1000, seed=17)
        assert fpt_survival(1.0, 1.0, P_SYM, cfg) == \
            sup_cdf_series(1.0, 1.0, P_SYM, cfg)


class TestMeanFpt:
    @pytest.mark.parametrize("lam,want", [
        (0.1, 5.639483), (1.269812, 3.088277), (2.269812, 3.269103)])
    def test_exact_values(self, lam, want):
        assert mean_fpt_exact(1.0, lam, 1.0) == pytest.approx(want, abs=1e-5)

    def test_series_reproduces_reference_row(self):
        p = ModelParams(sigma=1.0, lam=1.269812, c=0.0, x0=0.0, xr=0.0)
        cfg = SeriesConfig(n_max=60, mc_samples=1200, seed=18, workers=2)
        est = mean_fpt_series(1.0, p, cfg)
        assert abs(est.value - 3.083074) <= 0.06

    def test_worker_invariance(self):
        p = ModelParams(sigma=1.0, lam=1.0, c=0.0, x0=0.0, xr=0.0)
        vals = {mean_fpt_series(
            1.0, p, SeriesConfig(n_max=30, mc_samples=400, seed=19,
                                 t_max=10.0, grid_step=0.05,
                                 workers=w)).value for w in (1, 2, 8)}
        assert len(vals) == 1

    def test_invalid_args(self):
        with pytest.raises(ParameterError):
            mean_fpt_exact(-1.0, 1.0)
        with pytest.raises(ParameterError):
            mean_fpt_exact(1.0, 0.0)


class TestOptimalLambda:
    def test_reference_point(self):
        lam, val = optimal_lambda(1.0, 1.0)
        assert abs(lam - 1.26981) <= 1e-3
        assert val == pytest.approx(3.08828, abs=1e-4)

    def test_scaling_in_level(self):
        lam1, _ = optimal_lambda(1.0, 1.0)
        lam2, _ = optimal_lambda(2.0, 1.0)
        assert lam2 == pytest.approx(lam1 / 4.0, rel=1e-6)

    def test_scaling_in_volatility(self):
        lam1, _ = optimal_lambda(1.0, 1.0)
        lam4, _ = optimal_lambda(1.0, 2.0)
        assert lam4 == pytest.approx(4.0 * lam1, rel=1e-6)


class TestStationarySeries:
    P_STAT = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=None, xr=1.0)

    def test_first_factor_table_accuracy(self):
        tbl, inv_dt = _stationary_first_factor_table(2.0, 1.0, self.P_STAT)
        for t_req in (0.05, 0.3, 1.0):
            idx = int(round(t_req * inv_dt))
            t = idx / inv_dt  # compare exactly at a grid node

            def integrand(x):
                return (an.stationary_pdf(x, self.P_STAT)
                        * an.sup_cdf_drifted_bm(
                            np.maximum(2.0 - np.asarray(x), 1e-300), t,
                            0.0, 1.0))

            want = adaptive_quad(integrand, 1.0 - 30.0, 2.0, tol=1e-11,
                                 vectorized=True).value
            assert tbl[idx] == pytest.approx(want, abs=1e-8)

    def test_low_level_dominated_by_initial_mass(self):
        cfg = SeriesConfig(n_max=40, mc_samples=2000, seed=19)
        u = 1.0 - 30.0 / 2.0  # far below the reset level
        res = stationary_sup_cdf_series(u, 1.0, self.P_STAT, cfg)
        assert res.value <= float(an.stationary_cdf(u, self.P_STAT)) + 1e-12

    def test_large_level(self):
        cfg = SeriesConfig(n_max=60, mc_samples=2000, seed=20)
        res = stationary_sup_cdf_series(42.0, 1.0, self.P_STAT, cfg)
        assert abs(res.value - 1.0) <= res.truncation_bound \
            + 3 * res.mc_std_err + 1e-9

    def test_reference_tail_value(self):
        # exceedance at level 3 for lam=2, xr=1: reported 0.05031518
        cfg = SeriesConfig(n_max=60, mc_samples=30_000, seed=21)
        res = stationary_sup_cdf_series(3.0, 1.0, self.P_STAT, cfg)
        exceed = 1.0 - res.value
        comb = 3 * res.mc_std_err + res.truncation_bound + 5e-4
        assert abs(exceed - 0.0503) <= comb


class TestCurve:
    def test_monotone_realizationwise(self):
        cfg = SeriesConfig(n_max=60, mc_samples=1500, seed=22)
        res = sup_cdf_curve(np.linspace(0.05, 2.5, 40), 1.0, P_SYM, cfg)
        vals = [r.value for r in res]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_matches_pointwise_series(self):
        cfg = SeriesConfig(n_max=60, mc_samples=1500, seed=22)
        res_curve = sup_cdf_curve([1.0], 1.0, P_SYM, cfg)[0]
        res_point = sup_cdf_series(1.0, 1.0, P_SYM, cfg)
        assert res_curve.value == pytest.approx(res_point.value, abs=1e-12)


class TestSeriesResultType:
    def test_rejects_negative_errors(self):
        with pytest.raises(ParameterError):
            SeriesResult(value=0.5, truncation_bound=-1e-3, mc_std_err=0.0)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import resetbm.analytic as an
from resetbm.errors import (DomainError, ParameterError,
                            UnsupportedInputError)
from resetbm.numerics import adaptive_quad
from resetbm.params import ModelParams
from resetbm.simulate import (RngStream, sample_pair_at,
                              sample_stationary_init, sample_value_at)

P_BASE = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=0.0, xr=1.0)

# Frozen oracle for the drifted sup CDF at u=1, T=1, c=1: Richardson
# extrapolation in sqrt(step) of gridded-path MC (2e5 paths at steps 4e-4
# and 1e-4, seeds 101/202); value 2*p(1e-4) - p(4e-4) with its amplified
# binomial standard error.
F_MC_ORACLE = 0.908970
F_MC_ORACLE_SE = 0.00144


class TestNormTrio:
    def test_symmetry(self):
        assert an.norm_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
        assert an.norm_sf(0.0) == pytest.approx(0.5, abs=1e-15)

    def test_erf_oracle_value(self):
        # Phi(2) from the erf series: 0.5*(1 + erf(sqrt(2)))
        x = math.sqrt(2.0)
        term, total, k = x, x, 0
        while abs(term) > 1e-20:
            k += 1
            term *= -x * x / k
            total += term / (2 * k + 1)
        erf = 2.0 / math.sqrt(math.pi) * total
        assert an.norm_cdf(2.0) == pytest.approx(0.5 * (1 + erf), abs=1e-12)
        assert an.norm_cdf(2.0) == pytest.approx(0.977249868, abs=1e-9)

    def test_sf_no_cancellation(self):
        assert an.norm_sf(37.0) > 0.0
        assert an.norm_sf(10.0) == pytest.approx(7.619853e-24, rel=1e-5)
        assert an.norm_cdf(10.0) + an.norm_sf(10.0) == pytest.approx(1.0,
                                                                     abs=1e-15)


class TestSupCdfDriftedBM:
    def test_zero_for_nonpositive_levels(self):
        assert an.sup_cdf_drifted_bm(-0.5, 1.0, 0.3, 1.0) == 0.0
        assert an.sup_cdf_drifted_bm(0.0, 1.0, 0.0, 1.0) == 0.0

    def test_zero_drift_reflection(self):
        got = an.sup_cdf_drifted_bm(1.0, 1.0, 0.0, 1.0)
        assert got == pytest.approx(2 * an.norm_cdf(1.0) - 1.0, abs=1e-14)

    def test_mc_oracle_with_drift(self):
        got = an.sup_cdf_drifted_bm(1.0, 1.0, 1.0, 1.0)
        assert abs(got - F_MC_ORACLE) <= 3.0 * F_MC_ORACLE_SE

    def test_invalid_params(self):
        with pytest.raises(ParameterError):
            an.sup_cdf_drifted_bm(1.0, -1.0, 0.0, 1.0)
        with pytest.raises(ParameterError):
            an.sup_cdf_drifted_bm(1.0, 1.0, 0.0, 0.0)

    def test_sf_complements_cdf(self):
        for u, c in [(0.5, 0.0), (2.0, 1.3), (3.0, -0.7)]:
            f = an.sup_cdf_drifted_bm(u, 0.7, c, 1.2)
            s = an.sup_sf_drifted_bm(u, 0.7, c, 1.2)
            assert f + s == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=-1.0, max_value=4.0),
           st.floats(min_value=-1.5, max_value=1.5))
    def test_range_and_monotonicity(self, u, c):
        f = an.sup_cdf_drifted_bm(u, 1.3, c, 0.9)
        f2 = an.sup_cdf_drifted_bm(u + 0.25, 1.3, c, 0.9)
        assert 0.0 <= f <= 1.0
        assert f2 >= f - 1e-12


class TestResetCdf1d:
    def test_normalization_at_large_level(self):
        u = P_BASE.xr + 60 * math.sqrt(0.7)
        assert an.reset_cdf_1d(u, 0.7, P_BASE) == pytest.approx(1.0, abs=1e-9)

    def test_no_reset_degenerate_limit(self):
        p = ModelParams(sigma=1.0, lam=1e-12, c=0.5, x0=0.2, xr=5.0)
        got = an.reset_cdf_1d(1.0, 0.8, p)
        want = an.norm_cdf((1.0 - 0.2 + 0.5 * 0.8) / math.sqrt(0.8))
        assert got == pytest.approx(want, abs=1e-6)

    def test_against_exact_sampler(self):
        n = 400_000
        draws = sample_value_at(0.7, P_BASE, RngStream(321), n)
        emp = float((draws <= 1.0).mean())
        se = math.sqrt(emp * (1 - emp) / n)
        got = an.reset_cdf_1d(1.0, 0.7, P_BASE)
        assert abs(got - emp) <= 3.0 * se

    def test_stationary_x0_rejected(self):
        p = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=None, xr=1.0)
        with pytest.raises(UnsupportedInputError):
            an.reset_cdf_1d(1.0, 0.7, p)


class TestStationaryLaw:
    def test_symmetric_center(self):
        assert an.stationary_sf(P_BASE.xr, P_BASE) == pytest.approx(0.5,
                                                                    abs=1e-15)

    def test_tail_formula(self):
        # alpha = 2 for sigma=1, lam=2, c=0
        for u in (1.0, 1.5, 2.5):
            assert an.stationary_sf(u, P_BASE) == pytest.approx(
                0.5 * math.exp(-2.0 * (u - 1.0)), abs=1e-14)

    def test_pdf_normalization_by_quadrature(self):
        p = ModelParams(sigma=1.3, lam=0.8, c=-0.6, x0=0.0, xr=0.5)
        ap = an.alpha_param(p)
        lo = p.xr - 40.0 / ap.alpha
        hi = p.xr + 40.0 / ap.alpha
        mass = adaptive_quad(lambda x: an.stationary_pdf(x, p), lo, hi,
                             tol=1e-10, vectorized=True).value
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_cdf_sf_consistency(self):
        p = ModelParams(sigma=0.7, lam=1.5, c=0.9, x0=0.0, xr=-0.3)
        for x in np.linspace(-4, 4, 17):
            assert an.stationary_cdf(x, p) + an.stationary_sf(x, p) == \
                pytest.approx(1.0, abs=1e-14)

    def test_matches_stationary_sampler(self):
        p = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=None, xr=1.0)
        g = RngStream(77)
        draws = np.array([sample_stationary_init(g, p) for _ in range(50_000)])
        emp = float((draws > 2.0).mean())
        assert abs(emp - 0.5 * math.exp(-2.0)) <= 0.004


class TestAlphaParam:
    # a downward drift (c > 0) lightens the upper flank, so its rate grows
    @pytest.mark.parametrize("sigma,lam,c,alpha", [
        (1.0, 2.0, 0.0, 2.0),
        (1.0, 3.0, 0.0, math.sqrt(6.0)),
        (1.0, 2.0, 1.0, math.sqrt(5.0) + 1.0),
        (1.0, 2.0, -1.0, math.sqrt(5.0) - 1.0),
    ])
    def test_values(self, sigma, lam, c, alpha):
        p = ModelParams(sigma=sigma, lam=lam, c=c, x0=0.0, xr=0.0)
        assert an.alpha_param(p).alpha == pytest.approx(alpha, abs=1e-14)

    def test_tail_rate_matches_exponential_age_integral(self):
        # rate extracted from the authoritative semi-infinite representation
        p = ModelParams(sigma=0.8, lam=1.0, c=0.7, x0=0.0, xr=-0.5)
        ap = an.alpha_param(p)
        u1, u2 = p.xr + 2.0, p.xr + 3.0
        rate = math.log(an.stationary_sf(u1, p) / an.stationary_sf(u2, p))
        assert rate == pytest.approx(ap.alpha * (u2 - u1), rel=1e-12)

    def test_zero_drift_simplification(self):
        p = ModelParams(sigma=1.7, lam=0.9, c=0.0, x0=0.0, xr=0.0)
        assert an.alpha_param(p).alpha == pytest.approx(
            math.sqrt(2 * 0.9) / 1.7, abs=1e-14)


class TestJointCdf:
    def test_normalization(self):
        big = 1.0 + 40 * math.sqrt(0.8)
        assert an.joint_cdf(0.3, 0.8, big, big, P_BASE) == pytest.approx(
            1.0, abs=1e-6)

    def test_marginal_consistency(self):
        big = 1.0 + 40 * math.sqrt(0.8)
        got = an.joint_cdf(0.3, 0.8, 0.5, big, P_BASE)
        assert got == pytest.approx(an.reset_cdf_1d(0.5, 0.3, P_BASE),
                                    abs=1e-6)

    def test_against_exact_pair_sampler(self):
        n = 400_000
        xs, xt = sample_pair_at(0.3, 0.8, P_BASE, RngStream(12), n)
        emp = float(((xs <= 0.5) & (xt <= 1.5)).mean())
        se = math.sqrt(emp * (1 - emp) / n)
        got = an.joint_cdf(0.3, 0.8, 0.5, 1.5, P_BASE)
        assert abs(got - emp) <= 3.0 * se

    def test_s_zero_reduces_to_marginal(self):
        got = an.joint_cdf(0.0, 0.8, 0.5, 1.5, P_BASE)
        assert got == pytest.approx(an.reset_cdf_1d(1.5, 0.8, P_BASE),
                                    abs=1e-12)
        assert an.joint_cdf(0.0, 0.8, -0.5, 1.5, P_BASE) == 0.0

    def test_bad_times(self):
        with pytest.raises(ParameterError):
            an.joint_cdf(0.9, 0.8, 0.0, 0.0, P_BASE)


class TestJointDensity:
    def test_nonnegative_on_grid(self):
        grid = np.linspace(-1.5, 2.5, 20)
        vals = [an.joint_density(0.3, 0.8, u, w, P_BASE)
                for u in grid for w in grid]
        assert min(vals) >= 0.0

    def test_normalization_by_quadrature(self):
        def inner(u):
            return adaptive_quad(
                lambda w: np.array([an.joint_density(0.3, 0.8, u, wi, P_BASE)
                                    for wi in np.atleast_1d(w)]),
                -5.0, 6.0, tol=1e-6, vectorized=True).value

        mass = adaptive_quad(
            lambda u: np.array([inner(ui) for ui in np.atleast_1d(u)]),
            -5.0, 6.0, tol=1e-5, vectorized=True).value
        assert mass == pytest.approx(1.0, abs=1e-4)

    def test_matches_mixed_difference_of_cdf(self):
        s, t, u, w, h = 0.3, 0.8, 0.4, 0.9, 2e-3
        c = an.joint_cdf
        dd = (c(s, t, u + h, w + h, P_BASE) - c(s, t, u + h, w - h, P_BASE)
              - c(s, t, u - h, w + h, P_BASE) + c(s, t, u - h, w - h, P_BASE)
              ) / (4 * h * h)
        got = an.joint_density(s, t, u, w, P_BASE)
        assert dd == pytest.approx(got, rel=1e-3)


class TestStationaryJointCdf:
    def test_normalization(self):
        big = 1.0 + 40.0
        got = an.stationary_joint_cdf(0.5, big, big, P_BASE)
        assert got == pytest.approx(1.0, abs=1e-5)

    def test_marginal_is_stationary_law(self):
        big = 1.0 + 40.0
        got = an.stationary_joint_cdf(0.5, 0.8, big, P_BASE)
        assert got == pytest.approx(an.stationary_cdf(0.8, P_BASE), abs=1e-5)
        got2 = an.stationary_joint_cdf(0.5, big, 0.8, P_BASE)
        assert got2 == pytest.approx(an.stationary_cdf(0.8, P_BASE), abs=1e-5)

    def test_against_stationary_pair_sampler(self):
        p = ModelParams(sigma=1.0, lam=2.0, c=0.0, x0=None, xr=1.0)
        n = 400_000
        ys, yt = sample_pair_at(0.25, 0.75, p, RngStream(13), n)
        emp = float(((ys <= 1.0) & (yt <= 1.0)).mean())
        se = math.sqrt(emp * (1 - emp) / n)
        got = an.stationary_joint_cdf(0.5, 1.0, 1.0, P_BASE)
        assert abs(got - emp) <= 3.0 * se

    def test_bad_delta(self):
        with pytest.raises(ParameterError):
            an.stationary_joint_cdf(0.0, 1.0, 1.0, P_BASE)


class TestWinMinJoint:
    def test_vacuous_constraints(self):
        s, d = 1.5, 0.5
        low = -40.0 * math.sqrt(s)
        got = an.win_min_joint(s, d, low, low, 0.5, 1.0)
        assert got == pytest.approx(1.0, abs=1e-6)

    def test_nonincreasing_in_w(self):
        vals = [an.win_min_joint(1.5, 0.5, 0.2, w, 0.5, 1.0)
                for w in np.linspace(-1.0, 2.0, 13)]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))

    def test_against_window_mc(self):
        # window [1.0, 1.5] of a drifted BM: inf > 0.2 and W_1 > 0.3
        s, d, u, w, c = 1.5, 0.5, 0.2, 0.3, 0.5
        n, h = 50_000, 1e-4
        rng = np.random.default_rng(8)
        age = s - d
        m = int(round(d / h))
        hits = 0
        for lo in range(0, n, 1000):
            k = min(1000, n - lo)
            w_start = rng.standard_normal(k) * math.sqrt(age)
            inc = rng.standard_normal((k, m)) * math.sqrt(h) - c * h
            np.cumsum(inc, axis=1, out=inc)
            drift_start = w_start - c * age
            win_inf = drift_start + np.minimum(inc.min(axis=1), 0.0)
            hits += int(((win_inf > u) & (w_start > w)).sum())
        emp = hits / n
        se = math.sqrt(emp * (1 - emp) / n)
        got = an.win_min_joint(s, d, u, w, c, 1.0)
        # grid inf in the MC misses excursions, biasing emp upward by O(sqrt(h))
        assert abs(got - emp) <= 3.0 * se + 0.6 * math.sqrt(h)

    def test_bad_window(self):
        with pytest.raises(ParameterError):
            an.win_min_joint(0.5, 0.5, 0.0, 0.0, 0.0, 1.0)


class TestInfWindowExact:
    P = ModelParams(sigma=1.0, lam=1.0, c=0.0, x0=0.0, xr=0.5)

    def test_vanishing_at_huge_level(self):
        u = 0.5 + 40 * math.sqrt(1.5)
        assert an.inf_window_exact(1.0, 0.5, u, u, self.P) <= 1e-8

    def test_v_below_u_is_ignored(self):
        a = an.inf_window_exact(1.0, 0.5, 1.2, 0.3, self.P)
        b = an.inf_window_exact(1.0, 0.5, 1.2, 1.2, self.P)
        assert a == pytest.approx(b, abs=1e-10)

    def test_level_at_or_below_reset_level_rejected(self):
        with pytest.raises(DomainError):
            an.inf_window_exact(1.0, 0.5, 0.5, 0.5, self.P)

    def test_monotone_in_level(self):
        vals = [an.inf_window_exact(1.0, 0.5, u, u, self.P)
                for u in (0.8, 1.2, 1.6)]
        assert vals[0] >= vals[1] >= vals[2]

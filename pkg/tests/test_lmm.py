import math

import numpy as np
import pytest
import scipy.optimize
import scipy.stats
import statsmodels.formula.api as smf

import mixlm.lmm as lmm_mod
from conftest import balanced_groups, csv_frame, frame_of
from mixlm.dataframe import Column, DataFrame
from mixlm.errors import ConvergenceError, DataError, NoRandomEffectsError, SingularDesignError
from mixlm.lmm import LmmProblem, coef_by_group, fit_lmm, profiled_objective, theta_blocks

TOY = csv_frame("y,g\n2.1,a\n3.4,a\n1.9,a\n2.8,a\n5.0,b\n4.1,b\n6.2,b\n5.5,b\n")
THETA_GRID = [0.0, 0.25, 0.5, 1.0, 2.0]


def dense_deviance(frame, theta, reml):
    """-2 log-likelihood from the dense marginal covariance, sigma^2 by 1-D search."""
    X, y, Z = np.asarray(frame.X), np.asarray(frame.y), np.asarray(frame.Z)
    n, p = X.shape
    blocks = theta_blocks(frame, theta)
    lam = np.zeros((Z.shape[1], Z.shape[1]))
    off = 0
    for T, b in zip(blocks, frame.z_blocks):
        for j in range(b.n_groups):
            lam[off + j * b.q: off + (j + 1) * b.q, off + j * b.q: off + (j + 1) * b.q] = T
        off += b.q * b.n_groups
    V0 = np.eye(n) + Z @ lam @ lam.T @ Z.T
    V0i = np.linalg.inv(V0)
    beta = np.linalg.solve(X.T @ V0i @ X, X.T @ V0i @ y)
    mean = X @ beta

    def neg2(log_s2):
        s2 = math.exp(log_s2)
        val = -2.0 * scipy.stats.multivariate_normal.logpdf(y, mean, s2 * V0)
        if reml:
            val += np.linalg.slogdet(X.T @ V0i @ X / s2)[1] - p * math.log(2 * math.pi)
        return val

    res = scipy.optimize.minimize_scalar(neg2, bounds=(-20, 20), method="bounded",
                                         options={"xatol": 1e-12})
    return res.fun


class TestDenseOracle:
    @pytest.mark.parametrize("theta", THETA_GRID)
    @pytest.mark.parametrize("reml", [False, True])
    def test_toy_grid(self, theta, reml):
        fr = frame_of(TOY, "y ~ 1 + (1|g)")
        assert profiled_objective([theta], fr, reml) == pytest.approx(
            dense_deviance(fr, [theta], reml), abs=1e-6)

    def test_random_slope_crossed(self, synth_df):
        fr = frame_of(synth_df, "frequency ~ attitude + gender + (1+attitude|subject) + (1|scenario)")
        theta = np.array([1.3, -0.2, 0.4, 0.7])
        for reml in (False, True):
            assert profiled_objective(theta, fr, reml) == pytest.approx(
                dense_deviance(fr, theta, reml), abs=1e-6)

    def test_optimum_is_local_minimum(self, synth_df):
        fr = frame_of(synth_df, "frequency ~ attitude + gender + (1|subject) + (1|scenario)")
        fit = fit_lmm(fr, reml=False)
        base = dense_deviance(fr, fit.theta, False)
        assert fit.criterion == pytest.approx(base, abs=1e-6)
        for k in range(fit.theta.size):
            for step in (-1e-3, 1e-3):
                th = fit.theta.copy()
                th[k] += step
                assert dense_deviance(fr, th, False) >= base - 1e-7


class TestCollapse:
    @pytest.mark.parametrize("reml", [False, True])
    def test_theta_zero_is_ols(self, synth_df, reml):
        fr = frame_of(synth_df, "frequency ~ attitude + gender + (1|subject) + (1|scenario)")
        X, y = np.asarray(fr.X), np.asarray(fr.y)
        n, p = X.shape
        beta = np.linalg.lstsq(X, y, rcond=None)[0]
        rss = float(np.sum((y - X @ beta) ** 2))
        if reml:
            expected = np.linalg.slogdet(X.T @ X)[1] + (n - p) * (1 + math.log(2 * math.pi * rss / (n - p)))
        else:
            expected = n * (1 + math.log(2 * math.pi * rss / n))
        assert profiled_objective(np.zeros(2), fr, reml) == pytest.approx(expected, abs=1e-8)
        sol = LmmProblem(fr).solve(np.zeros(2), reml)
        np.testing.assert_allclose(sol["beta"], beta, atol=1e-8)
        assert np.all(sol["b"] == 0)


class TestEquivariance:
    def test_shift(self, synth_df):
        fr = frame_of(synth_df, "frequency ~ attitude + gender + (1|subject) + (1|scenario)")
        vals = synth_df["frequency"].values + 1000.0
        shifted = synth_df.with_column(Column.numeric("frequency", vals))
        a = fit_lmm(fr)
        b = fit_lmm(frame_of(shifted, "frequency ~ attitude + gender + (1|subject) + (1|scenario)"))
        assert b.coefficients[0] - a.coefficients[0] == pytest.approx(1000.0, abs=1e-6)
        np.testing.assert_allclose(b.coefficients[1:], a.coefficients[1:], atol=1e-6)
        np.testing.assert_allclose(b.std_errors, a.std_errors, atol=1e-6)
        for va, vb in zip(a.varcomps, b.varcomps):
            np.testing.assert_allclose(vb.covariance, va.covariance, rtol=1e-6)
        assert b.criterion == pytest.approx(a.criterion, abs=1e-6)

    def test_scale(self, synth_df):
        formula = "frequency ~ attitude + (1|subject) + (1|scenario)"
        a = fit_lmm(frame_of(synth_df, formula))
        vals = synth_df["frequency"].values * 0.01
        b = fit_lmm(frame_of(synth_df.with_column(Column.numeric("frequency", vals)), formula))
        np.testing.assert_allclose(b.coefficients, 0.01 * a.coefficients, rtol=1e-6)
        np.testing.assert_allclose(b.theta, a.theta, atol=1e-6)

    def test_row_permutation(self, synth_df):
        formula = "frequency ~ attitude + gender + (1+attitude|subject) + (1|scenario)"
        a = fit_lmm(frame_of(synth_df, formula))
        perm = np.random.default_rng(0).permutation(synth_df.n_rows)
        b = fit_lmm(frame_of(synth_df.take(perm), formula))
        np.testing.assert_array_equal(a.coefficients, b.coefficients)
        np.testing.assert_array_equal(a.theta, b.theta)


class TestBlups:
    def test_zero_sum_and_shrinkage(self):
        df = balanced_groups()
        fit = fit_lmm(frame_of(df, "y ~ 1 + (1|g)"))
        b = fit.blups[0][:, 0]
        assert abs(b.sum()) < 1e-8
        y = np.asarray(fit.frame.y)
        codes = np.asarray(fit.frame.z_blocks[0].group_codes)
        dev = np.array([y[codes == j].mean() for j in range(5)]) - y.mean()
        tau2, s2 = fit.varcomps[0].variance, fit.residual_variance
        k = tau2 / (tau2 + s2 / 4)
        np.testing.assert_allclose(b, k * dev, atol=1e-8)
        assert np.all((b - 0) * (b - dev) <= 1e-12)

    def test_coef_by_group_random_intercept(self, synth_df):
        fit = fit_lmm(frame_of(synth_df, "frequency ~ attitude + gender + (1|subject) + (1|scenario)"))
        subj, scen = coef_by_group(fit)
        assert subj.groups == ("F1", "F2", "F3", "M3", "M4", "M7")
        assert subj.columns == fit.labels
        for table in (subj, scen):
            np.testing.assert_allclose(table.values[:, 1:], np.tile(fit.coefficients[1:], (table.values.shape[0], 1)))
        np.testing.assert_allclose(subj.values[:, 0], fit.coefficients[0] + fit.blups[0][:, 0])
        assert subj.row("F2")["(Intercept)"] == pytest.approx(subj.values[1, 0])

    def test_coef_by_group_slope_not_in_fixed(self, synth_df):
        fit = fit_lmm(frame_of(synth_df, "frequency ~ 1 + (1+attitude|subject)"))
        (table,) = coef_by_group(fit)
        assert table.columns == ("(Intercept)", "attitudepol")
        np.testing.assert_allclose(table.values[:, 1], fit.blups[0][:, 1])


# Published lme4 results for the sleepstudy data (Bates et al. 2015, JSS).
class TestSleepstudy:
    def test_random_slopes_reml(self, sleep_df):
        fit = fit_lmm(frame_of(sleep_df, "Reaction ~ Days + (Days|Subject)"))
        np.testing.assert_allclose(fit.coefficients, [251.405, 10.467], atol=1e-3)
        np.testing.assert_allclose(fit.std_errors, [6.825, 1.546], atol=1e-3)
        vc = fit.varcomps[0]
        np.testing.assert_allclose(vc.variances, [612.09, 35.07], rtol=1e-3)
        assert vc.correlations[1, 0] == pytest.approx(0.066, abs=1e-3)
        assert fit.residual_variance == pytest.approx(654.94, rel=1e-4)
        assert fit.criterion == pytest.approx(1743.6, abs=0.05)
        assert fit.fixed_correlation[0, 1] == pytest.approx(-0.138, abs=1e-3)

    def test_random_slopes_ml(self, sleep_df):
        fit = fit_lmm(frame_of(sleep_df, "Reaction ~ Days + (Days|Subject)"), reml=False)
        assert fit.log_likelihood == pytest.approx(-875.97, abs=0.01)
        assert fit.aic == pytest.approx(1763.94, abs=0.01)
        assert fit.bic == pytest.approx(1783.10, abs=0.01)

    def test_random_intercept_reml(self, sleep_df):
        fit = fit_lmm(frame_of(sleep_df, "Reaction ~ Days + (1|Subject)"))
        assert fit.varcomps[0].variance == pytest.approx(1378.18, rel=1e-4)
        assert fit.residual_variance == pytest.approx(960.46, rel=1e-4)
        np.testing.assert_allclose(fit.std_errors, [9.747, 0.804], atol=1e-3)
        assert fit.criterion == pytest.approx(1786.5, abs=0.05)


@pytest.fixture(scope="module")
def slope_data():
    rng = np.random.default_rng(11)
    g = np.repeat(np.arange(12), 8)
    x = rng.normal(size=g.size)
    u0, u1 = rng.normal(0, 2.0, 12), rng.normal(0, 0.7, 12)
    y = 5 + 1.5 * x + u0[g] + u1[g] * x + rng.normal(size=g.size)
    return {"y": y, "x": x, "g": np.array([f"s{k:02d}" for k in g])}


class TestStatsmodelsOracle:
    @pytest.mark.parametrize("reml", [True, False])
    def test_random_slope(self, slope_data, reml):
        data = slope_data
        df = DataFrame((Column.numeric("y", data["y"]), Column.numeric("x", data["x"]),
                        Column.categorical("g", data["g"])))
        fit = fit_lmm(frame_of(df, "y ~ x + (1 + x | g)"), reml=reml)
        ref = smf.mixedlm("y ~ x", data, groups=data["g"], re_formula="~x").fit(
            reml=reml, method=["lbfgs"])
        np.testing.assert_allclose(fit.coefficients, ref.fe_params, rtol=1e-4)
        np.testing.assert_allclose(fit.varcomps[0].covariance, ref.cov_re, rtol=1e-3, atol=1e-4)
        assert fit.residual_variance == pytest.approx(ref.scale, rel=1e-4)
        if not reml:
            assert fit.log_likelihood == pytest.approx(ref.llf, abs=1e-4)


class TestErrors:
    def test_no_random_effects(self, synth_df):
        with pytest.raises(NoRandomEffectsError, match="No random effects terms specified in formula"):
            fit_lmm(frame_of(synth_df, "frequency ~ attitude"))

    def test_too_few_rows(self):
        df = csv_frame("y,x,g\n1,1,a\n2,2,b\n")
        with pytest.raises(DataError):
            fit_lmm(frame_of(df, "y ~ x + (1|g)"))

    def test_singular_fixed(self, synth_df):
        vals = np.where(synth_df["gender"].values == 1, 1.0, 0.0)
        df = synth_df.with_column(Column.numeric("male", vals))
        with pytest.raises(SingularDesignError):
            fit_lmm(frame_of(df, "frequency ~ gender + male + (1|scenario)"))

    def test_convergence_failure(self, synth_df, monkeypatch):
        monkeypatch.setattr(lmm_mod, "MAX_EVALS", 3)
        with pytest.raises(ConvergenceError) as info:
            fit_lmm(frame_of(synth_df, "frequency ~ attitude + (1|subject) + (1|scenario)"))
        assert info.value.theta is not None

    def test_bad_theta_shape(self, synth_df):
        with pytest.raises(ValueError):
            profiled_objective([1.0], frame_of(synth_df, "frequency ~ 1 + (1|subject) + (1|scenario)"), True)


class TestFitFields:
    def test_counts_and_ic(self, synth_df):
        fit = fit_lmm(frame_of(synth_df, "frequency ~ attitude + (1|subject) + (1|scenario)"))
        assert fit.n_obs == 83 and fit.group_sizes == (6, 7)
        assert fit.n_params == 5
        assert fit.aic == pytest.approx(fit.criterion + 10)
        assert fit.bic == pytest.approx(fit.criterion + 5 * math.log(83))
        assert fit.ml_deviance_at_estimate == pytest.approx(profiled_objective(fit.theta, fit.frame, False))
        np.testing.assert_allclose(fit.fitted + fit.residuals, fit.frame.y)
        assert np.all(fit.theta >= 0)

    def test_start_value(self, synth_df):
        fr = frame_of(synth_df, "frequency ~ attitude + (1|subject) + (1|scenario)")
        a = fit_lmm(fr)
        b = fit_lmm(fr, start=a.theta)
        assert b.criterion == pytest.approx(a.criterion, abs=1e-8)

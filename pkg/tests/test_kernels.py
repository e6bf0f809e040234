import numpy as np
import pytest

from conftest import frame_of
from mixlm import kernels
from mixlm.lmm import LmmProblem, fit_lmm

FORMULAS = [
    "frequency ~ attitude + (1|subject)",
    "frequency ~ attitude + gender + (1|subject) + (1|scenario)",
    "frequency ~ attitude + gender + (1+attitude|subject) + (1+attitude|scenario)",
]


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="extension not built")
@pytest.mark.parametrize("formula", FORMULAS)
def test_compiled_matches_python(synth_df, formula):
    fr = frame_of(synth_df, formula)
    fast = LmmProblem(fr, kernels.PlsKernel)
    slow = LmmProblem(fr, kernels.PythonPlsKernel)
    rng = np.random.default_rng(4)
    for _ in range(25):
        theta = rng.uniform(-2, 2, fast.n_theta)
        for reml in (False, True):
            a, b = fast.deviance(theta, reml), slow.deviance(theta, reml)
            assert a == pytest.approx(b, rel=1e-12, abs=1e-9)


@pytest.mark.parametrize("formula", FORMULAS)
def test_lambda_matrix_agrees(synth_df, formula):
    fr = frame_of(synth_df, formula)
    prob = LmmProblem(fr)
    theta = np.linspace(0.3, 1.7, prob.n_theta)
    lam = prob._py_kernel.lambda_matrix(theta)
    if hasattr(prob.kernel, "lambda_matrix"):
        np.testing.assert_array_equal(np.asarray(prob.kernel.lambda_matrix(theta)), lam)
    assert np.allclose(lam, np.tril(lam))


def test_python_fallback_fit_matches(synth_df, monkeypatch):
    fr = frame_of(synth_df, FORMULAS[1])
    a = fit_lmm(fr)
    import mixlm.lmm as lmm_mod
    monkeypatch.setattr(lmm_mod, "PlsKernel", kernels.PythonPlsKernel)
    b = fit_lmm(fr)
    np.testing.assert_allclose(b.coefficients, a.coefficients, rtol=1e-9)
    assert b.criterion == pytest.approx(a.criterion, abs=1e-8)


def test_large_theta_stays_finite(synth_df):
    fr = frame_of(synth_df, FORMULAS[0])
    for cls in {kernels.PlsKernel, kernels.PythonPlsKernel}:
        prob = LmmProblem(fr, cls)
        assert np.isfinite(prob.deviance(np.array([1e3]), True))

import numpy as np
import pytest

from mixlm.optimize import nelder_mead


def test_quadratic():
    res = nelder_mead(lambda x: (x[0] - 1) ** 2 + 3 * (x[1] + 2) ** 2, np.zeros(2))
    assert res.converged
    np.testing.assert_allclose(res.x, [1, -2], atol=1e-6)
    assert res.fun < 1e-10


def test_rosenbrock():
    f = lambda x: 100 * (x[1] - x[0] ** 2) ** 2 + (1 - x[0]) ** 2
    res = nelder_mead(f, np.array([-1.2, 1.0]))
    assert res.converged
    np.testing.assert_allclose(res.x, [1, 1], atol=1e-4)


def test_one_dimensional():
    res = nelder_mead(lambda x: abs(x[0] - 0.3), np.array([2.0]))
    assert res.x[0] == pytest.approx(0.3, abs=1e-7)


def test_budget_exhausted():
    res = nelder_mead(lambda x: float(np.sum(x ** 2)), np.ones(3) * 50, max_evals=20)
    assert not res.converged and res.n_evals <= 21


def test_deterministic():
    f = lambda x: float(np.sum((x - np.arange(4)) ** 2))
    a, b = nelder_mead(f, np.zeros(4)), nelder_mead(f, np.zeros(4))
    assert np.array_equal(a.x, b.x) and a.n_evals == b.n_evals

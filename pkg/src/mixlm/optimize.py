"""Derivative-free Nelder-Mead simplex minimizer."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class OptimizeResult:
    x: np.ndarray
    fun: float
    n_evals: int
    converged: bool


def nelder_mead(
    fun: Callable[[np.ndarray], float],
    x0,
    step=0.1,
    ftol: float = 1e-10,
    xtol: float = 1e-8,
    max_evals: int = 10_000,
) -> OptimizeResult:
    """Minimize ``fun`` starting from ``x0``.

    The initial simplex offsets each coordinate by ``step`` (scalar or
    per-coordinate). Converged when the spread of function values over the
    simplex is below ``ftol`` and the largest coordinate distance of any
    vertex from the best one is below ``xtol``; both are absolute.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    steps = np.broadcast_to(np.asarray(step, dtype=float), (dim,))
    simplex = np.vstack([x0] + [x0 + steps[i] * np.eye(dim)[i] for i in range(dim)])
    values = np.array([fun(v) for v in simplex])
    n_evals = dim + 1
    if dim == 0:
        return OptimizeResult(x0, float(values[0]), n_evals, True)

    while True:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        spread = values[-1] - values[0]
        diameter = np.max(np.abs(simplex[1:] - simplex[0]))
        if spread < ftol and diameter < xtol:
            return OptimizeResult(simplex[0].copy(), float(values[0]), n_evals, True)
        if n_evals >= max_evals:
            return OptimizeResult(simplex[0].copy(), float(values[0]), n_evals, False)

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + (centroid - worst)
        fr = fun(xr)
        n_evals += 1
        if fr < values[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = fun(xe)
            n_evals += 1
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + 0.5 * (xr - centroid)
        else:
            xc = centroid + 0.5 * (worst - centroid)
        fc = fun(xc)
        n_evals += 1
        if fc < min(fr, values[-1]):
            simplex[-1], values[-1] = xc, fc
            continue
        # shrink toward the best vertex
        simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
        for i in range(1, dim + 1):
            values[i] = fun(simplex[i])
        n_evals += dim

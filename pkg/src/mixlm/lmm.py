"""Linear mixed-effects models fitted by profiled ML or REML.

The random effects are written as ``b = Lambda(theta) u`` with spherical
``u``; Lambda is block diagonal with one lower-triangular q x q factor per
random term, repeated across that term's groups, and is expressed relative
to the residual standard deviation. For fixed theta the fixed effects and
``u`` come from one penalized least-squares solve, and the residual
variance is profiled out analytically, leaving a deviance in theta alone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .design import ModelFrame
from .errors import ConvergenceError, DataError, NoRandomEffectsError
from .kernels import PlsKernel, PythonPlsKernel
from .ols import _rank_checked_qr
from .optimize import nelder_mead

LOG_2PI = math.log(2.0 * math.pi)
MAX_EVALS = 10_000
FTOL = 1e-10
XTOL = 1e-8
CORR_WARN = 0.99


def theta_size(frame: ModelFrame) -> int:
    return sum(b.q * (b.q + 1) // 2 for b in frame.z_blocks)


def theta_start(frame: ModelFrame, scale: float = 1.0) -> np.ndarray:
    """Identity relative factors (times ``scale``), lme4-style layout."""
    out = []
    for b in frame.z_blocks:
        for c in range(b.q):
            for r in range(c, b.q):
                out.append(scale if r == c else 0.0)
    return np.array(out)


def theta_blocks(frame: ModelFrame, theta) -> list[np.ndarray]:
    """Split ``theta`` into one lower-triangular factor per random term.

    Entries of each factor are stored column by column, diagonal first.
    """
    theta = np.asarray(theta, dtype=float)
    out, k = [], 0
    for b in frame.z_blocks:
        T = np.zeros((b.q, b.q))
        for c in range(b.q):
            for r in range(c, b.q):
                T[r, c] = theta[k]
                k += 1
        out.append(T)
    return out


def canonical_theta(frame: ModelFrame, theta) -> np.ndarray:
    """Flip factor columns with a negative diagonal.

    Lambda Lambda' and hence the deviance are unchanged, so the optimizer can
    search without bounds and the reported factor still has a nonnegative
    diagonal.
    """
    out = []
    for T in theta_blocks(frame, theta):
        for c in range(T.shape[0]):
            if T[c, c] < 0:
                T[:, c] = -T[:, c]
            out.extend(T[c:, c])
    return np.array(out)


class LmmProblem:
    """Cross-products and Lambda layout for one model frame.

    Rows are put into a canonical order before any sums are formed, so a
    permuted input produces bit-identical cross-products.
    """

    def __init__(self, frame: ModelFrame, kernel_cls=None):
        if not frame.z_blocks:
            raise NoRandomEffectsError()
        self.frame = frame
        Z = frame.Z
        X, y = frame.X, frame.y
        keys = [y] + [X[:, j] for j in range(X.shape[1])] + [Z[:, j] for j in range(Z.shape[1])]
        order = np.lexsort(keys[::-1])
        Zs, Xs, ys = Z[order], X[order], y[order]
        # Work with OLS residuals: the solution shifts by beta0 exactly, and
        # y'y no longer dwarfs the penalized residual sum of squares.
        self.beta0 = np.linalg.lstsq(Xs, ys, rcond=None)[0]
        ys = ys - Xs @ self.beta0
        self.order = order
        self.Z, self.X, self.y = Zs, Xs, ys
        self.n, self.p = X.shape
        self.q_total = Z.shape[1]

        ptr, rows, tidx = [0], [], []
        base, toff = 0, 0
        for b in frame.z_blocks:
            q = b.q
            index = {}
            k = toff
            for c in range(q):
                for r in range(c, q):
                    index[(r, c)] = k
                    k += 1
            for j in range(b.n_groups):
                for c in range(q):
                    for r in range(c, q):
                        rows.append(base + j * q + r)
                        tidx.append(index[(r, c)])
                    ptr.append(len(rows))
            base += q * b.n_groups
            toff = k
        self.lam_layout = (np.array(ptr), np.array(rows), np.array(tidx))
        self.n_theta = toff

        args = (Zs.T @ Zs, Zs.T @ Xs, Xs.T @ Xs, Zs.T @ ys, Xs.T @ ys,
                float(ys @ ys), self.n, *self.lam_layout)
        self.kernel = (kernel_cls or PlsKernel)(*args)
        self._py_kernel = PythonPlsKernel(*args)

    def check_theta(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.n_theta,):
            raise ValueError(f"theta has shape {theta.shape}, model needs ({self.n_theta},)")
        return theta

    def deviance(self, theta, reml: bool) -> float:
        return self.kernel.deviance(theta, bool(reml))

    def solve(self, theta, reml: bool) -> dict:
        """Full penalized least-squares solution at ``theta``."""
        theta = self.check_theta(theta)
        Q, p, n = self.q_total, self.p, self.n
        lam = self._py_kernel.lambda_matrix(theta)
        ZL = self.Z @ lam
        m = np.empty((Q + p, Q + p))
        m[:Q, :Q] = ZL.T @ ZL + np.eye(Q)
        m[:Q, Q:] = ZL.T @ self.X
        m[Q:, :Q] = m[:Q, Q:].T
        m[Q:, Q:] = self.X.T @ self.X
        chol = np.linalg.cholesky(m)
        c = np.concatenate([ZL.T @ self.y, self.X.T @ self.y])
        w = scipy.linalg.cho_solve((chol, True), c)
        u, beta = w[:Q], w[Q:]
        b = lam @ u
        fitted_s = self.X @ beta + self.Z @ b
        resid_s = self.y - fitted_s
        r2 = float(resid_s @ resid_s + u @ u)
        beta = beta + self.beta0
        resid = np.empty(n)
        resid[self.order] = resid_s
        fitted = np.asarray(self.frame.y) - resid
        diag = np.log(np.diag(chol))
        ld_l2 = 2.0 * diag[:Q].sum()
        ld_rx2 = 2.0 * diag[Q:].sum()
        dof = n - p if reml else n
        sigma2 = r2 / dof
        rx = chol[Q:, Q:]
        rx_inv = scipy.linalg.solve_triangular(rx, np.eye(p), lower=True)
        vcov = sigma2 * (rx_inv.T @ rx_inv)
        if reml:
            dev = ld_l2 + ld_rx2 + dof * (1.0 + LOG_2PI + math.log(r2 / dof))
        else:
            dev = ld_l2 + n * (1.0 + LOG_2PI + math.log(r2 / n))
        return dict(beta=beta, u=u, b=b, fitted=fitted, residuals=resid, r2=r2,
                    sigma2=sigma2, vcov=vcov, deviance=dev, lam=lam)


def profiled_objective(theta, frame: ModelFrame, reml: bool) -> float:
    """Profiled deviance (ML) or REML criterion of ``frame`` at ``theta``."""
    problem = LmmProblem(frame)
    return problem.deviance(problem.check_theta(theta), reml)


@dataclass(frozen=True)
class VarComp:
    """Estimated covariance of one random term, in response units squared."""

    grouping: str
    names: tuple[str, ...]
    covariance: np.ndarray

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.covariance).copy()

    @property
    def std_devs(self) -> np.ndarray:
        return np.sqrt(self.variances)

    @property
    def variance(self) -> float:
        return float(self.covariance[0, 0])

    @property
    def std_dev(self) -> float:
        return math.sqrt(self.variance)

    @property
    def correlations(self) -> np.ndarray | None:
        if len(self.names) < 2:
            return None
        sd = self.std_devs
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = self.covariance / np.outer(sd, sd)
        corr[~np.isfinite(corr)] = 0.0
        np.fill_diagonal(corr, 1.0)
        return np.clip(corr, -1.0, 1.0)


@dataclass(frozen=True)
class LmmFit:
    frame: ModelFrame
    reml: bool
    theta: np.ndarray
    labels: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    vcov: np.ndarray
    fixed_correlation: np.ndarray
    varcomps: tuple[VarComp, ...]
    residual_variance: float
    blups: tuple[np.ndarray, ...]
    fitted: np.ndarray
    residuals: np.ndarray
    criterion: float
    log_likelihood: float
    ml_deviance_at_estimate: float
    aic: float
    bic: float
    n_obs: int
    group_sizes: tuple[int, ...]
    n_params: int
    n_evals: int
    warnings: tuple[str, ...] = field(default=())

    @property
    def sigma(self) -> float:
        return math.sqrt(self.residual_variance)

    def coef(self) -> dict[str, float]:
        return dict(zip(self.labels, map(float, self.coefficients)))


def _minimize(problem: LmmProblem, reml: bool, start) -> tuple[np.ndarray, float, int]:
    def objective(th):
        return problem.deviance(th, reml)

    total = 0
    res = nelder_mead(objective, start, step=_steps(start), ftol=FTOL, xtol=XTOL, max_evals=MAX_EVALS)
    total += res.n_evals
    if not res.converged:
        restart = theta_start(problem.frame, 0.1)
        res2 = nelder_mead(objective, restart, step=_steps(restart), ftol=FTOL, xtol=XTOL,
                           max_evals=MAX_EVALS)
        total += res2.n_evals
        if not res2.converged:
            best = res if res.fun <= res2.fun else res2
            raise ConvergenceError(
                f"optimizer did not converge within {MAX_EVALS} evaluations "
                f"(best criterion {best.fun:.6f})", theta=best.x, value=best.fun)
        res = res2
    # a fresh simplex at the optimum guards against premature collapse
    polish = nelder_mead(objective, res.x, step=0.05, ftol=FTOL, xtol=XTOL, max_evals=MAX_EVALS)
    total += polish.n_evals
    if polish.fun < res.fun:
        res = polish
    return res.x, res.fun, total


def _steps(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(x != 0.0, 0.25 * np.abs(x), 0.1)


def fit_lmm(frame: ModelFrame, reml: bool = True, start=None) -> LmmFit:
    """Fit a linear mixed model by minimizing the profiled criterion.

    Parameters
    ----------
    frame : ModelFrame
        Must contain at least one random term.
    reml : bool
        REML when true, maximum likelihood otherwise.
    start : array_like, optional
        Starting theta; defaults to identity relative factors.

    Raises
    ------
    NoRandomEffectsError
        The formula has no random term.
    SingularDesignError
        The fixed-effects design is rank deficient.
    ConvergenceError
        Nelder-Mead failed from both the given start and 0.1 x identity.
    """
    if not frame.z_blocks:
        raise NoRandomEffectsError()
    n, p = frame.X.shape
    if n <= p:
        raise DataError(f"insufficient data: {n} rows for {p} fixed effects")
    _rank_checked_qr(frame.X, list(frame.x_labels))

    problem = LmmProblem(frame)
    x0 = theta_start(frame) if start is None else problem.check_theta(start)
    theta, _, n_evals = _minimize(problem, reml, x0)
    theta = canonical_theta(frame, theta)
    return _assemble(problem, theta, reml, n_evals)


def _assemble(problem: LmmProblem, theta: np.ndarray, reml: bool, n_evals: int) -> LmmFit:
    frame = problem.frame
    sol = problem.solve(theta, reml)
    sigma2 = sol["sigma2"]
    beta, vcov = sol["beta"], sol["vcov"]
    se = np.sqrt(np.diag(vcov))
    corr = vcov / np.outer(se, se)

    varcomps, blups, warnings = [], [], []
    offset = 0
    for T, block in zip(theta_blocks(frame, theta), frame.z_blocks):
        cov = sigma2 * (T @ T.T)
        vc = VarComp(block.grouping, block.column_names, cov)
        varcomps.append(vc)
        width = block.q * block.n_groups
        blups.append(sol["b"][offset:offset + width].reshape(block.n_groups, block.q))
        offset += width
        corr_re = vc.correlations
        if corr_re is not None:
            off = corr_re[np.tril_indices(block.q, -1)]
            if np.any(np.abs(off) > CORR_WARN):
                warnings.append(f"random-effect correlation for {block.grouping} is near +/-1; "
                                "the covariance estimate is degenerate")

    n_params = frame.p + theta.size + 1
    criterion = sol["deviance"]
    ml_dev = problem.deviance(theta, False)
    return LmmFit(
        frame=frame,
        reml=reml,
        theta=theta,
        labels=frame.x_labels,
        coefficients=beta,
        std_errors=se,
        t_values=beta / se,
        vcov=vcov,
        fixed_correlation=corr,
        varcomps=tuple(varcomps),
        residual_variance=sigma2,
        blups=tuple(blups),
        fitted=sol["fitted"],
        residuals=sol["residuals"],
        criterion=criterion,
        log_likelihood=-criterion / 2.0,
        ml_deviance_at_estimate=ml_dev,
        aic=criterion + 2.0 * n_params,
        bic=criterion + n_params * math.log(frame.n),
        n_obs=frame.n,
        group_sizes=tuple(b.n_groups for b in frame.z_blocks),
        n_params=n_params,
        n_evals=n_evals,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class GroupCoefTable:
    grouping: str
    columns: tuple[str, ...]
    groups: tuple[str, ...]
    values: np.ndarray

    def row(self, group: str) -> dict[str, float]:
        i = self.groups.index(group)
        return dict(zip(self.columns, map(float, self.values[i])))


def coef_by_group(fit: LmmFit) -> list[GroupCoefTable]:
    """Per-group coefficients: fixed effects shifted by each group's BLUPs.

    Random-slope columns absent from the fixed part are appended with a
    fixed value of zero.
    """
    out = []
    for block, b in zip(fit.frame.z_blocks, fit.blups):
        columns = list(fit.labels)
        base = list(map(float, fit.coefficients))
        for name in block.column_names:
            if name not in columns:
                columns.append(name)
                base.append(0.0)
        values = np.tile(np.array(base), (block.n_groups, 1))
        for k, name in enumerate(block.column_names):
            values[:, columns.index(name)] += b[:, k]
        out.append(GroupCoefTable(block.grouping, tuple(columns), block.group_labels, values))
    return out

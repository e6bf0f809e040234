"""Ordinary least squares with the usual summary statistics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .design import ModelFrame
from .errors import DataError, SingularDesignError
from .numstat import f_upper_p, t_two_sided_p

RANK_TOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    labels: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    fitted: np.ndarray
    residuals: np.ndarray
    sigma: float
    df_resid: int
    r2: float
    adj_r2: float
    f_stat: float
    f_df: tuple[int, int]
    f_p: float
    cov_unscaled: np.ndarray
    frame: ModelFrame

    def coef(self) -> dict[str, float]:
        return dict(zip(self.labels, map(float, self.coefficients)))

    @property
    def rss(self) -> float:
        return float(self.residuals @ self.residuals)


def _rank_checked_qr(X: np.ndarray, labels):
    q, r, piv = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag[0] == 0.0:
        raise SingularDesignError("design matrix is all zeros")
    deficient = np.flatnonzero(diag < RANK_TOL * diag[0])
    if deficient.size:
        names = [labels[piv[k]] for k in deficient]
        hint = ""
        if any(not X[:, piv[k]].any() for k in deficient):
            hint = " (an all-zero column usually means a factor level has no rows)"
        raise SingularDesignError(
            f"design matrix is rank deficient; column(s) {', '.join(names)} are linearly "
            f"dependent on the others{hint}",
            column=names[0],
        )
    return q, r, piv


def least_squares(X: np.ndarray, y: np.ndarray, labels=None):
    """Coefficients and unscaled covariance (X'X)^-1 via pivoted QR."""
    labels = labels or [f"x{j}" for j in range(X.shape[1])]
    q, r, piv = _rank_checked_qr(X, labels)
    beta = np.empty(X.shape[1])
    beta[piv] = scipy.linalg.solve_triangular(r, q.T @ y)
    rinv = scipy.linalg.solve_triangular(r, np.eye(r.shape[0]))
    cov = np.empty_like(rinv)
    cov[np.ix_(piv, piv)] = rinv @ rinv.T
    return beta, cov


def fit_ols(frame: ModelFrame) -> OlsFit:
    """Least-squares fit of ``frame.y`` on ``frame.X``.

    Raises
    ------
    DataError
        If there are no more rows than coefficients.
    SingularDesignError
        If X is rank deficient (relative tolerance 1e-10 on the pivoted R
        diagonal); the message names the dependent column(s).
    """
    X, y = frame.X, frame.y
    n, p = X.shape
    if n <= p:
        raise DataError(f"insufficient data: {n} rows for {p} coefficients")
    beta, cov = least_squares(X, y, list(frame.x_labels))
    fitted = X @ beta
    resid = y - fitted
    df_resid = n - p
    rss = float(resid @ resid)
    sigma2 = rss / df_resid
    se = np.sqrt(sigma2 * np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = beta / se
    pvals = np.array([t_two_sided_p(float(v), df_resid) if np.isfinite(v) else 0.0 for v in t])

    dev = y - y.mean()
    tss = float(dev @ dev)
    if p == 1:
        r2 = 0.0
        f_stat = f_p = math.nan
    else:
        r2 = 1.0 - rss / tss if tss > 0 else math.nan
        f_stat = ((tss - rss) / (p - 1)) / sigma2 if sigma2 > 0 else math.inf
        f_p = f_upper_p(max(f_stat, 0.0), p - 1, df_resid)
    adj = 1.0 - (1.0 - r2) * (n - 1) / df_resid
    fitted.flags.writeable = False
    resid.flags.writeable = False
    return OlsFit(
        labels=frame.x_labels,
        coefficients=beta,
        std_errors=se,
        t_values=t,
        p_values=pvals,
        fitted=fitted,
        residuals=resid,
        sigma=math.sqrt(sigma2),
        df_resid=df_resid,
        r2=r2,
        adj_r2=adj,
        f_stat=f_stat,
        f_df=(p - 1, df_resid),
        f_p=f_p,
        cov_unscaled=cov,
        frame=frame,
    )


def predict_ols(fit: OlsFit, new_x) -> np.ndarray:
    new_x = np.atleast_2d(np.asarray(new_x, dtype=float))
    if new_x.shape[1] != len(fit.coefficients):
        raise ValueError(f"new_x has {new_x.shape[1]} columns, model has {len(fit.coefficients)}")
    return new_x @ fit.coefficients

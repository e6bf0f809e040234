"""Pure-Python (numpy) profiled-deviance kernel.

Mirrors ``_kernels.pyx`` exactly; used when the compiled extension is not
available or ``MIXLM_PURE_PYTHON`` is set.
"""
import math

import numpy as np
from scipy.linalg import solve_triangular

LOG_2PI = math.log(2.0 * math.pi)


class PlsKernel:
    """Profiled deviance of a linear mixed model as a function of theta.

    Parameters
    ----------
    ztz, ztx, xtx, zty, xty, yty
        Cross-products of the random-effects matrix Z, fixed design X and
        response y.
    n : int
        Number of observations.
    lam_ptr, lam_row, lam_theta
        Compressed-column layout of the relative covariance factor Lambda:
        column j holds entries ``lam_ptr[j]:lam_ptr[j+1]`` whose rows are
        ``lam_row`` and whose values are ``theta[lam_theta]``.
    """

    def __init__(self, ztz, ztx, xtx, zty, xty, yty, n, lam_ptr, lam_row, lam_theta):
        self.ztz = np.ascontiguousarray(ztz, dtype=float)
        self.ztx = np.ascontiguousarray(ztx, dtype=float)
        self.xtx = np.ascontiguousarray(xtx, dtype=float)
        self.zty = np.ascontiguousarray(zty, dtype=float)
        self.xty = np.ascontiguousarray(xty, dtype=float)
        self.yty = float(yty)
        self.n = int(n)
        self.q_total = self.ztz.shape[0]
        self.p = self.xtx.shape[0]
        ptr = np.asarray(lam_ptr, dtype=np.int64)
        cols = np.repeat(np.arange(self.q_total), np.diff(ptr))
        self._rows = np.asarray(lam_row, dtype=np.int64)
        self._cols = cols
        self._tidx = np.asarray(lam_theta, dtype=np.int64)

    def lambda_matrix(self, theta):
        lam = np.zeros((self.q_total, self.q_total))
        lam[self._rows, self._cols] = np.asarray(theta, dtype=float)[self._tidx]
        return lam

    def deviance(self, theta, reml):
        Q, p, n = self.q_total, self.p, self.n
        lam = self.lambda_matrix(theta)
        m = np.empty((Q + p, Q + p))
        m[:Q, :Q] = lam.T @ self.ztz @ lam
        m[:Q, :Q].flat[:: Q + 1] += 1.0
        m[:Q, Q:] = lam.T @ self.ztx
        m[Q:, :Q] = m[:Q, Q:].T
        m[Q:, Q:] = self.xtx
        try:
            chol = np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            return math.inf
        c = np.concatenate([lam.T @ self.zty, self.xty])
        z = solve_triangular(chol, c, lower=True, check_finite=False)
        r2 = self.yty - z @ z
        if r2 <= 0.0:
            r2 = 1e-300
        diag = np.log(np.diag(chol))
        ld_l2 = 2.0 * diag[:Q].sum()
        if reml:
            ld_rx2 = 2.0 * diag[Q:].sum()
            dof = n - p
            return ld_l2 + ld_rx2 + dof * (1.0 + LOG_2PI + math.log(r2 / dof))
        return ld_l2 + n * (1.0 + LOG_2PI + math.log(r2 / n))

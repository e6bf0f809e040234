# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled profiled-deviance kernel.

Same contract as ``_kernels_py.PlsKernel``. Lambda is applied through its
compressed-column layout, so the block-diagonal structure costs nothing.
"""
import numpy as np

from libc.math cimport log, sqrt, M_PI, INFINITY


cdef class PlsKernel:
    cdef readonly double[:, ::1] ztz, ztx, xtx
    cdef readonly double[::1] zty, xty
    cdef readonly double yty
    cdef readonly Py_ssize_t n, q_total, p
    cdef Py_ssize_t[::1] ptr, row, tidx
    cdef double[:, ::1] tmp, m
    cdef double[::1] c

    def __init__(self, ztz, ztx, xtx, zty, xty, double yty, Py_ssize_t n,
                 lam_ptr, lam_row, lam_theta):
        self.ztz = np.ascontiguousarray(ztz, dtype=np.float64)
        self.ztx = np.ascontiguousarray(ztx, dtype=np.float64)
        self.xtx = np.ascontiguousarray(xtx, dtype=np.float64)
        self.zty = np.ascontiguousarray(zty, dtype=np.float64)
        self.xty = np.ascontiguousarray(xty, dtype=np.float64)
        self.yty = yty
        self.n = n
        self.q_total = self.ztz.shape[0]
        self.p = self.xtx.shape[0]
        self.ptr = np.ascontiguousarray(lam_ptr, dtype=np.intp)
        self.row = np.ascontiguousarray(lam_row, dtype=np.intp)
        self.tidx = np.ascontiguousarray(lam_theta, dtype=np.intp)
        self.tmp = np.zeros((self.q_total, self.q_total))
        self.m = np.zeros((self.q_total + self.p, self.q_total + self.p))
        self.c = np.zeros(self.q_total + self.p)

    def lambda_matrix(self, theta):
        cdef Py_ssize_t j, e
        th = np.asarray(theta, dtype=np.float64)
        lam = np.zeros((self.q_total, self.q_total))
        for j in range(self.q_total):
            for e in range(self.ptr[j], self.ptr[j + 1]):
                lam[self.row[e], j] = th[self.tidx[e]]
        return lam

    def deviance(self, theta, bint reml):
        cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
        return self._deviance(th, reml)

    cdef double _deviance(self, double[::1] th, bint reml):
        cdef Py_ssize_t Q = self.q_total, p = self.p, mdim = Q + self.p
        cdef Py_ssize_t i, j, k, e
        cdef double s, v, r2, ld_l2 = 0.0, ld_rx2 = 0.0, dof
        cdef double[:, ::1] tmp = self.tmp, m = self.m, G = self.ztz
        cdef double[::1] c = self.c
        cdef Py_ssize_t[::1] ptr = self.ptr, row = self.row, tidx = self.tidx

        # tmp = G * Lambda
        for j in range(Q):
            for i in range(Q):
                s = 0.0
                for e in range(ptr[j], ptr[j + 1]):
                    s += G[i, row[e]] * th[tidx[e]]
                tmp[i, j] = s
        # lower triangle of Lambda' G Lambda + I, Lambda' Z'X, Lambda' Z'y
        for i in range(Q):
            for j in range(i + 1):
                s = 0.0
                for e in range(ptr[i], ptr[i + 1]):
                    s += th[tidx[e]] * tmp[row[e], j]
                m[i, j] = s
            m[i, i] += 1.0
            s = 0.0
            for e in range(ptr[i], ptr[i + 1]):
                s += th[tidx[e]] * self.zty[row[e]]
            c[i] = s
        for k in range(p):
            for i in range(Q):
                s = 0.0
                for e in range(ptr[i], ptr[i + 1]):
                    s += th[tidx[e]] * self.ztx[row[e], k]
                m[Q + k, i] = s
            for j in range(k + 1):
                m[Q + k, Q + j] = self.xtx[k, j]
            c[Q + k] = self.xty[k]

        # in-place lower Cholesky
        for j in range(mdim):
            s = m[j, j]
            for k in range(j):
                s -= m[j, k] * m[j, k]
            if s <= 0.0:
                return INFINITY
            v = sqrt(s)
            m[j, j] = v
            for i in range(j + 1, mdim):
                s = m[i, j]
                for k in range(j):
                    s -= m[i, k] * m[j, k]
                m[i, j] = s / v
            if j < Q:
                ld_l2 += 2.0 * log(v)
            else:
                ld_rx2 += 2.0 * log(v)

        # forward solve L z = c; penalized RSS = y'y - z'z
        r2 = self.yty
        for i in range(mdim):
            s = c[i]
            for k in range(i):
                s -= m[i, k] * c[k]
            c[i] = s / m[i, i]
            r2 -= c[i] * c[i]
        if r2 <= 0.0:
            r2 = 1e-300
        if reml:
            dof = <double>(self.n - p)
            return ld_l2 + ld_rx2 + dof * (1.0 + log(2.0 * M_PI) + log(r2 / dof))
        return ld_l2 + self.n * (1.0 + log(2.0 * M_PI) + log(r2 / self.n))

# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

DEF MAX_TERMS = 500
DEF RTOL = 1e-17


cdef double _hyp0f1(double a, double z) except? -1.0:
    cdef double total = 1.0, term = 1.0, ratio, tail
    cdef int n = 0
    if z == 0.0:
        return 1.0
    while True:
        if n >= MAX_TERMS:
            raise ArithmeticError("0F1 series did not converge within %d terms" % MAX_TERMS)
        term *= z / ((a + n) * (n + 1.0))
        total += term
        n += 1
        ratio = fabs(z / ((a + n) * (n + 1.0)))
        if a + n > 0 and ratio < 0.5:
            tail = fabs(term) * ratio / (1.0 - ratio)
            if tail <= RTOL * fabs(total):
                return total


def hyp0f1_vec(double a, z):
    cdef cnp.ndarray[double, ndim=1] flat = np.ascontiguousarray(z, dtype=float).ravel()
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(flat)
    cdef Py_ssize_t i, m = flat.shape[0]
    for i in range(m):
        out[i] = _hyp0f1(a, flat[i])
    return out.reshape(np.shape(z))


cdef void _jacobi(int n, double alpha, double beta, double x, double *p, double *dp):
    cdef double p0 = 1.0, p1, q0 = 1.0, q1, c, a1, a2, a3, a4, ab = alpha + beta
    cdef double a_ = alpha + 1.0, b_ = beta + 1.0, s = alpha + beta + 2.0
    cdef int k
    if n == 0:
        p[0] = 1.0
        dp[0] = 0.0
        return
    p1 = 0.5 * (alpha - beta + (ab + 2.0) * x)
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    p[0] = p1
    if n == 1:
        dp[0] = 0.5 * (ab + 2.0)
        return
    q1 = 0.5 * (a_ - b_ + (s + 2.0) * x)
    for k in range(2, n):
        c = 2.0 * k + s
        a1 = 2.0 * k * (k + s) * (c - 2.0)
        a2 = (c - 1.0) * (a_ * a_ - b_ * b_)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a_ - 1.0) * (k + b_ - 1.0) * c
        q0, q1 = q1, ((a2 + a3 * x) * q1 - a4 * q0) / a1
    dp[0] = 0.5 * (n + ab + 1.0) * q1


def jacobi_eval(int n, double alpha, double beta, x):
    cdef cnp.ndarray[double, ndim=1] flat = np.ascontiguousarray(x, dtype=float).ravel()
    cdef cnp.ndarray[double, ndim=1] pv = np.empty_like(flat)
    cdef cnp.ndarray[double, ndim=1] dv = np.empty_like(flat)
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        _jacobi(n, alpha, beta, flat[i], &pv[i], &dv[i])
    shape = np.shape(x)
    return pv.reshape(shape), dv.reshape(shape)


def march_first_kind(x_in, rhs_in, double gamma, double b, double c1, double c0):
    cdef cnp.ndarray[double, ndim=1] x = np.ascontiguousarray(x_in, dtype=float)
    cdef cnp.ndarray[double, ndim=1] rhs = np.ascontiguousarray(rhs_in, dtype=float)
    cdef Py_ssize_t n = x.shape[0] - 1, j, k
    cdef cnp.ndarray[double, ndim=1] g = np.zeros(n)
    cdef double g1 = gamma + 1.0, acc, w, w0, lo, hi, mid
    cdef bint smooth = c1 != 0.0 or c0 != 0.0
    for j in range(n - 1, -1, -1):
        acc = rhs[j]
        w0 = 0.0
        for k in range(j, n):
            lo = x[k] - x[j]
            hi = x[k + 1] - x[j]
            w = (pow(hi, g1) - pow(lo, g1)) / g1
            if smooth:
                mid = 0.5 * (x[k] + x[k + 1])
                w *= _hyp0f1(b, (mid - x[j]) * (c1 * mid + c0))
            if k == j:
                w0 = w
            else:
                acc -= w * g[k]
        g[j] = acc / w0
    return g

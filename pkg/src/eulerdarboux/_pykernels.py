"""Pure-Python (numpy) implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable.  Every
function here has an identically named counterpart in ``_ckernels.pyx``
and both must agree to rounding.
"""
import numpy as np

MAX_TERMS = 500
_RTOL = 1e-17


def hyp0f1_vec(a, z):
    """Sum 0F1(a; z) elementwise to full double precision."""
    z = np.asarray(z, dtype=float)
    flat = z.ravel()
    total = np.ones_like(flat)
    term = np.ones_like(flat)
    active = flat != 0.0
    n = 0
    while active.any():
        if n >= MAX_TERMS:
            raise ArithmeticError("0F1 series did not converge within %d terms" % MAX_TERMS)
        idx = np.nonzero(active)[0]
        term[idx] *= flat[idx] / ((a + n) * (n + 1.0))
        total[idx] += term[idx]
        n += 1
        ratio = np.abs(flat[idx] / ((a + n) * (n + 1.0)))
        tail = np.abs(term[idx]) * ratio / np.maximum(1.0 - ratio, 1e-300)
        done = (a + n > 0) & (ratio < 0.5) & (tail <= _RTOL * np.abs(total[idx]))
        active[idx[done]] = False
    return total.reshape(z.shape)


def jacobi_eval(n, alpha, beta, x):
    """Return P_n^{(alpha,beta)}(x) and its derivative via the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if n == 0:
        return p0, np.zeros_like(x)
    ab = alpha + beta
    p1 = 0.5 * (alpha - beta + (ab + 2.0) * x)
    for k in range(2, n + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (alpha * alpha - beta * beta)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    # derivative of P_n is (n+ab+1)/2 * P_{n-1}^{(alpha+1,beta+1)}
    if n == 1:
        dp = np.full_like(x, 0.5 * (ab + 2.0))
    else:
        q0 = np.ones_like(x)
        a_, b_ = alpha + 1.0, beta + 1.0
        s = a_ + b_
        q1 = 0.5 * (a_ - b_ + (s + 2.0) * x)
        for k in range(2, n):
            c = 2.0 * k + s
            a1 = 2.0 * k * (k + s) * (c - 2.0)
            a2 = (c - 1.0) * (a_ * a_ - b_ * b_)
            a3 = (c - 2.0) * (c - 1.0) * c
            a4 = 2.0 * (k + a_ - 1.0) * (k + b_ - 1.0) * c
            q0, q1 = q1, ((a2 + a3 * x) * q1 - a4 * q0) / a1
        dp = 0.5 * (n + ab + 1.0) * q1
    return p1, dp


def march_first_kind(x, rhs, gamma, b, c1, c0):
    """Backward-marching product integration for a first-kind Volterra equation.

    Solves  int_{x_j}^{h} g(s) (s - x_j)^gamma  0F1(b; (s - x_j)(c1 s + c0)) ds = rhs_j
    for j = n-1 .. 0 with g constant on each panel [x_k, x_{k+1}].  The power
    factor is integrated exactly on every panel; the 0F1 factor is frozen at
    the panel midpoint.  Returns the n panel values.
    """
    x = np.asarray(x, dtype=float)
    n = x.size - 1
    g = np.zeros(n)
    g1 = gamma + 1.0
    for j in range(n - 1, -1, -1):
        lo = x[j:n] - x[j]
        hi = x[j + 1:] - x[j]
        w = (hi ** g1 - lo ** g1) / g1
        mid = 0.5 * (x[j:n] + x[j + 1:])
        if c1 != 0.0 or c0 != 0.0:
            w = w * hyp0f1_vec(b, (mid - x[j]) * (c1 * mid + c0))
        g[j] = (rhs[j] - np.dot(w[1:], g[j + 1:])) / w[0]
    return g

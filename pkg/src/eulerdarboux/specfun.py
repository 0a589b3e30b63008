"""Confluent hypergeometric limit function 0F1 and the rising factorial."""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels

MAX_TERMS = 500
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    truncation_bound: float
    rounding_bound: float = 0.0   # ~ eps * largest term; dominates for large negative z


def _is_pole(a):
    return a <= 0 and float(a).is_integer()


def pochhammer(a, n):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1."""
    if n < 0 or int(n) != n:
        raise ValueError("n must be a nonnegative integer, got %r" % (n,))
    out = 1.0
    for k in range(int(n)):
        out *= a + k
    if math.isinf(out) or math.isnan(out):
        raise OverflowError("(%g)_%d exceeds the floating-point range" % (a, n))
    return out


def hyp0f1(a, z, tol=1e-14):
    """Evaluate 0F1(a; z) = sum z^n / ((a)_n n!) with a rigorous tail bound.

    Summation stops once the term ratio |z| / ((a+n)(n+1)) has dropped below
    1/2 and is monotonically decreasing; the omitted tail is then bounded by
    the first omitted term divided by (1 - ratio).
    """
    if _is_pole(a):
        raise ValueError("0F1 has a pole at a = %g" % a)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if z == 0:
        return SeriesResult(1.0, 1, 0.0)
    total = 1.0
    term = 1.0
    biggest = 1.0
    for n in range(MAX_TERMS):
        term *= z / ((a + n) * (n + 1.0))
        total += term
        biggest = max(biggest, abs(term))
        k = n + 1
        ratio = abs(z) / ((a + k) * (k + 1.0))
        if a + k > 0 and ratio < 0.5:
            bound = abs(term) * ratio / (1.0 - ratio)
            if bound <= tol:
                return SeriesResult(total, k + 1, bound, (k + 1) * EPS * biggest)
    raise ArithmeticError(
        "0F1(%g; %g) not converged to %g within %d terms" % (a, z, tol, MAX_TERMS)
    )


def hyp0f1_array(a, z):
    """Vectorized 0F1(a; z), no error estimate.

    Near full precision for |z| up to a few tens; for negative z the
    alternating terms grow like exp(2 sqrt|z|), costing about that factor
    times machine epsilon in absolute accuracy.
    """
    if _is_pole(a):
        raise ValueError("0F1 has a pole at a = %g" % a)
    z = np.asarray(z, dtype=float)
    if z.ndim == 0:
        return float(_kernels.hyp0f1_vec(a, z.reshape(1))[0])
    return _kernels.hyp0f1_vec(a, z)


def hyp0f1_derivative(a, z):
    """d/dz 0F1(a; z) = 0F1(a+1; z) / a."""
    return hyp0f1_array(a + 1.0, z) / a

"""Closed-form inversion of the dominant Cauchy-kernel equation.

Solves  p.v. int_0^h mu(s) / (s - xi) ds = phi_star(xi)  in the three
endpoint classes of the finite Hilbert transform:

* ``BOUNDED_AT_ZERO``: mu ~ sqrt(xi) at 0, at most (h - xi)^(-1/2) at h;
  unique for every right-hand side.
* ``UNBOUNDED_BOTH``: mu ~ (xi (h - xi))^(-1/2); unique up to the kernel
  element a0 / sqrt(xi (h - xi)).
* ``BOUNDED_AT_H``: the mirror image of the first case.

The inner principal values are taken with :func:`quad.pv_hilbert`, with
the square-root weights carried as exact endpoint exponents.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .quad import WeightedDensity, pv_hilbert

DEFAULT_N = 256


class InversionTag(enum.Enum):
    BOUNDED_AT_ZERO = "bounded_at_zero"
    UNBOUNDED_BOTH = "unbounded_both"
    BOUNDED_AT_H = "bounded_at_h"


@dataclass(frozen=True)
class InversionCase:
    tag: InversionTag
    a0: Optional[float] = None

    def __post_init__(self):
        if (self.a0 is not None) != (self.tag is InversionTag.UNBOUNDED_BOTH):
            raise ValueError("a0 is present exactly when the case is UNBOUNDED_BOTH")


def _check_h(h):
    if not h > 0:
        raise ValueError("h must be positive, got %r" % (h,))


def _inner_pv(phi_star, a0, aH, h, n):
    """xi -> p.v. int_0^h y**a0 (h-y)**aH phi_star(y) / (y - xi) dy."""
    inner = WeightedDensity(a0, aH, phi_star, h)
    return lambda xi: pv_hilbert(inner, xi, n)


def invert_bounded_at_zero(phi_star, h=1.0, n=DEFAULT_N):
    """Solution bounded at s = 0:

    mu(xi) = -(1/pi^2) sqrt(xi / (h - xi)) p.v. int sqrt((h-y)/y) phi*(y) / (y - xi) dy
    """
    _check_h(h)
    inner = _inner_pv(phi_star, -0.5, 0.5, h, n)
    return WeightedDensity(0.5, -0.5, lambda xi: -inner(xi) / math.pi ** 2, h)


def invert_bounded_at_h(phi_star, h=1.0, n=DEFAULT_N):
    """Solution bounded at s = h:

    mu(xi) = -(1/pi^2) sqrt((h - xi) / xi) p.v. int sqrt(y/(h-y)) phi*(y) / (y - xi) dy
    """
    _check_h(h)
    inner = _inner_pv(phi_star, 0.5, -0.5, h, n)
    return WeightedDensity(-0.5, 0.5, lambda xi: -inner(xi) / math.pi ** 2, h)


def invert_unbounded(phi_star, h=1.0, a0=0.0, n=DEFAULT_N):
    """Solution unbounded at both ends, parametrized by the constant a0:

    mu(xi) = -(1/sqrt(xi (h-xi))) [ (1/pi^2) p.v. int sqrt(y (h-y)) phi*(y) / (y - xi) dy + a0 ]
    """
    _check_h(h)
    inner = _inner_pv(phi_star, 0.5, 0.5, h, n)
    return WeightedDensity(-0.5, -0.5, lambda xi: -(inner(xi) / math.pi ** 2 + a0), h)


def invert(phi_star, case, h=1.0, n=DEFAULT_N):
    """Dispatch on an :class:`InversionCase`."""
    if case.tag is InversionTag.BOUNDED_AT_ZERO:
        return invert_bounded_at_zero(phi_star, h, n)
    if case.tag is InversionTag.BOUNDED_AT_H:
        return invert_bounded_at_h(phi_star, h, n)
    return invert_unbounded(phi_star, h, case.a0, n)


def kernel_element(h=1.0):
    """1 / sqrt(s (h - s)): spans the null space of the finite Hilbert transform."""
    return WeightedDensity(-0.5, -0.5, lambda s: np.ones_like(np.asarray(s, dtype=float)), h)


def chebyshev_points(n_test, h=1.0):
    k = np.arange(n_test)
    return 0.5 * h * (1.0 - np.cos((2 * k + 1) * math.pi / (2 * n_test)))


@dataclass
class ConsistencyReport:
    points: np.ndarray
    deviation: np.ndarray
    max_deviation: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = bool(self.max_deviation <= self.tol)


def check_index_consistency(mu, phi_star, n_test=64, n=DEFAULT_N, tol=1e-8):
    """Apply the forward operator to ``mu`` and compare with ``phi_star``.

    The comparison uses ``n_test`` Chebyshev-distributed points in (0, h).
    """
    pts = chebyshev_points(n_test, mu.h)
    fwd = pv_hilbert(mu, pts, n)
    dev = np.abs(fwd - np.asarray(phi_star(pts), dtype=float))
    return ConsistencyReport(pts, dev, float(dev.max()), tol)

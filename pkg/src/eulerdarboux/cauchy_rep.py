"""Cauchy-problem representation of solutions in the characteristic triangles.

In the triangle 0 < xi < eta < h a solution of

    U_xieta - p/(eta - sgn(eta) xi) U_xi + p/(sgn(eta) eta - xi) U_eta - sgn(eta) lam U = 0

is written through two densities T and N:

    U = int_eta^h T(s) (s-xi)^p (s-eta)^p 0F1(1+p; lam (s-xi)(s-eta)) ds
      + int_xi^eta N(s) (eta-s)^p (s-xi)^p 0F1(1+p; -lam (eta-s)(s-xi)) ds,

with N = k1 T - k2 nu.  The other three triangles are reached through the
coordinate maps that leave the equation invariant:

* upper right (eta < xi):      U(xi, eta) = U_up(eta, xi)
* lower left  (xi < -eta):     U(xi, eta) = U_up(xi, -eta)
* lower right (-eta < xi):     U(xi, eta) = U_up(-eta, xi)

Under eta -> -eta the lower-half operator turns into the upper-half one
with the *same* lam, so every triangle uses ``par.lam`` unchanged.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import beta as beta_fn

from .quad import WeightedDensity, combine, jacobi_rule, zero_density
from .specfun import hyp0f1_array

SINGULAR_LINE_TOL = 1e-9
DEFAULT_N = 64


@dataclass(frozen=True)
class Parameters:
    p: float
    lam: float = 0.0
    h: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise ValueError("p must lie in (0, 1/2), got %r" % (self.p,))
        if not self.h > 0:
            raise ValueError("h must be positive, got %r" % (self.h,))
        if not math.isfinite(self.lam):
            raise ValueError("lam must be finite")


def frankl_constants(p):
    """(k1, k2) for which nu in N = k1 T - k2 nu is the weighted normal-derivative limit

        lim_{eta -> xi+} (eta - xi)^(-2p) (U_xi - U_eta)

    of the representation.  Near the diagonal the T-integral contributes
    p B(p, 1-2p) T(xi) and the N-integral -2 (2p+1) B(p+1, p+1) N(xi).
    """
    c_n = 2.0 * (2.0 * p + 1.0) * beta_fn(p + 1.0, p + 1.0)
    c_t = p * beta_fn(p, 1.0 - 2.0 * p)
    return c_t / c_n, 1.0 / c_n


@dataclass(frozen=True)
class CauchyDensities:
    T: WeightedDensity
    nu: WeightedDensity
    k1: float
    k2: float

    @property
    def N(self):
        return combine([(self.k1, self.T), (-self.k2, self.nu)], self.T.h)

    @classmethod
    def from_T_N(cls, T, N, k1, k2):
        """Densities whose derived N equals the given one: nu = (k1 T - N) / k2."""
        nu = combine([(k1 / k2, T), (-1.0 / k2, N)], T.h)
        return cls(T, nu, k1, k2)

    @classmethod
    def zero(cls, h=1.0, k1=1.0, k2=1.0):
        return cls(zero_density(h), zero_density(h), k1, k2)

    def scaled(self, c):
        return CauchyDensities(self.T.scaled(c), self.nu.scaled(c), self.k1, self.k2)


class Triangle(enum.Enum):
    UP_LEFT = "up_left"        # 0 < xi < eta < h
    UP_RIGHT = "up_right"      # 0 < eta < xi < h
    DOWN_LEFT = "down_left"    # 0 < xi < -eta < h
    DOWN_RIGHT = "down_right"  # 0 < -eta < xi < h


def classify(xi, eta, h=1.0, tol=SINGULAR_LINE_TOL):
    """Triangle containing (xi, eta); raises on the singular lines or outside D."""
    t = tol * h
    if not (-t <= xi <= h + t and -h - t <= eta <= h + t):
        raise ValueError("point (%g, %g) lies outside the square D" % (xi, eta))
    if abs(eta) <= t:
        raise ValueError("point (%g, %g) lies on the characteristic eta = 0" % (xi, eta))
    if abs(abs(eta) - xi) <= t:
        raise ValueError("point (%g, %g) lies on a singular line eta = +-xi" % (xi, eta))
    if eta > 0:
        return Triangle.UP_LEFT if xi < eta else Triangle.UP_RIGHT
    return Triangle.DOWN_LEFT if xi < -eta else Triangle.DOWN_RIGHT


def preimage(xi, eta, triangle):
    """Coordinates (a, b), a < b, in the upper-left triangle mapped onto (xi, eta)."""
    if triangle is Triangle.UP_LEFT:
        return xi, eta
    if triangle is Triangle.UP_RIGHT:
        return eta, xi
    if triangle is Triangle.DOWN_LEFT:
        return xi, -eta
    return -eta, xi


@dataclass(frozen=True)
class TrianglePoint:
    xi: float
    eta: float
    triangle: Triangle

    def __post_init__(self):
        if classify(self.xi, self.eta, max(abs(self.xi), abs(self.eta), 1.0)) is not self.triangle:
            raise ValueError("(%g, %g) is not inside %s" % (self.xi, self.eta, self.triangle.value))


GRADE_RATIO = 0.25
GRADE_PANELS = 16


def _first_integrand(s, xi, eta, T, par):
    p, lam = par.p, par.lam
    f = s ** T.alpha0 * T.smooth_values(s) * (s - xi[:, None]) ** p
    if lam != 0.0:
        f = f * hyp0f1_array(1.0 + p, lam * (s - xi[:, None]) * (s - eta[:, None]))
    return f


def _first_plain(xi, eta, T, par, n):
    p, h = par.p, par.h
    r = jacobi_rule(n, T.alphaH, p, 1.0)
    L = (h - eta)[:, None]
    s = eta[:, None] + L * r.nodes[None, :]
    w = r.weights[None, :] * L ** (p + T.alphaH + 1.0)
    return np.sum(w * _first_integrand(s, xi, eta, T, par), axis=1)


def _first_graded(xi, eta, T, par, n):
    """First integral when xi is close to eta: (s - xi)^p is nearly singular
    at the lower end, so [eta, h] is split geometrically (ratio 4) from
    eta - xi up to the midpoint, in the scaled variable u = (s - eta)/(h - eta)."""
    p, h = par.p, par.h
    m = max(16, n // 2)
    L = h - eta
    u0 = (eta - xi) / L
    brk = np.minimum(u0[:, None] * 4.0 ** np.arange(GRADE_PANELS)[None, :], 0.5)
    total = np.zeros_like(xi)
    # [0, u0]: weight u^p
    r = jacobi_rule(m, 0.0, p, 1.0)
    a = brk[:, :1]
    u = a * r.nodes[None, :]
    w = r.weights[None, :] * a ** (p + 1.0)
    s = eta[:, None] + L[:, None] * u
    total += np.sum(w * (1.0 - u) ** T.alphaH * _first_integrand(s, xi, eta, T, par), axis=1)
    # graded middle panels, u^p in the integrand
    g = jacobi_rule(m, 0.0, 0.0, 1.0)
    for k in range(1, GRADE_PANELS):
        lo, hi = brk[:, k - 1:k], brk[:, k:k + 1]
        u = lo + (hi - lo) * g.nodes[None, :]
        w = g.weights[None, :] * (hi - lo)
        s = eta[:, None] + L[:, None] * u
        total += np.sum(w * u ** p * (1.0 - u) ** T.alphaH
                        * _first_integrand(s, xi, eta, T, par), axis=1)
    # [brk_last, 1]: weight (1 - u)^alphaH
    r = jacobi_rule(m, T.alphaH, 0.0, 1.0)
    lo = brk[:, -1:]
    u = lo + (1.0 - lo) * r.nodes[None, :]
    w = r.weights[None, :] * (1.0 - lo) ** (T.alphaH + 1.0)
    s = eta[:, None] + L[:, None] * u
    total += np.sum(w * u ** p * _first_integrand(s, xi, eta, T, par), axis=1)
    return total * L ** (p + T.alphaH + 1.0)


def _upper_batch(xi, eta, dens, par, n):
    """Vectorized evaluation of the representation at points with xi < eta."""
    p, lam, h = par.p, par.lam, par.h
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    T = dens.T
    N = dens.N
    # first integral on [eta, h]: weight (s-eta)^p (h-s)^alphaH(T)
    i1 = np.zeros_like(xi)
    near = (eta - xi) < GRADE_RATIO * (h - eta)
    if (~near).any():
        i1[~near] = _first_plain(xi[~near], eta[~near], T, par, n)
    if near.any():
        i1[near] = _first_graded(xi[near], eta[near], T, par, n)
    # second integral on [xi, eta]: weight (eta-s)^p (s-xi)^p; at eta = h the
    # (h-s)^alphaH factor of N is merged into the rule
    at_top = np.abs(h - eta) <= SINGULAR_LINE_TOL * h
    i2 = np.zeros_like(xi)
    for mask, merge in ((~at_top, False), (at_top, True)):
        if not mask.any():
            continue
        a = xi[mask][:, None]
        b = eta[mask][:, None]
        alpha = p + N.alphaH if merge else p
        r2 = jacobi_rule(n, alpha, p, 1.0)
        L2 = b - a
        s2 = a + L2 * r2.nodes[None, :]
        w2 = r2.weights[None, :] * L2 ** (p + alpha + 1.0)
        if merge:
            f2 = s2 ** N.alpha0 * N.smooth_values(s2)
        else:
            f2 = N(s2)
        if lam != 0.0:
            f2 = f2 * hyp0f1_array(1.0 + p, -lam * (b - s2) * (s2 - a))
        i2[mask] = np.sum(w2 * f2, axis=1)
    return i1 + i2


def eval_solution_upper(xi, eta, dens, par, n=DEFAULT_N):
    """U(xi, eta) in the triangle 0 <= xi < eta <= h (scalar or arrays)."""
    if n < 8:
        raise ValueError("at least 8 quadrature nodes per integral are required")
    scalar = np.ndim(xi) == 0 and np.ndim(eta) == 0
    xi_a, eta_a = np.broadcast_arrays(np.atleast_1d(np.asarray(xi, dtype=float)),
                                      np.atleast_1d(np.asarray(eta, dtype=float)))
    h = par.h
    t = SINGULAR_LINE_TOL * h
    bad = (xi_a < -t) | (eta_a > h + t) | (eta_a - xi_a <= t)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError("point (%g, %g) is not inside 0 <= xi < eta <= h" % (xi_a[i], eta_a[i]))
    out = _upper_batch(np.clip(xi_a, 0.0, h), np.clip(eta_a, 0.0, h), dens, par, n)
    return float(out[0]) if scalar else out.reshape(xi_a.shape)


@dataclass
class SolutionField:
    """Evaluable U(xi, eta) over the four characteristic triangles of D."""

    par: Parameters
    densities: Mapping[Triangle, CauchyDensities]
    n: int = DEFAULT_N
    meta: dict = field(default_factory=dict)

    def __call__(self, xi, eta):
        return eval_solution_field(xi, eta, self.densities, self.par, self.n)


@dataclass
class FieldSum:
    """Sum of fields sharing parameters; U is linear in (T, nu), so densities
    with incompatible endpoint weights can be kept in separate parts."""

    par: Parameters
    parts: Sequence[SolutionField]
    meta: dict = field(default_factory=dict)

    def __call__(self, xi, eta):
        total = None
        for f in self.parts:
            v = f(xi, eta)
            total = v if total is None else total + v
        return total


def eval_solution_field(xi, eta, dens_per_triangle, par, n=DEFAULT_N):
    """U at points anywhere in D off the singular lines (scalar or arrays)."""
    scalar = np.ndim(xi) == 0 and np.ndim(eta) == 0
    xi_a, eta_a = np.broadcast_arrays(np.atleast_1d(np.asarray(xi, dtype=float)),
                                      np.atleast_1d(np.asarray(eta, dtype=float)))
    xi_f, eta_f = xi_a.ravel(), eta_a.ravel()
    tags = [classify(x, e, par.h) for x, e in zip(xi_f, eta_f)]
    out = np.empty(xi_f.shape)
    for tri in Triangle:
        idx = [i for i, t in enumerate(tags) if t is tri]
        if not idx:
            continue
        if tri not in dens_per_triangle:
            raise KeyError("no densities supplied for triangle %s" % tri.value)
        a, b = preimage(xi_f[idx], eta_f[idx], tri)
        out[idx] = eval_solution_upper(np.asarray(a), np.asarray(b), dens_per_triangle[tri], par, n)
    return float(out[0]) if scalar else out.reshape(xi_a.shape)

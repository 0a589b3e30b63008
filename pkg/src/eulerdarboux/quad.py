"""Gauss-Jacobi rules, endpoint-weighted densities and Cauchy principal values.

Conventions: on [0, h] a rule with exponents ``(alpha, beta)`` integrates
against the weight ``s**beta * (h - s)**alpha``; a :class:`WeightedDensity`
stores its endpoint exponents symbolically as ``alpha0`` (at s = 0) and
``alphaH`` (at s = h).
"""
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.linalg import eigh_tridiagonal
from scipy.special import betaln

from . import _kernels

NEWTON_TOL = 1e-14
NEWTON_MAXIT = 50
_HALF = 0.5


@dataclass(frozen=True)
class JacobiRule:
    n: int
    alpha: float
    beta: float
    h: float
    nodes: np.ndarray
    weights: np.ndarray

    def shifted(self, a, b):
        """The same rule mapped affinely onto [a, b]."""
        length = b - a
        scale = (length / self.h) ** (self.alpha + self.beta + 1.0)
        return JacobiRule(
            self.n, self.alpha, self.beta, length,
            a + self.nodes * (length / self.h), self.weights * scale,
        )


@dataclass(frozen=True)
class WeightedDensity:
    """The function s**alpha0 * (h - s)**alphaH * smooth(s) on (0, h)."""

    alpha0: float
    alphaH: float
    smooth: Callable
    h: float = 1.0

    def __post_init__(self):
        if self.alpha0 <= -1 or self.alphaH <= -1:
            raise ValueError(
                "density exponents must exceed -1 for integrability, got "
                "alpha0=%g alphaH=%g" % (self.alpha0, self.alphaH)
            )
        if not self.h > 0:
            raise ValueError("h must be positive")

    def weight(self, s):
        s = np.asarray(s, dtype=float)
        return s ** self.alpha0 * (self.h - s) ** self.alphaH

    def smooth_values(self, s):
        s = np.asarray(s, dtype=float)
        out = np.asarray(self.smooth(s), dtype=float)
        return np.broadcast_to(out, s.shape).astype(float)

    def __call__(self, s):
        return self.weight(s) * self.smooth_values(s)

    def scaled(self, c):
        f = self.smooth
        return WeightedDensity(self.alpha0, self.alphaH, lambda s: c * f(s), self.h)

    def reweighted(self, d0, dH, factor=None):
        """Multiply by s**d0 (h-s)**dH (and optionally a smooth factor)."""
        f = self.smooth
        if factor is None:
            smooth = f
        else:
            smooth = lambda s: factor(s) * f(s)
        return WeightedDensity(self.alpha0 + d0, self.alphaH + dH, smooth, self.h)


def zero_density(h=1.0):
    return WeightedDensity(0.0, 0.0, lambda s: np.zeros_like(np.asarray(s, dtype=float)), h)


def combine(terms, h=None):
    """Linear combination sum c_i * f_i of densities on a common interval.

    The result carries the smallest exponent at each end; the surplus powers
    of the other terms are folded into the smooth part.
    """
    terms = [(float(c), f) for c, f in terms]
    if h is None:
        h = terms[0][1].h
    a0 = min(f.alpha0 for _, f in terms)
    aH = min(f.alphaH for _, f in terms)

    def smooth(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape)
        for c, f in terms:
            if c == 0.0:
                continue
            extra = s ** (f.alpha0 - a0) * (h - s) ** (f.alphaH - aH)
            out = out + c * extra * f.smooth_values(s)
        return out

    return WeightedDensity(a0, aH, smooth, h)


def _golub_welsch_guess(n, alpha, beta):
    k = np.arange(n, dtype=float)
    ab = alpha + beta
    diag = np.empty(n)
    diag[0] = (beta - alpha) / (ab + 2.0)
    if n > 1:
        kk = k[1:]
        diag[1:] = (beta ** 2 - alpha ** 2) / ((2 * kk + ab) * (2 * kk + ab + 2.0))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = 4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) ** 2 * (3 + ab))
        kk = k[2:n]
        off[1:] = (
            4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab)
            / ((2 * kk + ab) ** 2 * (2 * kk + ab + 1.0) * (2 * kk + ab - 1.0))
        )
        off = np.sqrt(off)
    if n == 1:
        return diag
    return eigh_tridiagonal(diag, off, eigvals_only=True)


@lru_cache(maxsize=256)
def _reference_rule(n, alpha, beta):
    """Nodes and weights on [-1, 1] for the weight (1-t)^alpha (1+t)^beta."""
    t = np.sort(_golub_welsch_guess(n, alpha, beta))
    for _ in range(NEWTON_MAXIT):
        p, dp = _kernels.jacobi_eval(n, alpha, beta, t)
        step = p / dp
        t = t - step
        if np.max(np.abs(step)) < NEWTON_TOL:
            break
    else:
        raise ArithmeticError("Gauss-Jacobi node iteration did not converge (n=%d)" % n)
    _, dp = _kernels.jacobi_eval(n, alpha, beta, t)
    logc = (
        (alpha + beta + 1.0) * math.log(2.0)
        + math.lgamma(n + alpha + 1.0) + math.lgamma(n + beta + 1.0)
        - math.lgamma(n + alpha + beta + 1.0) - math.lgamma(n + 1.0)
    )
    w = math.exp(logc) / ((1.0 - t * t) * dp * dp)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def jacobi_rule(n, alpha, beta, h=1.0):
    """n-point Gauss rule on [0, h] for the weight s**beta * (h - s)**alpha."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha <= -1 or beta <= -1:
        raise ValueError("Jacobi exponents must exceed -1, got alpha=%g beta=%g" % (alpha, beta))
    if not h > 0:
        raise ValueError("h must be positive")
    t, w = _reference_rule(int(n), float(alpha), float(beta))
    nodes = 0.5 * h * (t + 1.0)
    weights = w * (0.5 * h) ** (alpha + beta + 1.0)
    return JacobiRule(int(n), float(alpha), float(beta), float(h), nodes, weights)


def weight_integral(alpha, beta, h=1.0):
    """Exact integral of s**beta (h-s)**alpha over [0, h]."""
    return math.exp((alpha + beta + 1.0) * math.log(h) + betaln(beta + 1.0, alpha + 1.0))


def integrate_weighted(f, rule):
    """Integrate a WeightedDensity with a rule built for its exponents."""
    if not (math.isclose(rule.alpha, f.alphaH, abs_tol=1e-15)
            and math.isclose(rule.beta, f.alpha0, abs_tol=1e-15)):
        raise ValueError(
            "rule exponents (alpha=%g, beta=%g) do not match density (alphaH=%g, alpha0=%g)"
            % (rule.alpha, rule.beta, f.alphaH, f.alpha0)
        )
    if not math.isclose(rule.h, f.h, rel_tol=1e-14):
        raise ValueError("rule interval %g does not match density interval %g" % (rule.h, f.h))
    return float(np.dot(rule.weights, f.smooth_values(rule.nodes)))


def weight_pv(alpha0, alphaH, xi, h=1.0):
    """Principal value of int_0^h s**alpha0 (h-s)**alphaH / (s - xi) ds."""
    xi = np.asarray(xi, dtype=float)
    key = (alpha0, alphaH)
    if key == (0.0, 0.0):
        return np.log((h - xi) / xi)
    if key == (_HALF, _HALF):
        return math.pi * (0.5 * h - xi)
    if key == (-_HALF, -_HALF):
        return np.zeros_like(xi)
    if key == (-_HALF, _HALF):
        return np.full_like(xi, -math.pi)
    if key == (_HALF, -_HALF):
        return np.full_like(xi, math.pi)
    return np.vectorize(lambda x: _weight_pv_numeric(alpha0, alphaH, x, h), otypes=[float])(xi)


def _weight_pv_numeric(a0, aH, xi, h):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _weight_pv_pieces(a0, aH, xi, h)


def _weight_pv_pieces(a0, aH, xi, h):
    lo, hi = 0.5 * xi, 0.5 * (xi + h)
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    left = integrate.quad(lambda s: (h - s) ** aH / (s - xi), 0.0, lo,
                          weight="alg", wvar=(a0, 0.0), **opts)[0]
    mid = integrate.quad(lambda s: s ** a0 * (h - s) ** aH, lo, hi,
                         weight="cauchy", wvar=xi, **opts)[0]
    right = integrate.quad(lambda s: s ** a0 / (s - xi), hi, h,
                           weight="alg", wvar=(0.0, aH), **opts)[0]
    return left + mid + right


def _pv_on_rule(gn, rule, g_xi, xi, q_xi):
    diff = rule.nodes[None, :] - xi[:, None]
    quot = (gn[None, :] - g_xi[:, None]) / diff
    return quot @ rule.weights + g_xi * q_xi


def pv_hilbert(mu, xi, rule_n=128):
    """Cauchy principal value of int_0^h mu(s) / (s - xi) ds.

    Singularity subtraction against the density's own weight: the
    difference quotient (g(s) - g(xi)) / (s - xi) of the smooth part is
    integrated with the matching Gauss-Jacobi rule and g(xi) times the
    principal value of the bare weight is added back.  ``xi`` may be an
    array; evaluation points that fall on a node use the (n+1)-point rule.
    """
    scalar = np.ndim(xi) == 0
    shape = np.shape(xi)
    xi = np.atleast_1d(np.asarray(xi, dtype=float)).ravel()
    h = mu.h
    if np.any(xi <= 0) or np.any(xi >= h):
        raise ValueError("principal value requires 0 < xi < h")
    rule = jacobi_rule(rule_n, mu.alphaH, mu.alpha0, h)
    gn = mu.smooth_values(rule.nodes)
    g_xi = mu.smooth_values(xi)
    q_xi = np.broadcast_to(weight_pv(mu.alpha0, mu.alphaH, xi, h), xi.shape)
    out = np.empty_like(xi)
    near = np.min(np.abs(rule.nodes[None, :] - xi[:, None]), axis=1) < 1e-7 * h
    far = ~near
    if far.any():
        out[far] = _pv_on_rule(gn, rule, g_xi[far], xi[far], q_xi[far])
    if near.any():
        alt = jacobi_rule(rule_n + 1, mu.alphaH, mu.alpha0, h)
        out[near] = _pv_on_rule(mu.smooth_values(alt.nodes), alt, g_xi[near], xi[near], q_xi[near])
    return float(out[0]) if scalar else out.reshape(shape)

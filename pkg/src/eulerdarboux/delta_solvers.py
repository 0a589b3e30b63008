"""Solvers for the Delta_2* (Frankl) and Delta_2 (lam = 0) problems.

Reduction used by :func:`solve_delta2_star`.  With the Frankl gluing the
two upper triangles share one density pair (T1, N1) and the two lower
triangles share (T3, N3).  Then

* the boundary data fix N1 and N3:
      phi_i(xi) = int_xi^h N(s) (h-s)^p (s-xi)^p 0F1(1+p; -lam (h-s)(s-xi)) ds;
* continuity across eta = 0 fixes D = T1 - T3:
      int_x^h D(s) s^p (s-x)^p 0F1(1+p; lam s (s-x)) ds
          = -int_0^x (N1 - N3)(s) (x-s)^p s^p 0F1(1+p; -lam s (x-s)) ds;
* the derivative matching on eta = 0 fixes S = T1 + T3:
      int_x^h S(s) s^(p-1) (s-x)^(p-1) 0F1(p; lam s (s-x)) ds
          =  int_0^x (N1 + N3)(s) (x-s)^(p-1) s^(p-1) 0F1(p; -lam s (x-s)) ds.

All three are backward first-kind Volterra equations solved by
piecewise-constant product integration.  For lam = 0 the solvability
condition of the last one (its right side must vanish at x = h) is the
moment condition int_0^h phi_i (h-s)^(-p-2) ds = 0 once phi_i(0) =
phi_i'(0) = 0.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import _kernels
from .cauchy_rep import (CauchyDensities, FieldSum, Parameters, SolutionField, Triangle,
                         frankl_constants)
from .hilbert import (InversionTag, invert_bounded_at_h, invert_bounded_at_zero,
                      invert_unbounded)
from .quad import WeightedDensity, combine, jacobi_rule, zero_density
from .specfun import hyp0f1_array

DEFAULT_N = 256
RHS_NODES = 48
PHI_H_RTOL = 1e-8
COND_LIMIT = 1e8
TABLE_DEG = 16
HILBERT_N = 1024
GRADING = 2.0
TABLE_LEVELS = 8


class InconsistentDataError(ValueError):
    """Boundary or right-hand-side data violate a necessary condition."""


class ExponentError(ValueError):
    """Endpoint-exponent bookkeeping produced a non-integrable density."""


@dataclass
class BoundaryData:
    phi1: Callable
    phi2: Callable
    dphi1: Optional[Callable] = None
    dphi2: Optional[Callable] = None
    d2phi1: Optional[Callable] = None
    d2phi2: Optional[Callable] = None
    phi_star1: Optional[Callable] = None
    phi_star2: Optional[Callable] = None

    def phi(self, i):
        return self.phi1 if i == 1 else self.phi2

    def dphi(self, i):
        return self.dphi1 if i == 1 else self.dphi2

    def d2phi(self, i):
        return self.d2phi1 if i == 1 else self.d2phi2

    def phi_star(self, i):
        return self.phi_star1 if i == 1 else self.phi_star2


@dataclass
class NuPair:
    nu1: WeightedDensity
    nu3: WeightedDensity


@dataclass
class ConditionReport:
    values: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    passed: dict = field(default_factory=dict)

    def record(self, name, value, threshold, ok=None):
        self.values[name] = float(value)
        self.thresholds[name] = float(threshold)
        self.passed[name] = bool(value <= threshold) if ok is None else bool(ok)

    @property
    def all_passed(self):
        return all(self.passed.values())


def _deriv(f, x, order, h):
    """Central finite difference; used only when no derivative is supplied."""
    d = 1e-4 * h
    x = np.asarray(x, dtype=float)
    lo = np.clip(x - d, 0.0, h)
    hi = np.clip(x + d, 0.0, h)
    if order == 1:
        return (f(hi) - f(lo)) / (hi - lo)
    mid = 0.5 * (lo + hi)
    return (f(hi) - 2 * f(mid) + f(lo)) / (0.5 * (hi - lo)) ** 2


def check_delta2star_conditions(data, par, eps, n=64, tol=1e-8):
    """Check the Delta_2* solvability conditions on phi_1 and phi_2.

    Per phi_i: finite second derivative on a grid over [0, h) (at h the
    weighted form governs; (h - xi)^(1+p+eps) with p + eps < 1 has no
    bounded second derivative there), phi(0) = phi'(0) = 0,
    phi = (h - xi)^(1+p+eps) phi* with bounded phi*, and the moment
    int_0^h phi (h-s)^(-p-2) ds = 0, evaluated as int_0^h phi*(s) (h-s)^(eps-1) ds.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    h, p = par.h, par.p
    expo = 1.0 + p + eps
    rep = ConditionReport()
    grid = np.linspace(0.0, h, 201)
    for i in (1, 2):
        phi = data.phi(i)
        vals = np.asarray(phi(grid), dtype=float)
        scale = max(float(np.max(np.abs(vals))), 1.0)
        d2 = data.d2phi(i)
        inner = grid[:-1]
        d2v = np.asarray(d2(inner) if d2 is not None else _deriv(phi, inner, 2, h), dtype=float)
        rep.record("phi%d.c2" % i, 0.0, 0.0, ok=bool(np.all(np.isfinite(d2v))))
        d1 = data.dphi(i)
        if d1 is not None:
            dphi0 = float(d1(0.0))
        else:
            d = 1e-4 * h
            dphi0 = float((-3 * phi(0.0) + 4 * phi(d) - phi(2 * d)) / (2 * d))
        rep.record("phi%d.at_zero" % i, abs(float(phi(0.0))), tol * scale)
        rep.record("phi%d.deriv_at_zero" % i, abs(dphi0), max(tol, 1e-6) * scale)

        star = data.phi_star(i)
        if star is None:
            star = (lambda f: lambda s: np.asarray(f(s), dtype=float) / (h - np.asarray(s)) ** expo)(phi)
        inner = np.asarray(star(grid[:-1][grid[:-1] <= h * (1 - 1e-3)]), dtype=float)
        near = np.asarray(star(h - h * np.logspace(-3, -7, 5)), dtype=float)
        bound = 10.0 * max(float(np.max(np.abs(inner))), 1e-300) + 1e-12
        rep.values["phi%d.star_near_h" % i] = float(np.max(np.abs(near)))
        rep.record("phi%d.decay" % i, float(np.max(np.abs(near))), bound)

        rule = jacobi_rule(n, eps - 1.0, 0.0, h)
        sv = np.asarray(star(rule.nodes), dtype=float)
        moment = float(np.dot(rule.weights, sv))
        mscale = max(float(np.dot(rule.weights, np.abs(sv))), 1e-300)
        rep.values["phi%d.moment_scale" % i] = mscale
        rep.record("phi%d.moment" % i, abs(moment), 1e-8 * mscale)
        rep.values["phi%d.moment_signed" % i] = moment
    return rep


@dataclass
class VolterraSolution:
    density: WeightedDensity
    nodes: np.ndarray
    midpoints: np.ndarray
    values: np.ndarray
    report: dict


def _spline(mid, vals):
    cs = CubicSpline(mid, vals, bc_type="natural", extrapolate=True)
    return lambda s: cs(np.asarray(s, dtype=float))


def _panel_condition(x, gamma, b, c1, c0):
    n = x.size - 1
    g1 = gamma + 1.0
    W = np.zeros((n, n))
    for j in range(n):
        lo = x[j:n] - x[j]
        hi = x[j + 1:] - x[j]
        w = (hi ** g1 - lo ** g1) / g1
        if c1 or c0:
            mid = 0.5 * (x[j:n] + x[j + 1:])
            w = w * hyp0f1_array(b, (mid - x[j]) * (c1 * mid + c0))
        W[j, j:] = w
    return float(np.linalg.cond(W, 1))


def march(rhs_values, x, gamma, b=1.0, c1=0.0, c0=0.0):
    """Panel values g_k solving sum_k int_{panel k} g_k (s-x_j)^gamma 0F1(b; (s-x_j)(c1 s+c0)) ds = rhs_j."""
    return _kernels.march_first_kind(np.asarray(x, float), np.asarray(rhs_values, float),
                                     float(gamma), float(b), float(c1), float(c0))


def graded_nodes(n, h, q=GRADING):
    """x_j = h (1 - (1 - j/n)^q): panels shrink towards h, where the march starts."""
    t = np.linspace(0.0, 1.0, n + 1)
    x = h * (1.0 - (1.0 - t) ** q)
    x[0], x[-1] = 0.0, h
    return x


def solve_volterra_first_kind(Phi, par, n=DEFAULT_N, tol=PHI_H_RTOL, condition=False,
                              grading=GRADING):
    """Solve int_xi^h T(s) (s-xi)^p 0F1(1+p; lam s (s-xi)) ds = Phi(xi) for T.

    T is piecewise constant on n panels (values at the panel midpoints) and
    is returned as a natural cubic spline through them.  On a uniform grid
    the first panels below h are only first-order accurate (their values are
    weighted means, not midpoint values); grading the panels towards h
    (``grading`` = 2) makes the whole solution second order.
    """
    h, p, lam = par.h, par.p, par.lam
    x = graded_nodes(n, h, grading)
    rhs = np.asarray(Phi(x), dtype=float)
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    if abs(rhs[-1]) > tol * scale and abs(rhs[-1]) > 1e-300:
        raise InconsistentDataError(
            "Phi(h) = %.3e must vanish (the integral is empty at xi = h)" % rhs[-1]
        )
    g = march(rhs[:-1], x, p, 1.0 + p, lam, 0.0)
    mid = 0.5 * (x[:-1] + x[1:])
    dens = WeightedDensity(0.0, 0.0, _spline(mid, g), h)
    report = {"phi_at_h": float(rhs[-1]), "n": n, "grading": float(grading)}
    if condition:
        cond = _panel_condition(x, p, 1.0 + p, lam, 0.0)
        report["condition"] = cond
        report["ill_conditioned"] = cond > COND_LIMIT
    return VolterraSolution(dens, x, mid, g, report)


def volterra_forward(T, par, xi, n=64):
    """int_xi^h T(s) (s-xi)^p 0F1(1+p; lam s (s-xi)) ds at each xi (T a WeightedDensity)."""
    h, p, lam = par.h, par.p, par.lam
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    rule = jacobi_rule(n, T.alphaH, p, 1.0)
    L = (h - xi)[:, None]
    s = xi[:, None] + L * rule.nodes[None, :]
    w = rule.weights[None, :] * L ** (p + T.alphaH + 1.0)
    f = s ** T.alpha0 * T.smooth_values(s)
    if lam:
        f = f * hyp0f1_array(1.0 + p, lam * s * (s - xi[:, None]))
    return np.sum(w * f, axis=1)


def volterra_residual(sol, Phi, par, n_check=64, quad_n=64):
    """Max |forward(T) - Phi| on the interior grid and its relative size."""
    h = par.h
    xi = np.linspace(0.0, h, n_check + 1)[:-1]
    fwd = volterra_forward(sol.density, par, xi, quad_n)
    ref = np.asarray(Phi(xi), dtype=float)
    err = float(np.max(np.abs(fwd - ref)))
    return err, err / max(float(np.max(np.abs(ref))), 1e-300)


# --- mu <-> nu algebra ------------------------------------------------------

def mu_from_nu(pair, par):
    """mu1 = (h-s)^p s^p (nu1 - nu3),  mu2 = (h-s)^p s^(p-1) (nu1 + nu3)."""
    p = par.p
    diff = combine([(1.0, pair.nu1), (-1.0, pair.nu3)], par.h)
    summ = combine([(1.0, pair.nu1), (1.0, pair.nu3)], par.h)
    return diff.reweighted(p, p), summ.reweighted(p - 1.0, p)


def recover_nu_from_mu(mu1, mu2, par):
    """Invert the mu definitions pointwise; exponents are tracked symbolically.

    nu1 = (h-s)^(-p) [s^(-p) mu1 + s^(1-p) mu2] / 2
    nu3 = (h-s)^(-p) [s^(1-p) mu2 - s^(-p) mu1] / 2
    """
    p = par.p
    try:
        a = mu1.reweighted(-p, -p)
        b = mu2.reweighted(1.0 - p, -p)
    except ValueError as exc:
        raise ExponentError(str(exc)) from exc
    nu1 = combine([(0.5, a), (0.5, b)], par.h)
    nu3 = combine([(0.5, b), (-0.5, a)], par.h)
    return NuPair(nu1, nu3)


# --- boundary-data solve shared by both problems ----------------------------

def solve_boundary_density(phi, par, n=DEFAULT_N, grading=1.0):
    """N with  int_xi^h N(s)(h-s)^p (s-xi)^p 0F1(1+p; -lam (h-s)(s-xi)) ds = phi(xi).

    Solved for N~ = N (h-s)^p; returned as a density with exponent -p at h.
    """
    h, p, lam = par.h, par.p, par.lam
    x = graded_nodes(n, h, grading)
    rhs = np.asarray(phi(x), dtype=float)
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    if abs(rhs[-1]) > PHI_H_RTOL * scale and abs(rhs[-1]) > 1e-300:
        raise InconsistentDataError("boundary data must vanish at xi = h")
    g = march(rhs[:-1], x, p, 1.0 + p, lam, -lam * h)
    mid = 0.5 * (x[:-1] + x[1:])
    return WeightedDensity(0.0, -p, _spline(mid, g), h)


def _left_integral(dens, par, x, gamma, b, zsign, q=RHS_NODES):
    """int_0^x dens(s) (x-s)^gamma s^gamma 0F1(b; zsign lam s (x-s)) ds for each x > 0."""
    p, lam = par.p, par.lam
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    xv = x[pos][:, None]
    rule = jacobi_rule(q, gamma, gamma + dens.alpha0, 1.0)
    s = xv * rule.nodes[None, :]
    w = rule.weights[None, :] * xv ** (2 * gamma + dens.alpha0 + 1.0)
    f = (dens.h - s) ** dens.alphaH * dens.smooth_values(s)
    if lam:
        f = f * hyp0f1_array(b, zsign * lam * s * (xv - s))
    out[pos] = np.sum(w * f, axis=1)
    return out


def default_phi_builder(N1, N3, par, x):
    """Right-hand sides (continuity, matching) of the eta = 0 equations on the grid x."""
    p = par.p
    diff = combine([(1.0, N1), (-1.0, N3)], par.h)
    summ = combine([(1.0, N1), (1.0, N3)], par.h)
    cont = -_left_integral(diff, par, x, p, 1.0 + p, -1.0)
    match = _left_integral(summ, par, x, p - 1.0, p, -1.0)
    return cont, match


@dataclass
class Delta2StarResult:
    field: SolutionField
    N1: WeightedDensity
    N3: WeightedDensity
    T1: WeightedDensity
    T3: WeightedDensity
    conditions: Optional[ConditionReport]
    report: dict


def solve_delta2_star(data, par, Phi_builder=None, eps=0.5, n=DEFAULT_N, k=None,
                      quad_n=64, check=True, grading=1.0):
    """Solve the Delta_2* problem (Frankl gluing) numerically.

    ``Phi_builder(N1, N3, par, x)`` returns the right-hand sides of the
    eta = 0 continuity and matching equations on the grid x; the default
    is :func:`default_phi_builder`.
    """
    cond = None
    if check:
        cond = check_delta2star_conditions(data, par, eps)
        if not cond.all_passed:
            failed = sorted(k_ for k_, ok in cond.passed.items() if not ok)
            raise InconsistentDataError("Delta_2* conditions fail: %s" % ", ".join(failed))
    h, p, lam = par.h, par.p, par.lam
    k1, k2 = k if k is not None else frankl_constants(p)
    N1 = solve_boundary_density(data.phi1, par, n, grading)
    N3 = solve_boundary_density(data.phi2, par, n, grading)
    x = graded_nodes(n, h, grading)
    builder = Phi_builder or default_phi_builder
    cont, match = builder(N1, N3, par, x)
    cont = np.asarray(cont, dtype=float)
    match = np.asarray(match, dtype=float)
    gD = march(cont[:-1], x, p, 1.0 + p, lam, 0.0)
    gS = march(match[:-1], x, p - 1.0, p, lam, 0.0)
    mid = 0.5 * (x[:-1] + x[1:])
    sD = _spline(mid, gD)   # (T1 - T3) s^p
    sS = _spline(mid, gS)   # (T1 + T3) s^(p-1)
    T1 = WeightedDensity(-p, 0.0, lambda s: 0.5 * (sS(s) * s + sD(s)), h)
    T3 = WeightedDensity(-p, 0.0, lambda s: 0.5 * (sS(s) * s - sD(s)), h)
    up = CauchyDensities.from_T_N(T1, N1, k1, k2)
    down = CauchyDensities.from_T_N(T3, N3, k1, k2)
    dens = {Triangle.UP_LEFT: up, Triangle.UP_RIGHT: up,
            Triangle.DOWN_LEFT: down, Triangle.DOWN_RIGHT: down}
    report = {
        "k1": k1, "k2": k2, "n": n,
        "continuity_rhs_at_h": float(cont[-1]),
        "matching_rhs_at_h": float(match[-1]),
        "matching_rhs_scale": float(np.max(np.abs(match[:-1]))),
    }
    fld = SolutionField(par, dens, quad_n, meta={"problem": "delta2star"})
    return Delta2StarResult(fld, N1, N3, T1, T3, cond, report)


# --- Delta_2 ------------------------------------------------------------------

class PiecewiseChebyshev:
    """Piecewise Chebyshev interpolant on a mesh graded geometrically
    (ratio 4) towards both ends of [0, h]; resolves algebraic endpoint
    behaviour that defeats a single global interpolant."""

    def __init__(self, f, h, deg=TABLE_DEG, levels=TABLE_LEVELS):
        inner = [h * 4.0 ** -k for k in range(levels, 1, -1)]
        left = [0.0] + inner + [0.25 * h]
        right = [h - b for b in reversed(left)]
        self.breaks = np.array(left + [0.5 * h] + right)
        self.pieces = [
            np.polynomial.Chebyshev.interpolate(f, deg, domain=[a, b])
            for a, b in zip(self.breaks[:-1], self.breaks[1:])
        ]

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        idx = np.clip(np.searchsorted(self.breaks, flat, side="right") - 1, 0, len(self.pieces) - 1)
        out = np.empty_like(flat)
        for k in np.unique(idx):
            m = idx == k
            out[m] = self.pieces[k](flat[m])
        return out.reshape(s.shape)


def tabulated(mu, deg=TABLE_DEG):
    """Same density with the smooth part replaced by a piecewise Chebyshev table.

    The inversion formulas evaluate a principal value per call; the field
    quadratures call the densities many times, so the smooth part is
    sampled once.
    """
    return WeightedDensity(mu.alpha0, mu.alphaH, PiecewiseChebyshev(mu.smooth_values, mu.h, deg), mu.h)


def dispatch_case(dphi1_h, dphi2_h, tol=1e-10):
    """Endpoint class for mu2 from phi_1'(h) and phi_2'(h) alone."""
    scale = max(abs(dphi1_h), abs(dphi2_h), 1.0)
    if abs(dphi1_h + dphi2_h) <= tol * scale and abs(dphi1_h) > tol and abs(dphi2_h) > tol:
        return InversionTag.BOUNDED_AT_H
    return InversionTag.UNBOUNDED_BOTH


@dataclass
class Delta2Result:
    nu: NuPair
    mu1: WeightedDensity
    mu2: WeightedDensity
    case: InversionTag
    field: FieldSum
    report: dict
    N1: Optional[WeightedDensity] = None    # upper / lower left-triangle N
    N3: Optional[WeightedDensity] = None

    def T(self, which):
        """T on the upper (1) or lower (3) triangles, merged for tabulation only."""
        N, v = (self.N1, self.nu.nu1) if which == 1 else (self.N3, self.nu.nu3)
        k1, k2 = self.report["k1"], self.report["k2"]
        return combine([(1.0 / k1, N), (k2 / k1, v)], N.h)


def solve_delta2(data, par, phi_star_builder, a0=0.0, n=DEFAULT_N, k=None,
                 quad_n=64, hilbert_n=HILBERT_N, table_deg=TABLE_DEG):
    """Solve the Delta_2 problem for lam = 0.

    ``phi_star_builder(data, par)`` returns the right-hand sides
    (Phi1*, Phi2*) of the two Cauchy-kernel equations.  mu1 is taken
    bounded at 0; mu2 is bounded at h when phi_1'(h) + phi_2'(h) = 0 with
    both nonzero, and otherwise unbounded at both ends with constant a0.
    """
    if par.lam != 0:
        raise ValueError("Delta_2 is solved only for lam = 0 (got lam = %g)" % par.lam)
    h, p = par.h, par.p
    k1, k2 = k if k is not None else frankl_constants(p)
    d1 = data.dphi1(h) if data.dphi1 is not None else _deriv(data.phi1, h, 1, h)
    d2 = data.dphi2(h) if data.dphi2 is not None else _deriv(data.phi2, h, 1, h)
    case = dispatch_case(float(d1), float(d2))
    phi1_star, phi2_star = phi_star_builder(data, par)
    mu1 = tabulated(invert_bounded_at_zero(phi1_star, h, hilbert_n), table_deg)
    if case is InversionTag.BOUNDED_AT_H:
        mu2 = invert_bounded_at_h(phi2_star, h, hilbert_n)
    else:
        mu2 = invert_unbounded(phi2_star, h, a0, hilbert_n)
    mu2 = tabulated(mu2, table_deg)
    nu = recover_nu_from_mu(mu1, mu2, par)
    N_up = solve_boundary_density(data.phi1, par, n)
    N_down = solve_boundary_density(data.phi2, par, n)
    # T = N/k1 + (k2/k1) nu on the left triangles.  The two terms carry
    # different endpoint weights, so the field is split into an N part
    # (T = N/k1, nu = 0) and a nu part (T = (k2/k1) nu, nu = +-nu).
    zero = zero_density(h)
    n_part = {}
    nu_part = {}
    for (left, right), Nb, v in (((Triangle.UP_LEFT, Triangle.UP_RIGHT), N_up, nu.nu1),
                                 ((Triangle.DOWN_LEFT, Triangle.DOWN_RIGHT), N_down, nu.nu3)):
        dn = CauchyDensities(Nb.scaled(1.0 / k1), zero, k1, k2)
        n_part[left] = n_part[right] = dn
        Tv = v.scaled(k2 / k1)
        nu_part[left] = CauchyDensities(Tv, v, k1, k2)
        nu_part[right] = CauchyDensities(Tv, v.scaled(-1.0), k1, k2)
    report = {"case": case.value, "a0": None if case is InversionTag.BOUNDED_AT_H else a0,
              "dphi1_h": float(d1), "dphi2_h": float(d2), "k1": k1, "k2": k2}
    fld = FieldSum(par, [SolutionField(par, n_part, quad_n), SolutionField(par, nu_part, quad_n)],
                   meta={"problem": "delta2"})
    return Delta2Result(nu, mu1, mu2, case, fld, report, N_up, N_down)

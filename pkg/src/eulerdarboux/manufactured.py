"""Manufactured data and fields with known answers.

``delta2star_data`` gives boundary data in the admissible class of the
Delta_2* problem (moment condition met in closed form through Beta
functions).  ``delta2_truth`` builds a field that satisfies every Delta_2
gluing condition by construction, for lam = 0:

1. choose cubic densities N_UR, N_DR on the right triangles, vanishing at 0;
2. recover T1 - T3 and T1 + T3 from the eta = 0 continuity and matching
   equations by backward marches (coefficients are fixed so that both
   right-hand sides vanish to second order at x = h);
3. the rest follows from N = k1 T - k2 nu: nu1 = (N_UR - k1 T1)/k2,
   N_UL = 2 k1 T1 - N_UR, and likewise below.

Its phi_i are the traces U(xi, +-h) and its Phi_i* are the forward Cauchy
transforms of the resulting mu_1, mu_2.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import beta as beta_fn

from .cauchy_rep import CauchyDensities, Parameters, SolutionField, Triangle, frankl_constants
from .delta_solvers import BoundaryData, NuPair, _spline, default_phi_builder, march
from .hilbert import invert_unbounded
from .quad import WeightedDensity, combine, pv_hilbert

TRUTH_N = 1024


def admissible(k, p, eps, h):
    """phi = (h - xi)^(1+p+eps) xi^k (1 - c xi) with zero moment, plus phi*, phi', phi''."""
    c = beta_fn(k + 1, eps) / (h * beta_fn(k + 2, eps))
    e = 1.0 + p + eps

    def star(x):
        x = np.asarray(x, dtype=float)
        return x ** k * (1.0 - c * x)

    def dstar(x):
        x = np.asarray(x, dtype=float)
        return k * x ** (k - 1) - c * (k + 1) * x ** k

    def d2star(x):
        x = np.asarray(x, dtype=float)
        return k * (k - 1) * x ** (k - 2) - c * (k + 1) * k * x ** (k - 1)

    def phi(x):
        x = np.asarray(x, dtype=float)
        return (h - x) ** e * star(x)

    def dphi(x):
        x = np.asarray(x, dtype=float)
        r = h - x
        return r ** e * dstar(x) - e * r ** (e - 1) * star(x)

    def d2phi(x):
        x = np.asarray(x, dtype=float)
        r = h - x
        with np.errstate(divide="ignore"):   # (h - x)^(e-2) is unbounded at h when e < 2
            return (r ** e * d2star(x) - 2 * e * r ** (e - 1) * dstar(x)
                + e * (e - 1) * r ** (e - 2) * star(x))

    return phi, dphi, d2phi, star


def delta2star_data(p, eps=0.5, h=1.0):
    """phi_1 ~ xi^2 (1 - c xi), phi_2 ~ xi^3 (1 - c' xi), both times (h - xi)^(1+p+eps)."""
    f1, d1, dd1, s1 = admissible(2, p, eps, h)
    f2, d2, dd2, s2 = admissible(3, p, eps, h)
    return BoundaryData(f1, f2, d1, d2, dd1, dd2, s1, s2)


def moment_failing_data(p=0.25, eps=0.5, h=1.0):
    """phi = xi^2 (h - xi)^(1+p+eps): every condition holds except the moment,
    which equals h^(2+eps) B(3, eps) (16/15 for h = 1, eps = 1/2)."""
    e = 1.0 + p + eps
    phi = lambda x: np.asarray(x, dtype=float) ** 2 * (h - np.asarray(x, dtype=float)) ** e
    star = lambda x: np.asarray(x, dtype=float) ** 2
    return BoundaryData(phi, phi, phi_star1=star, phi_star2=star)


@dataclass
class Delta2Truth:
    par: Parameters
    field: SolutionField
    data: BoundaryData
    nu: NuPair
    mu1: WeightedDensity
    mu2: WeightedDensity
    T1: WeightedDensity
    T3: WeightedDensity

    def phi_star_builder(self, n=256):
        """Builder returning the forward Cauchy transforms of the exact mu_1, mu_2 (memoized)."""
        return phi_star_from_mu(self.mu1, self.mu2, n)

    def matched_a0(self, hilbert_n, builder_n=256, xi0=None):
        """The constant that makes the unbounded-class inversion reproduce mu_2 at one point."""
        h = self.par.h
        xi0 = 0.5 * h if xi0 is None else xi0
        phi2 = phi_star_from_mu(self.mu1, self.mu2, builder_n)(None, self.par)[1]
        rough = invert_unbounded(phi2, h, 0.0, hilbert_n)
        x = np.array([xi0])
        return float(((rough(x) - self.mu2(x)) * np.sqrt(x * (h - x)))[0])


def _memo(fn):
    cache = {}

    def f(y):
        y = np.asarray(y, dtype=float)
        key = (y.shape, y.tobytes())
        if key not in cache:
            cache[key] = fn(y)
        return cache[key]

    return f


def phi_star_from_mu(mu1, mu2, n=256):
    f1 = _memo(lambda y: pv_hilbert(mu1, y, n))
    f2 = _memo(lambda y: pv_hilbert(mu2, y, n))
    return lambda data, par: (f1, f2)


def _coefficients(p, h, lead=(1.0, -0.5)):
    """Cubic N_UR = a1 s + a2 s^2 + a3 s^3, N_DR = b1 s + ...; both eta = 0
    right-hand sides and their first derivatives vanish at x = h."""
    a1, b1 = lead

    def row_c(k, der):
        b = beta_fn(k + p + 1, p + 1)
        return b * (k + 2 * p + 1) * h ** (k + 2 * p) if der else b * h ** (k + 2 * p + 1)

    def row_m(k, der):
        b = beta_fn(k + p, p)
        return b * (k + 2 * p - 1) * h ** (k + 2 * p - 2) if der else b * h ** (k + 2 * p - 1)

    A, r = [], []
    for der in (False, True):
        A.append([row_c(2, der), row_c(3, der), -row_c(2, der), -row_c(3, der)])
        r.append(-(a1 - b1) * row_c(1, der))
        A.append([row_m(2, der), row_m(3, der), row_m(2, der), row_m(3, der)])
        r.append(-(a1 + b1) * row_m(1, der))
    a2, a3, b2, b3 = np.linalg.solve(np.array(A), np.array(r))
    return (a1, a2, a3), (b1, b2, b3)


def _cubic(c):
    return lambda s: c[0] * s + c[1] * s ** 2 + c[2] * s ** 3


def delta2_truth(p, h=1.0, n=TRUTH_N, quad_n=64):
    """A Delta_2 (lam = 0) field satisfying every gluing condition by construction."""
    par = Parameters(p, 0.0, h)
    k1, k2 = frankl_constants(p)
    a, b = _coefficients(p, h)
    N_ur = WeightedDensity(0.0, 0.0, _cubic(a), h)
    N_dr = WeightedDensity(0.0, 0.0, _cubic(b), h)
    x = np.linspace(0.0, h, n + 1)
    cont, match = default_phi_builder(N_ur, N_dr, par, x)
    gD = march(cont[:-1], x, p, 1.0 + p, 0.0, 0.0)
    gS = march(match[:-1], x, p - 1.0, p, 0.0, 0.0)
    mid = 0.5 * (x[:-1] + x[1:])
    sD, sS = _spline(mid, gD), _spline(mid, gS)
    T1 = WeightedDensity(-p, 0.0, lambda s: 0.5 * (sS(s) * s + sD(s)), h)
    T3 = WeightedDensity(-p, 0.0, lambda s: 0.5 * (sS(s) * s - sD(s)), h)
    nu1 = combine([(1.0 / k2, N_ur), (-k1 / k2, T1)], h)
    nu3 = combine([(1.0 / k2, N_dr), (-k1 / k2, T3)], h)
    dens = {
        Triangle.UP_LEFT: CauchyDensities(T1, nu1, k1, k2),
        Triangle.UP_RIGHT: CauchyDensities(T1, nu1.scaled(-1.0), k1, k2),
        Triangle.DOWN_LEFT: CauchyDensities(T3, nu3, k1, k2),
        Triangle.DOWN_RIGHT: CauchyDensities(T3, nu3.scaled(-1.0), k1, k2),
    }
    fld = SolutionField(par, dens, quad_n, meta={"problem": "delta2_truth"})

    # mu_1 = s^p (h-s)^p (nu1 - nu3), mu_2 = s^(p-1) (h-s)^p (nu1 + nu3); the
    # s^(-p) parts of T cancel against the explicit powers, so both are
    # written with exponents (0, p)
    nd = _cubic(tuple(ai - bi for ai, bi in zip(a, b)))
    ns = lambda s: (a[0] + b[0]) + (a[1] + b[1]) * s + (a[2] + b[2]) * s ** 2
    mu1 = WeightedDensity(0.0, p, lambda s: (nd(s) * s ** p - k1 * sD(s)) / k2, h)
    mu2 = WeightedDensity(0.0, p, lambda s: (ns(s) * s ** p - k1 * sS(s)) / k2, h)

    def trace(sign):
        def f(xi):
            xi = np.atleast_1d(np.asarray(xi, dtype=float))
            out = np.zeros_like(xi)
            m = xi < h * (1.0 - 1e-12)
            out[m] = fld(xi[m], np.full(int(m.sum()), sign * h))
            return out
        return f

    data = BoundaryData(trace(1.0), trace(-1.0))
    return Delta2Truth(par, fld, data, NuPair(nu1, nu3), mu1, mu2, T1, T3)


def with_endpoint_slopes(data, d1, d2):
    """Copy of ``data`` whose phi_i'(h) values (used only by the case dispatch) are given constants."""
    return BoundaryData(data.phi1, data.phi2,
                        dphi1=lambda x, v=float(d1): v, dphi2=lambda x, v=float(d2): v,
                        d2phi1=data.d2phi1, d2phi2=data.d2phi2,
                        phi_star1=data.phi_star1, phi_star2=data.phi_star2)

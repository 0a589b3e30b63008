import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from eulerdarboux.quad import (WeightedDensity, combine, integrate_weighted, jacobi_rule,
                               pv_hilbert, weight_integral, weight_pv, zero_density)

expo = st.floats(-0.9, 2.0)


@given(st.integers(1, 60), expo, expo)
def test_rule_matches_scipy_roots(n, alpha, beta):
    t, w = special.roots_jacobi(n, alpha, beta)
    r = jacobi_rule(n, alpha, beta, 2.0)
    np.testing.assert_allclose(r.nodes, t + 1.0, atol=1e-12)
    np.testing.assert_allclose(r.weights, w, rtol=1e-9, atol=1e-14)


@given(st.integers(1, 30), expo, expo, st.floats(0.2, 5.0))
def test_rule_exact_on_monomials(n, alpha, beta, h):
    r = jacobi_rule(n, alpha, beta, h)
    for k in (0, n, 2 * n - 1):
        exact = h ** (alpha + beta + k + 1) * special.beta(beta + k + 1, alpha + 1)
        assert np.dot(r.weights, r.nodes ** k) == pytest.approx(exact, rel=1e-10)


def test_large_rule_normalised():
    r = jacobi_rule(1024, 0.5, -0.5, 1.0)
    assert r.weights.sum() == pytest.approx(weight_integral(0.5, -0.5), rel=1e-11)
    assert np.all(np.diff(r.nodes) > 0)


def test_shifted_rule():
    r = jacobi_rule(12, 0.3, 0.6, 1.0).shifted(2.0, 5.0)
    exact = integrate.quad(lambda s: (s - 2) ** 0.6 * (5 - s) ** 0.3 * s ** 3, 2, 5)[0]
    assert np.dot(r.weights, r.nodes ** 3) == pytest.approx(exact, rel=1e-12)


@pytest.mark.parametrize("args", [(0, 0.0, 0.0), (3, -1.0, 0.0), (3, 0.0, -1.5), (3, 0.0, 0.0, 0.0)])
def test_rule_validation(args):
    with pytest.raises(ValueError):
        jacobi_rule(*args)


def test_density_validation():
    with pytest.raises(ValueError):
        WeightedDensity(-1.0, 0.0, np.cos)
    with pytest.raises(ValueError):
        WeightedDensity(0.0, 0.0, np.cos, h=0.0)


def test_integrate_weighted_checks_exponents():
    f = WeightedDensity(0.25, -0.5, np.cos, 1.0)
    with pytest.raises(ValueError):
        integrate_weighted(f, jacobi_rule(10, 0.25, -0.5))
    with pytest.raises(ValueError):
        integrate_weighted(f, jacobi_rule(10, -0.5, 0.25, 2.0))
    val = integrate_weighted(f, jacobi_rule(30, -0.5, 0.25))
    ref = integrate.quad(np.cos, 0, 1, weight="alg", wvar=(0.25, -0.5))[0]
    assert val == pytest.approx(ref, rel=1e-13)


@settings(max_examples=10)
@given(st.floats(0.01, 0.99))
def test_closed_form_weight_pv_against_quadpack(x):
    for a0, aH in ((0.0, 0.0), (0.5, 0.5), (-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5)):
        ref = integrate.quad(lambda s: s ** a0 * (1 - s) ** aH, 0, 1, weight="cauchy", wvar=x,
                             limit=200)[0] if (a0, aH) == (0.0, 0.0) else _split_pv(a0, aH, x)
        assert float(weight_pv(a0, aH, x)) == pytest.approx(ref, rel=1e-7, abs=1e-8)


def _split_pv(a0, aH, x):
    """Independent p.v.: symmetric pairing on |s - x| < d (mpmath), QUADPACK
    algebraic-weight rules on the two outer pieces."""
    import mpmath
    mpmath.mp.dps = 20
    d = min(x, 1 - x) / 2
    g = lambda t: (x + t) ** a0 * (1 - x - t) ** aH - (x - t) ** a0 * (1 - x + t) ** aH
    sym = float(mpmath.quad(lambda t: g(t) / t, [0, d]))
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    left = integrate.quad(lambda s: (1 - s) ** aH / (s - x), 0, x - d, weight="alg",
                          wvar=(a0, 0.0), **opts)[0]
    right = integrate.quad(lambda s: s ** a0 / (s - x), x + d, 1, weight="alg",
                           wvar=(0.0, aH), **opts)[0]
    return sym + left + right


@settings(max_examples=12)
@given(st.floats(0.02, 0.98), st.floats(-0.8, 1.5), st.floats(-0.8, 1.5))
def test_numeric_weight_pv(x, a0, aH):
    assert float(weight_pv(a0, aH, x)) == pytest.approx(_split_pv(a0, aH, x), rel=1e-8, abs=1e-9)


@pytest.mark.parametrize("a0,aH", [(0.0, 0.0), (0.5, -0.5), (-0.5, -0.5), (0.25, 0.25)])
def test_pv_hilbert_smooth_factor(a0, aH):
    mu = WeightedDensity(a0, aH, lambda s: np.exp(s) * np.cos(2 * s), 1.0)
    xi = np.array([0.05, 0.3, 0.5, 0.77, 0.95])
    got = pv_hilbert(mu, xi, 128)
    import mpmath
    mpmath.mp.dps = 20
    for x, g in zip(xi, got):
        f = lambda s: s ** a0 * (1 - s) ** aH * mpmath.exp(s) * mpmath.cos(2 * s)
        d = min(x, 1 - x) / 2
        sym = mpmath.quad(lambda t: (f(x + t) - f(x - t)) / t, [0, d])
        ref = float(sym + mpmath.quad(lambda s: f(s) / (s - x), [0, x - d])
                    + mpmath.quad(lambda s: f(s) / (s - x), [x + d, 1]))
        assert g == pytest.approx(ref, rel=1e-9, abs=1e-10)


def test_pv_hilbert_scalar_node_and_domain():
    mu = WeightedDensity(0.0, 0.0, lambda s: s * s, 1.0)
    node = float(jacobi_rule(16, 0.0, 0.0).nodes[5])
    exact = lambda x: 0.5 + x + x * x * math.log((1 - x) / x)
    assert pv_hilbert(mu, node, 16) == pytest.approx(exact(node), rel=1e-12)
    assert np.ndim(pv_hilbert(mu, 0.4, 16)) == 0
    with pytest.raises(ValueError):
        pv_hilbert(mu, np.array([0.0, 0.5]))


def test_combine_tracks_lowest_exponents():
    f = WeightedDensity(0.5, 0.0, lambda s: 2.0 + 0 * s)
    g = WeightedDensity(-0.25, 1.0, lambda s: s)
    c = combine([(3.0, f), (-1.0, g)])
    assert (c.alpha0, c.alphaH) == (-0.25, 0.0)
    s = np.linspace(0.05, 0.95, 9)
    np.testing.assert_allclose(c(s), 3 * f(s) - g(s), rtol=1e-13)


def test_zero_density_and_scaling():
    z = zero_density(2.0)
    assert np.all(z(np.linspace(0.1, 1.9, 5)) == 0)
    f = WeightedDensity(0.5, 0.5, np.cos).scaled(-2.0)
    assert f(0.3) == pytest.approx(-2 * math.sqrt(0.3 * 0.7) * math.cos(0.3))
    r = f.reweighted(0.5, -0.5, factor=lambda s: s + 1)
    assert r(0.3) == pytest.approx(f(0.3) * 0.3 ** 0.5 * 0.7 ** -0.5 * 1.3)


@pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (0.25, 0.25), (0.25, -0.75), (-0.5, -0.5)])
@pytest.mark.parametrize("n", [4, 32, 128])
def test_solver_weight_pairs_exact(alpha, beta, n):
    r = jacobi_rule(n, alpha, beta, 1.0)
    for k in range(2 * n):
        exact = special.beta(beta + k + 1, alpha + 1)
        assert np.dot(r.weights, r.nodes ** k) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("a", [0.0, 0.5, -0.5, 0.3])
def test_pv_antisymmetry_at_midpoint(a):
    mu = WeightedDensity(a, a, lambda s: np.cos(3 * (s - 1.0)), 2.0)
    assert abs(pv_hilbert(mu, 1.0, 64)) < 1e-10


def test_pv_convergence_order():
    # pole at 0.5 +- 0.1i keeps the error well above roundoff on these grids
    mu = WeightedDensity(0.25, -0.5, lambda s: 1.0 / ((s - 0.5) ** 2 + 0.01), 1.0)
    xi = np.array([0.13, 0.5, 0.81])
    ref = pv_hilbert(mu, xi, 1024)
    errs = [np.max(np.abs(pv_hilbert(mu, xi, n) - ref)) for n in (16, 32, 64, 128)]
    assert np.all(np.log2(np.array(errs[:-1]) / np.array(errs[1:])) >= 2)

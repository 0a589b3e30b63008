import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from eulerdarboux import manufactured
from eulerdarboux.cauchy_rep import Parameters
from eulerdarboux.delta_solvers import (BoundaryData, InconsistentDataError, NuPair,
                                        PiecewiseChebyshev, check_delta2star_conditions,
                                        dispatch_case, graded_nodes, mu_from_nu,
                                        recover_nu_from_mu, solve_boundary_density, solve_delta2,
                                        solve_delta2_star, solve_volterra_first_kind, tabulated,
                                        volterra_forward, volterra_residual)
from eulerdarboux.hilbert import InversionTag
from eulerdarboux.quad import WeightedDensity


def _phi_quadpack(T, p, lam, h, c0=0.0, weight_h=0.0):
    """xi -> int_xi^h T(s) (h-s)^weight_h (s-xi)^p 0F1(1+p; (s-xi)(lam s + c0)) ds."""
    def one(x):
        if x >= h:
            return 0.0
        f = lambda s: T(s) * special.hyp0f1(1 + p, (s - x) * (lam * s + c0))
        return integrate.quad(f, x, h, weight="alg", wvar=(p, weight_h), epsabs=1e-14, epsrel=1e-13)[0]
    return lambda xi: np.array([one(x) for x in np.atleast_1d(xi)])


@settings(max_examples=8)
@given(st.floats(0.05, 0.45), st.floats(-1.0, 1.0), st.sampled_from([0, 1, 2]))
def test_volterra_recovers_polynomial(p, lam, deg):
    T = lambda s: (1.0 + 0.5 * s) ** deg
    par = Parameters(p, lam)
    sol = solve_volterra_first_kind(_phi_quadpack(T, p, lam, 1.0), par, n=128)
    s = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(sol.density(s), T(s), atol=2e-3)


def test_volterra_second_order_on_graded_grid():
    p, lam = 0.25, 1.0
    par = Parameters(p, lam)
    T = lambda s: np.cos(2 * s)
    Phi = _phi_quadpack(T, p, lam, 1.0)
    s = np.linspace(0.1, 0.9, 9)
    errs = [np.max(np.abs(solve_volterra_first_kind(Phi, par, n=n).density(s) - T(s))) for n in (64, 128)]
    assert np.log2(errs[0] / errs[1]) > 1.6


def test_volterra_residual_and_report():
    par = Parameters(0.25, 0.0)
    Phi = lambda x: (1.0 - np.asarray(x)) ** 1.25 / 1.25
    sol = solve_volterra_first_kind(Phi, par, n=64, condition=True)
    assert sol.report["grading"] == 2.0 and sol.report["condition"] > 1
    assert volterra_residual(sol, Phi, par)[1] < 1e-4
    np.testing.assert_allclose(volterra_forward(WeightedDensity(0.0, 0.0, lambda s: 1 + 0 * s), par,
                                                [0.0, 0.5]), Phi(np.array([0.0, 0.5])), rtol=1e-12)


def test_volterra_rejects_nonvanishing_rhs():
    with pytest.raises(InconsistentDataError):
        solve_volterra_first_kind(lambda x: 1.0 + 0 * np.asarray(x), Parameters(0.25), n=16)
    with pytest.raises(InconsistentDataError):
        solve_boundary_density(lambda x: 1.0 + 0 * np.asarray(x), Parameters(0.25), n=16)


def test_boundary_density_against_quadpack():
    p, lam = 0.25, 0.7
    par = Parameters(p, lam)
    Nt = lambda s: 1.0 + s * s     # N (h-s)^p
    # (s-xi)(lam s - lam h) = -lam (h-s)(s-xi)
    phi = _phi_quadpack(Nt, p, lam, 1.0, c0=-lam)
    N = solve_boundary_density(phi, par, n=128, grading=2.0)
    assert N.alphaH == -p
    s = np.linspace(0.05, 0.95, 10)
    np.testing.assert_allclose(N.smooth_values(s), Nt(s), atol=2e-3)


def test_graded_nodes():
    x = graded_nodes(10, 2.0, 2.0)
    assert x[0] == 0 and x[-1] == 2.0 and np.all(np.diff(np.diff(x)) < 0)
    np.testing.assert_allclose(graded_nodes(4, 1.0, 1.0), np.linspace(0, 1, 5))


@given(st.floats(0.05, 0.45))
def test_mu_nu_round_trip(p):
    par = Parameters(p)
    nu1 = WeightedDensity(0.0, 0.0, lambda s: 1 + s, 1.0)
    nu3 = WeightedDensity(0.0, 0.0, lambda s: 2 - s * s, 1.0)
    mu1, mu2 = mu_from_nu(NuPair(nu1, nu3), par)
    back = recover_nu_from_mu(mu1, mu2, par)
    s = np.linspace(0.05, 0.95, 7)
    np.testing.assert_allclose(back.nu1(s), nu1(s), rtol=1e-12)
    np.testing.assert_allclose(back.nu3(s), nu3(s), rtol=1e-12)
    np.testing.assert_allclose(mu1(s), (1 - s) ** p * s ** p * (nu1(s) - nu3(s)), rtol=1e-12)


def test_dispatch_case():
    assert dispatch_case(1.0, -1.0) is InversionTag.BOUNDED_AT_H
    assert dispatch_case(1.0, 0.5) is InversionTag.UNBOUNDED_BOTH
    assert dispatch_case(0.0, 0.0) is InversionTag.UNBOUNDED_BOTH


def test_conditions_pass_for_admissible_and_fail_on_moment():
    par = Parameters(0.25)
    ok = check_delta2star_conditions(manufactured.delta2star_data(0.25), par, 0.5)
    assert ok.all_passed
    bad = check_delta2star_conditions(manufactured.moment_failing_data(0.25), par, 0.5)
    failed = {k for k, v in bad.passed.items() if not v}
    assert failed == {"phi1.moment", "phi2.moment"}
    assert bad.values["phi1.moment_signed"] == pytest.approx(special.beta(3, 0.5), rel=1e-6)
    with pytest.raises(ValueError):
        check_delta2star_conditions(manufactured.delta2star_data(0.25), par, 0.0)


def test_delta2star_refuses_moment_failure():
    with pytest.raises(InconsistentDataError):
        solve_delta2_star(manufactured.moment_failing_data(0.25), Parameters(0.25), n=32)


def test_delta2star_small_grid_boundary_values():
    par = Parameters(0.25)
    data = manufactured.delta2star_data(0.25)
    res = solve_delta2_star(data, par, n=64)
    assert res.conditions.all_passed
    xi = np.array([0.2, 0.5, 0.8])
    # boundary eta = h on the upper half reproduces phi_1
    np.testing.assert_allclose(res.field(xi, np.full(3, 1.0)), data.phi1(xi), atol=5e-4)


def test_delta2_requires_lambda_zero():
    with pytest.raises(ValueError):
        solve_delta2(BoundaryData(np.sin, np.sin), Parameters(0.25, 1.0), lambda d, p: None)


def test_tabulation_resolves_endpoint_behaviour():
    f = lambda s: np.sqrt(np.asarray(s)) + np.log1p(np.asarray(s))
    pc = PiecewiseChebyshev(f, 1.0)
    s = np.concatenate([np.geomspace(1e-4, 0.1, 20), np.linspace(0.1, 1.0, 20)])
    np.testing.assert_allclose(pc(s), f(s), atol=5e-4)
    mu = WeightedDensity(-0.5, 0.5, np.cos, 1.0)
    t = tabulated(mu)
    assert (t.alpha0, t.alphaH) == (-0.5, 0.5)
    np.testing.assert_allclose(t.smooth_values(s), np.cos(s), atol=1e-12)


def test_volterra_forward_residual_relative_and_order():
    p, lam = 0.25, -1.0
    par = Parameters(p, lam)
    Phi = _phi_quadpack(lambda s: 1.0 + s * s, p, lam, 1.0)
    rel = [volterra_residual(solve_volterra_first_kind(Phi, par, n=n), Phi, par)[1] for n in (64, 128, 256)]
    assert rel[1] <= 5e-3
    assert np.all(np.log2(np.array(rel[:-1]) / np.array(rel[1:])) >= 1)


def test_solvers_are_linear_in_data():
    par = Parameters(0.25, 0.5)
    d1 = manufactured.delta2star_data(0.25)
    d2 = manufactured.moment_failing_data(0.25)
    a, b = 2.0, -0.5
    mix = BoundaryData(lambda x: a * d1.phi1(x) + b * d2.phi1(x), lambda x: a * d1.phi2(x) + b * d2.phi2(x))
    r1, r2, rm = (solve_delta2_star(d, par, n=64, check=False) for d in (d1, d2, mix))
    xi, eta = np.array([0.2, 0.6, 0.3]), np.array([0.7, -0.3, -0.9])
    np.testing.assert_allclose(rm.field(xi, eta), a * r1.field(xi, eta) + b * r2.field(xi, eta),
                               rtol=1e-8, atol=1e-10)
    Phi1 = lambda x: (1 - np.asarray(x)) ** 1.25
    Phi2 = lambda x: np.asarray(x) * (1 - np.asarray(x)) ** 2
    s1, s2 = (solve_volterra_first_kind(f, par, n=64) for f in (Phi1, Phi2))
    sm = solve_volterra_first_kind(lambda x: a * Phi1(x) + b * Phi2(x), par, n=64)
    np.testing.assert_allclose(sm.values, a * s1.values + b * s2.values, rtol=1e-8, atol=1e-12)

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eulerdarboux import verify
from eulerdarboux.cauchy_rep import Parameters
from eulerdarboux.verify import (ReportConfig, Thresholds, VerificationReport,
                                 check_characteristic_matching, extract_nu_limits, fd_residual,
                                 full_report, residual_signed, richardson_order, triangle_samples)


def linear_exact(xi, eta):
    """xi + |eta| solves the lam = 0 operator in every triangle."""
    return np.asarray(xi) + np.abs(eta)


@given(st.floats(0.05, 0.45), st.floats(0.1, 0.9), st.floats(0.1, 0.9), st.booleans())
def test_exact_linear_solution_has_zero_residual(p, a, b, lower):
    if abs(a - b) < 0.05:
        return
    eta = -b if lower else b
    assert abs(residual_signed(linear_exact, a, eta, p, 0.0, 1e-3)) < 1e-9


def test_residual_vectorized_over_both_halves():
    xi = np.array([0.2, 0.2, 0.7, 0.7])
    eta = np.array([0.6, -0.6, 0.3, -0.3])
    np.testing.assert_allclose(residual_signed(linear_exact, xi, eta, 0.25, 0.0, 1e-3), 0.0, atol=1e-9)
    # lam term alone: constant U gives -sgn(eta) lam U
    one = lambda x, e: np.ones_like(np.asarray(x, dtype=float))
    np.testing.assert_allclose(residual_signed(one, xi, eta, 0.25, 2.0, 1e-3), [-2, 2, -2, 2])


def test_fd_residual_guards_singular_lines():
    par = Parameters(0.25)
    with pytest.raises(ValueError):
        fd_residual(linear_exact, 0.5, 0.501, par, 1e-3)
    assert fd_residual(linear_exact, 0.3, 0.7, par, 1e-3) < 1e-9


def test_richardson_order_of_power_sequence():
    h = np.array([0.1, 0.05, 0.025])
    np.testing.assert_allclose(richardson_order(3 * h ** 2), 2.0)
    np.testing.assert_allclose(richardson_order(-h ** 1.5), 1.5)


@pytest.mark.parametrize("p", [0.1, 0.25, 0.4])
def test_nu_limits_of_power_field(p):
    """U = |eta - xi|^(1+2p): nu1 = -2(1+2p), nu2 = 2(1+2p), nu3 = nu4 = 0."""
    U = lambda x, e: np.abs(np.asarray(e) - np.asarray(x)) ** (1 + 2 * p)
    lim = extract_nu_limits(U, 0.5, Parameters(p))
    c = 2 * (1 + 2 * p)
    assert lim.nu1 == pytest.approx(-c, rel=1e-3)
    assert lim.nu2 == pytest.approx(c, rel=1e-3)
    assert abs(lim.nu3) < 1e-6 and abs(lim.nu4) < 1e-6
    assert lim.converged


def test_nu_offsets_validation():
    with pytest.raises(ValueError):
        extract_nu_limits(linear_exact, 0.5, Parameters(0.25), offsets=(1e-3, 2e-3))


def test_characteristic_matching():
    xs = np.linspace(0.1, 0.9, 5)
    assert check_characteristic_matching(linear_exact, xs, 1e-3).max_gap < 1e-9
    bad = check_characteristic_matching(lambda x, e: np.asarray(x) + 0 * np.asarray(e), xs, 1e-3)
    assert bad.max_gap == pytest.approx(2.0)
    with pytest.raises(ValueError):
        check_characteristic_matching(linear_exact, [0.001], 1e-3)


def test_triangle_samples_stay_off_lines():
    pts = triangle_samples(10, 1.0, 0.05)
    assert set(pts) == {"up_left", "up_right", "down_left", "down_right"}
    for arr in pts.values():
        x, e = arr[:, 0], arr[:, 1]
        assert np.all(np.abs(np.abs(e) - x) > 0.05)
    assert np.all(pts["up_left"][:, 1] > pts["up_left"][:, 0])
    assert np.all(pts["down_right"][:, 1] < 0)


def test_full_report_zero_field_passes():
    zero = lambda x, e: np.zeros(np.broadcast(np.asarray(x), np.asarray(e)).shape)
    phi = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    cfg = ReportConfig(p=0.25, lam=0.0, phi1=phi, phi2=phi, grid=6, nu_samples=3)
    rep = full_report(zero, cfg)
    assert rep.passed
    flat = rep.as_flat()
    assert flat["passed"] is True
    assert "check.pde_residual.value" in flat and "gluing.characteristic.max_gap" in flat


def test_full_report_groups_and_failure():
    cfg = ReportConfig(p=0.25, lam=0.0, grid=4, checks=("pde",))
    rep = full_report(linear_exact, cfg)
    assert [c.name for c in rep.checks] == ["pde_residual"]
    shifted = lambda x, e: linear_exact(x, e) + 1.0
    phi = lambda x: np.asarray(x, dtype=float) + 1.0
    rep = full_report(shifted, ReportConfig(p=0.25, lam=0.0, phi1=phi, grid=4, checks=("boundary",)))
    assert not rep.passed and rep.boundary_error["eta_plus_h"] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        full_report(linear_exact, ReportConfig(p=0.25, lam=0.0, checks=("nope",)))


def test_report_record_threshold():
    rep = VerificationReport()
    rep.add("a", 0.5, 1.0)
    assert rep.passed
    rep.add("b", 2.0, 1.0)
    assert not rep.passed and Thresholds().order_range == (1.8, 2.2)


def test_p_zero_limit_reduces_to_mixed_derivative():
    par = type("P", (), {"p": 0.0, "lam": 0.7, "h": 1.0})()
    U = lambda x, e: np.asarray(x) ** 2 * np.asarray(e) ** 3
    for x, e in ((0.3, 0.6), (0.7, -0.4)):
        exact = abs(6 * x * e ** 2 - (1 if e > 0 else -1) * 0.7 * x ** 2 * e ** 3)
        assert fd_residual(U, x, e, par, 1e-3) == pytest.approx(exact, abs=1e-5)


def test_report_is_deterministic():
    U = lambda x, e: np.sin(np.asarray(x)) * np.cos(np.asarray(e))
    cfg = ReportConfig(p=0.25, lam=1.0, grid=4, nu_samples=2, phi1=np.sin)
    assert full_report(U, cfg).as_flat() == full_report(U, cfg).as_flat()

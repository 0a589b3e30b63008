"""Finite-difference verification of solution fields.

Every check treats the field as a black box ``U(xi, eta)`` (vectorized) and
uses plain central differences; nothing here reads the densities a field
was built from.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

DEFAULT_OFFSETS = (8e-3, 4e-3, 2e-3, 1e-3)
CHECK_GROUPS = ("pde", "boundary", "gluing")
FD_FRACTION = 1.0 / 16.0


@dataclass
class Thresholds:
    pde_residual: float = 1e-3
    boundary: float = 1e-4
    continuity: float = 1e-4
    nu_relative: float = 0.05
    characteristic: float = 1e-3
    order_range: tuple = (1.8, 2.2)


@dataclass
class CheckRecord:
    name: str
    value: float
    threshold: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.value = float(self.value)
        self.passed = bool(self.value <= self.threshold)


@dataclass
class VerificationReport:
    pde_residual: dict = field(default_factory=dict)
    boundary_error: dict = field(default_factory=dict)
    gluing: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, value, threshold):
        rec = CheckRecord(name, value, threshold)
        self.checks.append(rec)
        return rec

    def as_flat(self):
        """Flat key -> value mapping (values are numbers, bools or strings)."""
        out = {}
        for group in ("pde_residual", "boundary_error", "gluing", "orders"):
            for k, v in sorted(getattr(self, group).items()):
                out["%s.%s" % (group, k)] = v
        for c in self.checks:
            out["check.%s.value" % c.name] = c.value
            out["check.%s.threshold" % c.name] = c.threshold
            out["check.%s.passed" % c.name] = c.passed
        for i, note in enumerate(self.notes):
            out["note.%d" % i] = note
        out["passed"] = self.passed
        return out


def _sgn(eta):
    if np.ndim(eta) == 0:
        return 1.0 if eta > 0 else -1.0
    return np.where(np.asarray(eta) > 0, 1.0, -1.0)


def operator_terms(U, xi, eta, step):
    """Central-difference U, U_xi, U_eta and U_xieta at (xi, eta) (scalars or 1-D arrays)."""
    d = step
    xs = np.array([xi, xi + d, xi - d, xi, xi, xi + d, xi + d, xi - d, xi - d])
    es = np.array([eta, eta, eta, eta + d, eta - d, eta + d, eta - d, eta + d, eta - d])
    u = np.asarray(U(xs, es), dtype=float)
    u_xi = (u[1] - u[2]) / (2 * d)
    u_eta = (u[3] - u[4]) / (2 * d)
    u_mixed = (u[5] - u[6] - u[7] + u[8]) / (4 * d * d)
    return u[0], u_xi, u_eta, u_mixed


def residual_signed(U, xi, eta, p, lam, step):
    s = _sgn(eta)
    u, u_xi, u_eta, u_mixed = operator_terms(U, xi, eta, step)
    return (u_mixed - p / (eta - s * xi) * u_xi + p / (s * eta - xi) * u_eta
            - s * lam * u)


def _line_distance(xi, eta, h):
    return min(abs(eta - xi), abs(eta + xi), abs(eta), abs(xi), abs(h - xi), abs(h - abs(eta)))


def fd_residual(U, xi, eta, par, step):
    """|L U| at (xi, eta) for the operator with the sgn(eta) branch.

    ``par`` needs attributes ``p`` and ``lam`` only; p = 0 is allowed here.
    """
    h = getattr(par, "h", 1.0)
    if _line_distance(xi, eta, h) <= 4 * step:
        raise ValueError(
            "point (%g, %g) is within 4 steps of a singular line or the boundary" % (xi, eta)
        )
    return abs(residual_signed(U, xi, eta, par.p, par.lam, step))


def richardson_order(values):
    """Observed orders log2(|e_k| / |e_{k+1}|) for a step-halving sequence."""
    v = np.abs(np.asarray(values, dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log2(v[:-1] / v[1:])


@dataclass
class NuLimits:
    nu1: float
    nu2: float
    nu3: float
    nu4: float
    spread: float
    converged: bool


def _extrapolate(offsets, values, gamma):
    """Least-squares fit values = a + b * offset**gamma + c * offset; returns (a, rms misfit)."""
    A = np.column_stack([np.ones_like(offsets), offsets ** gamma, offsets])
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    misfit = float(np.sqrt(np.mean((A @ coef - values) ** 2)))
    return float(coef[0]), misfit


def extract_nu_limits(U, xi, par, offsets=None, fd_fraction=FD_FRACTION):
    """Weighted normal-derivative limits on the singular lines at abscissa xi.

    nu1: eta -> xi+   of (eta - xi)^(-2p) (U_xi - U_eta)
    nu2: eta -> xi-   of (xi - eta)^(-2p) (U_xi - U_eta)
    nu3: -eta -> xi-  of (eta + xi)^(-2p) (U_xi + U_eta)
    nu4: -eta -> xi+  of (-xi - eta)^(-2p) (U_xi + U_eta)

    Each sequence is sampled at ``offsets`` (scaled by h) and extrapolated
    to zero offset with a + b * offset^(1 - 2p) + c * offset; the last term
    carries the slope of the densities along the line.
    """
    h = getattr(par, "h", 1.0)
    p = par.p
    offs = np.asarray(offsets if offsets is not None else DEFAULT_OFFSETS, dtype=float) * h
    if np.any(offs <= 0) or np.any(np.diff(offs) >= 0):
        raise ValueError("offsets must be positive and strictly decreasing")
    gamma = 1.0 - 2.0 * p

    def seq(eta_of, sign):
        vals = []
        for d in offs:
            eta = eta_of(d)
            step = fd_fraction * d
            _, u_xi, u_eta, _ = operator_terms(U, xi, eta, step)
            vals.append(d ** (-2 * p) * (u_xi + sign * u_eta))
        return np.array(vals)

    specs = [
        (lambda d: xi + d, -1.0),
        (lambda d: xi - d, -1.0),
        (lambda d: -xi + d, 1.0),
        (lambda d: -xi - d, 1.0),
    ]
    limits, misfits, scales = [], [], []
    for eta_of, sign in specs:
        vals = seq(eta_of, sign)
        a, mis = _extrapolate(offs, vals, gamma)
        limits.append(a)
        misfits.append(mis)
        scales.append(np.max(np.abs(vals)))
    scale = max(max(scales), 1e-300)
    spread = max(misfits) / scale
    return NuLimits(*limits, spread=spread, converged=bool(spread < 1e-2 or scale < 1e-12))


@dataclass
class MatchingReport:
    xi: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    max_gap: float


def check_characteristic_matching(U, xi_samples, step, h=1.0):
    """Compare lim_{eta->0+} (U_eta - U_xi) with lim_{eta->0-} (U_eta + U_xi).

    Both one-sided limits are approximated by central differences at
    eta = +-2 step and +-4 step and linearly extrapolated to eta = 0.
    """
    xi_samples = np.asarray(xi_samples, dtype=float)
    if np.any(xi_samples <= 4 * step) or np.any(xi_samples >= h - 4 * step):
        raise ValueError("samples must lie in (4 step, h - 4 step)")
    up, lo = [], []
    for x in xi_samples:
        vals = {}
        for e in (2 * step, 4 * step, -2 * step, -4 * step):
            _, u_xi, u_eta, _ = operator_terms(U, x, e, step)
            vals[e] = (u_xi, u_eta)
        a1 = vals[2 * step][1] - vals[2 * step][0]
        a2 = vals[4 * step][1] - vals[4 * step][0]
        b1 = vals[-2 * step][1] + vals[-2 * step][0]
        b2 = vals[-4 * step][1] + vals[-4 * step][0]
        up.append(2 * a1 - a2)
        lo.append(2 * b1 - b2)
    up, lo = np.array(up), np.array(lo)
    return MatchingReport(xi_samples, up, lo, float(np.max(np.abs(up - lo))) if up.size else 0.0)


@dataclass
class ReportConfig:
    """What :func:`full_report` needs besides the field."""

    p: float
    lam: float
    h: float = 1.0
    phi1: Optional[Callable] = None
    phi2: Optional[Callable] = None
    variant: str = "delta2star"   # "delta2star" (Frankl) or "delta2" (continuity)
    grid: int = 16
    fd_step: Optional[float] = None
    thresholds: Thresholds = field(default_factory=Thresholds)
    nu_samples: int = 8
    gap_delta: float = 1e-7
    check_order: bool = False     # smooth manufactured fields only
    checks: tuple = CHECK_GROUPS  # subset of CHECK_GROUPS to run


def triangle_samples(grid, h, margin):
    """Interior sample points of the four triangles, at least ``margin`` off every line."""
    t = (np.arange(grid) + 0.5) / grid
    a = margin + (h - 2 * margin) * t
    pts = {"up_left": [], "up_right": [], "down_left": [], "down_right": []}
    for x in a:
        for y in a:
            if y - x > margin:
                pts["up_left"].append((x, y))
                pts["up_right"].append((y, x))
                pts["down_left"].append((x, -y))
                pts["down_right"].append((y, -x))
    return {k: np.array(v) for k, v in pts.items()}


def full_report(U, cfg):
    """Run every check on a configurable grid and assemble the report."""
    h = cfg.h
    step = cfg.fd_step if cfg.fd_step is not None else h / 512
    thr = cfg.thresholds
    rep = VerificationReport()
    par = _OpParams(cfg.p, cfg.lam, h)

    unknown = set(cfg.checks) - set(CHECK_GROUPS)
    if unknown:
        raise ValueError("unknown check groups: %s" % ", ".join(sorted(unknown)))
    if "pde" in cfg.checks:
        # PDE residual
        margin = max(0.05 * h, 8 * step)
        worst = 0.0
        orders = []
        for name, pts in triangle_samples(cfg.grid, h, margin).items():
            res = np.array([fd_residual(U, x, e, par, step) for x, e in pts])
            rep.pde_residual[name + ".max"] = float(res.max()) if res.size else 0.0
            rep.pde_residual[name + ".l2"] = float(np.sqrt(np.mean(res ** 2))) if res.size else 0.0
            worst = max(worst, rep.pde_residual[name + ".max"])
            if res.size:
                x, e = pts[len(pts) // 2]
                r = [residual_signed(U, x, e, par.p, par.lam, s) for s in (8 * step, 4 * step, 2 * step)]
                if min(abs(v) for v in r) > 1e-11:
                    o = richardson_order(r)
                    rep.orders[name] = float(o[-1])
                    orders.append(float(o[-1]))
        rep.add("pde_residual", worst, thr.pde_residual)
        if orders and cfg.check_order:
            lo, hi = thr.order_range
            dev = max(max(lo - o, o - hi, 0.0) for o in orders)
            rep.add("pde_order", dev, 0.0)
        elif not orders:
            rep.notes.append("pde residual below rounding floor; order not estimated")

    if "boundary" in cfg.checks:
        # boundary data
        xs = np.linspace(0.0, h, 33)[:-2]
        for key, eta, phi in (("eta_plus_h", h, cfg.phi1), ("eta_minus_h", -h, cfg.phi2)):
            if phi is None:
                continue
            got = np.asarray(U(xs, np.full_like(xs, eta)), dtype=float)
            err = float(np.max(np.abs(got - np.asarray(phi(xs), dtype=float))))
            rep.boundary_error[key] = err
        if rep.boundary_error:
            rep.add("boundary", max(rep.boundary_error.values()), thr.boundary)

    if "gluing" in cfg.checks:
        # continuity across eta = xi, eta = -xi, eta = 0
        d = cfg.gap_delta * h
        xg = np.linspace(0.1 * h, 0.9 * h, 9)
        gaps = {
            "eta_eq_xi": np.abs(U(xg, xg + d) - U(xg, xg - d)),
            "eta_eq_minus_xi": np.abs(U(xg, -xg + d) - U(xg, -xg - d)),
            "eta_eq_0": np.abs(U(xg, np.full_like(xg, d)) - U(xg, np.full_like(xg, -d))),
        }
        for k, v in gaps.items():
            rep.gluing["continuity." + k] = float(np.max(v))
            rep.add("continuity_" + k, float(np.max(v)), thr.continuity)

        # normal-derivative conditions on eta = +-xi
        sign = -1.0 if cfg.variant == "delta2star" else 1.0
        xs_nu = np.linspace(0.2 * h, 0.8 * h, cfg.nu_samples)
        lims = [extract_nu_limits(U, x, par) for x in xs_nu]
        nu = np.array([[l.nu1, l.nu2, l.nu3, l.nu4] for l in lims])
        scale12 = max(np.max(np.abs(nu[:, :2])), 1e-12)
        scale34 = max(np.max(np.abs(nu[:, 2:])), 1e-12)
        g12 = float(np.max(np.abs(nu[:, 1] - sign * nu[:, 0])) / scale12)
        g34 = float(np.max(np.abs(nu[:, 3] - sign * nu[:, 2])) / scale34)
        rep.gluing["nu.scale_12"] = float(scale12)
        rep.gluing["nu.scale_34"] = float(scale34)
        rep.gluing["nu.relative_gap_12"] = g12
        rep.gluing["nu.relative_gap_34"] = g34
        rep.add("nu_12", g12, thr.nu_relative)
        rep.add("nu_34", g34, thr.nu_relative)

        # derivative matching on eta = 0
        mstep = 1e-3 * h
        m = check_characteristic_matching(U, np.linspace(0.1 * h, 0.9 * h, 9), mstep, h)
        rep.gluing["characteristic.max_gap"] = m.max_gap
        rep.add("characteristic", m.max_gap, thr.characteristic)
    return rep


@dataclass(frozen=True)
class _OpParams:
    p: float
    lam: float
    h: float = 1.0

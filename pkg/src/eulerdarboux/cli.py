"""Command-line front end.

    eulerdarboux solve <config>      run the configured pipeline (checks as configured)
    eulerdarboux verify <config>     same, with verification forced on
    eulerdarboux selftest            oracle criteria 1-5

Options (before or after the subcommand): --grid N, --fd-step X, --out DIR.

Exit status: 0 success, 1 verification failure (outputs still written),
2 configuration error, 3 solver failure.
"""
import argparse
import hashlib
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__, acceptance, manufactured, verify
from ._kernels import BACKEND
from .cauchy_rep import CauchyDensities, Parameters, SolutionField, Triangle, frankl_constants
from .config import ConfigError, load
from .delta_solvers import (BoundaryData, solve_delta2, solve_delta2_star,
                            solve_volterra_first_kind, volterra_residual)
from .hilbert import check_index_consistency, invert_bounded_at_h, invert_bounded_at_zero, invert_unbounded

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3
FLOAT_FMT = "%.17g"


@dataclass
class Outcome:
    """What a pipeline produced, before writing."""

    solution: object = None                           # U(xi, eta) or None
    densities: dict = field(default_factory=dict)     # name -> WeightedDensity
    report: dict = field(default_factory=dict)        # flat key -> value
    checks: list = field(default_factory=list)        # (name, value, threshold)
    phi: tuple = (None, None)                         # boundary data for verification
    checks_groups: tuple = verify.CHECK_GROUPS


# --- pipelines -------------------------------------------------------------------

def _par(cfg):
    return Parameters(cfg.p, cfg.lam, cfg.h)


def _fn(cfg, name):
    return cfg.data[name].build(cfg.p, cfg.h)


def _run_delta2star(cfg):
    par = _par(cfg)
    eps = cfg.solver["eps"]
    if cfg.family == "manufactured":
        data = manufactured.delta2star_data(cfg.p, eps, cfg.h)
    else:
        data = BoundaryData(_fn(cfg, "phi1"), _fn(cfg, "phi2"))
    res = solve_delta2_star(data, par, eps=eps, n=cfg.solver["n"], quad_n=cfg.solver["quad_n"])
    out = Outcome(res.field, phi=(data.phi1, data.phi2))
    up = res.field.densities[Triangle.UP_LEFT]
    down = res.field.densities[Triangle.DOWN_LEFT]
    out.densities = {"T1": res.T1, "T3": res.T3, "N1": res.N1, "N3": res.N3,
                     "nu1": up.nu, "nu3": down.nu}
    out.report.update({"solver." + k: v for k, v in res.report.items()})
    for k, v in res.conditions.values.items():
        out.report["conditions." + k] = v
    return out


def _run_delta2(cfg):
    par = _par(cfg)
    hn = cfg.solver["hilbert_n"]
    a0 = cfg.a0
    if cfg.family == "manufactured":
        truth = manufactured.delta2_truth(cfg.p, cfg.h)
        data = truth.data
        builder = truth.phi_star_builder()
        if a0 == "match":
            a0 = truth.matched_a0(hn)
    else:
        data = BoundaryData(_fn(cfg, "phi1"), _fn(cfg, "phi2"))
        ps = (_fn(cfg, "phi_star1"), _fn(cfg, "phi_star2"))
        builder = lambda d, p: ps
    if cfg.endpoint_slopes is not None:
        data = manufactured.with_endpoint_slopes(data, *cfg.endpoint_slopes)
    res = solve_delta2(data, par, builder, a0=0.0 if a0 is None else float(a0),
                       n=cfg.solver["n"], quad_n=cfg.solver["quad_n"], hilbert_n=hn)
    out = Outcome(res.field, phi=(data.phi1, data.phi2))
    out.densities = {"mu1": res.mu1, "mu2": res.mu2, "nu1": res.nu.nu1, "nu3": res.nu.nu3,
                     "N1": res.N1, "N3": res.N3, "T1": res.T(1), "T3": res.T(3)}
    out.report.update({"solver." + k: v for k, v in res.report.items()})
    return out


def _run_cauchy(cfg):
    par = _par(cfg)
    k1, k2 = frankl_constants(cfg.p)
    dens = CauchyDensities(_fn(cfg, "T"), _fn(cfg, "nu"), k1, k2)
    fld = SolutionField(par, {t: dens for t in Triangle}, cfg.solver["quad_n"])
    out = Outcome(fld, checks_groups=("pde",))
    out.densities = {"T": dens.T, "nu": dens.nu, "N": dens.N}
    out.report.update({"solver.k1": k1, "solver.k2": k2})
    return out


def _run_invert(cfg):
    phi = _fn(cfg, "phi_star")
    n, h = cfg.solver["n"], cfg.h
    if cfg.case == "bounded_at_zero":
        mu = invert_bounded_at_zero(phi, h, n)
    elif cfg.case == "bounded_at_h":
        mu = invert_bounded_at_h(phi, h, n)
    else:
        mu = invert_unbounded(phi, h, float(cfg.a0), n)
    out = Outcome(densities={"mu": mu})
    cons = check_index_consistency(mu, phi, n=n, tol=cfg.solver["index_tol"])
    out.report["solver.case"] = cfg.case
    out.checks.append(("index_consistency", cons.max_deviation, cons.tol))
    return out


def _run_volterra(cfg):
    Phi = _fn(cfg, "Phi")
    par = _par(cfg)
    sol = solve_volterra_first_kind(Phi, par, cfg.solver["n"], condition=True)
    out = Outcome(densities={"T": sol.density})
    out.report.update({"solver." + k: v for k, v in sol.report.items()})
    _, rel = volterra_residual(sol, Phi, par)
    out.checks.append(("volterra_residual", rel, cfg.solver["volterra_tol"]))
    return out


def _zero_field(xi, eta):
    return np.zeros(np.broadcast(np.asarray(xi), np.asarray(eta)).shape)


def _run_verify_only(cfg):
    par = _par(cfg)
    phi1 = _fn(cfg, "phi1") if "phi1" in cfg.data else None
    phi2 = _fn(cfg, "phi2") if "phi2" in cfg.data else None
    if cfg.family == "manufactured_delta2":
        truth = manufactured.delta2_truth(cfg.p, cfg.h)
        return Outcome(truth.field, phi=(phi1 or truth.data.phi1, phi2 or truth.data.phi2))
    if cfg.data["field"].kind == "zero":
        return Outcome(_zero_field, phi=(phi1, phi2))
    k1, k2 = frankl_constants(cfg.p)
    dens = CauchyDensities(_fn(cfg, "field_T"), _fn(cfg, "field_nu"), k1, k2)
    return Outcome(SolutionField(par, {t: dens for t in Triangle}, cfg.solver["quad_n"]),
                   phi=(phi1, phi2))


PIPELINES = {"delta2star": _run_delta2star, "delta2": _run_delta2, "cauchy_eval": _run_cauchy,
             "invert_hilbert": _run_invert, "volterra": _run_volterra,
             "verify_only": _run_verify_only}


# --- verification ------------------------------------------------------------------

def _verify(cfg, out):
    """Run the enabled checks; returns the overall pass flag."""
    ok = True
    for name, value, thr in out.checks:
        passed = bool(value <= thr)
        out.report["check.%s.value" % name] = value
        out.report["check.%s.threshold" % name] = thr
        out.report["check.%s.passed" % name] = passed
        ok = ok and passed
    if out.solution is not None:
        thr = verify.Thresholds(**cfg.verify["thresholds"])
        rc = verify.ReportConfig(p=cfg.p, lam=cfg.lam, h=cfg.h, phi1=out.phi[0], phi2=out.phi[1],
                                 variant=cfg.variant, grid=cfg.verify["grid"],
                                 fd_step=cfg.verify["fd_step"], thresholds=thr,
                                 checks=out.checks_groups)
        rep = verify.full_report(out.solution, rc)
        for k, v in rep.as_flat().items():
            if k != "passed":
                out.report[k] = v
        ok = ok and rep.passed
    return ok


# --- output --------------------------------------------------------------------------

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % float(v)
    if v is None:
        return "null"
    return str(v).replace("\n", " ")


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = "%s.%s" % (prefix, k) if prefix else str(k)
        if isinstance(v, dict):
            out.update(_flatten(v, key))
        elif isinstance(v, (list, tuple)):
            out[key] = "[" + ", ".join(_fmt(x) for x in v) + "]"
        else:
            out[key] = v
    return out


def output_grid(n, h):
    """n x 2n points, offset so none lies on xi = 0, eta = 0 or eta = +-xi."""
    xi = (np.arange(n) + 0.25) * h / n
    eta = (np.arange(2 * n) + 0.5) * h / n - h
    X, E = np.meshgrid(xi, eta, indexing="ij")
    return X.ravel(), E.ravel()


def density_points(m, h):
    return (np.arange(m) + 0.5) * h / m


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_outputs(cfg, out, status, exit_code, error=None):
    d = cfg.output["dir"]
    os.makedirs(d, exist_ok=True)
    files = []
    if out is not None and out.solution is not None:
        X, E = output_grid(cfg.verify["grid"], cfg.h)
        U = np.asarray(out.solution(X, E), dtype=float)
        rows = ["xi\teta\tU"] + ["\t".join(FLOAT_FMT % v for v in r) for r in zip(X, E, U)]
        _write(os.path.join(d, "solution.tsv"), "\n".join(rows) + "\n")
        files.append("solution.tsv")
    if out is not None and out.densities:
        s = density_points(cfg.output["density_points"], cfg.h)
        names = sorted(out.densities)
        lines = ["# %s alpha0=%s alphaH=%s" % (n, FLOAT_FMT % out.densities[n].alpha0,
                                               FLOAT_FMT % out.densities[n].alphaH) for n in names]
        cols = [np.asarray(out.densities[n](s), dtype=float) for n in names]
        lines.append("\t".join(["s"] + names))
        for i, si in enumerate(s):
            lines.append("\t".join([FLOAT_FMT % si] + [FLOAT_FMT % c[i] for c in cols]))
        _write(os.path.join(d, "densities.tsv"), "\n".join(lines) + "\n")
        files.append("densities.tsv")
    rep = {"status": status, "exit_code": exit_code, "problem": cfg.problem}
    if error is not None:
        rep["error"] = error
    if out is not None:
        rep.update(out.report)
    _write(os.path.join(d, "report.txt"),
           "".join("%s = %s\n" % (k, _fmt(rep[k])) for k in sorted(rep)))
    files.append("report.txt")
    man = {"package.version": __version__, "package.backend": BACKEND}
    man.update({"config." + k: v for k, v in _flatten(cfg.to_dict()).items()})
    for f in files:
        with open(os.path.join(d, f), "rb") as fh:
            man["output.%s.sha256" % f] = hashlib.sha256(fh.read()).hexdigest()
    _write(os.path.join(d, "manifest.txt"),
           "".join("%s = %s\n" % (k, _fmt(man[k])) for k in sorted(man)))


# --- entry points ------------------------------------------------------------------------

def run(config_path, force_verify=False, grid=None, fd_step=None, out_dir=None, stream=sys.stdout,
        err=sys.stderr):
    """Execute one configuration; returns the exit status."""
    try:
        cfg = load(config_path).with_overrides(grid, fd_step, out_dir)
    except ConfigError as exc:
        print("config error: %s" % exc, file=err)
        return EXIT_CONFIG
    if force_verify:
        cfg.verify["enabled"] = True
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out = PIPELINES[cfg.problem](cfg)
    except Exception as exc:   # any failure inside a solver is reported, not raised
        msg = "%s: %s" % (type(exc).__name__, exc)
        print("solver failure: %s" % msg, file=err)
        write_outputs(cfg, None, "solver_failure", EXIT_SOLVER, msg)
        return EXIT_SOLVER
    ok = True
    if cfg.verify["enabled"]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            ok = _verify(cfg, out)
    code = EXIT_OK if ok else EXIT_VERIFY
    write_outputs(cfg, out, "ok" if ok else "verification_failed", code)
    print("%s: %s (outputs in %s)" % (cfg.problem, "ok" if ok else "verification failed",
                                      cfg.output["dir"]), file=stream)
    return code


def selftest(stream=sys.stdout):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        results = acceptance.run(acceptance.SELFTEST, stream)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=argparse.SUPPRESS,
                        help="grid size N for output tables and verification")
    common.add_argument("--fd-step", type=float, default=argparse.SUPPRESS,
                        help="finite-difference step for the PDE residual")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    ap = argparse.ArgumentParser(prog="eulerdarboux", parents=[common],
                                 description="Delta_2 / Delta_2* solvers for the generalized "
                                             "Euler-Darboux equation")
    ap.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("solve", "run the configured pipeline"),
                       ("verify", "run the pipeline with verification forced on")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("config", help="YAML problem configuration")
    sub.add_parser("selftest", parents=[common], help="run the built-in oracle criteria 1-5")
    return ap


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:   # argparse reports usage errors with status 2
        return int(exc.code or 0)
    if args.command == "selftest":
        return selftest()
    return run(args.config, force_verify=args.command == "verify",
               grid=getattr(args, "grid", None), fd_step=getattr(args, "fd_step", None),
               out_dir=getattr(args, "out", None))


if __name__ == "__main__":
    sys.exit(main())

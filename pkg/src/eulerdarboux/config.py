"""Problem configuration: YAML schema, validation and function specs.

A configuration is a mapping::

    problem: delta2star          # delta2 | delta2star | cauchy_eval | invert_hilbert
                                 # | volterra | verify_only
    parameters: {p: 0.25, lambda: 0.0, h: 1.0}
    data:                        # problem-specific named functions (see FUNCTION_KINDS)
      phi1: {kind: admissible, k: 2}
      phi2: {kind: admissible, k: 3}
    solver: {n: 256, eps: 0.5}
    verify: {enabled: true, grid: 16}
    output: {dir: out}

Validation errors are raised as :class:`ConfigError` naming the field and,
when the document came from a file, its line.
"""
import copy
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import yaml
from scipy.interpolate import CubicSpline

from . import manufactured
from .quad import WeightedDensity

PROBLEMS = ("delta2", "delta2star", "cauchy_eval", "invert_hilbert", "volterra", "verify_only")
FAMILIES = {"delta2": ("manufactured",), "delta2star": ("manufactured",),
            "verify_only": ("manufactured_delta2",)}
CASES = ("bounded_at_zero", "unbounded_both", "bounded_at_h")
VARIANTS = ("delta2", "delta2star")

# data keys each problem reads (required ones first)
DATA_KEYS = {
    "delta2star": (("phi1", "phi2"), ()),
    "delta2": (("phi1", "phi2", "phi_star1", "phi_star2"), ()),
    "cauchy_eval": (("T", "nu"), ()),
    "invert_hilbert": (("phi_star",), ()),
    "volterra": (("Phi",), ()),
    "verify_only": ((), ("field", "phi1", "phi2")),
}

SOLVER_DEFAULTS = {"n": 256, "quad_n": 64, "hilbert_n": 1024, "eps": 0.5,
                   "volterra_tol": 5e-3, "index_tol": 1e-8}
VERIFY_DEFAULTS = {"enabled": True, "grid": 16, "fd_step": None, "variant": None,
                   "thresholds": {}}
THRESHOLD_KEYS = ("pde_residual", "boundary", "continuity", "nu_relative", "characteristic")
OUTPUT_DEFAULTS = {"dir": "out", "density_points": 128}


class ConfigError(ValueError):
    """Invalid configuration; ``where`` names the field (and line when known)."""

    def __init__(self, message, where=""):
        self.where = where
        super().__init__("%s: %s" % (where, message) if where else message)


# --- function specs -----------------------------------------------------------

FUNCTION_KINDS = ("zero", "polynomial", "admissible", "moment_failing", "table")


@dataclass(frozen=True)
class FunctionSpec:
    """A named built-in with coefficients, or a sampled table.

    zero                          0
    polynomial  coeffs, alpha0, alphaH
                                  s^alpha0 (h-s)^alphaH sum_k coeffs[k] s^k
    admissible  k, eps            (h-s)^(1+p+eps) s^k (1 - c s), c fixed by the moment condition
    moment_failing  eps           s^2 (h-s)^(1+p+eps)
    table       nodes, values, alpha0, alphaH
                                  weight times a natural cubic spline through (nodes, values)
    """

    kind: str
    params: tuple = ()

    def get(self, key, default=None):
        return dict(self.params).get(key, default)

    def to_dict(self):
        out = {"kind": self.kind}
        for k, v in self.params:
            out[k] = list(v) if isinstance(v, tuple) else v
        return out

    def build(self, p, h):
        """The function as a WeightedDensity (callable on arrays)."""
        k = self.kind
        if k == "zero":
            return WeightedDensity(0.0, 0.0, lambda s: np.zeros_like(np.asarray(s, dtype=float)), h)
        if k == "polynomial":
            c = np.array(self.get("coeffs"), dtype=float)[::-1]
            return WeightedDensity(self.get("alpha0", 0.0), self.get("alphaH", 0.0),
                                   lambda s: np.polyval(c, np.asarray(s, dtype=float)), h)
        if k == "admissible":
            eps = self.get("eps", 0.5)
            e = 1.0 + p + eps
            star = manufactured.admissible(int(self.get("k")), p, eps, h)[3]
            return WeightedDensity(0.0, e, star, h)
        if k == "moment_failing":
            eps = self.get("eps", 0.5)
            return WeightedDensity(2.0, 1.0 + p + eps, lambda s: np.ones_like(np.asarray(s, dtype=float)), h)
        if k == "table":
            cs = CubicSpline(np.array(self.get("nodes")), np.array(self.get("values")),
                             bc_type="natural", extrapolate=True)
            return WeightedDensity(self.get("alpha0", 0.0), self.get("alphaH", 0.0),
                                   lambda s: cs(np.asarray(s, dtype=float)), h)
        raise ConfigError("unknown function kind %r" % k)


def _parse_function(raw, where):
    if not isinstance(raw, dict) or "kind" not in raw:
        raise ConfigError("expected a mapping with a 'kind' key", where)
    kind = raw["kind"]
    if kind not in FUNCTION_KINDS:
        raise ConfigError("unknown kind %r (one of %s)" % (kind, ", ".join(FUNCTION_KINDS)), where)
    allowed = {"zero": (), "polynomial": ("coeffs", "alpha0", "alphaH"),
               "admissible": ("k", "eps"), "moment_failing": ("eps",),
               "table": ("nodes", "values", "alpha0", "alphaH")}[kind]
    extra = sorted(set(raw) - set(allowed) - {"kind"})
    if extra:
        raise ConfigError("unexpected keys %s for kind %r" % (extra, kind), where)
    params = {}
    for key in ("alpha0", "alphaH", "eps"):
        if key in raw:
            params[key] = _real(raw[key], "%s.%s" % (where, key))
    for key in ("alpha0", "alphaH"):
        if key in params and params[key] <= -1:
            raise ConfigError("endpoint exponent must exceed -1", "%s.%s" % (where, key))
    if "eps" in params and not params["eps"] > 0:
        raise ConfigError("eps must be positive", where + ".eps")
    if kind == "polynomial":
        params["coeffs"] = _real_list(raw.get("coeffs"), where + ".coeffs", min_len=1)
    if kind == "admissible":
        kk = raw.get("k")
        if not isinstance(kk, int) or isinstance(kk, bool) or kk < 2:
            raise ConfigError("k must be an integer >= 2 (phi(0) = phi'(0) = 0)", where + ".k")
        params["k"] = kk
    if kind == "table":
        nodes = _real_list(raw.get("nodes"), where + ".nodes", min_len=4)
        values = _real_list(raw.get("values"), where + ".values", min_len=4)
        if len(nodes) != len(values):
            raise ConfigError("nodes and values differ in length", where)
        if np.any(np.diff(nodes) <= 0):
            raise ConfigError("table nodes must be strictly increasing", where + ".nodes")
        params["nodes"], params["values"] = nodes, values
    return FunctionSpec(kind, tuple(sorted(params.items())))


# --- scalar helpers -------------------------------------------------------------

def _real(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError("expected a finite number, got %r" % (v,), where)
    return float(v)


def _int(v, where, lo=1):
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigError("expected an integer >= %d, got %r" % (lo, v), where)
    return v


def _real_list(v, where, min_len=0):
    if not isinstance(v, list) or len(v) < min_len:
        raise ConfigError("expected a list of at least %d numbers" % min_len, where)
    return tuple(_real(x, "%s[%d]" % (where, i)) for i, x in enumerate(v))


def _mapping(v, where):
    if v is None:
        return {}
    if not isinstance(v, dict):
        raise ConfigError("expected a mapping", where)
    return v


def _no_extra(d, allowed, where):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError("unknown keys %s" % extra, where)


# --- the configuration ------------------------------------------------------------

@dataclass
class ProblemConfig:
    problem: str
    p: float
    lam: float = 0.0
    h: float = 1.0
    data: dict = field(default_factory=dict)           # name -> FunctionSpec
    family: Optional[str] = None
    a0: object = None                                  # None, a number, or "match"
    endpoint_slopes: Optional[tuple] = None
    case: Optional[str] = None
    solver: dict = field(default_factory=lambda: dict(SOLVER_DEFAULTS))
    verify: dict = field(default_factory=lambda: copy.deepcopy(VERIFY_DEFAULTS))
    output: dict = field(default_factory=lambda: dict(OUTPUT_DEFAULTS))

    def to_dict(self):
        out = {"problem": self.problem,
               "parameters": {"p": self.p, "lambda": self.lam, "h": self.h}}
        if self.family is not None:
            out["family"] = self.family
        if self.data:
            data = {k: v.to_dict() for k, v in sorted(self.data.items())
                    if not k.startswith("field")}
            if "field" in self.data:
                fd = {"kind": self.data["field"].kind}
                if fd["kind"] == "cauchy":
                    fd["T"] = self.data["field_T"].to_dict()
                    fd["nu"] = self.data["field_nu"].to_dict()
                data["field"] = fd
            out["data"] = data
        if self.a0 is not None:
            out["a0"] = self.a0
        if self.endpoint_slopes is not None:
            out["endpoint_slopes"] = list(self.endpoint_slopes)
        if self.case is not None:
            out["case"] = self.case
        out["solver"] = dict(self.solver)
        v = dict(self.verify)
        v["thresholds"] = dict(v["thresholds"])
        out["verify"] = v
        out["output"] = dict(self.output)
        return out

    def dump(self):
        return yaml.safe_dump(self.to_dict(), sort_keys=True, default_flow_style=False)

    def with_overrides(self, grid=None, fd_step=None, out=None):
        cfg = copy.deepcopy(self)
        if grid is not None:
            cfg.verify["grid"] = _int(grid, "--grid", lo=2)
        if fd_step is not None:
            step = _real(fd_step, "--fd-step")
            if not 0 < step < 0.05 * cfg.h:
                raise ConfigError("fd step must lie in (0, 0.05 h)", "--fd-step")
            cfg.verify["fd_step"] = step
        if out is not None:
            cfg.output["dir"] = str(out)
        return cfg

    @property
    def variant(self):
        v = self.verify.get("variant")
        if v:
            return v
        return "delta2" if self.problem == "delta2" else "delta2star"


def from_dict(raw, lines=None):
    """Validate a parsed document; ``lines`` maps dotted field paths to source lines."""
    try:
        return _from_dict(raw)
    except ConfigError as exc:
        if lines:
            key = exc.where
            while key and key not in lines:
                key = key.rpartition(".")[0]
            if key in lines:
                raise ConfigError(str(exc).partition(": ")[2] or str(exc),
                                  "line %d, %s" % (lines[key], exc.where)) from None
        raise


def _from_dict(raw):
    raw = _mapping(raw, "<document>")
    _no_extra(raw, ("problem", "parameters", "data", "family", "a0", "endpoint_slopes", "case",
                    "solver", "verify", "output"), "<document>")
    prob = raw.get("problem")
    if prob not in PROBLEMS:
        raise ConfigError("expected one of %s, got %r" % (", ".join(PROBLEMS), prob), "problem")
    par = _mapping(raw.get("parameters"), "parameters")
    _no_extra(par, ("p", "lambda", "h"), "parameters")
    if "p" not in par:
        raise ConfigError("missing", "parameters.p")
    p = _real(par["p"], "parameters.p")
    if not 0 < p < 0.5:
        raise ConfigError("p must lie in (0, 0.5), got %g" % p, "parameters.p")
    lam = _real(par.get("lambda", 0.0), "parameters.lambda")
    h = _real(par.get("h", 1.0), "parameters.h")
    if not h > 0:
        raise ConfigError("h must be positive", "parameters.h")
    if prob == "delta2" and lam != 0.0:
        raise ConfigError("the Delta_2 problem is solvable only for lambda = 0 (got %g)" % lam,
                          "parameters.lambda")
    cfg = ProblemConfig(prob, p, lam, h)

    fam = raw.get("family")
    if fam is not None and fam not in FAMILIES.get(prob, ()):
        raise ConfigError("family %r not available for problem %s" % (fam, prob), "family")
    cfg.family = fam

    data = _mapping(raw.get("data"), "data")
    required, optional = DATA_KEYS[prob]
    _no_extra(data, required + optional, "data")
    if fam is None:
        for key in required:
            if key not in data:
                raise ConfigError("missing (or set 'family')", "data." + key)
    elif data:
        raise ConfigError("data cannot be combined with family %r" % fam, "data")
    cfg.data = {k: _parse_function(v, "data." + k) for k, v in data.items() if k != "field"}
    if "field" in data:
        fd = _mapping(data["field"], "data.field")
        _no_extra(fd, ("kind", "T", "nu"), "data.field")
        kind = fd.get("kind")
        if kind == "zero":
            cfg.data["field"] = FunctionSpec("zero")
        elif kind == "cauchy":
            for key in ("T", "nu"):
                if key not in fd:
                    raise ConfigError("missing", "data.field." + key)
                cfg.data["field_" + key] = _parse_function(fd[key], "data.field." + key)
            cfg.data["field"] = FunctionSpec("cauchy")
        else:
            raise ConfigError("field kind must be 'zero' or 'cauchy'", "data.field.kind")
    if prob == "verify_only" and fam is None and "field" not in cfg.data:
        raise ConfigError("missing (or set 'family')", "data.field")

    if "a0" in raw and raw["a0"] is not None:
        a0 = raw["a0"]
        if a0 == "match":
            if fam is None:
                raise ConfigError("'match' needs a manufactured family", "a0")
        else:
            a0 = _real(a0, "a0")
        cfg.a0 = a0
    if "endpoint_slopes" in raw and raw["endpoint_slopes"] is not None:
        sl = _real_list(raw["endpoint_slopes"], "endpoint_slopes", 2)
        if len(sl) != 2:
            raise ConfigError("expected two numbers [phi1'(h), phi2'(h)]", "endpoint_slopes")
        cfg.endpoint_slopes = sl
    if prob == "invert_hilbert":
        case = raw.get("case")
        if case not in CASES:
            raise ConfigError("expected one of %s" % ", ".join(CASES), "case")
        cfg.case = case
        if case == "unbounded_both" and cfg.a0 is None:
            cfg.a0 = 0.0
    elif raw.get("case") is not None:
        raise ConfigError("only used by invert_hilbert", "case")

    solver = _mapping(raw.get("solver"), "solver")
    _no_extra(solver, SOLVER_DEFAULTS, "solver")
    for key, default in SOLVER_DEFAULTS.items():
        v = solver.get(key, default)
        if isinstance(default, int):
            cfg.solver[key] = _int(v, "solver." + key, lo=8)
        else:
            cfg.solver[key] = _real(v, "solver." + key)
            if not cfg.solver[key] > 0:
                raise ConfigError("must be positive", "solver." + key)

    ver = _mapping(raw.get("verify"), "verify")
    _no_extra(ver, VERIFY_DEFAULTS, "verify")
    enabled = ver.get("enabled", True)
    if not isinstance(enabled, bool):
        raise ConfigError("expected true or false", "verify.enabled")
    cfg.verify["enabled"] = enabled
    cfg.verify["grid"] = _int(ver.get("grid", 16), "verify.grid", lo=2)
    if ver.get("fd_step") is not None:
        cfg.verify["fd_step"] = _real(ver["fd_step"], "verify.fd_step")
        if not 0 < cfg.verify["fd_step"] < 0.05 * h:
            raise ConfigError("fd step must lie in (0, 0.05 h)", "verify.fd_step")
    var = ver.get("variant")
    if var is not None and var not in VARIANTS:
        raise ConfigError("expected one of %s" % ", ".join(VARIANTS), "verify.variant")
    cfg.verify["variant"] = var
    thr = _mapping(ver.get("thresholds"), "verify.thresholds")
    _no_extra(thr, THRESHOLD_KEYS, "verify.thresholds")
    cfg.verify["thresholds"] = {k: _real(v, "verify.thresholds." + k) for k, v in thr.items()}
    for k, v in cfg.verify["thresholds"].items():
        if v < 0:
            raise ConfigError("thresholds must be nonnegative", "verify.thresholds." + k)

    out = _mapping(raw.get("output"), "output")
    _no_extra(out, OUTPUT_DEFAULTS, "output")
    d = out.get("dir", OUTPUT_DEFAULTS["dir"])
    if not isinstance(d, str) or not d:
        raise ConfigError("expected a directory name", "output.dir")
    cfg.output["dir"] = d
    cfg.output["density_points"] = _int(out.get("density_points", 128), "output.density_points", 4)
    return cfg


def _line_map(node, prefix="", out=None):
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = (prefix + "." if prefix else "") + str(k.value)
            out[path] = k.start_mark.line + 1
            _line_map(v, path, out)
    return out


def loads(text):
    """Parse and validate YAML text."""
    try:
        raw = yaml.safe_load(text)
        lines = _line_map(yaml.compose(text)) if raw is not None else {}
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = "line %d" % (mark.line + 1) if mark is not None else "<document>"
        raise ConfigError("YAML syntax error: %s" % getattr(exc, "problem", exc), where) from None
    return from_dict(raw, lines)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config: %s" % exc.strerror, str(path)) from None
    return loads(text)

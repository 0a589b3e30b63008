import glob
import os

import numpy as np
import pytest
import yaml
from hypothesis import given, strategies as st

from eulerdarboux import config
from eulerdarboux.config import ConfigError, FunctionSpec, load, loads

BASE = """
problem: volterra
parameters: {p: 0.25, lambda: 0.0, h: 1.0}
data:
  Phi: {kind: polynomial, coeffs: [0.8], alphaH: 1.25}
"""


def _configs():
    root = os.path.join(os.path.dirname(__file__), "..", "configs")
    return sorted(glob.glob(os.path.join(root, "*.yaml")))


@pytest.mark.parametrize("path", [p for p in _configs() if "lambda_nonzero" not in p],
                         ids=os.path.basename)
def test_shipped_configs_round_trip(path):
    cfg = load(path)
    again = loads(cfg.dump())
    assert again.to_dict() == cfg.to_dict()
    assert again.dump() == cfg.dump()


def test_lambda_nonzero_delta2_rejected(config_path):
    with pytest.raises(ConfigError) as exc:
        load(config_path("delta2_lambda_nonzero.yaml"))
    assert "lambda" in str(exc.value)


@given(st.floats(0.01, 0.49), st.floats(-3, 3), st.floats(0.1, 5),
       st.lists(st.floats(-10, 10), min_size=1, max_size=5))
def test_round_trip_property(p, lam, h, coeffs):
    raw = {"problem": "cauchy_eval", "parameters": {"p": p, "lambda": lam, "h": h},
           "data": {"T": {"kind": "polynomial", "coeffs": coeffs},
                    "nu": {"kind": "zero"}}}
    cfg = config.from_dict(raw)
    assert loads(cfg.dump()).to_dict() == cfg.to_dict()
    assert (cfg.p, cfg.lam, cfg.h) == (p, lam, h)


BAD = [
    ("problem: nope\nparameters: {p: 0.25}\n", "problem"),
    (BASE.replace("p: 0.25", "p: 0.5"), "parameters.p"),
    (BASE.replace("h: 1.0", "h: -1.0"), "parameters.h"),
    (BASE.replace("p: 0.25", "p: yes"), "parameters.p"),
    (BASE.replace("polynomial", "sinusoid"), "data.Phi"),
    (BASE.replace("alphaH: 1.25", "alphaH: -1.5"), "data.Phi.alphaH"),
    (BASE + "solver: {n: 0}\n", "solver.n"),
    (BASE + "colour: red\n", ""),
    (BASE + "verify: {thresholds: {pde_residual: -1}}\n", "verify.thresholds"),
    ("problem: [unclosed\n", "line"),
    ("""problem: invert_hilbert
parameters: {p: 0.25}
data:
  phi_star: {kind: table, nodes: [0, 0.5, 0.4, 1], values: [1, 2, 3, 4]}
case: bounded_at_zero
""", "data.phi_star.nodes"),
]


@pytest.mark.parametrize("text,where", BAD)
def test_invalid_configs_name_the_field(text, where):
    with pytest.raises(ConfigError) as exc:
        loads(text)
    assert where in str(exc.value)


def test_error_reports_line_number():
    with pytest.raises(ConfigError) as exc:
        loads(BASE.replace("p: 0.25", "p: 0.7"))
    assert "line 3" in str(exc.value)


def test_missing_file():
    with pytest.raises(ConfigError):
        load("/nonexistent/config.yaml")


def test_overrides():
    cfg = loads(BASE)
    o = cfg.with_overrides(grid=8, fd_step=1e-3, out="x")
    assert o.verify["grid"] == 8 and o.verify["fd_step"] == 1e-3 and o.output["dir"] == "x"
    assert cfg.verify["grid"] != 8 or cfg.output["dir"] != "x"
    for kw in ({"grid": 1}, {"fd_step": 0.5}, {"fd_step": 0.0}):
        with pytest.raises(ConfigError):
            cfg.with_overrides(**kw)


def test_defaults_and_variant():
    cfg = loads(BASE)
    assert cfg.solver["hilbert_n"] == 1024 and cfg.solver["n"] >= 1
    assert cfg.variant == "delta2star"


def test_function_spec_builds():
    s = np.linspace(0.1, 0.9, 5)
    poly = FunctionSpec("polynomial", (("alpha0", 0.5), ("coeffs", (1.0, 2.0)))).build(0.25, 1.0)
    np.testing.assert_allclose(poly(s), np.sqrt(s) * (1 + 2 * s))
    mf = FunctionSpec("moment_failing", (("eps", 0.5),)).build(0.25, 1.0)
    np.testing.assert_allclose(mf(s), s ** 2 * (1 - s) ** 1.75)
    nodes = np.linspace(0, 1, 6)
    tab = FunctionSpec("table", (("nodes", tuple(nodes)), ("values", tuple(3 * nodes)))).build(0.25, 1.0)
    np.testing.assert_allclose(tab(s), 3 * s, atol=1e-12)
    with pytest.raises(ConfigError):
        FunctionSpec("bogus").build(0.25, 1.0)


def test_yaml_dump_is_plain():
    doc = yaml.safe_load(loads(BASE).dump())
    assert doc["parameters"] == {"p": 0.25, "lambda": 0.0, "h": 1.0}

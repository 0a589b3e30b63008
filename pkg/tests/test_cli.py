import hashlib
import os
import subprocess
import sys

import pytest

from eulerdarboux import cli


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _kv(path):
    out = {}
    for line in _read(path).splitlines():
        k, _, v = line.partition(" = ")
        out[k] = v
    return out


@pytest.mark.parametrize("name,code", [
    ("verify_zero.yaml", 0),
    ("volterra_constant.yaml", 0),
    ("invert_hilbert_bounded_at_zero.yaml", 0),
    ("cauchy_eval.yaml", 0),
    ("delta2star_manufactured.yaml", 0),
    ("delta2_lambda_nonzero.yaml", 2),
    ("delta2star_moment_fail.yaml", 3),
])
def test_exit_codes(tmp_path, config_path, name, code):
    assert cli.main(["solve", config_path(name), "--out", str(tmp_path / "o")]) == code


def test_missing_config_and_bad_usage(tmp_path, capsys):
    assert cli.main(["solve", str(tmp_path / "none.yaml")]) == 2
    assert cli.main(["frobnicate"]) == 2
    assert cli.main(["solve", "x.yaml", "--grid", "many"]) == 2
    assert cli.main(["--grid", "1", "solve", str(tmp_path / "none.yaml")]) == 2


def test_verification_failure_exits_1(tmp_path):
    cfg = tmp_path / "strict.yaml"
    cfg.write_text("""problem: cauchy_eval
parameters: {p: 0.25, lambda: 1.0, h: 1.0}
data:
  T: {kind: polynomial, coeffs: [1.0, 1.0, -0.5]}
  nu: {kind: polynomial, coeffs: [0.3, 0.0, 1.0]}
verify: {grid: 4, thresholds: {pde_residual: 0.0}}
""")
    out = tmp_path / "o"
    assert cli.main(["solve", str(cfg), "--out", str(out)]) == 1
    rep = _kv(out / "report.txt")
    assert rep["status"] == "verification_failed" and rep["exit_code"] == "1"


def test_outputs_format_and_manifest(tmp_path, config_path):
    out = tmp_path / "o"
    assert cli.main(["verify", config_path("volterra_constant.yaml"), "--out", str(out)]) == 0
    names = sorted(os.listdir(out))
    assert names == ["densities.tsv", "manifest.txt", "report.txt"]
    lines = _read(out / "report.txt").splitlines()
    assert lines == sorted(lines)
    man = _kv(out / "manifest.txt")
    for f in ("densities.tsv", "report.txt"):
        assert man["output.%s.sha256" % f] == hashlib.sha256((out / f).read_bytes()).hexdigest()
    assert man["config.problem"] == "volterra" and "package.version" in man
    rows = [l.split("\t") for l in _read(out / "densities.tsv").splitlines() if not l.startswith(("#", "s"))]
    for s, v in rows:
        assert float(repr(float(v))) == float(v)
        assert float("%.17g" % float(v)) == float(v)


def test_solution_grid_and_overrides(tmp_path, config_path):
    out = tmp_path / "o"
    assert cli.main(["--grid", "3", "solve", config_path("verify_zero.yaml"), "--out", str(out)]) == 0
    rows = _read(out / "solution.tsv").splitlines()
    assert rows[0] == "xi\teta\tU" and len(rows) == 1 + 3 * 6
    assert _kv(out / "manifest.txt")["config.verify.grid"] == "3"
    assert cli.main(["solve", config_path("verify_zero.yaml"), "--fd-step", "0.5",
                     "--out", str(out)]) == 2


def test_solver_failure_still_writes_report(tmp_path, config_path):
    out = tmp_path / "o"
    assert cli.main(["solve", config_path("delta2star_moment_fail.yaml"), "--out", str(out)]) == 3
    rep = _kv(out / "report.txt")
    assert rep["status"] == "solver_failure" and "moment" in rep["error"]


def test_byte_stable_across_working_directories(tmp_path, config_path):
    cfg = config_path("delta2star_manufactured.yaml")
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        subprocess.run([sys.executable, "-m", "eulerdarboux", "solve", cfg, "--out", "res"],
                       cwd=tmp_path / d, check=True, capture_output=True)
    a, b = tmp_path / "a" / "res", tmp_path / "b" / "res"
    assert sorted(os.listdir(a)) == sorted(os.listdir(b))
    for f in os.listdir(a):
        assert (a / f).read_bytes() == (b / f).read_bytes(), f


def test_version_flag(capsys):
    assert cli.main(["--version"]) == 0
    assert "eulerdarboux" in capsys.readouterr().out

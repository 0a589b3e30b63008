"""Acceptance criteria 1-8, each at its stated tolerance.

One PASS/FAIL line per criterion is printed in the terminal summary
(see ``conftest.py``) and each test asserts the criterion passed.
"""
import io
import os
import subprocess
import sys
import time
import warnings

import pytest

from eulerdarboux import acceptance, cli
from eulerdarboux.acceptance import CriterionResult

from conftest import CONFIGS, record_criterion


def _check(res):
    record_criterion(res.line())
    detail = "\n".join(res.notes)
    assert res.passed, res.line() + ("\n" + detail if detail else "")


@pytest.mark.parametrize("crit", acceptance.ALL, ids=lambda c: c.__name__)
def test_criterion(crit):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        _check(crit())


def _criterion_8(tmp_root):
    res = CriterionResult(8, "CLI selftest, config rejection, byte-stable outputs")
    t0 = time.perf_counter()
    res.measure("selftest_exit", cli.selftest(io.StringIO()), 0, "max")
    res.measure("lambda_nonzero_exit_is_2",
                cli.main(["solve", os.path.join(CONFIGS, "delta2_lambda_nonzero.yaml"),
                          "--out", os.path.join(tmp_root, "rej")]) == 2, True, "true")
    # same relative --out from two working directories, separate processes
    runs = []
    for d in ("run1", "run2"):
        cwd = os.path.join(tmp_root, d)
        os.makedirs(cwd)
        proc = subprocess.run([sys.executable, "-m", "eulerdarboux", "solve",
                               os.path.join(CONFIGS, "delta2star_manufactured.yaml"), "--out", "res"],
                              cwd=cwd, capture_output=True)
        res.measure("%s_exit" % d, proc.returncode, 0, "max")
        out = os.path.join(cwd, "res")
        runs.append({f: open(os.path.join(out, f), "rb").read() for f in sorted(os.listdir(out))})
    res.measure("byte_identical_outputs", runs[0] == runs[1] and len(runs[0]) >= 3, True, "true")
    res.runtime = time.perf_counter() - t0
    return res


def test_criterion_8(tmp_path):
    _check(_criterion_8(str(tmp_path)))

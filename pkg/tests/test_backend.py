import json
import os
import subprocess
import sys

import numpy as np

SNIPPET = """
import json
import numpy as np
from eulerdarboux import _kernels
from eulerdarboux.cauchy_rep import Parameters
from eulerdarboux.delta_solvers import solve_volterra_first_kind
sol = solve_volterra_first_kind(lambda x: (1 - np.asarray(x)) ** 1.25, Parameters(0.25, 1.0), n=64)
print(json.dumps({"backend": _kernels.BACKEND, "values": sol.values.tolist()}))
"""


def _run(pure):
    env = dict(os.environ)
    env.pop("EULERDARBOUX_PURE_PYTHON", None)
    if pure:
        env["EULERDARBOUX_PURE_PYTHON"] = "1"
    out = subprocess.run([sys.executable, "-c", SNIPPET], env=env, check=True,
                         capture_output=True, text=True).stdout
    return json.loads(out)


def test_pure_python_fallback_selected_and_consistent():
    pure = _run(True)
    default = _run(False)
    assert pure["backend"] == "python"
    assert default["backend"] in ("python", "cython")
    np.testing.assert_allclose(pure["values"], default["values"], rtol=1e-10)

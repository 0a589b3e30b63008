"""Compiled vs pure-Python kernels: agreement and timing.

    python benchmarks/bench_kernels.py [--repeat R]

Prints one line per kernel with the best-of-R time of each backend, the
speed-up, and the largest relative difference between their outputs.
"""
import argparse
import sys
import timeit

import numpy as np

from eulerdarboux import _pykernels

try:
    from eulerdarboux import _ckernels
except ImportError:
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    z = rng.uniform(-50.0, 50.0, 20000)
    x = np.cos(np.linspace(0.0, np.pi, 4001))
    n = 1024
    nodes = np.linspace(0.0, 1.0, n + 1)
    rhs = (1.0 - nodes[:-1]) ** 1.25 / 1.25
    return [
        ("hyp0f1_vec  (20000 args)", "hyp0f1_vec", (1.25, z)),
        ("jacobi_eval (n=256, 4001 pts)", "jacobi_eval", (256, 0.25, -0.5, x)),
        ("march_first_kind (n=%d, lam=1)" % n, "march_first_kind",
         (nodes, rhs, 0.25, 1.25, 1.0, 0.0)),
    ]


def _rel_diff(a, b):
    a = np.atleast_1d(np.asarray(a, dtype=float)).ravel()
    b = np.atleast_1d(np.asarray(b, dtype=float)).ravel()
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled kernels not built; only the Python backend is available")
    print("%-34s %12s %12s %9s %11s" % ("kernel", "python [s]", "cython [s]", "speed-up", "max rel diff"))
    for label, name, fargs in cases():
        py = getattr(_pykernels, name)
        t_py = min(timeit.repeat(lambda: py(*fargs), number=1, repeat=args.repeat))
        if _ckernels is None:
            print("%-34s %12.4g %12s %9s %11s" % (label, t_py, "-", "-", "-"))
            continue
        cy = getattr(_ckernels, name)
        t_cy = min(timeit.repeat(lambda: cy(*fargs), number=1, repeat=args.repeat))
        out_py, out_cy = py(*fargs), cy(*fargs)
        if isinstance(out_py, tuple):
            diff = max(_rel_diff(a, b) for a, b in zip(out_cy, out_py))
        else:
            diff = _rel_diff(out_cy, out_py)
        print("%-34s %12.4g %12.4g %9.1f %11.2e" % (label, t_py, t_cy, t_py / t_cy, diff))
    return 0


if __name__ == "__main__":
    sys.exit(main())

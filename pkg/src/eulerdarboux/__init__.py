"""Boundary-value problems for the generalized Euler-Darboux equation.

Solvers for the Delta_2 and Delta_2* problems on the square bounded by the
characteristics xi = 0, xi = h, eta = +-h, together with the special
functions, quadrature rules and singular-integral inversions they rest on,
and a finite-difference verification harness.
"""
from ._kernels import BACKEND
from .specfun import SeriesResult, hyp0f1, hyp0f1_array, pochhammer

__version__ = "0.1.0"

__all__ = ["BACKEND", "SeriesResult", "hyp0f1", "hyp0f1_array", "pochhammer"]

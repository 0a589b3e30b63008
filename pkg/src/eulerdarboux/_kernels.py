"""Kernel backend selection.

The compiled ``_ckernels`` module is used when it was built; otherwise the
numpy implementations in ``_pykernels`` are used.  Set
``EULERDARBOUX_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if not os.environ.get("EULERDARBOUX_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

hyp0f1_vec = _impl.hyp0f1_vec
jacobi_eval = _impl.jacobi_eval
march_first_kind = _impl.march_first_kind

__all__ = ["BACKEND", "hyp0f1_vec", "jacobi_eval", "march_first_kind"]

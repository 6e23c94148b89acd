"""Kernel dispatch: compiled extension when importable, else pure Python.

Set ``SUGRAPH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("SUGRAPH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

component_labels = _impl.component_labels
cooccurrence = _impl.cooccurrence
pair_matrix = _impl.pair_matrix

__all__ = ["BACKEND", "component_labels", "cooccurrence", "pair_matrix"]

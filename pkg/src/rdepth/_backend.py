"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``RDEPTH_PURE_PYTHON=1`` to force the numpy kernels.
"""
import os

from . import _kernels_py

if os.environ.get("RDEPTH_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

sup_values = kernels.sup_values
inf_values = kernels.inf_values
closed_counts = kernels.closed_counts
halfplane_windows = kernels.halfplane_windows
max_window_norm = kernels.max_window_norm

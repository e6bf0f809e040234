"""Kernel selection.

The compiled extension is used when it imports; setting the environment
variable ``MIXLM_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
PlsKernel = _kernels_py.PlsKernel

if not os.environ.get("MIXLM_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        PlsKernel = _compiled.PlsKernel
        BACKEND = "compiled"

PythonPlsKernel = _kernels_py.PlsKernel

__all__ = ["BACKEND", "PlsKernel", "PythonPlsKernel"]

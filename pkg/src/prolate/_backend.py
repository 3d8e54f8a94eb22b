"""Selects the kernel implementation at import time.

The compiled extension ``prolate._kernels`` is used when it is importable;
otherwise, or when the environment variable ``PROLATE_PURE_PYTHON`` is set
to a non-empty value other than ``0``, the numpy fallback is used.
"""
import os

from prolate import _pykernels

_force_pure = os.environ.get("PROLATE_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from prolate import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:
        kernels = _pykernels
        BACKEND = "python"

ConvergenceError = _pykernels.ConvergenceError

__all__ = ["kernels", "BACKEND", "ConvergenceError"]

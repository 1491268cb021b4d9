"""Kernel selection: compiled Jacobi sweeps when built, pure Python otherwise.

Set ``TINGLEY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _jacobi_py

if os.environ.get("TINGLEY_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _jacobi as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    BACKEND = "cython"
    jacobi_sweeps = _compiled.jacobi_sweeps
else:
    BACKEND = "python"
    jacobi_sweeps = _jacobi_py.jacobi_sweeps


def available_kernels():
    """Map backend name to sweep function for every kernel importable here."""
    kernels = {"python": _jacobi_py.jacobi_sweeps}
    if _compiled is not None:
        kernels["cython"] = _compiled.jacobi_sweeps
    return kernels

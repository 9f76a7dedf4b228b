"""Backend selection for the eigensolver kernel.

The compiled extension is used when it imports; ``SELFTESTING_PURE_PYTHON=1``
forces the numpy fallback.
"""
import os

from . import _jacobi_py

BACKEND = "python"
jacobi_eigh = _jacobi_py.jacobi_eigh

if os.environ.get("SELFTESTING_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _jacobi_ext
    except ImportError:  # extension not built
        pass
    else:
        jacobi_eigh = _jacobi_ext.jacobi_eigh
        BACKEND = "compiled"

__all__ = ["BACKEND", "jacobi_eigh"]

"""Backend selection for the hot kernels.

Set ``PAPR_LAB_DISABLE_JIT=1`` to force the pure-numpy path even when numba
is importable.
"""
import os

_FLAG = os.environ.get("PAPR_LAB_DISABLE_JIT", "").strip().lower()
DISABLE_JIT = _FLAG in ("1", "true", "yes", "on")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None
USE_NUMBA = HAS_NUMBA and not DISABLE_JIT


def njit(func):
    """Compile ``func`` in nopython mode if numba is present, else return it untouched."""
    if not HAS_NUMBA:
        return func
    return numba.njit(cache=True, nogil=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"

"""Optional numba acceleration.

Kernels are written in the numba-compatible subset of Python and decorated
with :func:`kernel`.  Setting ``DEBREACH_DISABLE_JIT=1`` in the environment
before import runs every kernel as plain Python over numpy arrays instead;
results are identical, only slower.
"""
import os

_FLAG = os.environ.get("DEBREACH_DISABLE_JIT", "").strip().lower()
JIT_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    if JIT_DISABLED:
        raise ImportError
    import numba
except ImportError:
    numba = None

JIT_ENABLED = numba is not None


def kernel(func):
    """Compile ``func`` with ``numba.njit`` when available, else return it unchanged."""
    if numba is None:
        func.py_func = func
        return func
    return numba.njit(cache=True, nogil=True)(func)

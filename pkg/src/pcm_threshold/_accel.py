"""Optional numba acceleration.

Set ``PCM_THRESHOLD_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The
flag is read once at import time; numba missing from the environment has the
same effect.
"""

import os

_FLAG = "PCM_THRESHOLD_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")


def njit(func):
    """``numba.njit(cache=True)`` when numba is available, identity otherwise."""
    if not NUMBA_AVAILABLE:
        return func
    return numba.njit(cache=True, nogil=True)(func)

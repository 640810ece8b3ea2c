"""Backend switch for the compiled kernels.

Numba is used when it imports cleanly and ``CVSTEER_NUMBA`` is not set to a
false-ish value (``0``, ``false``, ``no``, ``off``).  With the flag off every
hot kernel falls back to its vectorised numpy twin in :mod:`cvsteer._kernels`.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

_FLAG = os.environ.get("CVSTEER_NUMBA", "1").strip().lower()

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and _FLAG not in {"0", "false", "no", "off"}


def njit(func):
    """Compile ``func`` in nopython mode, or hand it back untouched."""
    if not NUMBA_AVAILABLE:
        return func
    return numba.njit(cache=True)(func)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"

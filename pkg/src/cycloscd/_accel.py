"""Optional numba acceleration.

Each hot kernel in :mod:`cycloscd.kernels` has a plain-loop body compiled
with ``numba.njit`` and an independent vectorised numpy twin. The compiled
variant is dispatched when numba imports and the environment variable
``CYCLOSCD_DISABLE_NUMBA`` is unset or ``0``; otherwise the numpy twin runs.
Both variants stay importable so they can be compared against each other.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

ENV_FLAG = "CYCLOSCD_DISABLE_NUMBA"

NUMBA_AVAILABLE = numba is not None
USE_NUMBA = NUMBA_AVAILABLE and os.environ.get(ENV_FLAG, "0").strip() in ("", "0")


def compile_kernel(func):
    """Return ``numba.njit(func)``, or ``None`` when numba is missing."""
    if not NUMBA_AVAILABLE:
        return None
    return numba.njit(cache=True, nogil=True)(func)


def pick(compiled, fallback):
    return compiled if (USE_NUMBA and compiled is not None) else fallback


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"

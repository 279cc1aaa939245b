"""Backend selection for the search kernels.

Kernels are compiled with numba when it is importable.  Setting
``GIRTH8_DISABLE_NUMBA=1`` selects the pure-numpy implementations instead.
"""

from __future__ import annotations

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("GIRTH8_DISABLE_NUMBA", "0") not in ("1", "true", "yes")


def njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, nogil=True)(fn)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"

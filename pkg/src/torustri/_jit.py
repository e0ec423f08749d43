"""JIT dispatch for the hot kernels.

Every kernel in :mod:`torustri.kernels` is plain array-walking Python that
numba can compile in nopython mode.  By default the kernels are compiled;
setting the environment variable ``TORUSTRI_NO_NUMBA=1`` (before import)
selects the interpreted fallback, which runs the same source unchanged.
``torustri bench`` compares the two paths.
"""

import os

NUMBA_ENABLED = os.environ.get("TORUSTRI_NO_NUMBA", "0") not in ("1", "true", "yes")

if NUMBA_ENABLED:
    try:
        from numba import njit as _njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    def jit(func):
        return _njit(cache=True)(func)
else:
    def jit(func):
        return func

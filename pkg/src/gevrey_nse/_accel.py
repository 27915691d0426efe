"""Optional numba acceleration.

Hot kernels are written once in a loop style that numba compiles and that
still runs (slowly) as plain Python.  Set ``GEVREY_NSE_NUMBA=0`` to skip
numba entirely; callers then dispatch to the vectorised numpy versions.
"""

import os

_FLAG = os.environ.get("GEVREY_NSE_NUMBA", "1").strip().lower()

try:
    if _FLAG in ("0", "false", "no", "off"):
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when enabled, identity decorator otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def use_numba() -> bool:
    return HAVE_NUMBA

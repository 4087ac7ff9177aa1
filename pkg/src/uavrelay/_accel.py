"""Numba switch.

Hot kernels are compiled with numba when it is importable and the
``UAVRELAY_NO_NUMBA`` environment variable is unset (or ``0``).  Otherwise
the pure-numpy twins in :mod:`uavrelay.kernels` are used.
"""
import os

_flag = os.environ.get("UAVRELAY_NO_NUMBA", "0").strip().lower()
_disabled = _flag not in ("", "0", "false", "no")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:
    _njit = None
    HAVE_NUMBA = False


def njit(func):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if _njit is None:
        return func
    return _njit(cache=True)(func)

"""Numba acceleration switch.

Hot grid/MC kernels ship in two variants: an ``@njit`` loop version and a
pure-numpy twin.  ``USE_NUMBA`` selects at import time; set the environment
variable ``SECGROWTH_DISABLE_NUMBA=1`` to force the numpy path (results agree
to the last few ulp; see benchmarks/bench_kernels.py for the speed gap).
"""

import os

_DISABLED = os.environ.get("SECGROWTH_DISABLE_NUMBA", "0") not in ("0", "", "false")

try:
    import numba  # noqa: F401

    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and not _DISABLED


def njit(*args, **kwargs):
    """numba.njit when active, identity decorator otherwise."""
    if USE_NUMBA:
        import numba

        return numba.njit(*args, **kwargs)
    if args and callable(args[0]):
        return args[0]

    def deco(fn):
        return fn

    return deco

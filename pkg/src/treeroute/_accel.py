"""Backend selection for the hot kernels.

Kernels are written once as plain loop code that numba can compile. When
numba is importable and ``TREEROUTE_NO_NUMBA`` is unset (or falsy), the
compiled versions are used; otherwise the pure numpy/python paths run.
"""

import os

_FLAG = os.environ.get("TREEROUTE_NO_NUMBA", "").strip().lower()
DISABLED = _FLAG not in ("", "0", "false", "no", "off")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not DISABLED


def maybe_njit(fn):
    """Return ``(python_fn, compiled_fn)``; compiled is the python one without numba."""
    if not HAVE_NUMBA:
        return fn, fn
    return fn, numba.njit(cache=True, nogil=True)(fn)


def backend_name(use_numba=None):
    if use_numba is None:
        use_numba = USE_NUMBA
    return "numba" if use_numba and HAVE_NUMBA else "numpy"

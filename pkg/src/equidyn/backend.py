"""Kernel backend selection.

The hot kernels exist twice: a numba @njit version and a pure-numpy
version. ``EQUIDYN_BACKEND=numpy`` forces the fallback; ``numba``
demands the JIT (raising if numba is unavailable). Unset, numba is used
when importable.
"""

import os

ENV_VAR = "EQUIDYN_BACKEND"


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def select_backend() -> str:
    requested = os.environ.get(ENV_VAR, "").strip().lower()
    if requested == "numpy":
        return "numpy"
    if requested == "numba":
        if not numba_available():
            raise ImportError(f"{ENV_VAR}=numba but numba is not importable")
        return "numba"
    if requested:
        raise ValueError(f"{ENV_VAR} must be 'numba' or 'numpy', got {requested!r}")
    return "numba" if numba_available() else "numpy"

"""Backend selection for the compiled kernels.

The hot loops in :mod:`colas._kernels` exist twice: a numba ``@njit``
version and a pure-numpy version.  Which one runs is decided at call time
from ``COLAS_BACKEND`` (``numba`` or ``numpy``).  ``COLAS_DISABLE_NUMBA=1``
is accepted as a shorthand for the numpy path.  Both paths return identical
results; the test-suite checks this.
"""

import contextlib
import os

try:
    import numba
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def deco(fn):
            return fn

        return deco


_override = None


def _from_env():
    if os.environ.get("COLAS_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    name = os.environ.get("COLAS_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"COLAS_BACKEND must be 'numba' or 'numpy', got {name!r}")
    return name


def backend():
    """Name of the active kernel backend."""
    name = _override or _from_env()
    if name == "numba" and not NUMBA_AVAILABLE:
        return "numpy"
    return name


def use_numba():
    return backend() == "numba"


@contextlib.contextmanager
def use_backend(name):
    """Temporarily force a backend (tests and benchmarks)."""
    global _override
    if name not in ("numba", "numpy"):
        raise ValueError(name)
    prev = _override
    _override = name
    try:
        yield
    finally:
        _override = prev


def set_threads(n):
    if NUMBA_AVAILABLE and n:
        numba.set_num_threads(min(int(n), numba.config.NUMBA_NUM_THREADS))

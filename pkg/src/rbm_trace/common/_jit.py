import os
from typing import Callable, TypeVar

try:
    import numba

    numba_available = True
except ImportError:
    numba_available = False

F = TypeVar("F", bound=Callable)


def jit_enabled() -> bool:
    return numba_available and os.environ.get("RBM_TRACE_DISABLE_JIT", "False") != "True"


def njit(func: F) -> F:
    """Compile a numeric kernel with numba when it is installed, otherwise return it unchanged.

    Kernels decorated with this must stick to the subset of Python that numba's nopython mode accepts: scalar
    arithmetic, ``math`` functions, loops and indexing of float64/int64 arrays, and tuple returns.
    """
    if jit_enabled():
        return numba.njit(cache=False, nogil=True)(func)  # type: ignore
    return func

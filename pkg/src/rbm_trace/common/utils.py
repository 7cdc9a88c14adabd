import os
import sys
from typing import Any

_QUIET = os.environ.get("RBM_TRACE_QUIET", "False") == "True"


def set_quiet(quiet: bool) -> None:
    global _QUIET  # pylint: disable=global-statement
    _QUIET = quiet


def _log(prefix: str, *args: Any, **kwargs: Any) -> None:
    if _QUIET:
        return
    kwargs.setdefault("file", sys.stderr)
    print(prefix, *args, **kwargs)


def geo_log(*args: Any, **kwargs: Any) -> None:
    _log("[GEO] >>>", *args, **kwargs)


def sim_log(*args: Any, **kwargs: Any) -> None:
    _log("[SIM] >>>", *args, **kwargs)


def fd_log(*args: Any, **kwargs: Any) -> None:
    _log("[FD]  >>>", *args, **kwargs)


def harness_log(*args: Any, **kwargs: Any) -> None:
    _log("[RUN] >>>", *args, **kwargs)


def steps_for_horizon(T: float, dt: float) -> int:
    """Number of whole time steps of size ``dt`` in ``[0, T]``, robust to floating point division noise."""
    return int((T / dt) + 1e-9)


def cells_for_horizon(T: float, dt: float) -> int:
    """Number of grid cells ``[i dt, (i + 1) dt)`` needed to cover ``[0, T)``."""
    q = T / dt
    n = int(q + 1e-9)
    return n if abs(q - n) <= 1e-9 * max(1.0, q) else n + 1

from typing import Optional

import numpy as np

from rbm_trace.common.exc import EmptySetError, HorizonError
from rbm_trace.sim import PathSample, TimeSet

from ._boxcount import box_counts_space, box_counts_time
from ._estimate import MIN_SCALES, DimensionEstimate, fit_loglog


def occupation_dimension(
    ts: TimeSet, k_min: int, k_max: int, auto_window: bool = True, min_window: int = MIN_SCALES
) -> DimensionEstimate:
    """Box dimension of a time set over dyadic intervals of ``[0, T]``."""
    if ts.is_empty:
        raise EmptySetError("The time set is empty.")
    scales, counts = box_counts_time(ts, k_min, k_max)
    return fit_loglog(scales, counts, auto_window=auto_window, min_window=min_window)


def trace_dimension(
    points: np.ndarray,
    k_min: int,
    k_max: int,
    auto_window: bool = True,
    min_window: int = MIN_SCALES,
    box: Optional[np.ndarray] = None,
    resolution: Optional[float] = None,
) -> DimensionEstimate:
    """Box dimension of a spatial point set (e.g. boundary trace points)."""
    scales, counts = box_counts_space(points, None, k_min, k_max, box=box, resolution=resolution)
    return fit_loglog(scales, counts, auto_window=auto_window, min_window=min_window)


def image_dimension(
    path: PathSample,
    e: TimeSet,
    k_min: int,
    k_max: int,
    auto_window: bool = True,
    min_window: int = MIN_SCALES,
    box: Optional[np.ndarray] = None,
    resolution: Optional[float] = None,
) -> DimensionEstimate:
    """Box dimension of the image ``{positions[k] : cell k of e is marked}``.

    Raises:
        HorizonError: ``e`` is not on the path grid.
        EmptySetError: The image is empty.
    """
    if abs(e.dt - path.dt) > 1e-12 * path.dt or e.n_cells > path.positions.shape[0]:
        raise HorizonError(
            f"Time set grid (dt={e.dt}, {e.n_cells} cells) does not match the path grid "
            f"(dt={path.dt}, {path.positions.shape[0]} positions)."
        )
    image = path.positions[: e.n_cells][e.flags]
    if image.shape[0] == 0:
        raise EmptySetError("The image of the time set is empty.")
    return trace_dimension(image, k_min, k_max, auto_window, min_window, box=box, resolution=resolution)


def range_dimension(
    path: PathSample,
    k_min: int,
    k_max: int,
    auto_window: bool = True,
    min_window: int = MIN_SCALES,
    box: Optional[np.ndarray] = None,
    resolution: Optional[float] = None,
) -> DimensionEstimate:
    """Box dimension of the whole sampled path."""
    return trace_dimension(path.positions, k_min, k_max, auto_window, min_window, box=box, resolution=resolution)

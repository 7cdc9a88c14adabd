from typing import Optional, Tuple

import numpy as np

from rbm_trace.common.exc import EmptySetError, ResolutionError
from rbm_trace.sim import TimeSet

TIME_CUTOFF_CELLS = 4
MAX_KEY_BITS = 62
_CHUNK = 1 << 20


def _check_levels(k_min: int, k_max: int) -> None:
    if not (0 <= k_min < k_max):
        raise ResolutionError(f"Expected 0 <= k_min < k_max, got k_min={k_min}, k_max={k_max}.")


def box_counts_time(ts: TimeSet, k_min: int, k_max: int) -> Tuple[np.ndarray, np.ndarray]:
    """Number of dyadic intervals ``[j T 2^-k, (j + 1) T 2^-k)`` meeting the set, for ``k_min <= k <= k_max``.

    The grid cells of ``ts`` are taken as the uniform partition of ``[0, T]`` into ``ts.n_cells`` parts, so the
    counting is exact integer arithmetic.

    Raises:
        ResolutionError: ``T 2^-k_max < 4 dt`` (dyadic intervals finer than four grid cells).
    """
    _check_levels(k_min, k_max)
    if ts.T * 2.0**-k_max < TIME_CUTOFF_CELLS * ts.dt * (1.0 - 1e-12):
        raise ResolutionError(
            f"Finest dyadic interval T*2^-{k_max} = {ts.T * 2.0**-k_max:.4g} is below {TIME_CUTOFF_CELLS} grid "
            f"cells of {ts.dt:.4g}; lower k_max."
        )
    n = ts.n_cells
    marked = np.flatnonzero(ts.flags).astype(np.int64)
    ks = np.arange(k_min, k_max + 1)
    counts = np.zeros(ks.shape[0], dtype=np.int64)
    if marked.size:
        for i, k in enumerate(ks):
            p = np.int64(1) << np.int64(k)
            j0 = (marked * p) // n
            j1 = ((marked + 1) * p - 1) // n
            # j0 and j1 are nondecreasing in the marked cell index, so the union of the ranges is counted by
            # clipping each range against the previous upper end.
            prev = np.concatenate([[-1], j1[:-1]])
            counts[i] = int(np.maximum(j1 - np.maximum(j0, prev + 1) + 1, 0).sum())
    return ts.T * 2.0 ** (-ks.astype(np.float64)), counts


def box_counts_space(
    points: np.ndarray,
    n: Optional[int] = None,
    k_min: int = 1,
    k_max: int = 8,
    box: Optional[np.ndarray] = None,
    resolution: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Number of dyadic cubes of side ``L 2^-k`` meeting a point set.

    The cube grid is anchored at the lower corner of ``box`` (default: the points' bounding box) and ``L`` is the
    box's largest side (1 for a single point). Cube coordinates are packed into 64-bit keys and counted as
    set cardinalities; large inputs are processed in shards whose key sets are merged by union.

    Args:
        points (np.ndarray): ``(M, n)`` coordinates.
        n (Optional[int]): Ambient dimension, checked against ``points`` when given.
        k_min (int): Coarsest level.
        k_max (int): Finest level.
        box (Optional[np.ndarray]): ``(n, 2)`` anchoring box ``[lo, hi]`` per axis.
        resolution (Optional[float]): Spatial resolution of the data; ``L 2^-k_max`` must not go below it.

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``(sides, counts)``, sides decreasing.

    Raises:
        EmptySetError: No points.
        ResolutionError: Bad levels, or the finest cube below ``resolution``.
    """
    _check_levels(k_min, k_max)
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptySetError(f"Cannot box-count an empty point set (got shape {pts.shape}).")
    dim = pts.shape[1]
    if n is not None and n != dim:
        raise ResolutionError(f"Points are {dim}-dimensional, expected {n}.")
    if k_max * dim > MAX_KEY_BITS:
        raise ResolutionError(f"k_max={k_max} is too fine to pack {dim}-D cube keys into 64 bits.")

    if box is not None:
        b = np.asarray(box, dtype=np.float64)
        lower, side = b[:, 0], float(np.max(b[:, 1] - b[:, 0]))
    else:
        lower = pts.min(axis=0)
        side = float(np.max(pts.max(axis=0) - lower))
    if side <= 0.0:
        side = 1.0
    if resolution is not None and side * 2.0**-k_max < resolution:
        raise ResolutionError(
            f"Finest cube side {side * 2.0**-k_max:.4g} is below the data resolution {resolution:.4g}; lower k_max."
        )

    ks = list(range(k_min, k_max + 1))
    n_fine = np.int64(1) << np.int64(k_max)
    shards = {k: [] for k in ks}
    for lo in range(0, pts.shape[0], _CHUNK):
        chunk = pts[lo : lo + _CHUNK]
        fine = np.clip(np.floor((chunk - lower) / side * float(n_fine)), 0, float(n_fine - 1)).astype(np.int64)
        for k in ks:
            coarse = fine >> np.int64(k_max - k)
            width = np.int64(1) << np.int64(k)
            key = coarse[:, dim - 1]
            for axis in range(dim - 2, -1, -1):
                key = coarse[:, axis] + width * key
            shards[k].append(np.unique(key))
    counts = np.array([np.unique(np.concatenate(shards[k])).shape[0] for k in ks], dtype=np.int64)
    return side * 2.0 ** (-np.asarray(ks, dtype=np.float64)), counts

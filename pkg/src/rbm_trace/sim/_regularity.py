import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from rbm_trace.common.exc import EmptySetError, ResolutionError

from ._types import PathSample

MIN_HOLDER_STEPS = 1 << 10
_CHUNK = 1 << 20


def _max_increment(positions: np.ndarray, lag: int) -> float:
    best = 0.0
    n = positions.shape[0] - lag
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        diff = positions[lo + lag : hi + lag] - positions[lo:hi]
        best = max(best, float(np.sqrt(np.max(np.einsum("ij,ij->i", diff, diff)))))
    return best


def holder_profile(path: PathSample) -> Tuple[np.ndarray, np.ndarray]:
    """Spans ``h = 2^j dt`` and the largest increments ``M(h) = max_k |x_{k + 2^j} - x_k|``.

    ``j`` runs over ``0 .. floor(log2 N) - 2`` for a path of ``N`` steps.

    Raises:
        ResolutionError: Fewer than ``2^10`` steps.
    """
    n = path.n_steps
    if n < MIN_HOLDER_STEPS:
        raise ResolutionError(f"Hölder estimation needs at least {MIN_HOLDER_STEPS} steps, path has {n}.")
    j_max = int(np.floor(np.log2(n))) - 2
    lags = 1 << np.arange(j_max + 1)
    spans = lags * path.dt
    maxima = np.array([_max_increment(path.positions, int(lag)) for lag in lags])
    return spans, maxima


def holder_exponent(path: PathSample) -> float:
    """Least-squares slope of ``log M(h)`` against ``log h`` over the middle half of the dyadic spans.

    A constant path has no increments to fit; it yields ``0.0`` together with a warning.
    """
    spans, maxima = holder_profile(path)
    n_spans = spans.shape[0]
    lo = n_spans // 4
    hi = n_spans - n_spans // 4
    s, m = spans[lo:hi], maxima[lo:hi]
    if np.any(m <= 0.0):
        warnings.warn(f"Path {path!r} has zero increments at some span; Hölder exponent reported as 0.")
        return 0.0
    fit = stats.linregress(np.log(s), np.log(m))
    return float(fit.slope)


def cube_hit_counts(
    path: PathSample,
    k_min: int = 3,
    k_max: int = 8,
    origin: Optional[Sequence[float]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Number of grid cubes of side ``a = 2^-k`` met by the sampled positions, for ``k_min <= k <= k_max``.

    The cube grid is anchored at ``origin`` (the lower corner of the domain's bounding box by default, else the
    componentwise minimum of the positions).

    Returns:
        Tuple[np.ndarray, np.ndarray]: ``(sides, counts)``, sides decreasing.
    """
    if not k_min < k_max:
        raise ResolutionError(f"Expected k_min < k_max, got {k_min}, {k_max}.")
    pts = path.positions
    if pts.shape[0] == 0:
        raise EmptySetError("Cannot count cubes of an empty path.")
    if origin is not None:
        lower = np.asarray(origin, dtype=np.float64)
    elif path.domain is not None:
        lower = path.domain.bounding_box[:, 0]
    else:
        lower = pts.min(axis=0)
    ks = np.arange(k_min, k_max + 1)
    sides = 2.0 ** (-ks.astype(np.float64))
    counts = np.empty(ks.shape[0], dtype=np.int64)
    for i, side in enumerate(sides):
        cells = np.floor((pts - lower) / side).astype(np.int64)
        counts[i] = np.unique(cells, axis=0).shape[0]
    return sides, counts

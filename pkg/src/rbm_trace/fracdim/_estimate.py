from typing import List, Sequence, Tuple

import numpy as np
import pydantic
from scipy import stats

from rbm_trace.common.exc import EmptySetError, ResolutionError

MIN_SCALES = 4
MIN_AUTO_COUNT = 8
DROPPED_FINEST = 2

PROXY_NOTE = "upper box-counting dimension (computable proxy for Hausdorff dimension)"


class DimensionEstimate(pydantic.BaseModel):
    """A log-log fit of box counts against inverse box side.

    ``scales`` are ordered from coarse to fine; ``window`` holds the indices of the scales used in the fit.
    """

    scales: List[float]
    counts: List[int]
    slope: float
    intercept: float
    stderr: float
    r2: float
    window: List[int]
    auto_window: bool = False
    proxy: str = PROXY_NOTE

    @pydantic.model_validator(mode="after")
    def check_consistency(self) -> "DimensionEstimate":
        assert len(self.scales) == len(self.counts), "scales and counts must have equal length"
        assert all(c > 0 for c in self.counts), "counts must be positive"
        assert all(a > b for a, b in zip(self.scales, self.scales[1:])), "scales must be strictly decreasing"
        assert all(a <= b for a, b in zip(self.counts, self.counts[1:])), "counts must not decrease as boxes shrink"
        assert self.window, "window must be non-empty"
        assert np.isfinite(self.slope), "slope must be finite"
        assert 0.0 <= self.r2 <= 1.0, "r2 must lie in [0, 1]"
        return self

    @property
    def fitted_line(self) -> List[Tuple[float, float]]:
        """``(log(1/scale), fitted log count)`` at the window's scales."""
        xs = [float(np.log(1.0 / self.scales[i])) for i in self.window]
        return [(x, self.intercept + self.slope * x) for x in xs]


def _fit(x: np.ndarray, y: np.ndarray) -> Tuple[float, float, float, float]:
    if np.ptp(y) == 0.0:
        return 0.0, float(y[0]), 0.0, 1.0
    res = stats.linregress(x, y)
    stderr = float(res.stderr) if np.isfinite(res.stderr) else 0.0
    return float(res.slope), float(res.intercept), stderr, float(min(max(res.rvalue**2, 0.0), 1.0))


def _choose_window(x: np.ndarray, y: np.ndarray, counts: np.ndarray, min_window: int) -> List[int]:
    usable = np.arange(len(counts) - DROPPED_FINEST)
    usable = usable[counts[usable] >= MIN_AUTO_COUNT]
    if usable.shape[0] < min_window:
        raise ResolutionError(
            f"Only {usable.shape[0]} usable scales after dropping counts < {MIN_AUTO_COUNT} and the "
            f"{DROPPED_FINEST} finest scales; at least {min_window} are needed."
        )
    best: Tuple[float, int, int] = (-1.0, 0, 0)
    for lo in range(usable.shape[0]):
        for hi in range(lo + min_window, usable.shape[0] + 1):
            idx = usable[lo:hi]
            r2 = _fit(x[idx], y[idx])[3]
            # Prefer higher r2, then the longer window, then the coarser one.
            if (r2, hi - lo) > best[:2]:
                best = (r2, hi - lo, lo)
    _, length, lo = best
    return [int(i) for i in usable[lo : lo + length]]


def fit_loglog(
    scales: Sequence[float],
    counts: Sequence[int],
    auto_window: bool = True,
    min_window: int = MIN_SCALES,
) -> DimensionEstimate:
    """Ordinary least squares of ``log count`` against ``log(1/scale)``.

    With ``auto_window``, scales with fewer than 8 boxes and the two finest scales are dropped, and the contiguous
    window of at least ``min_window`` scales with the best ``r2`` is used. Constant counts give slope 0 on the full
    window in either mode.

    Args:
        scales (Sequence[float]): Box sides, any order (they are sorted coarse to fine).
        counts (Sequence[int]): Occupied-box counts matching ``scales``.
        auto_window (bool): Select the fit window automatically.
        min_window (int): Minimum window length for ``auto_window``.

    Returns:
        DimensionEstimate: The fit.

    Raises:
        ResolutionError: Fewer than 4 scales, repeated scales, or too few usable scales after windowing.
        EmptySetError: A zero count in the fitted window.
    """
    s = np.asarray(scales, dtype=np.float64)
    c = np.asarray(counts, dtype=np.int64)
    if s.shape != c.shape or s.ndim != 1:
        raise ResolutionError(f"scales and counts must be 1-D of equal length, got {s.shape} and {c.shape}.")
    if s.shape[0] < MIN_SCALES:
        raise ResolutionError(f"At least {MIN_SCALES} scales are needed, got {s.shape[0]}.")
    if np.any(s <= 0.0) or np.unique(s).shape[0] != s.shape[0]:
        raise ResolutionError("Scales must be positive and distinct.")
    if min_window < 2:
        raise ResolutionError(f"min_window must be >= 2, got {min_window}.")
    order = np.argsort(-s)
    s, c = s[order], c[order]
    if np.all(c <= 0):
        raise EmptySetError("All box counts are zero: the measured set is empty.")

    x = np.log(1.0 / s)
    constant = np.all(c == c[0])
    if auto_window and not constant:
        window = _choose_window(x, np.log(np.maximum(c, 1)), c, min_window)
    else:
        window = list(range(s.shape[0]))
    if np.any(c[window] <= 0):
        raise EmptySetError("Zero box count inside the fit window: the measured set is empty at some scale.")
    y = np.log(np.maximum(c, 1).astype(np.float64))
    slope, intercept, stderr, r2 = _fit(x[window], y[window])
    return DimensionEstimate(
        scales=s.tolist(),
        counts=c.tolist(),
        slope=slope,
        intercept=intercept,
        stderr=stderr,
        r2=r2,
        window=window,
        auto_window=auto_window and not constant,
    )

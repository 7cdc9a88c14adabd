import math
import time
from typing import Callable, List

import numpy as np
import pydantic

from rbm_trace.common.exc import ResolutionError
from rbm_trace.common.utils import cells_for_horizon, fd_log
from rbm_trace.geometry import KOCH_DIMENSION, koch_snowflake_vertices
from rbm_trace.sim import TimeSet

from ._boxcount import box_counts_space, box_counts_time
from ._estimate import DimensionEstimate, fit_loglog

CALIBRATION_TOLERANCE = 0.05


class CantorSpec(pydantic.BaseModel):
    """Self-similar Cantor set on ``[0, T]``: ``m`` equally spaced pieces scaled by ``r`` at every level."""

    m: int = 2
    r: float = 1.0 / 3.0
    depth: int = 10
    T: float = 1.0

    @pydantic.model_validator(mode="after")
    def check_parameters(self) -> "CantorSpec":
        assert self.m >= 2, "m must be >= 2"
        assert 0.0 < self.r < 1.0 / self.m, "r must lie in (0, 1/m)"
        assert self.depth >= 0, "depth must be >= 0"
        assert self.T > 0.0, "T must be positive"
        return self

    @property
    def analytic_dimension(self) -> float:
        return math.log(self.m) / math.log(1.0 / self.r)

    def intervals(self) -> np.ndarray:
        """``(m ** depth, 2)`` closed intervals of the depth-level approximation, sorted."""
        starts = np.array([0.0])
        length = self.T
        for _ in range(self.depth):
            piece = self.r * length
            gap = (length - self.m * piece) / (self.m - 1)
            offsets = np.arange(self.m) * (piece + gap)
            starts = (starts[:, None] + offsets[None, :]).reshape(-1)
            length = piece
        return np.column_stack([starts, starts + length])


def cantor_timeset(cantor: CantorSpec, grid_dt: float) -> TimeSet:
    """Grid cells of ``[0, T]`` meeting the depth-level Cantor approximation.

    Raises:
        ResolutionError: The finest pieces, ``r ** depth * T``, are shorter than ``grid_dt``.
    """
    finest = cantor.r**cantor.depth * cantor.T
    if finest < grid_dt:
        raise ResolutionError(f"Cantor depth {cantor.depth} gives pieces of {finest:.4g}, below grid_dt={grid_dt}.")
    n = cells_for_horizon(cantor.T, grid_dt)
    iv = cantor.intervals()
    i0 = np.clip(np.floor(iv[:, 0] / grid_dt + 1e-9).astype(np.int64), 0, n - 1)
    i1 = np.clip(np.floor(iv[:, 1] / grid_dt - 1e-9).astype(np.int64), 0, n - 1)
    i1 = np.maximum(i1, i0)
    marks = np.zeros(n + 1, dtype=np.int64)
    np.add.at(marks, i0, 1)
    np.add.at(marks, i1 + 1, -1)
    return TimeSet(dt=grid_dt, T=cantor.T, flags=np.cumsum(marks[:n]) > 0)


def filled_square_points(per_side: int = 512) -> np.ndarray:
    """A regular ``per_side x per_side`` grid of points filling the unit square."""
    g = np.linspace(0.0, 1.0, per_side)
    xx, yy = np.meshgrid(g, g)
    return np.column_stack([xx.ravel(), yy.ravel()])


class CalibrationResult(pydantic.BaseModel):
    name: str
    analytic: float
    estimate: DimensionEstimate
    tolerance: float = CALIBRATION_TOLERANCE
    seconds: float = 0.0

    @property
    def error(self) -> float:
        return self.estimate.slope - self.analytic

    @property
    def passed(self) -> bool:
        return abs(self.error) <= self.tolerance


def _cantor_fixture() -> DimensionEstimate:
    cantor = CantorSpec(m=2, r=1.0 / 3.0, depth=12, T=1.0)
    ts = cantor_timeset(cantor, grid_dt=1e-6)
    scales, counts = box_counts_time(ts, 1, 16)
    return fit_loglog(scales, counts, auto_window=False)


def _square_fixture() -> DimensionEstimate:
    scales, counts = box_counts_space(filled_square_points(512), 2, 1, 7)
    return fit_loglog(scales, counts, auto_window=False)


def _koch_fixture() -> DimensionEstimate:
    scales, counts = box_counts_space(koch_snowflake_vertices(7), 2, 3, 9)
    return fit_loglog(scales, counts, auto_window=False)


CALIBRATION_FIXTURES: List[tuple] = [
    ("middle-thirds-cantor", math.log(2.0) / math.log(3.0), _cantor_fixture),
    ("filled-square", 2.0, _square_fixture),
    ("koch-vertices-level-7", KOCH_DIMENSION, _koch_fixture),
]


def calibration_gate() -> List[CalibrationResult]:
    """Box-counting estimates of the three analytic fixtures, each to be within 0.05 of its known dimension."""
    results = []
    for name, analytic, build in CALIBRATION_FIXTURES:
        fixture: Callable[[], DimensionEstimate] = build
        t0 = time.perf_counter()
        est = fixture()
        res = CalibrationResult(name=name, analytic=analytic, estimate=est, seconds=time.perf_counter() - t0)
        fd_log(f"Calibration {name}: slope={est.slope:.4f} analytic={analytic:.4f} passed={res.passed}")
        results.append(res)
    return results

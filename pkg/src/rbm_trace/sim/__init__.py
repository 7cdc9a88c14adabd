from rbm_trace.common.rng import gaussian_increments

from ._boundary import boundary_hit_times, default_eps, trace_points
from ._export import path_to_csv, timeset_to_csv
from ._regularity import MIN_HOLDER_STEPS, cube_hit_counts, holder_exponent, holder_profile
from ._simulate import MAX_DT, extend_rbm, fold_1d, free_path, simulate_rbm
from ._types import PathSample, TimeSet

__all__ = [
    "boundary_hit_times",
    "cube_hit_counts",
    "default_eps",
    "extend_rbm",
    "fold_1d",
    "free_path",
    "gaussian_increments",
    "holder_exponent",
    "holder_profile",
    "MAX_DT",
    "MIN_HOLDER_STEPS",
    "path_to_csv",
    "PathSample",
    "simulate_rbm",
    "TimeSet",
    "timeset_to_csv",
    "trace_points",
]

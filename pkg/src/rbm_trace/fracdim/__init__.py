from ._boxcount import box_counts_space, box_counts_time
from ._estimate import PROXY_NOTE, DimensionEstimate, fit_loglog
from ._estimators import image_dimension, occupation_dimension, range_dimension, trace_dimension
from ._export import estimate_summary_json, estimate_to_csv
from ._fixtures import (
    CALIBRATION_TOLERANCE,
    CalibrationResult,
    CantorSpec,
    calibration_gate,
    cantor_timeset,
    filled_square_points,
)

__all__ = [
    "box_counts_space",
    "box_counts_time",
    "CALIBRATION_TOLERANCE",
    "calibration_gate",
    "CalibrationResult",
    "cantor_timeset",
    "CantorSpec",
    "DimensionEstimate",
    "estimate_summary_json",
    "estimate_to_csv",
    "filled_square_points",
    "fit_loglog",
    "image_dimension",
    "occupation_dimension",
    "PROXY_NOTE",
    "range_dimension",
    "trace_dimension",
]

from ._subordinator import (
    SubordinatorPath,
    kanter_transform,
    positive_stable_samples,
    sample_subordinator,
    stable_laplace_transform,
    subordinator_to_csv,
)
from ._time_change import (
    MAX_DRIVER_STEPS,
    driving_dt,
    preimage_timeset,
    subordinate_folded,
    subordinate_path,
    subordinate_with_horizon,
    subordinated_step,
)

__all__ = [
    "driving_dt",
    "kanter_transform",
    "MAX_DRIVER_STEPS",
    "positive_stable_samples",
    "preimage_timeset",
    "sample_subordinator",
    "stable_laplace_transform",
    "subordinate_folded",
    "subordinate_path",
    "subordinate_with_horizon",
    "subordinated_step",
    "SubordinatorPath",
    "subordinator_to_csv",
]

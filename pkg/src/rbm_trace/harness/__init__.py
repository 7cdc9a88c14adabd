from ._config import (
    TRY_DOTENV_PATHS,
    ExperimentConfig,
    RuntimeSettings,
    get_dotenv_config,
    load_runtime_settings,
    read_config_file,
    resolve_config,
)
from ._outputs import emit_outputs
from ._presets import (
    PRESETS,
    CatalogEntry,
    Preset,
    analytic_dims,
    build_domain,
    doubling_prediction,
    get_preset,
    occupation_prediction,
    preset_catalog,
    stable_occupation_prediction,
    stable_trace_prediction,
    trace_prediction,
)
from ._runner import (
    Aggregate,
    ExperimentReport,
    PathResult,
    SweepPoint,
    Timing,
    aggregate,
    report_fingerprint,
    run_experiment,
    space_window,
    time_window,
)

__all__ = [
    "Aggregate",
    "aggregate",
    "analytic_dims",
    "build_domain",
    "CatalogEntry",
    "doubling_prediction",
    "emit_outputs",
    "ExperimentConfig",
    "ExperimentReport",
    "get_dotenv_config",
    "get_preset",
    "load_runtime_settings",
    "occupation_prediction",
    "PathResult",
    "Preset",
    "preset_catalog",
    "PRESETS",
    "read_config_file",
    "report_fingerprint",
    "resolve_config",
    "run_experiment",
    "RuntimeSettings",
    "space_window",
    "stable_occupation_prediction",
    "stable_trace_prediction",
    "SweepPoint",
    "time_window",
    "Timing",
    "trace_prediction",
    "TRY_DOTENV_PATHS",
]

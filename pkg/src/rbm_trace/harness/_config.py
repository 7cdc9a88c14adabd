import json
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pydantic
import yaml
from dotenv import dotenv_values

from rbm_trace.common.exc import RbmTraceConfigurationError
from rbm_trace.sim import MAX_DT

TRY_DOTENV_PATHS = [
    ".env",
    "rbm_trace.env",
]

DEFAULT_OUT_DIR = "rbm_trace_output"

EXAMPLE_CONFIG = """{
  "preset": "square-occupation",
  "paths": 32,
  "T": 100.0,
  "dt": 1e-05,
  "eps_factor": 2.0,
  "master_seed": 20240101,
  "domain": {"kind": "square", "side": 10.0},
  "k_min": null,
  "k_max": null,
  "auto_window": true
}"""


def get_dotenv_config(
    try_dotenv_files: List[str] = TRY_DOTENV_PATHS, required: bool = False
) -> Dict[str, Union[str, None]]:
    """Values of the first dotenv file found among ``try_dotenv_files``.

    A missing file only means there are no environment defaults, unless ``required`` is set.

    Raises:
        RbmTraceConfigurationError: ``required`` and none of the files exist.
    """
    dotenv_found_error_msg = ""
    for path in try_dotenv_files:
        if not Path(path).exists():
            dotenv_found_error_msg += f"`.env` file not found: {Path(path).absolute()}.\n"
        else:
            return dict(dotenv_values(path))
    if required:
        raise RbmTraceConfigurationError(dotenv_found_error_msg + "No more acceptable .env paths to try.")
    return {}


class RuntimeSettings(pydantic.BaseModel):
    """Process-level defaults that never change results: pool size, output location, log verbosity."""

    workers: int = pydantic.Field(default_factory=lambda: min(8, os.cpu_count() or 1))
    out_dir: str = DEFAULT_OUT_DIR
    quiet: bool = False

    @pydantic.field_validator("workers")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_workers(cls, v: int, info: pydantic.ValidationInfo) -> int:
        assert v >= 1, "RBM_TRACE_WORKERS must be >= 1"
        return v


def load_runtime_settings(dotenv_file: Optional[str] = None) -> RuntimeSettings:
    """Read ``RBM_TRACE_WORKERS``, ``RBM_TRACE_OUT_DIR`` and ``RBM_TRACE_QUIET``.

    Process environment variables take precedence over the dotenv file. When ``dotenv_file`` is given it must exist.
    """
    if dotenv_file is not None:
        values = get_dotenv_config([dotenv_file], required=True)
    else:
        values = get_dotenv_config()
    merged: Dict[str, Any] = {k: v for k, v in values.items() if v is not None}
    merged.update({k: v for k, v in os.environ.items() if k.startswith("RBM_TRACE_")})

    fields: Dict[str, Any] = {}
    if "RBM_TRACE_WORKERS" in merged:
        fields["workers"] = merged["RBM_TRACE_WORKERS"]
    if "RBM_TRACE_OUT_DIR" in merged:
        fields["out_dir"] = merged["RBM_TRACE_OUT_DIR"]
    if "RBM_TRACE_QUIET" in merged:
        fields["quiet"] = merged["RBM_TRACE_QUIET"] == "True"
    try:
        return RuntimeSettings(**fields)
    except pydantic.ValidationError as e:
        raise RbmTraceConfigurationError(
            f"Invalid rbm-trace environment settings {fields}. Expected e.g.:\n\n"
            "RBM_TRACE_WORKERS=4\nRBM_TRACE_OUT_DIR=rbm_trace_output\nRBM_TRACE_QUIET=False\n"
        ) from e


class ExperimentConfig(pydantic.BaseModel):
    """A fully resolved experiment: preset defaults, then the config file, then command line overrides.

    ``workers`` and ``out_dir`` only affect where and how fast the run happens; they are left out of reports.
    """

    preset: str
    domain: Dict[str, Any] = {}
    paths: int = 32
    T: float = 100.0
    dt: float = 1e-5
    eps_factor: float = 2.0
    s: Optional[float] = None
    dt_sub: Optional[float] = None
    master_seed: int = 0
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    auto_window: bool = True
    min_window: int = 4
    cantor: Optional[Dict[str, float]] = None
    sweep: Optional[List[float]] = None
    start: Optional[List[float]] = None
    workers: int = 1
    out_dir: str = DEFAULT_OUT_DIR

    @pydantic.field_validator("preset")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_preset(cls, v: str, info: pydantic.ValidationInfo) -> str:
        from ._presets import PRESETS  # pylint: disable=import-outside-toplevel

        assert v in PRESETS, f"Preset must be one of: {sorted(PRESETS)}"
        return v

    @pydantic.field_validator("paths", "workers")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_positive_int(cls, v: int, info: pydantic.ValidationInfo) -> int:
        assert v >= 1, f"{info.field_name} must be >= 1"
        return v

    @pydantic.field_validator("dt")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_dt(cls, v: float, info: pydantic.ValidationInfo) -> float:
        assert 0.0 < v <= MAX_DT, f"dt must lie in (0, {MAX_DT}]"
        return v

    @pydantic.field_validator("dt_sub")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_dt_sub(cls, v: Optional[float], info: pydantic.ValidationInfo) -> Optional[float]:
        if v is not None:
            assert v > 0.0, "dt_sub must be positive"
        return v

    @pydantic.field_validator("T", "eps_factor")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_positive(cls, v: float, info: pydantic.ValidationInfo) -> float:
        assert v > 0.0, f"{info.field_name} must be positive"
        return v

    @pydantic.field_validator("s")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_index(cls, v: Optional[float], info: pydantic.ValidationInfo) -> Optional[float]:
        if v is not None:
            assert 0.0 < v < 1.0, "s must lie in (0, 1)"
        return v

    @pydantic.field_validator("master_seed")
    @classmethod
    # pylint: disable-next=unused-argument
    def check_seed(cls, v: int, info: pydantic.ValidationInfo) -> int:
        assert 0 <= v < 2**64, "master_seed must be an unsigned 64-bit integer"
        return v

    @pydantic.model_validator(mode="after")
    def check_window(self) -> "ExperimentConfig":
        if self.k_min is not None and self.k_max is not None:
            assert 0 <= self.k_min < self.k_max, "Expected 0 <= k_min < k_max"
        assert self.min_window >= 2, "min_window must be >= 2"
        if self.dt_sub is not None:
            assert self.dt_sub >= self.dt, "dt_sub must not be finer than dt"
        if self.sweep is not None:
            assert len(self.sweep) >= 2, "A sweep needs at least two settings"
            assert all(w >= 1.0 for w in self.sweep), "Width exponents must be >= 1"
        return self

    def report_fields(self) -> Dict[str, Any]:
        return self.model_dump(exclude={"workers", "out_dir"})


def read_config_file(config_path: str) -> Dict[str, Any]:
    """Load a JSON (or YAML) experiment config file as a plain mapping.

    A ``report.json`` written by a run is accepted too; its ``config`` block is returned.
    """
    if not os.path.exists(config_path):
        raise RbmTraceConfigurationError(f"Experiment config file not found at {os.path.abspath(config_path)}.")
    try:
        with open(config_path, "r", encoding="utf-8") as f:
            text = f.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            # YAML 1.1 reads `1e-05` as a string; JSON is tried first so exponents stay numeric.
            doc = yaml.safe_load(text)
    except (OSError, yaml.YAMLError) as e:
        raise RbmTraceConfigurationError(f"Failed to read experiment config file {config_path}: {e}") from e
    if not isinstance(doc, dict):
        raise RbmTraceConfigurationError(
            f"Experiment config file {config_path} must hold a mapping, like in this example:\n\n{EXAMPLE_CONFIG}\n"
        )
    if "domain_id" in doc and isinstance(doc.get("config"), dict):
        # A `report.json` from an earlier run: replay its resolved config.
        return dict(doc["config"])
    return doc


def resolve_config(
    preset: Optional[str] = None,
    file_values: Optional[Dict[str, Any]] = None,
    overrides: Optional[Dict[str, Any]] = None,
    settings: Optional[RuntimeSettings] = None,
) -> ExperimentConfig:
    """Merge preset defaults, file values and overrides (later wins; ``None`` overrides are ignored).

    Raises:
        RbmTraceConfigurationError: Unknown preset or invalid values.
    """
    from ._presets import PRESETS  # pylint: disable=import-outside-toplevel

    file_values = dict(file_values or {})
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    name = overrides.get("preset", preset if preset is not None else file_values.get("preset"))
    if name is None:
        raise RbmTraceConfigurationError("No preset given; pass --preset or set `preset` in the config file.")
    if name not in PRESETS:
        raise RbmTraceConfigurationError(f"Unknown preset '{name}'. Available presets: {sorted(PRESETS)}.")

    settings = settings if settings is not None else RuntimeSettings()
    values: Dict[str, Any] = {"workers": settings.workers, "out_dir": settings.out_dir}
    values.update(PRESETS[name].defaults)
    for source in (file_values, overrides):
        for k, v in source.items():
            if k == "domain" and isinstance(v, dict):
                values["domain"] = {**values.get("domain", {}), **v}
            else:
                values[k] = v
    values["preset"] = name
    try:
        return ExperimentConfig(**values)
    except pydantic.ValidationError as e:
        raise RbmTraceConfigurationError(
            f"""Invalid experiment config for preset '{name}':
{e}

Ensure that the config is in the correct format, like in this example:

{EXAMPLE_CONFIG}
"""
        ) from e

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import pydantic

from rbm_trace.common.exc import RbmTraceConfigurationError
from rbm_trace.geometry import (
    KOCH_DIMENSION,
    DomainSpec,
    make_corridor_domain,
    make_koch_snowflake,
    make_product,
    make_square,
)

QUANTITIES = ("occupation", "trace", "image", "range", "holder")
COMPARISONS = ("band", "upper", "exploratory")

# Tolerance of a prediction of zero (boundary polar for the subordinated process): the estimate must stay below it.
POLAR_THRESHOLD = 0.1


def occupation_prediction(n: int, d: float) -> float:
    return 1.0 - 0.5 * (n - d)


def trace_prediction(n: int, d: float) -> float:
    return 2.0 + d - n


def stable_occupation_prediction(n: int, d: float, s: float) -> float:
    return max(1.0 - (n - d) / (2.0 * s), 0.0)


def stable_trace_prediction(n: int, d: float, s: float) -> float:
    return max(2.0 * s + d - n, 0.0)


def doubling_prediction(set_dimension: float, n: int = 2) -> float:
    return min(2.0 * set_dimension, float(n))


def analytic_dims(domain: Dict[str, Any]) -> Tuple[int, Optional[float]]:
    """``(n, dim of the boundary)`` of a domain parameter mapping, without building the domain."""
    kind = domain.get("kind", "square")
    if kind == "square":
        return 2, 1.0
    if kind == "snowflake":
        return 2, KOCH_DIMENSION
    if kind == "product":
        planar = domain.get("planar", "snowflake")
        return 3, 1.0 + (KOCH_DIMENSION if planar == "snowflake" else 1.0)
    if kind == "corridor":
        return 2, None
    raise RbmTraceConfigurationError(f"Unknown domain kind '{kind}'; expected square, snowflake, product or corridor.")


def build_domain(domain: Dict[str, Any]) -> DomainSpec:
    """Construct the domain described by a preset's ``domain`` mapping (``kind`` plus constructor parameters)."""
    kind = domain.get("kind", "square")
    if kind == "square":
        return make_square(float(domain.get("side", 1.0)))
    if kind == "snowflake":
        return make_koch_snowflake(int(domain.get("level", 7)), float(domain.get("radius", 1.0)))
    if kind == "product":
        planar_kind = domain.get("planar", "snowflake")
        if planar_kind == "snowflake":
            planar = make_koch_snowflake(int(domain.get("level", 7)), float(domain.get("radius", 1.0)))
        else:
            planar = make_square(float(domain.get("side", 1.0)))
        return make_product(planar, float(domain.get("height", 1.0)))
    if kind == "corridor":
        return make_corridor_domain(int(domain.get("generations", 3)), float(domain.get("width_exponent", 3.0)))
    raise RbmTraceConfigurationError(f"Unknown domain kind '{kind}'; expected square, snowflake, product or corridor.")


def cantor_dimension(cantor: Dict[str, float]) -> float:
    return math.log(cantor.get("m", 2)) / math.log(1.0 / cantor.get("r", 1.0 / 3.0))


@dataclass(frozen=True)
class Preset:
    """A named experiment: what is measured, on which domain, what the theory predicts and how strictly."""

    name: str
    quantity: str
    citation: str
    predict: Callable[[Any], Optional[float]]
    tolerance_below: float
    tolerance_above: float
    comparison: str = "band"
    subordinated: bool = False
    defaults: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        assert self.quantity in QUANTITIES, f"Unknown quantity {self.quantity}"
        assert self.comparison in COMPARISONS, f"Unknown comparison {self.comparison}"

    def tolerance(self, predicted: Optional[float]) -> Tuple[float, float]:
        """``(below, above)``; a zero prediction in a subordinated preset is the polar regime."""
        if self.subordinated and predicted == 0.0:
            return 0.0, POLAR_THRESHOLD
        return self.tolerance_below, self.tolerance_above

    def passes(self, mean: float, predicted: Optional[float]) -> Optional[bool]:
        if self.comparison == "exploratory" or predicted is None:
            return None
        below, above = self.tolerance(predicted)
        if self.comparison == "upper":
            return bool(mean <= predicted + above)
        return bool(predicted - below <= mean <= predicted + above)


def _dims(cfg: Any) -> Tuple[int, float]:
    n, d = analytic_dims(cfg.domain)
    assert d is not None
    return n, d


_SQUARE = {"kind": "square", "side": 1.0}
# Time-scale and image fits need room between the fattening width and the domain size (or the path's spread).
_WIDE_SQUARE = {"kind": "square", "side": 10.0}
_SUB_SQUARE = {"kind": "square", "side": 4.0}
_SNOWFLAKE = {"kind": "snowflake", "level": 7}
_WIDE_SNOWFLAKE = {"kind": "snowflake", "level": 7, "radius": 5.0}
# Tall enough that the flat faces are out of reach from the mid-height start.
_PRODUCT = {"kind": "product", "planar": "snowflake", "level": 7, "radius": 5.0, "height": 80.0}
_BUDGET_2D = {"paths": 32, "T": 100.0, "dt": 1e-5}
_BUDGET_3D = {"paths": 16, "T": 50.0, "dt": 1e-5}
_BUDGET_SUB = {"paths": 32, "T": 20.0, "dt": 1e-5, "dt_sub": 1e-5, "s": 0.9}

_PRESET_LIST: List[Preset] = [
    Preset(
        name="square-occupation",
        quantity="occupation",
        citation="Lipschitz boundary: occupation time of the boundary has dimension 1/2",
        predict=lambda cfg: occupation_prediction(*_dims(cfg)),
        tolerance_below=0.15,
        tolerance_above=0.05,
        defaults={"domain": _WIDE_SQUARE, **_BUDGET_2D},
    ),
    Preset(
        name="square-trace",
        quantity="trace",
        citation="Lipschitz boundary: boundary trace has dimension 1",
        predict=lambda cfg: trace_prediction(*_dims(cfg)),
        tolerance_below=0.10,
        tolerance_above=0.10,
        defaults={"domain": _SQUARE, **_BUDGET_2D},
    ),
    Preset(
        name="snowflake-occupation",
        quantity="occupation",
        citation="Koch snowflake: occupation time dimension (1/2) log 4 / log 3",
        predict=lambda cfg: occupation_prediction(*_dims(cfg)),
        tolerance_below=0.15,
        tolerance_above=0.05,
        defaults={"domain": _WIDE_SNOWFLAKE, **_BUDGET_2D},
    ),
    Preset(
        name="snowflake-trace",
        quantity="trace",
        citation="Koch snowflake: boundary trace dimension log 4 / log 3",
        predict=lambda cfg: trace_prediction(*_dims(cfg)),
        tolerance_below=0.15,
        tolerance_above=0.05,
        defaults={"domain": _SNOWFLAKE, **_BUDGET_2D},
    ),
    Preset(
        name="product-occupation",
        quantity="occupation",
        citation="Snowflake x (0, h): occupation time dimension 1 - (3 - dim boundary) / 2 = (1/2) log 4 / log 3",
        predict=lambda cfg: occupation_prediction(*_dims(cfg)),
        tolerance_below=0.15,
        tolerance_above=0.15,
        defaults={"domain": _PRODUCT, **_BUDGET_3D},
    ),
    Preset(
        name="product-trace",
        quantity="trace",
        citation="Snowflake x (0, h): boundary trace dimension 2 + dim boundary - 3 = log 4 / log 3",
        predict=lambda cfg: trace_prediction(*_dims(cfg)),
        tolerance_below=0.15,
        tolerance_above=0.15,
        defaults={"domain": _PRODUCT, **_BUDGET_3D},
    ),
    Preset(
        name="doubling-cantor",
        quantity="image",
        citation="Uniform dimension doubling: dim X(E) = 2 dim E for every time set E",
        predict=lambda cfg: doubling_prediction(cantor_dimension(cfg.cantor or {}), _dims(cfg)[0]),
        tolerance_below=0.15,
        tolerance_above=0.15,
        defaults={
            "domain": _WIDE_SQUARE,
            "paths": 32,
            "T": 10.0,
            "dt": 1e-5,
            "cantor": {"m": 2, "r": 1.0 / 3.0, "depth": 10},
        },
    ),
    Preset(
        name="doubling-full",
        quantity="image",
        citation="Uniform dimension doubling on E = [0, T]: the planar range has dimension 2",
        predict=lambda cfg: doubling_prediction(1.0, _dims(cfg)[0]),
        tolerance_below=0.10,
        tolerance_above=0.10,
        defaults={"domain": _SQUARE, "paths": 32, "T": 10.0, "dt": 1e-5},
    ),
    Preset(
        name="subordinated-occupation",
        quantity="occupation",
        citation="Stable-like process of index 2s: occupation dimension max{1 - (n - dim boundary) / (2s), 0}",
        predict=lambda cfg: stable_occupation_prediction(*_dims(cfg), cfg.s),
        tolerance_below=0.15,
        tolerance_above=0.15,
        subordinated=True,
        defaults={"domain": _SUB_SQUARE, **_BUDGET_SUB},
    ),
    Preset(
        name="subordinated-trace",
        quantity="trace",
        citation="Stable-like process of index 2s: boundary trace dimension max{2s + dim boundary - n, 0}",
        predict=lambda cfg: stable_trace_prediction(*_dims(cfg), cfg.s),
        tolerance_below=0.15,
        tolerance_above=0.15,
        subordinated=True,
        defaults={"domain": _SUB_SQUARE, **_BUDGET_SUB},
    ),
    Preset(
        name="corridor-trace",
        quantity="trace",
        citation="Squares joined by shrinking corridors: trace dimension expected near 1, exploratory trend only",
        predict=lambda cfg: 1.0,
        tolerance_below=0.0,
        tolerance_above=0.0,
        comparison="exploratory",
        defaults={
            "domain": {"kind": "corridor", "generations": 3, "width_exponent": 1.0},
            "paths": 8,
            "T": 20.0,
            "dt": 1e-5,
            "sweep": [1.0, 1.5, 2.0],
        },
    ),
    Preset(
        name="range-cubes",
        quantity="range",
        citation="Cube-hit counts: E M(a, t) <= c a^-2, so the range slope is at most 2",
        predict=lambda cfg: 2.0,
        tolerance_below=0.0,
        tolerance_above=0.15,
        comparison="upper",
        defaults={"domain": _SQUARE, "paths": 4, "T": 10.0, "dt": 1e-5, "k_min": 3, "k_max": 8, "auto_window": False},
    ),
    Preset(
        name="holder-regularity",
        quantity="holder",
        citation="Paths are alpha-Hoelder for every alpha < 1/2",
        predict=lambda cfg: 0.5,
        tolerance_below=0.10,
        tolerance_above=0.05,
        defaults={"domain": _SQUARE, "paths": 4, "T": 1.0, "dt": 1e-5},
    ),
]

PRESETS: Dict[str, Preset] = {p.name: p for p in _PRESET_LIST}


class CatalogEntry(pydantic.BaseModel):
    name: str
    quantity: str
    predicted: Optional[float]
    tolerance_below: float
    tolerance_above: float
    comparison: str
    citation: str


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError as e:
        raise RbmTraceConfigurationError(f"Unknown preset '{name}'. Available presets: {sorted(PRESETS)}.") from e


def preset_catalog() -> List[CatalogEntry]:
    """Every preset with its prediction at default parameters and the statement it tests."""
    from ._config import resolve_config  # pylint: disable=import-outside-toplevel

    entries = []
    for preset in _PRESET_LIST:
        predicted = preset.predict(resolve_config(preset.name))
        below, above = preset.tolerance(predicted)
        entries.append(
            CatalogEntry(
                name=preset.name,
                quantity=preset.quantity,
                predicted=predicted,
                tolerance_below=below,
                tolerance_above=above,
                comparison=preset.comparison,
                citation=preset.citation,
            )
        )
    return entries

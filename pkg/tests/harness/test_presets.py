import math

import pytest

from rbm_trace.common.exc import RbmTraceConfigurationError
from rbm_trace.geometry import KOCH_DIMENSION
from rbm_trace.harness import (
    PRESETS,
    analytic_dims,
    build_domain,
    doubling_prediction,
    get_preset,
    occupation_prediction,
    preset_catalog,
    resolve_config,
    stable_occupation_prediction,
    stable_trace_prediction,
    trace_prediction,
)

# Tests for the prediction formulas


def test_predictions():
    assert occupation_prediction(2, 1.0) == 0.5
    assert trace_prediction(2, 1.0) == 1.0
    assert occupation_prediction(2, KOCH_DIMENSION) == pytest.approx(0.5 * KOCH_DIMENSION)
    assert trace_prediction(3, 1.0 + KOCH_DIMENSION) == pytest.approx(KOCH_DIMENSION)
    assert stable_occupation_prediction(2, 1.0, 0.9) == pytest.approx(1.0 - 1.0 / 1.8)
    assert stable_occupation_prediction(2, 1.0, 0.4) == 0.0
    assert stable_trace_prediction(2, KOCH_DIMENSION, 0.9) == pytest.approx(1.0619, abs=1e-4)
    assert stable_trace_prediction(2, 1.0, 0.3) == 0.0
    assert doubling_prediction(math.log(2.0) / math.log(3.0)) == pytest.approx(1.2619, abs=1e-4)
    assert doubling_prediction(1.0) == 2.0
    assert doubling_prediction(1.0, n=3) == 2.0


# Tests for the catalog


def test_catalog_lists_every_preset():
    catalog = preset_catalog()
    assert [e.name for e in catalog] == list(PRESETS)
    assert len(catalog) == 13
    by_name = {e.name: e for e in catalog}
    assert by_name["square-occupation"].predicted == 0.5
    assert by_name["snowflake-trace"].predicted == pytest.approx(KOCH_DIMENSION)
    assert by_name["product-trace"].predicted == pytest.approx(KOCH_DIMENSION)
    assert by_name["product-occupation"].predicted == pytest.approx(0.5 * KOCH_DIMENSION)
    assert by_name["doubling-cantor"].predicted == pytest.approx(1.2619, abs=1e-4)
    assert by_name["doubling-full"].predicted == 2.0
    assert by_name["subordinated-trace"].predicted == pytest.approx(0.8)
    assert by_name["range-cubes"].comparison == "upper"
    assert by_name["corridor-trace"].comparison == "exploratory"
    assert all(e.citation for e in catalog)


def test_subordinated_trace_on_snowflake():
    cfg = resolve_config("subordinated-trace", overrides={"domain": {"kind": "snowflake", "level": 2}, "s": 0.9})
    assert get_preset(cfg.preset).predict(cfg) == pytest.approx(1.0619, abs=1e-4)


def test_polar_regime():
    cfg = resolve_config("subordinated-occupation", overrides={"s": 0.4})
    preset = get_preset(cfg.preset)
    predicted = preset.predict(cfg)
    assert predicted == 0.0
    assert preset.tolerance(predicted) == (0.0, 0.1)
    assert preset.passes(0.05, predicted) is True
    assert preset.passes(0.2, predicted) is False


def test_band_comparison():
    preset = get_preset("square-occupation")
    assert preset.tolerance(0.5) == (0.15, 0.05)
    assert preset.passes(0.45, 0.5) is True
    assert preset.passes(0.36, 0.5) is True
    assert preset.passes(0.3, 0.5) is False
    assert preset.passes(0.56, 0.5) is False


def test_upper_and_exploratory_comparisons():
    upper = get_preset("range-cubes")
    assert upper.passes(2.1, 2.0) is True
    assert upper.passes(0.5, 2.0) is True
    assert upper.passes(2.2, 2.0) is False
    assert get_preset("corridor-trace").passes(0.7, 1.0) is None


def test_get_preset_unknown():
    with pytest.raises(RbmTraceConfigurationError, match="Available presets"):
        get_preset("unknown")


# Tests for domain construction


def test_analytic_dims():
    assert analytic_dims({"kind": "square"}) == (2, 1.0)
    assert analytic_dims({"kind": "snowflake", "level": 3}) == (2, KOCH_DIMENSION)
    assert analytic_dims({"kind": "product", "planar": "square"}) == (3, 2.0)
    assert analytic_dims({"kind": "corridor"}) == (2, None)
    with pytest.raises(RbmTraceConfigurationError):
        analytic_dims({"kind": "disc"})


def test_build_domain():
    assert build_domain({"kind": "square", "side": 2.0}).parameters == {"side": 2.0}
    assert build_domain({"kind": "snowflake", "level": 2}).n_edges == 48
    product = build_domain({"kind": "product", "planar": "square", "height": 0.5})
    assert product.ambient_dim == 3
    assert product.interval == (0.0, 0.5)
    corridor = build_domain({"kind": "corridor", "generations": 1, "width_exponent": 2.0})
    assert corridor.parameters["width_exponent"] == 2.0
    with pytest.raises(RbmTraceConfigurationError):
        build_domain({"kind": "disc"})


def test_build_scaled_snowflakes():
    flake = build_domain({"kind": "snowflake", "level": 2, "radius": 5.0})
    assert flake.parameters == {"level": 2, "radius": 5.0}
    assert flake.bounding_box[1, 1] == pytest.approx(5.0)
    product = build_domain({"kind": "product", "planar": "snowflake", "level": 1, "radius": 5.0, "height": 80.0})
    assert product.planar_factor.parameters["radius"] == 5.0
    assert product.interval == (0.0, 80.0)


def test_default_domains():
    sides = {name: resolve_config(name).domain for name in PRESETS}
    assert sides["square-occupation"]["side"] == 10.0
    assert sides["doubling-cantor"]["side"] == 10.0
    assert sides["subordinated-occupation"]["side"] == 4.0
    assert sides["snowflake-occupation"]["radius"] == 5.0
    assert sides["product-trace"]["height"] == 80.0
    assert resolve_config("subordinated-occupation").dt_sub == 1e-5

import math

import numpy as np
import pytest

from rbm_trace.common.exc import DomainError, HorizonError
from rbm_trace.fracdim import CantorSpec, cantor_timeset, occupation_dimension
from rbm_trace.geometry import make_product, make_square
from rbm_trace.harness import RuntimeSettings, resolve_config, run_experiment
from rbm_trace.sim import MAX_DT, TimeSet, fold_1d, free_path, simulate_rbm
from rbm_trace.subordination import (
    MAX_DRIVER_STEPS,
    SubordinatorPath,
    driving_dt,
    preimage_timeset,
    sample_subordinator,
    subordinate_folded,
    subordinate_path,
    subordinate_with_horizon,
    subordinated_step,
)


def test_identity_time_change_returns_the_path(unit_square):
    x = simulate_rbm(unit_square, (0.5, 0.5), 1.0, 1e-3, seed=3)
    z = subordinate_path(x, SubordinatorPath.identity(1.0, 1e-3))
    np.testing.assert_array_equal(z.positions, x.positions)
    assert z.kind == "rbm"


def test_frozen_clock_gives_constant_path(unit_square):
    x = simulate_rbm(unit_square, (0.3, 0.6), 1.0, 1e-3, seed=3)
    xi = SubordinatorPath(s=0.5, dt=0.1, T=1.0, values=np.zeros(11), seed=0)
    z = subordinate_path(x, xi)
    assert z.kind == "subordinated"
    np.testing.assert_array_equal(z.positions, np.tile([0.3, 0.6], (11, 1)))


def test_time_change_reads_the_last_grid_point(unit_square):
    x = simulate_rbm(unit_square, (0.5, 0.5), 1.0, 1e-3, seed=4)
    xi = SubordinatorPath(s=0.5, dt=0.1, T=0.2, values=np.array([0.0, 0.0105, 0.5]), seed=0)
    z = subordinate_path(x, xi)
    np.testing.assert_array_equal(z.positions, x.positions[[0, 10, 500]])


def test_time_change_beyond_horizon(unit_square):
    x = simulate_rbm(unit_square, (0.5, 0.5), 0.1, 1e-3, seed=4)
    xi = SubordinatorPath(s=0.5, dt=0.1, T=0.1, values=np.array([0.0, 0.5]), seed=0)
    with pytest.raises(HorizonError, match="extend the path"):
        subordinate_path(x, xi)


def test_preimage():
    xi = SubordinatorPath(s=0.5, dt=0.1, T=0.3, values=np.array([0.0, 0.1, 0.25, 0.6]), seed=0)
    e = TimeSet(dt=0.1, T=0.7, flags=np.array([1, 0, 1, 0, 0, 0, 1], dtype=bool))
    pre = preimage_timeset(xi, e)
    assert pre.T == 0.3 and pre.dt == 0.1
    np.testing.assert_array_equal(pre.flags, [True, False, True])


def test_preimage_of_full_and_empty_sets():
    xi = sample_subordinator(0.7, 1.0, 1e-3, seed=2)
    horizon = xi.maximum + 1.0
    assert preimage_timeset(xi, TimeSet.full(horizon, 1e-3)).count == 1000
    assert preimage_timeset(xi, TimeSet.empty(horizon, 1e-3)).is_empty
    with pytest.raises(HorizonError):
        preimage_timeset(xi, TimeSet.full(xi.maximum / 2.0, 1e-3))


def test_subordinate_with_horizon(unit_square):
    xi = sample_subordinator(0.8, 0.5, 1e-3, seed=6)
    z, x = subordinate_with_horizon(unit_square, (0.5, 0.5), xi, 1e-4, seed=7)
    assert x.T >= xi.maximum
    assert z.positions.shape == (xi.values.shape[0], 2)
    assert z.dt == xi.dt
    np.testing.assert_array_equal(z.positions[0], [0.5, 0.5])


def test_subordinate_with_horizon_cap(unit_square):
    xi = SubordinatorPath(s=0.5, dt=0.1, T=0.1, values=np.array([0.0, 5.0]), seed=0)
    with pytest.raises(HorizonError, match="cap"):
        subordinate_with_horizon(unit_square, (0.5, 0.5), xi, 1e-3, seed=0, max_horizon=1.0)


def test_subordinate_with_horizon_extends_once(unit_square):
    # A single large jump forces an extension past the initial 1.5 * T ** (1 / s) horizon.
    xi = SubordinatorPath(s=0.5, dt=0.1, T=0.1, values=np.array([0.0, 0.2]), seed=0)
    z, x = subordinate_with_horizon(unit_square, (0.5, 0.5), xi, 1e-3, seed=1)
    assert x.T >= 0.2
    direct = simulate_rbm(unit_square, (0.5, 0.5), x.T, 1e-3, seed=1)
    np.testing.assert_array_equal(x.positions, direct.positions)
    np.testing.assert_array_equal(z.positions[1], x.positions[200])


def test_subordinate_with_horizon_step_budget(unit_square):
    xi = SubordinatorPath(s=0.5, dt=0.1, T=0.1, values=np.array([0.0, 0.5]), seed=0)
    with pytest.raises(HorizonError, match="step budget"):
        subordinate_with_horizon(unit_square, (0.5, 0.5), xi, 1e-3, seed=0, max_steps=100)
    z, x = subordinate_with_horizon(unit_square, (0.5, 0.5), xi, 1e-3, seed=0, max_steps=1000)
    assert x.n_steps <= 1000
    np.testing.assert_array_equal(z.positions[1], x.positions[500])


# Tests for driving_dt and subordinated_step


def test_driving_dt():
    assert driving_dt(1.0, 0.9, 1e-5) == 1e-5
    # 1.5 * 20 ** 2 is beyond a quarter of MAX_DRIVER_STEPS steps of 1e-5.
    coarse = driving_dt(20.0, 0.5, 1e-5)
    assert 1e-5 < coarse < MAX_DT
    assert coarse == pytest.approx(1.5 * 20.0**2 / (MAX_DRIVER_STEPS // 4))
    assert driving_dt(1e3, 0.3, 1e-5) == MAX_DT


def test_subordinated_step():
    assert subordinated_step(0.5, 1e-4) == pytest.approx(1e-4)
    assert subordinated_step(0.9, 1e-5) == pytest.approx(1e-5 ** (1.0 / 1.8))
    assert subordinated_step(0.9, 1e-5, dt_x=1e-4) == pytest.approx(1e-2)


# Tests for subordinate_folded


def test_folded_time_change_of_the_identity_clock(unit_square):
    xi = SubordinatorPath.identity(1.0, 1e-3)
    z = subordinate_folded(unit_square, (0.5, 0.5), xi, seed=8)
    free = free_path((0.5, 0.5), 1.0, 1e-3, seed=8)
    np.testing.assert_allclose(z.positions, fold_1d(free.positions, 0.0, 1.0), rtol=0.0, atol=1e-12)
    assert z.kind == "rbm"


def test_folded_time_change_stays_in_the_box(unit_square):
    xi = sample_subordinator(0.4, 2.0, 1e-3, seed=5)
    # Typical xi(2) is about 2 ** 2.5; the driving path is never simulated.
    z = subordinate_folded(make_product(unit_square, 3.0), (0.5, 0.5, 1.5), xi, seed=6)
    assert z.positions.shape == (2001, 3)
    assert z.kind == "subordinated"
    np.testing.assert_array_equal(z.positions[0], [0.5, 0.5, 1.5])
    assert np.all((z.positions >= 0.0) & (z.positions[:, :2] <= 1.0))
    assert np.all(z.positions[:, 2] <= 3.0)
    assert z.dt == xi.dt and z.T == xi.T


def test_folded_time_change_of_a_frozen_clock(unit_square):
    xi = SubordinatorPath(s=0.5, dt=0.1, T=1.0, values=np.zeros(11), seed=0)
    z = subordinate_folded(unit_square, (0.2, 0.7), xi, seed=1)
    np.testing.assert_array_equal(z.positions, np.tile([0.2, 0.7], (11, 1)))


def test_folded_time_change_needs_a_box(snowflake3, unit_square):
    xi = SubordinatorPath.identity(0.1, 1e-2)
    with pytest.raises(DomainError, match="axis-parallel box"):
        subordinate_folded(snowflake3, (0.0, 0.0), xi, seed=0)
    with pytest.raises(DomainError, match="coordinates"):
        subordinate_folded(unit_square, (0.5, 0.5, 0.5), xi, seed=0)


def test_folded_increments_have_the_subordinator_variance():
    xi = sample_subordinator(0.9, 1.0, 1e-4, seed=9)
    box = make_product(make_square(100.0), 100.0)
    z = subordinate_folded(box, (50.0, 50.0, 50.0), xi, seed=10)
    # Far from every wall the normalized increments are standard normal.
    assert np.all(np.abs(z.positions - 50.0) < 50.0)
    steps = np.diff(z.positions, axis=0) / np.sqrt(np.diff(xi.values))[:, None]
    assert np.mean(steps) == pytest.approx(0.0, abs=0.03)
    assert np.std(steps) == pytest.approx(1.0, abs=0.03)


# Tests for the time-changed sets


def test_preimage_of_cantor_times():
    s, dim = 0.8, math.log(2.0) / math.log(3.0)
    estimates = []
    for seed in range(3):
        xi = sample_subordinator(s, 1.0, 1e-4, seed=seed)
        horizon = 3.0 ** math.ceil(math.log(max(xi.maximum, 1.0), 3.0) + 1e-9)
        e = cantor_timeset(CantorSpec(m=2, r=1.0 / 3.0, depth=10, T=horizon), horizon * 1e-5)
        pre = preimage_timeset(xi, e)
        assert not pre.is_empty
        estimates.append(occupation_dimension(pre, 2, 11, auto_window=False).slope)
    assert np.mean(estimates) >= s + dim - 1.0 - 0.1


@pytest.mark.slow
def test_time_changed_occupation_on_the_snowflake():
    cfg = resolve_config(
        "subordinated-occupation",
        overrides={
            "domain": {"kind": "snowflake", "level": 6, "radius": 5.0},
            "s": 0.9,
            "T": 20.0,
            "dt": 1e-5,
            "dt_sub": 1e-5,
            "paths": 4,
            "master_seed": 3,
        },
        settings=RuntimeSettings(workers=1),
    )
    report = run_experiment(cfg)
    expected = 1.0 - (2.0 - math.log(4.0) / math.log(3.0)) / 1.8
    assert report.predicted == pytest.approx(expected)
    assert report.failures == 0
    assert report.aggregate.mean == pytest.approx(expected, abs=0.15)

import math

import numpy as np
import pytest
from scipy import stats

from rbm_trace.common.exc import DomainError, OutsideDomainError, ResolutionError
from rbm_trace.geometry import boundary_distances, contains, in_closure, interior_point, make_koch_snowflake
from rbm_trace.sim import MAX_DT, extend_rbm, fold_1d, free_path, simulate_rbm

# Tests for fold_1d


@pytest.mark.parametrize("b, expected", [(1.2, 0.8), (-0.3, 0.3), (2.5, 0.5), (0.4, 0.4), (1.0, 1.0)])
def test_fold_1d_scalar(b, expected):
    assert fold_1d(b, 0.0, 1.0) == pytest.approx(expected)


def test_fold_1d_array_and_shifted_interval():
    np.testing.assert_allclose(fold_1d(np.array([1.2, -0.3, 2.5]), 0.0, 1.0), [0.8, 0.3, 0.5])
    assert fold_1d(3.5, 1.0, 3.0) == pytest.approx(2.5)


@pytest.mark.parametrize("a0, a1", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
def test_fold_1d_degenerate_interval(a0, a1):
    with pytest.raises(DomainError):
        fold_1d(0.5, a0, a1)


# Tests for simulate_rbm


def test_path_shape_and_start(unit_square):
    path = simulate_rbm(unit_square, (0.5, 0.5), 1.0, 1e-3, seed=11)
    assert path.positions.shape == (1001, 2)
    assert path.n_steps == 1000
    np.testing.assert_array_equal(path.positions[0], [0.5, 0.5])
    assert path.domain is unit_square
    assert not path.positions.flags.writeable


def test_path_is_a_function_of_the_seed(unit_square):
    a = simulate_rbm(unit_square, (0.5, 0.5), 0.5, 1e-3, seed=5)
    b = simulate_rbm(unit_square, (0.5, 0.5), 0.5, 1e-3, seed=5)
    c = simulate_rbm(unit_square, (0.5, 0.5), 0.5, 1e-3, seed=6)
    np.testing.assert_array_equal(a.positions, b.positions)
    assert not np.array_equal(a.positions, c.positions)


def test_path_stays_in_closure(snowflake3):
    path = simulate_rbm(snowflake3, interior_point(snowflake3), 2.0, 1e-3, seed=3)
    assert all(in_closure(snowflake3, p) for p in path.positions)


def test_product_path_stays_in_slab(square_slab):
    path = simulate_rbm(square_slab, (0.5, 0.5, 0.5), 2.0, 1e-3, seed=3)
    assert np.all(path.positions >= -1e-12) and np.all(path.positions <= 1.0 + 1e-12)


def test_invalid_start_and_grid(unit_square):
    with pytest.raises(OutsideDomainError):
        simulate_rbm(unit_square, (1.5, 0.5), 1.0, 1e-3, seed=0)
    with pytest.raises(DomainError):
        simulate_rbm(unit_square, (0.5, 0.5, 0.5), 1.0, 1e-3, seed=0)
    with pytest.raises(ResolutionError):
        simulate_rbm(unit_square, (0.5, 0.5), 1.0, 2 * MAX_DT, seed=0)
    with pytest.raises(ResolutionError):
        simulate_rbm(unit_square, (0.5, 0.5), 0.0, 1e-3, seed=0)


def test_interior_increments_have_brownian_variance(unit_square):
    dt = 1e-4
    path = simulate_rbm(unit_square, (0.5, 0.5), 2.0, dt, seed=21)
    dist, _ = boundary_distances(unit_square, path.positions[:-1])
    steps = np.diff(path.positions, axis=0)[dist > 4.0 * math.sqrt(dt)]
    sq = np.sum(steps**2, axis=1) / dt
    # |g|^2 for a planar standard normal has mean 2 and variance 4.
    assert abs(sq.mean() - 2.0) < 4.0 * 2.0 / math.sqrt(sq.shape[0])


def test_extend_is_bitwise_identical(unit_square):
    short = simulate_rbm(unit_square, (0.3, 0.7), 0.5, 1e-4, seed=9)
    extended = extend_rbm(unit_square, short, 1.0)
    direct = simulate_rbm(unit_square, (0.3, 0.7), 1.0, 1e-4, seed=9)
    np.testing.assert_array_equal(extended.positions, direct.positions)
    assert extended.T == 1.0

    with pytest.raises(ResolutionError):
        extend_rbm(unit_square, short, 0.25)
    with pytest.raises(DomainError):
        extend_rbm(make_koch_snowflake(1), short, 1.0)


def test_free_path_coincides_while_interior(unit_square):
    dt = 1e-4
    rbm = simulate_rbm(unit_square, (0.5, 0.5), 0.5, dt, seed=13)
    free = free_path((0.5, 0.5), 0.5, dt, seed=13)
    assert free.kind == "free"
    assert free.domain_id == "free"
    inside = np.array([contains(unit_square, p) for p in free.positions])
    first_exit = int(np.argmin(inside)) if not inside.all() else inside.shape[0]
    assert first_exit > 1
    np.testing.assert_allclose(rbm.positions[:first_exit], free.positions[:first_exit], rtol=0.0, atol=1e-12)


@pytest.mark.slow
def test_long_run_occupation_is_uniform(unit_square):
    hist = np.zeros((10, 10))
    for seed in range(16):
        path = simulate_rbm(unit_square, (0.5, 0.5), 200.0, 1e-3, seed=seed)
        h, _, _ = np.histogram2d(path.positions[:, 0], path.positions[:, 1], bins=10, range=[[0, 1], [0, 1]])
        hist += h / h.sum()
    hist /= 16
    assert np.max(np.abs(hist - 0.01)) < 0.005


def _rejection_path(x0, T, dt, seed):
    rng = np.random.default_rng(seed)
    n = int(round(T / dt))
    out = np.empty((n + 1, 2))
    out[0] = x0
    sqrt_dt = math.sqrt(dt)
    for k in range(n):
        while True:
            prop = out[k] + sqrt_dt * rng.standard_normal(2)
            if 0.0 < prop[0] < 1.0 and 0.0 < prop[1] < 1.0:
                out[k + 1] = prop
                break
    return out


@pytest.mark.slow
def test_reflection_agrees_with_rejection_resampling(unit_square):
    bins = dict(bins=10, range=[[0, 1], [0, 1]])
    ours = np.zeros((10, 10))
    theirs = np.zeros((10, 10))
    for seed in range(8):
        a = simulate_rbm(unit_square, (0.5, 0.5), 50.0, 1e-4, seed=seed).positions
        b = _rejection_path((0.5, 0.5), 50.0, 1e-4, seed)
        ours += np.histogram2d(a[:, 0], a[:, 1], **bins)[0] / a.shape[0]
        theirs += np.histogram2d(b[:, 0], b[:, 1], **bins)[0] / b.shape[0]
    assert np.max(np.abs(ours - theirs)) / 8 < 0.01


def _folded_step_cdf(z, u, sigma):
    """``P(fold(z + sigma N) <= u)`` on ``[0, 1]``: the preimage of ``[0, u]`` is the union of ``[2m - u, 2m + u]``."""
    return sum(stats.norm.cdf((2 * m + u - z) / sigma) - stats.norm.cdf((2 * m - u - z) / sigma) for m in (-1, 0, 1))


@pytest.mark.slow
def test_vertical_coordinate_is_a_folded_walk(square_slab):
    dt = 1e-4
    z = simulate_rbm(square_slab, (0.5, 0.5, 0.5), 100.0, dt, seed=13).positions[:, 2]
    # Each step should be distributed as fold_1d(z + sqrt(dt) N); the transformed steps are then uniform.
    u = _folded_step_cdf(z[:-1], z[1:], math.sqrt(dt))
    assert stats.kstest(u, "uniform").statistic < 0.02
    assert np.all((z >= 0.0) & (z <= 1.0))

import math

import numpy as np
import pytest

from rbm_trace.common.exc import DomainError
from rbm_trace.geometry import domain_id
from rbm_trace.sim import (
    PathSample,
    boundary_hit_times,
    default_eps,
    fold_1d,
    free_path,
    simulate_rbm,
    trace_points,
)


def _handmade(domain, positions, dt):
    positions = np.array(positions, dtype=np.float64)
    return PathSample(
        dt=dt,
        T=dt * (positions.shape[0] - 1),
        positions=positions,
        seed=0,
        domain_id=domain_id(domain),
        domain=domain,
    )


def test_default_eps():
    assert default_eps(1e-4) == pytest.approx(0.02)
    assert default_eps(1e-6, 3.0) == pytest.approx(3e-3)


def test_hit_times_use_left_endpoints(unit_square):
    path = _handmade(unit_square, [[0.5, 0.5], [0.5, 0.01], [0.5, 0.5]], dt=0.1)
    ts = boundary_hit_times(path, 0.05)
    assert ts.n_cells == 2
    np.testing.assert_array_equal(ts.flags, [False, True])


def test_trace_points_are_projections(unit_square):
    path = _handmade(unit_square, [[0.5, 0.5], [0.5, 0.01], [0.98, 0.4]], dt=0.1)
    pts = trace_points(path, 0.05)
    np.testing.assert_allclose(pts, [[0.5, 0.0], [1.0, 0.4]])


def test_nothing_near_the_boundary(unit_square):
    path = _handmade(unit_square, [[0.5, 0.5], [0.45, 0.55]], dt=0.1)
    assert boundary_hit_times(path, 0.05).is_empty
    assert trace_points(path, 0.05).shape == (0, 2)


def test_trace_points_in_product(square_slab):
    path = _handmade(square_slab, [[0.5, 0.5, 0.99], [0.5, 0.5, 0.5]], dt=0.1)
    np.testing.assert_allclose(trace_points(path, 0.05), [[0.5, 0.5, 1.0]])


def test_simulated_hits_match_distances(unit_square):
    dt = 1e-4
    path = simulate_rbm(unit_square, (0.5, 0.5), 1.0, dt, seed=4)
    eps = default_eps(dt)
    ts = boundary_hit_times(path, eps)
    x = path.positions[: ts.n_cells]
    d = np.minimum(np.minimum(x[:, 0], 1.0 - x[:, 0]), np.minimum(x[:, 1], 1.0 - x[:, 1]))
    np.testing.assert_array_equal(ts.flags, d <= eps)

    y = path.positions
    d_all = np.minimum(np.minimum(y[:, 0], 1.0 - y[:, 0]), np.minimum(y[:, 1], 1.0 - y[:, 1]))
    assert trace_points(path, eps).shape[0] == int(np.count_nonzero(d_all <= eps))


@pytest.mark.parametrize("eps", [0.0, -1.0, math.nan])
def test_eps_must_be_positive(unit_square, eps):
    path = _handmade(unit_square, [[0.5, 0.5], [0.5, 0.5]], dt=0.1)
    with pytest.raises(DomainError, match="eps"):
        boundary_hit_times(path, eps)
    with pytest.raises(DomainError, match="eps"):
        trace_points(path, eps)


def test_path_without_domain_needs_one(unit_square):
    path = PathSample(dt=0.1, T=0.1, positions=np.array([[0.5, 0.5], [0.5, 0.5]]), seed=0, domain_id="free")
    with pytest.raises(DomainError, match="no domain"):
        boundary_hit_times(path, 0.1)
    assert boundary_hit_times(path, 0.1, domain=unit_square).is_empty


def test_marked_cells_scale_like_inverse_root_dt(unit_square):
    # One Brownian path read on nested grids and folded into [0, 1]: exact reflection in the first coordinate.
    fine = free_path((0.5,), 4.0, 1e-5, seed=12)
    dts = np.array([1e-3, 1e-4, 1e-5])
    counts = []
    for dt in dts:
        x = fold_1d(fine.positions[:: int(round(dt / 1e-5)), 0], 0.0, 1.0)
        path = _handmade(unit_square, np.column_stack([x, np.full_like(x, 0.5)]), dt)
        counts.append(boundary_hit_times(path, default_eps(dt)).count)
    slope = np.polyfit(np.log(1.0 / dts), np.log(counts), 1)[0]
    assert slope == pytest.approx(0.5, abs=0.1)


@pytest.mark.slow
def test_trace_points_cover_every_edge(unit_square):
    dt = 1e-3
    pts = np.vstack(
        [trace_points(simulate_rbm(unit_square, (0.5, 0.5), 200.0, dt, seed=s), default_eps(dt)) for s in range(4)]
    )
    on_edge = [
        np.isclose(pts[:, 0], 0.0, atol=1e-12),
        np.isclose(pts[:, 0], 1.0, atol=1e-12),
        np.isclose(pts[:, 1], 0.0, atol=1e-12),
        np.isclose(pts[:, 1], 1.0, atol=1e-12),
    ]
    assert all(np.mean(edge) >= 0.01 for edge in on_edge)

import numpy as np
import pytest

from rbm_trace.common.exc import ResolutionError
from rbm_trace.sim import MIN_HOLDER_STEPS, PathSample, cube_hit_counts, holder_exponent, holder_profile, simulate_rbm


def _constant_path(n_steps):
    return PathSample(dt=1e-3, T=n_steps * 1e-3, positions=np.full((n_steps + 1, 2), 0.5), seed=0, domain_id="free")


def test_holder_profile_spans(unit_square):
    path = simulate_rbm(unit_square, (0.5, 0.5), 1.0, 1e-4, seed=1)
    spans, maxima = holder_profile(path)
    # floor(log2(10000)) - 2 = 11.
    assert spans.shape == (12,)
    np.testing.assert_allclose(spans, 1e-4 * 2.0 ** np.arange(12))
    assert np.all(maxima > 0.0)
    assert maxima[-1] > maxima[0]


def test_holder_exponent_near_one_half(unit_square):
    path = simulate_rbm(unit_square, (0.5, 0.5), 1.0, 1e-4, seed=2)
    assert 0.35 < holder_exponent(path) < 0.6


@pytest.mark.slow
def test_holder_exponent_fine_grid(unit_square):
    path = simulate_rbm(unit_square, (0.5, 0.5), 1.0, 1e-5, seed=2)
    assert 0.40 <= holder_exponent(path) <= 0.55


@pytest.mark.slow
def test_holder_exponent_approaches_one_half_as_dt_shrinks(unit_square):
    means = []
    for dt in (1e-4, 1e-5, 1e-6):
        paths = [simulate_rbm(unit_square, (0.5, 0.5), 1.0, dt, seed=s) for s in range(4)]
        means.append(np.mean([holder_exponent(p) for p in paths]))
    assert all(m < 0.55 for m in means)
    assert abs(means[-1] - 0.5) < abs(means[0] - 0.5)


def test_linear_path_is_lipschitz():
    n_steps = 4096
    positions = np.outer(np.arange(n_steps + 1) * 1e-3, [0.3, -0.4])
    path = PathSample(dt=1e-3, T=n_steps * 1e-3, positions=positions, seed=0, domain_id="free")
    assert holder_exponent(path) == pytest.approx(1.0, abs=0.01)


def test_holder_needs_enough_steps():
    with pytest.raises(ResolutionError, match="at least"):
        holder_profile(_constant_path(MIN_HOLDER_STEPS - 1))


def test_constant_path_warns_and_reports_zero():
    with pytest.warns(UserWarning, match="zero increments"):
        assert holder_exponent(_constant_path(2048)) == 0.0


def test_cube_counts(unit_square):
    path = simulate_rbm(unit_square, (0.5, 0.5), 1.0, 1e-4, seed=3)
    sides, counts = cube_hit_counts(path, 3, 8)
    np.testing.assert_allclose(sides, 2.0 ** -np.arange(3, 9))
    assert np.all(np.diff(counts) >= 0)
    assert counts[0] <= 81

    with pytest.raises(ResolutionError):
        cube_hit_counts(path, 5, 5)


def test_cube_counts_of_a_point():
    _, counts = cube_hit_counts(_constant_path(4), 1, 6)
    np.testing.assert_array_equal(counts, 1)

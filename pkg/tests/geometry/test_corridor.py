import numpy as np
import pytest

from rbm_trace.common.exc import DomainError
from rbm_trace.geometry import (
    contains,
    fat_cantor_intervals,
    fat_cantor_measure,
    interior_point,
    make_corridor_domain,
    reflect_step,
    in_closure,
)


@pytest.mark.parametrize("stage", [0, 1, 2, 5])
def test_fat_cantor_intervals(stage):
    intervals = fat_cantor_intervals(stage)
    assert intervals.shape == (2**stage, 2)
    assert np.all(intervals[:, 1] > intervals[:, 0])
    assert np.all(intervals[1:, 0] > intervals[:-1, 1])
    assert float(np.sum(intervals[:, 1] - intervals[:, 0])) == pytest.approx(fat_cantor_measure(stage))


def test_fat_cantor_measure_tends_to_one_half():
    assert fat_cantor_measure(0) == 1.0
    assert fat_cantor_measure(1) == 0.75
    assert fat_cantor_measure(40) == pytest.approx(0.5)
    # The removed product has area tending to 1/4.
    assert fat_cantor_measure(40) ** 2 == pytest.approx(0.25)
    with pytest.raises(DomainError):
        fat_cantor_measure(-1)


def test_slit_widths_are_summable_for_w_three():
    # With log(1 / width_g) = g ** 3 the series of 1 / log(1 / width_g) converges.
    partial = sum(1.0 / g**3 for g in range(1, 10_000))
    assert partial < 1.21


@pytest.mark.parametrize("generations", [1, 2])
def test_corridor_is_connected_and_has_a_start_point(generations):
    dom = make_corridor_domain(generations, 3.0)
    assert dom.kind == "corridor"
    assert dom.two_sided
    assert dom.analytic_boundary_dim is None
    assert dom.parameters["rooms"] > 1
    assert dom.parameters["slits"] >= dom.parameters["rooms"] - 1
    assert contains(dom, interior_point(dom))


def test_corridor_excludes_cantor_product():
    dom = make_corridor_domain(1, 1.0)
    # The centre of the first Cantor square [0, 3/8]^2 is removed.
    assert not contains(dom, (3.0 / 16.0, 3.0 / 16.0))


def test_corridor_reflection_stays_in_closure():
    dom = make_corridor_domain(2, 1.0)
    rng = np.random.default_rng(3)
    x = interior_point(dom)
    for _ in range(1000):
        x = reflect_step(dom, x, x + 0.02 * rng.standard_normal(2))
        assert in_closure(dom, x)


@pytest.mark.parametrize("generations, w", [(0, 3.0), (7, 3.0), (2, 0.5)])
def test_corridor_invalid_parameters(generations, w):
    with pytest.raises(DomainError):
        make_corridor_domain(generations, w)

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from rbm_trace.common.exc import DomainError, HorizonError
from rbm_trace.common.rng import gaussian_increments
from rbm_trace.common.utils import sim_log
from rbm_trace.geometry import DomainSpec, box_bounds, domain_id
from rbm_trace.sim import MAX_DT, PathSample, TimeSet, extend_rbm, fold_1d, simulate_rbm

from ._subordinator import SubordinatorPath

INDEX_TOL = 1e-9
HORIZON_FACTOR = 1.5
EXTENSION_MARGIN = 1.1
DEFAULT_CAP_FACTOR = 100.0
# A driving path never holds more than this many steps; the typical horizon is planned at a quarter of it.
MAX_DRIVER_STEPS = 1 << 23
TYPICAL_DRIVER_STEPS = MAX_DRIVER_STEPS // 4


def _grid_index(values: np.ndarray, dt: float) -> np.ndarray:
    return np.floor(values / dt + INDEX_TOL).astype(np.int64)


def driving_dt(T: float, s: float, dt: float) -> float:
    """Grid step of the driving path for a subordinator of index ``s`` run to ``T``.

    ``dt`` itself when the typical horizon ``1.5 T^(1/s)`` fits in a quarter of ``MAX_DRIVER_STEPS``, otherwise
    coarsened until it does (never beyond ``MAX_DT``).
    """
    needed = HORIZON_FACTOR * T ** (1.0 / s) / TYPICAL_DRIVER_STEPS
    return float(min(max(dt, needed), max(dt, MAX_DT)))


def subordinated_step(s: float, dt_sub: float, dt_x: Optional[float] = None) -> float:
    """Typical displacement of the time-changed path over one grid step ``dt_sub``: ``dt_sub^(1/(2s))``.

    With a driving grid ``dt_x`` the displacement is at least one driving step ``sqrt(dt_x)``.
    """
    step = dt_sub ** (1.0 / (2.0 * s))
    if dt_x is not None:
        step = max(step, math.sqrt(dt_x))
    return float(step)


def subordinate_path(x: PathSample, xi: SubordinatorPath) -> PathSample:
    """``Z(k dt_xi) = X(xi(k dt_xi))``, reading ``X`` at the last grid point at or before ``xi``.

    Raises:
        HorizonError: ``xi`` runs beyond the simulated horizon of ``x``.
    """
    idx = _grid_index(xi.values, x.dt)
    if xi.maximum > x.T + INDEX_TOL * x.dt or idx[-1] > x.n_steps:
        raise HorizonError(
            f"Subordinator reaches {xi.maximum:.6g} but the path is only simulated to T={x.T}; extend the path first."
        )
    return PathSample(
        dt=xi.dt,
        T=xi.T,
        positions=x.positions[idx],
        seed=x.seed,
        domain_id=x.domain_id,
        domain=x.domain,
        kind="subordinated" if xi.s < 1.0 else x.kind,
        reflection_fallbacks=x.reflection_fallbacks,
    )


def subordinate_folded(domain: DomainSpec, x0: Sequence[float], xi: SubordinatorPath, seed: int) -> PathSample:
    """``Z(k dt_xi) = X(xi(k dt_xi))`` for a box domain, without a driving grid.

    Reflected Brownian motion in a box is the coordinatewise fold of free Brownian motion, so the free path is
    sampled exactly at the subordinator's values (Gaussian increments of variance ``xi((k+1) dt) - xi(k dt)``) and
    folded. Memory is proportional to the subordinator's grid, whatever the size of ``xi(T)``.

    Raises:
        DomainError: ``domain`` is not an axis-parallel box, or ``x0`` has the wrong dimension.
    """
    bounds = box_bounds(domain)
    if bounds is None:
        raise DomainError(f"Folded time change needs an axis-parallel box, got a {domain.kind} domain.")
    start = np.asarray(x0, dtype=np.float64).reshape(-1)
    if start.shape[0] != domain.ambient_dim:
        raise DomainError(f"Expected a start point with {domain.ambient_dim} coordinates, got {start.shape[0]}.")
    widths = np.sqrt(np.diff(xi.values))
    steps = widths[:, None] * gaussian_increments(seed, 0, xi.n_steps, start.shape[0])
    free = np.cumsum(np.vstack([start[None, :], steps]), axis=0)
    positions = np.column_stack([fold_1d(free[:, i], bounds[i, 0], bounds[i, 1]) for i in range(start.shape[0])])
    return PathSample(
        dt=xi.dt,
        T=xi.T,
        positions=positions,
        seed=seed,
        domain_id=domain_id(domain),
        domain=domain,
        kind="subordinated" if xi.s < 1.0 else "rbm",
    )


def preimage_timeset(xi: SubordinatorPath, e: TimeSet) -> TimeSet:
    """``{t : xi(t) in E}`` on the grid of ``xi``: cell ``k`` is marked iff ``xi(k dt)`` lies in a marked cell of ``e``.

    Raises:
        HorizonError: ``e`` does not cover the range of ``xi``.
    """
    if xi.maximum > e.T + INDEX_TOL * e.dt:
        raise HorizonError(f"Time set covers [0, {e.T}] but the subordinator reaches {xi.maximum:.6g}.")
    out = TimeSet.empty(xi.T, xi.dt)
    idx = np.minimum(_grid_index(xi.values[: out.n_cells], e.dt), e.n_cells - 1)
    return TimeSet(dt=xi.dt, T=xi.T, flags=e.flags[idx])


def subordinate_with_horizon(
    domain: DomainSpec,
    x0: Sequence[float],
    xi: SubordinatorPath,
    dt_x: float,
    seed: int,
    max_horizon: Optional[float] = None,
    max_steps: int = MAX_DRIVER_STEPS,
) -> Tuple[PathSample, PathSample]:
    """Simulate the driving path and time-change it by ``xi``.

    The driving path is first simulated to ``1.5 * T ** (1 / s)`` (the typical size of ``xi(T)``) and extended once
    if ``xi`` runs further, up to ``max_horizon`` (default ``100 * T ** (1 / s)``) and never past ``max_steps`` grid
    steps.

    Returns:
        Tuple[PathSample, PathSample]: ``(Z, X)``.

    Raises:
        HorizonError: ``xi`` exceeds ``max_horizon`` or the ``max_steps`` budget.
    """
    scale = xi.T ** (1.0 / xi.s)
    cap = DEFAULT_CAP_FACTOR * scale if max_horizon is None else max_horizon
    budget = max_steps * dt_x
    if xi.maximum > min(cap, budget):
        limit = "horizon cap" if cap <= budget else f"step budget ({max_steps} steps of {dt_x:g})"
        raise HorizonError(f"Subordinator reaches {xi.maximum:.6g}, beyond the {limit} {min(cap, budget):.6g}.")
    cap = min(cap, budget)
    x = simulate_rbm(domain, x0, max(min(HORIZON_FACTOR * scale, cap), dt_x), dt_x, seed)
    if xi.maximum > x.T:
        target = min(EXTENSION_MARGIN * xi.maximum + dt_x, cap)
        sim_log(f"Extending driving path seed={seed} from T={x.T:.6g} to T={target:.6g}.")
        x = extend_rbm(domain, x, target)
    return subordinate_path(x, xi), x

import math
from typing import Optional, Sequence, Union

import numpy as np

from rbm_trace.common import rng
from rbm_trace.common.exc import DomainError, OutsideDomainError, ResolutionError
from rbm_trace.common.utils import sim_log, steps_for_horizon
from rbm_trace.geometry import DomainSpec, domain_id, in_closure
from rbm_trace.geometry import _kernels as K

from ._types import PathSample

MAX_DT = 1e-3
MAX_STEPS = 10**8

ArrayOrFloat = Union[float, np.ndarray]


def fold_1d(b: ArrayOrFloat, a0: float, a1: float) -> ArrayOrFloat:
    """Fold the real line onto ``[a0, a1]`` by repeated mirroring (a tent map of period ``2 (a1 - a0)``).

    Applied to an unreflected Brownian coordinate this gives reflected Brownian motion in the interval exactly.
    Works elementwise on arrays.

    Raises:
        DomainError: ``a0 >= a1`` or non-finite bounds.
    """
    if not (math.isfinite(a0) and math.isfinite(a1) and a0 < a1):
        raise DomainError(f"fold_1d needs a finite interval with a0 < a1, got [{a0}, {a1}].")
    if np.ndim(b) == 0:
        return K.fold_interval(float(b), a0, a1)
    width = a1 - a0
    y = np.mod(np.asarray(b, dtype=np.float64) - a0, 2.0 * width)
    return a0 + np.where(y > width, 2.0 * width - y, y)


def _check_grid(T: float, dt: float) -> int:
    if not (math.isfinite(dt) and 0.0 < dt <= MAX_DT):
        raise ResolutionError(f"dt must be in (0, {MAX_DT}], got {dt}.")
    if not (math.isfinite(T) and T > 0.0):
        raise ResolutionError(f"T must be positive, got {T}.")
    n_steps = steps_for_horizon(T, dt)
    if n_steps > MAX_STEPS:
        raise ResolutionError(f"T/dt = {n_steps} steps exceeds the practical bound of {MAX_STEPS}.")
    return n_steps


def _walk(domain: DomainSpec, positions: np.ndarray, k_start: int, k_end: int, seed: int, dt: float) -> int:
    """Fill ``positions[k_start + 1 .. k_end]`` block by block; returns the number of projection fallbacks."""
    idx = domain.index
    n = domain.ambient_dim
    has_z = domain.kind == "product"
    z_lo, z_hi = domain.interval if has_z else (0.0, 1.0)  # type: ignore
    sqrt_dt = math.sqrt(dt)
    fallbacks = 0
    k = k_start
    while k < k_end:
        block = k // rng.BLOCK_SIZE
        row0 = block * rng.BLOCK_SIZE
        k1 = min(k_end, row0 + rng.BLOCK_SIZE)
        normals = rng.gaussian_block(seed, block, n)
        fallbacks += K.walk_planar(
            positions,
            k,
            k1,
            normals,
            row0,
            sqrt_dt,
            domain.two_sided,
            has_z,
            float(z_lo),
            float(z_hi),
            *idx.kernel_args,
            idx.edt,
            *idx.grid_args,
        )
        k = k1
    return fallbacks


def simulate_rbm(
    domain: DomainSpec,
    x0: Sequence[float],
    T: float,
    dt: float,
    seed: int,
) -> PathSample:
    """Reflected Brownian path from ``x0`` on ``[0, T]`` with step ``dt``.

    Step ``k`` proposes ``x_k + sqrt(dt) g_k`` and passes it through the domain's reflection rule. ``g_k`` depends
    only on ``(seed, k)``, so the path is a pure function of ``(domain, x0, T, dt, seed)``.

    Args:
        domain (DomainSpec): The domain.
        x0 (Sequence[float]): Start point in the closure.
        T (float): Horizon.
        dt (float): Time step in ``(0, 1e-3]``.
        seed (int): 64-bit seed.

    Returns:
        PathSample: ``floor(T / dt) + 1`` positions.

    Raises:
        OutsideDomainError: ``x0`` is outside the closure.
        ResolutionError: Invalid ``dt``/``T``.
    """
    n_steps = _check_grid(T, dt)
    start = np.asarray(x0, dtype=np.float64).reshape(-1)
    if start.shape[0] != domain.ambient_dim or not np.all(np.isfinite(start)):
        raise DomainError(f"Start point {start.tolist()} does not match the {domain.ambient_dim}-D domain.")
    if not in_closure(domain, start):
        raise OutsideDomainError(f"Start point {start.tolist()} is outside the closure of the {domain.kind} domain.")

    positions = np.empty((n_steps + 1, domain.ambient_dim), dtype=np.float64)
    positions[0] = start
    fallbacks = _walk(domain, positions, 0, n_steps, seed, dt)
    if fallbacks:
        sim_log(f"Path seed={seed}: {fallbacks} step(s) resolved by boundary projection.")
    return PathSample(
        dt=dt,
        T=T,
        positions=positions,
        seed=seed,
        domain_id=domain_id(domain),
        domain=domain,
        reflection_fallbacks=fallbacks,
    )


def extend_rbm(domain: DomainSpec, path: PathSample, T_new: float) -> PathSample:
    """Continue ``path`` to the longer horizon ``T_new``.

    The result is bitwise identical to ``simulate_rbm(domain, path.positions[0], T_new, path.dt, path.seed)``.
    """
    if path.kind != "rbm" or path.domain_id != domain_id(domain):
        raise DomainError("extend_rbm needs a reflected path simulated in the same domain.")
    n_new = _check_grid(T_new, path.dt)
    if n_new < path.n_steps:
        raise ResolutionError(f"T_new={T_new} is shorter than the path horizon T={path.T}.")
    positions = np.empty((n_new + 1, domain.ambient_dim), dtype=np.float64)
    positions[: path.n_steps + 1] = path.positions
    fallbacks = path.reflection_fallbacks + _walk(domain, positions, path.n_steps, n_new, path.seed, path.dt)
    return PathSample(
        dt=path.dt,
        T=T_new,
        positions=positions,
        seed=path.seed,
        domain_id=path.domain_id,
        domain=domain,
        reflection_fallbacks=fallbacks,
    )


def free_path(x0: Sequence[float], T: float, dt: float, seed: int, domain: Optional[DomainSpec] = None) -> PathSample:
    """Unreflected Brownian path driven by the same increments as ``simulate_rbm`` with the same seed.

    While the reflected path stays away from the boundary the two coincide bitwise. ``domain`` is only recorded.
    """
    n_steps = _check_grid(T, dt)
    start = np.asarray(x0, dtype=np.float64).reshape(-1)
    steps = math.sqrt(dt) * rng.gaussian_increments(seed, 0, n_steps, start.shape[0])
    positions = np.cumsum(np.vstack([start[None, :], steps]), axis=0)
    return PathSample(
        dt=dt,
        T=T,
        positions=positions,
        seed=seed,
        domain_id="free" if domain is None else domain_id(domain),
        domain=domain,
        kind="free",
    )

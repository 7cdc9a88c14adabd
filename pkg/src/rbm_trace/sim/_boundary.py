import math
from typing import Optional

import numpy as np

from rbm_trace.common.exc import DomainError
from rbm_trace.geometry import DomainSpec, boundary_distances

from ._types import PathSample, TimeSet

CHUNK = 1 << 20


def default_eps(dt: float, eps_factor: float = 2.0) -> float:
    """Boundary tolerance at the walk's own spatial resolution, ``eps_factor * sqrt(dt)``."""
    return eps_factor * math.sqrt(dt)


def _domain_of(path: PathSample, domain: Optional[DomainSpec]) -> DomainSpec:
    dom = domain if domain is not None else path.domain
    if dom is None:
        raise DomainError(f"Path {path!r} carries no domain; pass one explicitly.")
    return dom


def _near_boundary(dom: DomainSpec, points: np.ndarray, eps: float):
    dist = np.empty(points.shape[0], dtype=np.float64)
    proj = np.empty_like(points)
    for lo in range(0, points.shape[0], CHUNK):
        hi = min(lo + CHUNK, points.shape[0])
        dist[lo:hi], proj[lo:hi] = boundary_distances(dom, points[lo:hi], eps)
    return dist, proj


def boundary_hit_times(path: PathSample, eps: float, domain: Optional[DomainSpec] = None) -> TimeSet:
    """Grid cells whose left-endpoint position is within ``eps`` of the boundary.

    Args:
        path (PathSample): The path; its domain is used unless ``domain`` is given.
        eps (float): Tolerance, ``> 0``.
        domain (Optional[DomainSpec]): Override for the path's domain.

    Returns:
        TimeSet: On the path grid (``dt = path.dt``, horizon ``path.T``).
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps}.")
    dom = _domain_of(path, domain)
    ts = TimeSet.empty(path.T, path.dt)
    points = path.positions[: ts.n_cells]
    dist, _ = _near_boundary(dom, points, eps)
    flags = np.zeros(ts.n_cells, dtype=bool)
    flags[: points.shape[0]] = dist <= eps
    return TimeSet(dt=path.dt, T=path.T, flags=flags)


def trace_points(path: PathSample, eps: float, domain: Optional[DomainSpec] = None) -> np.ndarray:
    """Nearest boundary points of all path positions within ``eps`` of the boundary, in time order.

    Returns:
        np.ndarray: ``(M, ambient_dim)``; empty with the right width when no position is that close.
    """
    if not eps > 0.0:
        raise DomainError(f"eps must be positive, got {eps}.")
    dom = _domain_of(path, domain)
    dist, proj = _near_boundary(dom, path.positions, eps)
    return proj[dist <= eps]

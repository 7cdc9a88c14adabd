from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional, Tuple

import numpy as np

from rbm_trace.common.exc import HorizonError, ResolutionError
from rbm_trace.common.utils import cells_for_horizon

if TYPE_CHECKING:
    from rbm_trace.geometry import DomainSpec


@dataclass(frozen=True, eq=False)
class PathSample:
    """A trajectory sampled on the uniform grid ``t_k = k * dt``, ``k = 0 .. floor(T / dt)``.

    ``domain`` is the generating domain when there is one (``None`` for free Brownian paths); ``domain_id`` is its
    content hash and survives serialization.
    """

    dt: float
    T: float
    positions: np.ndarray
    seed: int
    domain_id: str
    domain: Optional["DomainSpec"] = field(default=None, repr=False)
    kind: str = "rbm"
    reflection_fallbacks: int = 0

    def __post_init__(self) -> None:
        self.positions.setflags(write=False)

    @property
    def n_steps(self) -> int:
        return int(self.positions.shape[0]) - 1

    @property
    def ambient_dim(self) -> int:
        return int(self.positions.shape[1])

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.positions.shape[0], dtype=np.float64) * self.dt

    def __repr__(self) -> str:
        return (
            f"PathSample(kind={self.kind!r}, dt={self.dt}, T={self.T}, n_steps={self.n_steps}, seed={self.seed}, "
            f"domain_id={self.domain_id!r})"
        )


@dataclass(frozen=True, eq=False)
class TimeSet:
    """A subset of ``[0, T]`` recorded on the grid cells ``[i dt, (i + 1) dt)``: cell ``i`` is marked iff the set
    meets it."""

    dt: float
    T: float
    flags: np.ndarray

    def __post_init__(self) -> None:
        if not (self.dt > 0.0 and self.T > 0.0):
            raise ResolutionError(f"TimeSet needs dt > 0 and T > 0, got dt={self.dt}, T={self.T}.")
        flags = np.asarray(self.flags, dtype=bool)
        expected = cells_for_horizon(self.T, self.dt)
        if flags.ndim != 1 or flags.shape[0] != expected:
            raise HorizonError(f"TimeSet flags must have ceil(T/dt) = {expected} cells, got shape {flags.shape}.")
        flags.setflags(write=False)
        object.__setattr__(self, "flags", flags)

    @classmethod
    def full(cls, T: float, dt: float) -> "TimeSet":
        return cls(dt=dt, T=T, flags=np.ones(cells_for_horizon(T, dt), dtype=bool))

    @classmethod
    def empty(cls, T: float, dt: float) -> "TimeSet":
        return cls(dt=dt, T=T, flags=np.zeros(cells_for_horizon(T, dt), dtype=bool))

    @property
    def n_cells(self) -> int:
        return int(self.flags.shape[0])

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.flags))

    @property
    def is_empty(self) -> bool:
        return not bool(self.flags.any())

    def measure(self) -> float:
        """Total length of the marked cells, clipped to ``[0, T]``."""
        if self.n_cells == 0:
            return 0.0
        total = self.count * self.dt
        if self.flags[-1]:
            total -= self.n_cells * self.dt - self.T
        return float(total)

    def coarsen(self, factor: int) -> "TimeSet":
        """The same set on a grid ``factor`` times coarser (a coarse cell is marked iff any of its fine cells is)."""
        if factor < 1:
            raise ResolutionError(f"Coarsening factor must be >= 1, got {factor}.")
        dt = self.dt * factor
        n_coarse = cells_for_horizon(self.T, dt)
        padded = np.zeros(n_coarse * factor, dtype=bool)
        padded[: self.n_cells] = self.flags[: n_coarse * factor]
        return TimeSet(dt=dt, T=self.T, flags=padded.reshape(n_coarse, factor).any(axis=1))

    def union(self, other: "TimeSet") -> "TimeSet":
        if other.n_cells != self.n_cells or other.dt != self.dt:
            raise HorizonError(f"Cannot unite time sets on different grids (dt={self.dt} vs {other.dt}).")
        return TimeSet(dt=self.dt, T=self.T, flags=self.flags | other.flags)

    def to_intervals(self) -> List[Tuple[float, float]]:
        """Run-length encoding as a list of ``(start, end)`` times of maximal marked runs."""
        padded = np.concatenate([[False], self.flags, [False]])
        edges = np.flatnonzero(padded[1:] != padded[:-1])
        starts, ends = edges[0::2], edges[1::2]
        return [(float(s * self.dt), float(min(e * self.dt, self.T))) for s, e in zip(starts, ends)]

    def __repr__(self) -> str:
        return f"TimeSet(dt={self.dt}, T={self.T}, n_cells={self.n_cells}, marked={self.count})"

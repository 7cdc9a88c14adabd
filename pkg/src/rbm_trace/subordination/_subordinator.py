import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from rbm_trace.common import rng
from rbm_trace.common.exc import DomainError, ResolutionError
from rbm_trace.common.serialization import PathLike, write_csv
from rbm_trace.common.utils import steps_for_horizon


@dataclass(frozen=True, eq=False)
class SubordinatorPath:
    """Values ``xi(k dt)``, ``k = 0 .. floor(T / dt)``, of a one-sided stable subordinator of index ``s``.

    ``s = 1`` is reserved for the identity time change ``xi(t) = t``.
    """

    s: float
    dt: float
    T: float
    values: np.ndarray
    seed: int

    def __post_init__(self) -> None:
        if not (0.0 < self.s <= 1.0):
            raise DomainError(f"Subordinator index must be in (0, 1], got {self.s}.")
        v = self.values
        if v.ndim != 1 or v.shape[0] == 0 or v[0] != 0.0:
            raise DomainError("Subordinator values must be a non-empty 1-D array starting at 0.")
        if not np.all(np.isfinite(v)) or np.any(np.diff(v) < 0.0):
            raise DomainError("Subordinator values must be finite and nondecreasing.")
        v.setflags(write=False)

    @classmethod
    def identity(cls, T: float, dt: float) -> "SubordinatorPath":
        n = steps_for_horizon(T, dt)
        return cls(s=1.0, dt=dt, T=T, values=np.arange(n + 1, dtype=np.float64) * dt, seed=0)

    @property
    def n_steps(self) -> int:
        return int(self.values.shape[0]) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.shape[0], dtype=np.float64) * self.dt

    @property
    def maximum(self) -> float:
        return float(self.values[-1])

    def __repr__(self) -> str:
        return f"SubordinatorPath(s={self.s}, dt={self.dt}, T={self.T}, n_steps={self.n_steps}, seed={self.seed})"


def _check_index(s: float) -> None:
    if not (math.isfinite(s) and 0.0 < s < 1.0):
        raise DomainError(f"Stability index s must be in (0, 1), got {s}.")


def kanter_transform(s: float, theta: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Positive ``s``-stable variables from ``theta ~ U(0, pi)`` and ``w ~ Exp(1)``.

    The result has Laplace transform ``E exp(-lam S) = exp(-lam ** s)``.
    """
    a = (
        np.sin((1.0 - s) * theta)
        * np.sin(s * theta) ** (s / (1.0 - s))
        / np.sin(theta) ** (1.0 / (1.0 - s))
    )
    return (a / w) ** ((1.0 - s) / s)


def _stable_block(s: float, seed: int, block: int) -> np.ndarray:
    gen = rng.block_generator(seed, block)
    theta = np.pi * (1.0 - gen.random(rng.BLOCK_SIZE))
    w = gen.standard_exponential(rng.BLOCK_SIZE)
    return kanter_transform(s, theta, w)


def positive_stable_samples(s: float, n: int, seed: int) -> np.ndarray:
    """``n`` i.i.d. positive ``s``-stable variables with Laplace transform ``exp(-lam ** s)``, keyed by ``seed``."""
    _check_index(s)
    if n < 0:
        raise ResolutionError(f"Sample count must be >= 0, got {n}.")
    n_blocks = -(-n // rng.BLOCK_SIZE)
    if n_blocks == 0:
        return np.empty(0, dtype=np.float64)
    return np.concatenate([_stable_block(s, seed, b) for b in range(n_blocks)])[:n]


def sample_subordinator(s: float, T: float, dt: float, seed: int) -> SubordinatorPath:
    """Sample ``xi`` on ``[0, T]`` with step ``dt``.

    Increments over one step are ``dt ** (1 / s)`` times a positive ``s``-stable variable, which makes
    ``E exp(-lam (xi(t + dt) - xi(t))) = exp(-dt lam ** s)``.

    Raises:
        DomainError: ``s`` outside ``(0, 1)``.
        ResolutionError: Non-positive ``T`` or ``dt``.
    """
    _check_index(s)
    if not (dt > 0.0 and T > 0.0):
        raise ResolutionError(f"sample_subordinator needs T > 0 and dt > 0, got T={T}, dt={dt}.")
    n = steps_for_horizon(T, dt)
    increments = dt ** (1.0 / s) * positive_stable_samples(s, n, seed)
    values = np.concatenate([[0.0], np.cumsum(increments)])
    return SubordinatorPath(s=s, dt=dt, T=T, values=values, seed=seed)


def stable_laplace_transform(samples: np.ndarray, lam: float) -> Tuple[float, float]:
    """Empirical ``E exp(-lam X)`` and its standard error."""
    x = np.exp(-lam * np.asarray(samples, dtype=np.float64))
    if x.shape[0] < 2:
        raise ResolutionError("At least two samples are needed for a standard error.")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.shape[0]))


def subordinator_to_csv(xi: SubordinatorPath, file: PathLike) -> str:
    """Write ``t, xi`` rows."""
    return write_csv(file, ["t", "xi"], {"t": xi.times, "xi": xi.values})

"""Common exceptions, logging helpers, randomness and serialization used across rbm-trace."""

from . import exc, rng, serialization, utils
from ._jit import jit_enabled, njit
from .exc import (
    DomainError,
    EmptySetError,
    ExperimentError,
    HorizonError,
    OutsideDomainError,
    RbmTraceConfigurationError,
    RbmTraceError,
    ResolutionError,
)
from .rng import derive_seed, gaussian_increments

__all__ = [
    "derive_seed",
    "DomainError",
    "EmptySetError",
    "exc",
    "ExperimentError",
    "gaussian_increments",
    "HorizonError",
    "jit_enabled",
    "njit",
    "OutsideDomainError",
    "RbmTraceConfigurationError",
    "RbmTraceError",
    "ResolutionError",
    "rng",
    "serialization",
    "utils",
]

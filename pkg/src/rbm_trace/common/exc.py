"""rbm-trace exceptions."""


class RbmTraceError(Exception):
    """Base class for all rbm-trace errors."""

    pass


class RbmTraceConfigurationError(RbmTraceError):
    """Experiment configuration-related error (invalid values, unknown preset, unreadable file)."""

    pass


class DomainError(RbmTraceError, ValueError):
    """Invalid domain parameters."""

    pass


class OutsideDomainError(RbmTraceError, ValueError):
    """A query point lies strictly outside the closure of the domain (negative-side query)."""

    pass


class ResolutionError(RbmTraceError, ValueError):
    """A scale window or grid resolution constraint is violated."""

    pass


class EmptySetError(RbmTraceError, ValueError):
    """Box counting was asked to measure an empty set."""

    pass


class HorizonError(RbmTraceError, ValueError):
    """A time change or time set does not fit the grid or horizon of the path it is applied to."""

    pass


class ExperimentError(RbmTraceError):
    """An experiment run was aborted."""

    pass

"""Exception hierarchy shared across the package."""


class MottDynError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(MottDynError, ValueError):
    """A device or circuit parameter violates its physical constraints."""


class StateDomainError(MottDynError, ValueError):
    """State fraction or radius evaluated outside its valid open domain."""


class DegenerateOperatingPointError(MottDynError, ValueError):
    """Small-signal quantities requested at a point where they are undefined
    (the zero-current fixed point degenerates the virtual capacitance)."""


class SolverError(MottDynError, RuntimeError):
    """A numerical search failed (no bracket, no convergence)."""


class ResolutionError(SolverError):
    """A grid was too coarse to bracket the requested feature."""


class StiffnessError(MottDynError, RuntimeError):
    """Adaptive integration step size underflowed."""


class ConfigError(MottDynError, ValueError):
    """Malformed configuration file or unknown key."""


class RenderError(MottDynError, ValueError):
    """Figure rendering was asked for data that does not fit the schema."""

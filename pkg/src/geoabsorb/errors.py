"""Exception hierarchy for geoabsorb."""


class GeoAbsorbError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GeoAbsorbError, ValueError):
    """Parameters or arguments outside the domain where the walk is defined."""


class EvaluationError(GeoAbsorbError, LookupError):
    """A visit function could not be evaluated at a required state."""


class CapabilityError(GeoAbsorbError):
    """Request exceeds a declared capability limit (e.g. dimension ceiling)."""


class AccuracyError(GeoAbsorbError):
    """Requested evaluation cannot be resolved by the configured quadrature."""


class SimulationError(GeoAbsorbError, RuntimeError):
    """A simulated walk exceeded the hard step cap."""


class IterationError(GeoAbsorbError, RuntimeError):
    """Fixed-point iteration hit max_iter before meeting its stopping rule."""

"Exception types raised by the sara package."


class SaraError(ValueError):
    """Base class for all package errors."""


class NonPhysicalLad(SaraError):
    """LAD outside [-0.5, 0.5]; no physical incidence angle exists."""


class DimensionError(SaraError):
    pass


class PlanError(SaraError):
    pass


class GridError(SaraError):
    pass


class ConfigError(SaraError):
    pass


class MetricError(SaraError):
    pass

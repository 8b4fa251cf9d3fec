"""Exception hierarchy shared by the solver modules."""


class GSQGError(Exception):
    """Base class for all solver errors."""


class DimensionError(GSQGError, ValueError):
    """Array shape does not match the grid."""


class SymmetryError(GSQGError, ValueError):
    """Spectral coefficients do not describe a real field."""


class MeanZeroError(GSQGError, ValueError):
    """An operation that needs a mean-zero field received one with a mean."""


class GridMismatchError(GSQGError, ValueError):
    """Two fields live on different grids."""


class AliasingError(GSQGError, ValueError):
    """Inputs are not band-limited enough for an alias-free product."""


class ConfigurationError(GSQGError, ValueError):
    """Run parameters violate a step-lattice or substep rule."""


class DegenerateFitError(GSQGError, ValueError):
    """Convergence fit impossible: errors at or below the round-off floor."""


class ConfigParseError(GSQGError, ValueError):
    """Experiment config is not a well-formed document."""


class ConfigValidationError(GSQGError, ValueError):
    """Experiment config is well-formed but a value is out of range."""


class BandError(GSQGError, ValueError):
    """Requested band exceeds the resolvable band for the grid."""


class TransportGrowthWarning(RuntimeWarning):
    """Transport substep produced suspicious H^3 growth."""


class LargeStepWarning(UserWarning):
    """Time step above the configured small-step threshold."""

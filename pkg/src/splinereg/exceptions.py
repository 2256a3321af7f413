"""Exception types raised by splinereg."""


class DomainError(ValueError):
    """An evaluation parameter lies outside the unit cube."""


class DerivativeOrderError(ValueError):
    """A requested derivative order exceeds the spline degree."""


class DegenerateDomainError(ValueError):
    """A point cloud has zero width in at least one dimension."""


class ConfigError(ValueError):
    """An invalid fit or sampling configuration."""


class UnregularizableColumnError(ValueError):
    """A column cannot be regularized because its penalty column sum is zero."""

    def __init__(self, column, message=None):
        self.column = column
        super().__init__(message or f"column {column} has zero penalty column sum "
                         "and cannot be regularized")


class SolverError(RuntimeError):
    """The linear solver failed to produce a solution."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class RankDeficiencyError(SolverError):
    """The assembled normal system is numerically singular."""

    def __init__(self, message=None, residual=None):
        super().__init__(message or "normal system is numerically rank-deficient; "
                         "increase the regularization threshold s_star", residual)


class RegionError(ValueError):
    """A requested region does not intersect the model domain."""


class CapabilityError(RuntimeError):
    """A computation exceeds the limits of the requested method."""


class ModelFormatError(ValueError):
    """A model or point-cloud file failed to parse."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)

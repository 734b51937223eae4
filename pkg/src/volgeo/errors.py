"""Exception types shared across the package."""


class VolgeoError(Exception):
    """Base class for package errors."""


class GridError(VolgeoError):
    """Invalid grid, metric, or field data."""


class ConeViolationError(VolgeoError):
    """Jet outside the ellipticity cone where Q > 0 is required."""


class InadmissibleDataError(VolgeoError):
    """Boundary or problem data violates the admissibility cone."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class EllipticityLossError(VolgeoError):
    """Linearization requested at a field with an inadmissible jet."""

    def __init__(self, message, node=None, margin=None):
        super().__init__(message)
        self.node = node
        self.margin = margin


class LinearSolveError(VolgeoError):
    """Sparse linear solve failed to reach the requested tolerance."""


class ConfigurationError(VolgeoError):
    """Run configuration is invalid or cannot produce a first solution."""

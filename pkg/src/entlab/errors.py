"""Shared exception types."""


class SizeLimitError(ValueError):
    """Register, subset, or expansion size exceeds the supported cap."""


class PositivityError(ValueError):
    """Matrix has an eigenvalue below the tolerated negative floor."""


class ConvergenceError(RuntimeError):
    """Iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InfeasibleMarginalsError(ValueError):
    """Marginal targets disagree on an overlapping sub-register."""


class ConfigError(ValueError):
    """Experiment configuration is invalid."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field

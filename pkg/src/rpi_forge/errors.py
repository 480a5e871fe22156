"""Exception hierarchy shared across the toolkit."""


class RpiForgeError(Exception):
    """Base class for all toolkit errors."""


class GeometryError(RpiForgeError):
    """Set-geometric operation failed (degenerate, empty, or unbounded input)."""


class EmptySetError(GeometryError):
    pass


class UnboundedSetError(GeometryError):
    pass


class DegenerateSetError(GeometryError):
    """Set lacks the interior / full-dimensionality required by the operation."""


class NotEnoughDataError(RpiForgeError):
    """Trajectory too short for the requested construction."""


class InconsistentDataError(RpiForgeError):
    """No matrix pair is consistent with the data under the assumed noise bound.

    `sample` holds the index of a one-step sample whose constraints cut the
    feasible set to empty (when it could be localized).
    """

    def __init__(self, message, sample=None):
        super().__init__(message)
        self.sample = sample


class GammaTooSmallError(InconsistentDataError):
    """Residual inflation factor below the self-consistent level for this data."""


class CertificationError(RpiForgeError):
    """Self-consistent inflation bound could not be certified."""


class SynthesisError(RpiForgeError):
    """No robustly stabilizing gain could be certified for the uncertainty set."""


class CertificateInvalidError(RpiForgeError):
    """A claimed contraction certificate fails validation at some probe."""

    def __init__(self, message, worst_probe=None, residual=None):
        super().__init__(message)
        self.worst_probe = worst_probe
        self.residual = residual


class ConvergenceError(RpiForgeError):
    """Set iteration did not meet its stopping criterion within the budget."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history


class ConfigError(RpiForgeError):
    """Invalid run configuration."""

"""Exception types shared across the solver stack."""


class TmContactError(Exception):
    """Base class for all package errors."""


class SingularTensorError(TmContactError):
    """2x2 tensor has a determinant below the invertibility threshold."""


class SingularKinematicsError(TmContactError):
    """Deformation state with J <= 0 reached a kernel that needs J > 0.

    Signals local interpenetration; the adaptive stepper treats it as a
    recoverable step failure.
    """

    def __init__(self, message, element=None, point=None):
        super().__init__(message)
        self.element = element
        self.point = point


class GeometryError(TmContactError):
    """Degenerate element geometry (non-positive isoparametric Jacobian)."""


class KernelConfigurationError(TmContactError):
    """Material kernel called with an incomplete deformation state."""


class BoundaryConflictError(TmContactError):
    """A degree of freedom carries more than one prescription."""


class IllConditionedSystemError(TmContactError):
    """Diagonal shift grew past the admissible range without a positive
    definite factorization."""


class NotInContactError(TmContactError):
    """Gap metric requested for a state in which contact was never closed."""


class ConfigError(TmContactError):
    """Run configuration is malformed (syntax, unknown key, bad value)."""

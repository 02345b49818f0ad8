"""Exception hierarchy shared by all modules."""


class MelnikovError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MelnikovError, ValueError):
    """An argument lies outside the region where a formula is valid."""


class UnsupportedDegreeError(MelnikovError, ValueError):
    """Closed forms only exist for degrees m <= 3."""


class UnreachableTargetError(MelnikovError, ValueError):
    """Requested Melnikov parameters are not in the image of the coefficient map."""


class SpecValidationError(MelnikovError, ValueError):
    """A perturbation spec (object or JSON document) is malformed."""


class QuadratureError(MelnikovError, RuntimeError):
    """Adaptive quadrature did not converge.

    ``estimate`` carries the last error estimate.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class EndpointRootError(MelnikovError, ValueError):
    """Sturm counting requires nonzero values at both interval endpoints."""


class DegenerateFamilyError(MelnikovError, ValueError):
    """A parametric family has an identically vanishing discriminant."""


class DegenerateTargetsError(MelnikovError, ValueError):
    """The linear system built from zero targets is singular or ill-conditioned.

    ``subset`` lists indices of targets involved in the dependency.
    """

    def __init__(self, message, subset=()):
        super().__init__(message)
        self.subset = tuple(subset)


class NotSupportedError(MelnikovError, ValueError):
    """A configuration outside the known realizable tables was requested."""


class SlidingError(MelnikovError, RuntimeError):
    """Both one-sided vector fields point toward the switching line."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class IntegrationError(MelnikovError, RuntimeError):
    """The ODE integration failed (step exhaustion or escape)."""


class CertificationError(MelnikovError, RuntimeError):
    """A numerical result could not be certified."""

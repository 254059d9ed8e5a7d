"""Exception hierarchy shared by all modules."""


class MagSobolevError(Exception):
    """Base class for errors raised by this package."""


class DomainError(MagSobolevError, ValueError):
    """An input lies outside the domain where the quantity is defined."""


class BoundaryFluxError(DomainError):
    """|alpha| = 1/2: no interior oval solves the flux equation."""


class ConvergenceError(MagSobolevError, RuntimeError):
    """An iterative procedure did not reach its tolerance."""


class VerificationError(MagSobolevError):
    """A numerical certificate failed.

    ``details`` carries the raw numbers that caused the failure.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}

"""Exception hierarchy. CLI exit codes key off the base classes."""


class CritlineError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CritlineError, ValueError):
    """Argument outside the region where an operation is defined."""


class PoleError(DomainError):
    """Evaluation requested exactly at (or numerically on) a pole."""

    def __init__(self, message: str, location: complex | None = None):
        super().__init__(message)
        self.location = location


class NearPoleError(PoleError):
    """Argument inside an exclusion disk that cannot be resolved by a local expansion."""


class DivisionError(DomainError):
    """A denominator vanished; ``location`` says where."""

    def __init__(self, message: str, location: complex | None = None):
        super().__init__(message)
        self.location = location


class AccuracyError(CritlineError, ArithmeticError):
    """Requested accuracy could not be certified (e.g. Euler-Maclaurin tail too large)."""


class SeedError(CritlineError):
    """No bracket for a level-line seed inside the expected window."""


class SamplingError(CritlineError):
    """Adaptive contour sampling could not bound the phase increment."""


class FitError(CritlineError):
    """Least-squares coefficient fit left a residual above tolerance."""


class IncompleteContour(CritlineError):
    """A traced line did not reach the critical line, so no closed contour exists."""

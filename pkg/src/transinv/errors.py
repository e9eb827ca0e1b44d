"""Exception hierarchy.

Numeric failures (rank deficiency, non-convergence) and precondition
violations (wrong shape, branch cut, infeasible scaling) are kept apart
so callers such as the CLI can map them to distinct exit codes.
"""


class TransInvError(Exception):
    """Base class for all errors raised by this package."""


class NumericFailure(TransInvError):
    """A computation could not produce a trustworthy result."""


class SvdConvergenceError(NumericFailure):
    pass


class RankDeficientError(NumericFailure, ValueError):
    """Input is singular at the configured rank tolerance."""

    def __init__(self, message, sigma_min=None):
        super().__init__(message)
        self.sigma_min = sigma_min


class PreconditionError(TransInvError, ValueError):
    """Input violates a documented precondition of the operation."""


class ShapeError(PreconditionError):
    pass


class BranchCutError(PreconditionError):
    """A principal square root is requested across the branch cut."""

    def __init__(self, message, eigenvalues=()):
        super().__init__(message)
        self.eigenvalues = tuple(eigenvalues)


class InfeasibleError(PreconditionError):
    """No real solution exists for the requested form."""

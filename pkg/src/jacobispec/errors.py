"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Violated precondition or malformed input (CLI exit code 2)."""


class NumericFailure(RuntimeError):
    """A numerical routine could not certify its result (CLI exit code 3)."""


class NotElliptic(NumericFailure):
    """2x2 matrix with |trace| >= 2 has no fixed point in the upper half plane."""


class EdgeSingularity(NumericFailure):
    """Energy outside a band interior, or too close to a band edge."""


class SearchFailure(RuntimeError):
    """Candidate search exhausted (CLI exit code 4).

    ``smallest_gap`` carries the best minimal gap length seen across all
    rejected candidates, so callers can tell whether their gap tolerance
    was simply too ambitious for the perturbation budget.
    """

    def __init__(self, message, smallest_gap=None):
        super().__init__(message)
        self.smallest_gap = smallest_gap

"""Shared exception types.

DomainError means the input itself is bad (malformed encoding, broken
invariant, out-of-range argument).  BudgetError means the input is fine but
the requested computation exceeds a declared size or time budget; callers
should either shrink the input or pass an explicit budget where the API
allows one.  The command line maps these to exit codes 1 and 3.
"""


class DomainError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


class InconclusiveError(RuntimeError):
    """A randomized certification routine failed to reach a verdict.

    Deliberately distinct from DomainError: the absence of a certificate is
    not evidence that none exists.
    """

    pass

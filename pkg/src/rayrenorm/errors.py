"""Exception types shared across the package.

DomainError subclasses describe inputs outside an operation's domain
(exit code 1 at the command line).  TheoremViolation marks a numerical
result that contradicts an exact invariant (exit code 3).
"""


class DomainError(Exception):
    """Input outside the operation's domain."""


class NotDisconnected(DomainError):
    """No critical point escapes, so the Julia set is connected."""


class NoBoundedCritical(DomainError):
    """Every critical point escapes; there is no bounded nest to renormalize."""


class PeriodBudgetExceeded(DomainError):
    """Component orbit of the bounded critical point did not close up in budget."""


class NoCriticalInCycle(DomainError):
    """The periodic component cycle contains no critical point (degree-one return map)."""


class ModelMismatch(DomainError):
    """Numerical geometry disagrees with the combinatorial model."""


class InsufficientDepth(DomainError):
    """Requested data lies below the depth the input was computed to."""


class PrecisionError(Exception):
    """A numerical routine could not certify its result at the requested tolerance."""


class TheoremViolation(Exception):
    """A verified invariant failed on concrete data."""

"""
Exception hierarchy for the percolation laboratory.

The command-line front end maps each class to a distinct exit code.
"""


class PercolationError(Exception):
    """Base class for every error raised by the library."""


class DomainValidityError(PercolationError, ValueError):
    """A parameter, vertex or bound is outside its domain of validity."""


class BoundValidityError(DomainValidityError):
    """A closed-form bound was requested outside lambda_h < 4^-3."""


class InteriorViolationError(DomainValidityError):
    """A target vertex lies on or outside the interior of a region."""


class InvalidCircuitError(PercolationError, ValueError):
    """A dual word or edge set is not a valid circuit / contour."""


class ResourceBudgetExceeded(PercolationError, RuntimeError):
    """An edge cap, frontier cap or enumeration budget would be exceeded."""

    def __init__(self, resource: str, requested: int, limit: int, hint: str = ""):
        self.resource = resource
        self.hint = hint
        self.requested = requested
        self.limit = limit
        message = f"{resource} budget exceeded: requested {requested}, limit {limit}"
        if hint:
            message += f" ({hint})"
        super().__init__(message)

    def __reduce__(self):
        # re-raised across process boundaries by the parallel census
        return type(self), (self.resource, self.requested, self.limit, self.hint)


class InvariantViolation(PercolationError, AssertionError):
    """A checked invariant did not hold."""

    def __init__(self, invariant: str, detail: str = ""):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"{invariant}: {detail}" if detail else invariant)

    def __reduce__(self):
        return type(self), (self.invariant, self.detail)

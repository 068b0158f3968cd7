"""
Search budget utility for exhaustive enumerations.
"""
import threading

from src.percolation.exceptions import ResourceBudgetExceeded


class SearchBudget:
    """
    Consumption budget for search nodes and DP states.

    Unlike a rate limiter the budget never refills: every call to
    ``consume`` spends tokens for good, and once the limit is reached the
    next consumer gets a ``ResourceBudgetExceeded`` instead of a silently
    truncated result.

    Attributes:
        limit (int): Maximum number of tokens that may be consumed.
        used (int): Tokens consumed so far.
        resource (str): Name of the budgeted resource, used in error messages.
    """

    def __init__(self, limit: int, resource: str = "search nodes", hint: str = "raise --budget"):
        """
        Initialize the budget.

        Args:
            limit (int): Maximum number of tokens allowed.
            resource (str): Human-readable resource name.
            hint (str): Suggestion appended to the error message.
        """
        if limit <= 0:
            raise ValueError(f"Budget limit must be positive, got {limit}")
        self.limit = limit
        self.used = 0
        self.resource = resource
        self.hint = hint
        self.lock = threading.Lock()

    def consume(self, amount: int = 1) -> None:
        """
        Spend tokens.

        Args:
            amount (int): Number of tokens to spend.

        Raises:
            ResourceBudgetExceeded: if the budget cannot cover the request.
        """
        with self.lock:
            if self.used + amount > self.limit:
                raise ResourceBudgetExceeded(self.resource, self.used + amount, self.limit, self.hint)
            self.used += amount

    def check_availability(self, amount: int = 1) -> bool:
        """
        Check if tokens are available without consuming them.

        Returns:
            bool: True if ``amount`` tokens can still be consumed.
        """
        return self.used + amount <= self.limit

    @property
    def remaining(self) -> int:
        return self.limit - self.used




class SharedSearchBudget(SearchBudget):
    """
    Search budget whose counter lives in shared memory.

    Worker processes of one pool each build their own instance around the
    same ``multiprocessing.Value``, so together they can never spend more
    than ``limit`` tokens.

    Attributes:
        counter: ``multiprocessing.Value`` holding the tokens used so far.
    """

    def __init__(self, limit: int, counter, resource: str = "search nodes", hint: str = "raise --budget"):
        if limit <= 0:
            raise ValueError(f"Budget limit must be positive, got {limit}")
        self.limit = limit
        self.counter = counter
        self.resource = resource
        self.hint = hint

    @property
    def used(self) -> int:
        return self.counter.value

    def consume(self, amount: int = 1) -> None:
        with self.counter.get_lock():
            if self.counter.value + amount > self.limit:
                raise ResourceBudgetExceeded(self.resource, self.counter.value + amount, self.limit, self.hint)
            self.counter.value += amount


def require_within(resource: str, requested: int, limit: int, hint: str = "") -> None:
    """
    Raise if a one-shot request exceeds a hard cap.

    Args:
        resource: Name of the capped resource
        requested: Requested size
        limit: Hard cap
        hint: Suggestion appended to the error message
    """
    if requested > limit:
        raise ResourceBudgetExceeded(resource, requested, limit, hint)

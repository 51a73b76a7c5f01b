"""Exception types shared across the package."""


class TilepepsError(Exception):
    """Base class for all package errors."""


class InvalidInput(TilepepsError, ValueError):
    """Malformed input: bad files, inconsistent shapes, violated preconditions."""


class BudgetExceeded(TilepepsError):
    """An exact computation would exceed its configured size budget.

    Raised instead of silently approximating.
    """

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: size {size} exceeds budget {budget}")

class PreconditionError(ValueError):
    """An argument violates the documented precondition of an operation."""


class HypothesisError(PreconditionError):
    """The Walsh transfer relation required by a criterion does not hold."""


class BudgetExceeded(RuntimeError):
    """The requested exact computation is above the configured size budget."""

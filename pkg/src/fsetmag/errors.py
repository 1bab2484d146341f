"""Exception hierarchy shared by all modules."""


class FsetmagError(Exception):
    """Base class for every error raised by the library."""


class UsageError(FsetmagError):
    """An operation was called outside its contract (e.g. mismatched cutoffs)."""


class ValidationError(FsetmagError):
    """Input data violates a structural axiom. ``witness`` names the culprit."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PreconditionError(ValidationError):
    """A documented precondition of an operation does not hold."""


class StrategyError(FsetmagError):
    """The requested algorithm cannot be applied to this input."""


class NotInvertibleError(FsetmagError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class HorizonError(FsetmagError):
    """A request reaches past the exactness horizon of a truncated object."""


class ResourceError(FsetmagError):
    """A configured size guardrail was exceeded."""

    def __init__(self, message, cells=None, limit=None):
        super().__init__(message)
        self.cells = cells
        self.limit = limit

"""Exception types shared across the package."""


class PavingLabError(ValueError):
    """Input rejected by a precondition check."""


class BudgetExceeded(PavingLabError):
    """A search would exceed its configured size budget."""

    def __init__(self, message, advice=None):
        super().__init__(message if advice is None else f"{message}; {advice}")
        self.advice = advice


class NoCertificate(PavingLabError):
    """A transfer or bound could not be certified at the requested level."""

    def __init__(self, message, delta=None, level=None):
        super().__init__(message)
        self.delta = delta
        self.level = level


class NotPartitionable(PavingLabError):
    """No partition into the requested number of independent sets was found."""


class SchemaVersionError(PavingLabError):
    """A stored report uses an unsupported schema version."""

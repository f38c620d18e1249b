"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ResourceError(RuntimeError):
    """A request would exceed a configured memory or size budget."""


class BudgetError(ResourceError):
    """An enumeration was refused because its cost exceeds the stated budget."""

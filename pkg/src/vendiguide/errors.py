"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An input breaks a documented precondition or invariant."""


class NumericalError(RuntimeError):
    """A numerical routine failed; the message carries diagnostics."""

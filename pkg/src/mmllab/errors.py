"""Exceptions for numerical guards (mapped to exit code 3 by the CLI)."""


class NumericalGuardError(ValueError):
    pass


class AliasingError(NumericalGuardError):
    """Output frequencies would wrap around the lattice."""


class BudgetError(NumericalGuardError):
    """Requested computation exceeds the configured size budget."""

"""Exception types shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, DomainError
exits 2, NumericalError exits 3.
"""


class SparseCPError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SparseCPError, ValueError):
    """Inputs lie outside the mathematical domain of a formula."""


class NumericalError(SparseCPError, RuntimeError):
    """A numerical procedure failed (bracketing, overflow, no convergence)."""

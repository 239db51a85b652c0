"""Exception types shared across the package."""


class SqewitError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(SqewitError, ValueError):
    """A Fock-space dimension or index is out of range."""


class ContractViolationError(SqewitError, ValueError):
    """An input breaks a documented precondition (non-Hermitian matrix,
    mismatched dimensions, invalid parameter range)."""


class ResourceCapError(SqewitError, RuntimeError):
    """A two-mode build would exceed the configured memory cap."""


class InputFormatError(SqewitError, ValueError):
    """A state file or config file does not match its schema."""


class TruncationLossError(SqewitError, ValueError):
    """State construction lost too much norm to the dimensional cutoff."""

    def __init__(self, message: str, required_dim: int | None = None):
        super().__init__(message)
        self.required_dim = required_dim


class ProjectionAnnihilatedError(SqewitError, ValueError):
    """A post-selection projector annihilated the state (success norm ~ 0)."""


class OptimizerFailure(SqewitError, RuntimeError):
    """A numerical minimization failed to converge from every start."""

"""Error types shared across the package."""


class SpinkickError(Exception):
    """Base class for package-specific errors."""


class NumericalContractError(SpinkickError):
    """A numerical invariant (norm, residual, value range) was violated."""


class ResourceCapError(SpinkickError):
    """Requested problem size exceeds the configured resource cap."""

"""Shared exception types. CLI maps ConfigError-family to exit 2, the rest to exit 3."""


class ShapeError(ValueError):
    """Operands have non-conformable shapes; message names both shapes."""


class NumericDomainError(ValueError):
    """Non-finite or otherwise out-of-domain numeric input."""


class ConfigError(ValueError):
    """Invalid configuration value or unknown configuration key."""


class ContractError(RuntimeError):
    """A caller violated an API contract (e.g. non-scalar loss, bad permutation)."""


class CapacityError(ValueError):
    """More ground-truth instances than prediction slots; raise num_queries."""


class DatasetError(ValueError):
    """Malformed annotation/manifest input; message lists the offending records."""


class GenerationError(RuntimeError):
    """Synthetic scene placement failed after bounded retries."""


class TrainingAbort(RuntimeError):
    """Training hit a non-finite loss; message carries the offending sample id."""

"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Bad user input: parameters, flags, or config values out of domain."""


class SolverError(RuntimeError):
    """A numerical routine failed an internal guarantee (should not happen
    for validated configurations)."""

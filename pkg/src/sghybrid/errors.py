"""Exception types shared across the package."""


class DimensionError(ValueError):
    """A vector does not match the dimension of its space, or is not finite."""


class DomainError(ValueError):
    """A point lies outside the domain of a mapping (or misses a lookup table)."""


class ConfigError(ValueError):
    """Invalid configuration: bad parameters, empty sampling plans, bad JSON."""


class PreconditionError(ValueError):
    """A check was called without the hypotheses it requires."""


class SolverError(RuntimeError):
    """The LP backend failed for a reason other than infeasibility."""

"""Exception types shared across the toolkit."""


class InvlearnError(Exception):
    """Base class for all toolkit errors."""


class SpecificationError(InvlearnError):
    """Malformed input: dimension mismatch, asymmetric matrix, bad config."""


class NumericError(InvlearnError):
    """Numerical breakdown inside a solver (tiny pivot, iteration cap)."""


class InfeasibleError(InvlearnError):
    """A constraint system admits no point.

    Carries a Phase-I certificate: the residual infeasibility measure and
    the dual row weights that witness it.
    """

    def __init__(self, message, residual=None, certificate=None):
        super().__init__(message)
        self.residual = residual
        self.certificate = certificate


class NoRationalizableSolutionError(InvlearnError):
    """No constraint-activation pattern admits a normalized parameter."""


class RealizabilityError(InvlearnError):
    """No relevant subset of the requested cardinality is realizable."""

    def __init__(self, message, blocking=None):
        super().__init__(message)
        self.blocking = blocking or []


class GenerationError(InvlearnError):
    """Random instance generation exhausted its retry budget."""

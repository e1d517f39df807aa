"""Inverse learning toolkit.

Learn a representative optimal decision from noisy observations of a
linear program's solution, navigate the observation-constraint tradeoff,
characterize compatible objective parameters, and diagnose identifiability.
"""

from .errors import (
    GenerationError,
    InfeasibleError,
    InvlearnError,
    NoRationalizableSolutionError,
    NumericError,
    RealizabilityError,
    SpecificationError,
)

__version__ = "0.1.0"

__all__ = [
    "GenerationError",
    "InfeasibleError",
    "InvlearnError",
    "NoRationalizableSolutionError",
    "NumericError",
    "RealizabilityError",
    "SpecificationError",
    "__version__",
]

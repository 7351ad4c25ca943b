"""Spectral analysis of the Hahn-Exton q-Bessel Jacobi matrix family."""

from .errors import (
    BracketError,
    DomainError,
    IllConditionedError,
    NonConvergedError,
    OverflowGuardError,
    PoleError,
    QSpecError,
)
from .params import DEFAULT_TOL, QNuParams

__all__ = [
    "BracketError",
    "DEFAULT_TOL",
    "DomainError",
    "IllConditionedError",
    "NonConvergedError",
    "OverflowGuardError",
    "PoleError",
    "QNuParams",
    "QSpecError",
]
__version__ = "0.1.0"

from __future__ import annotations

import math
import os
from dataclasses import dataclass

from .errors import DomainError

DEFAULT_TOL = 1e-12


def default_tol() -> float:
    """Default tolerance, overridable through the ``QSPEC_TOL`` environment variable."""
    raw = os.environ.get("QSPEC_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError as exc:
        raise DomainError(f"QSPEC_TOL={raw!r} is not a number") from exc
    if not tol > 0:
        raise DomainError(f"QSPEC_TOL must be positive, got {raw!r}")
    return tol


@dataclass(frozen=True)
class QNuParams:
    """The ambient pair (q, nu) with a tolerance.

    Negative nu is not accepted; the operator for -nu is q**(-nu) times the one
    for nu (see :func:`qspec.jacobi.scaling_factor`).
    """

    q: float
    nu: float
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        q, nu, tol = float(self.q), float(self.nu), float(self.tol)
        if not (0.0 < q < 1.0):
            raise DomainError(f"q must lie strictly inside (0, 1), got {self.q}")
        if not (nu >= 0.0) or math.isinf(nu):
            raise DomainError(f"nu must be a finite number >= 0, got {self.nu}")
        if not (tol > 0.0):
            raise DomainError(f"tol must be positive, got {self.tol}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "tol", tol)

    @property
    def qnu(self) -> float:
        return self.q**self.nu

    @property
    def indeterminate(self) -> bool:
        """True when the minimal operator has deficiency indices (1, 1), i.e. nu < 1."""
        return self.nu < 1.0

    def require_indeterminate(self, what: str) -> None:
        if not self.indeterminate:
            raise DomainError(f"{what} requires 0 <= nu < 1 (got nu={self.nu})")

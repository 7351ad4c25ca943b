"""Independent eigenvalue oracle: Sturm bisection on N x N truncations of T.

Deliberately self-contained.  The matrix entries are recomputed here and
nothing from the characteristic-function or hypergeometric code is imported,
so agreement with the Phi zeros is a genuine cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import QNuParams

_TINY = np.finfo(float).tiny
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class TruncatedOperator:
    """Leading N x N block of T: diagonal beta_0..beta_{N-1}, off-diagonal alpha_0..alpha_{N-2}."""

    params: QNuParams
    N: int
    diag: np.ndarray
    offdiag: np.ndarray

    @classmethod
    def build(cls, params: QNuParams, N: int) -> TruncatedOperator:
        if N < 1:
            raise DomainError(f"N must be >= 1, got {N}")
        q, nu = params.q, params.nu
        n = np.arange(N, dtype=float)
        diag = (1.0 + q**nu) * q ** (-n)
        off = -(q ** (-n[:-1] + (nu - 1.0) / 2.0))
        diag.setflags(write=False)
        off.setflags(write=False)
        return cls(params, N, diag, off)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def gershgorin(self) -> tuple[float, float]:
        return _gershgorin(self.diag, self.offdiag)


def _gershgorin(diag: np.ndarray, off: np.ndarray) -> tuple[float, float]:
    rad = np.zeros_like(diag)
    rad[:-1] += np.abs(off)
    rad[1:] += np.abs(off)
    return float(np.min(diag - rad)), float(np.max(diag + rad))


def sturm_count(op: TruncatedOperator, lam) -> np.ndarray:
    """Number of eigenvalues strictly below each entry of ``lam``.

    Counts negative pivots of the LDL^T factorization of T - lam.  The pivot
    update is written as alpha * (alpha / d) so that alpha^2 never forms, and
    pivots are kept away from zero by a floor proportional to the entries.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    diag, off = op.diag, op.offdiag
    count = np.zeros(lam.shape, dtype=int)
    d = diag[0] - lam
    for i in range(op.N):
        if i > 0:
            a = off[i - 1]
            d = (diag[i] - lam) - a * (a / d)
        floor = _TINY + _EPS * _EPS * abs(diag[i])
        d = np.where(np.abs(d) < floor, -floor, d)
        count += d < 0.0
    return count


def sturm_eigenvalues(op: TruncatedOperator, count: int, abs_tol: float = 1e-12) -> list[float]:
    """The ``count`` smallest eigenvalues by simultaneous bisection."""
    if not 1 <= count <= op.N:
        raise DomainError(f"count must lie in 1..{op.N}, got {count}")
    lower, _ = op.gershgorin()
    # Cauchy interlacing: lambda_count(T_N) <= max eigenvalue of the leading count x count block
    _, upper = _gershgorin(op.diag[:count], op.offdiag[: count - 1])
    k = np.arange(count)
    lo = np.full(count, lower)
    hi = np.full(count, upper)
    for _ in range(5000):
        width = hi - lo
        if np.all(width <= np.maximum(abs_tol, 4.0 * _EPS * np.abs(hi))):
            break
        mid = 0.5 * (lo + hi)
        below = sturm_count(op, mid) > k
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return (0.5 * (lo + hi)).tolist()


def compare_friedrichs(params: QNuParams, count: int, N: int, reference=None) -> float:
    """max_m |xi_m^(trunc) - xi_m| / xi_m over the first ``count`` levels.

    ``reference`` holds the Phi zeros; when omitted they are computed by the
    spectra module.  That import happens lazily so the truncation side stays
    independent of the characteristic functions.
    """
    if reference is None:
        from .spectra import friedrichs_spectrum

        reference = friedrichs_spectrum(params, count).eigenvalues
    ref = np.asarray(reference[:count], dtype=float)
    trunc = np.asarray(sturm_eigenvalues(TruncatedOperator.build(params, N), count))
    return float(np.max(np.abs(trunc - ref) / np.abs(ref)))

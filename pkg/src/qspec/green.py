"""Green matrix G = (T^F)^(-1) built from the kernel solutions Q1, Q2."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergedError
from .jacobi import KernelSolutions, apply_T
from .params import QNuParams


def green_entry(params: QNuParams, j: int, k: int) -> float:
    """G_{j,k} = Q1(min(j,k)) Q2(max(j,k))."""
    if j < 0 or k < 0:
        raise DomainError("Green matrix indices must be >= 0")
    ker = KernelSolutions(params)
    lo, hi = min(j, k), max(j, k)
    return ker.Q1(lo) * ker.Q2(hi)


@dataclass(frozen=True)
class GreenTruncation:
    params: QNuParams
    N: int
    G: np.ndarray

    def frobenius_sq(self) -> float:
        return float(np.sum(self.G * self.G))


def green_truncation(params: QNuParams, N: int) -> GreenTruncation:
    ker = KernelSolutions(params)
    q1 = ker.Q1_array(N)
    q2 = ker.Q2_array(N)
    idx = np.arange(N)
    lo = np.minimum.outer(idx, idx)
    hi = np.maximum.outer(idx, idx)
    G = q1[lo] * q2[hi]
    G.setflags(write=False)
    return GreenTruncation(params, N, G)


def hs_norm_sq_closed(params: QNuParams) -> float:
    """Closed form of ||G||_HS^2 (nu > 0)."""
    if params.nu <= 0.0:
        raise DomainError("hs_norm_sq_closed requires nu > 0")
    q, nu = params.q, params.nu
    return (1.0 + q ** (2.0 + nu)) / ((1.0 - q * q) * (1.0 - q ** (1.0 + nu)) ** 2 * (1.0 - q ** (2.0 + nu)))


def xi1_lower_bound_sq(params: QNuParams) -> float:
    """Lower bound on xi_1^2 from xi_1 >= 1 / ||G||_HS.

    For nu = 0 the closed form is not available and the bound is taken from the
    HS norm summed directly.
    """
    if params.nu > 0.0:
        return 1.0 / hs_norm_sq_closed(params)
    return 1.0 / hs_norm_sq_series(params)


def hs_norm_sq_series(params: QNuParams, tol: float = 1e-16) -> float:
    """||G||_HS^2 via the single sum sum_j Q1(j)^2 Q2(j)^2 (1 + 2 sum_{k>j} (Q2(k)/Q2(j))^2)."""
    ker = KernelSolutions(params)
    q, nu = params.q, params.nu
    r = q ** (1.0 + nu)  # (Q2(k+1)/Q2(k))^2
    factor = 1.0 + 2.0 * r / (1.0 - r)
    total = 0.0
    for j in range(100000):
        t = (ker.Q1(j) * ker.Q2(j)) ** 2 * factor
        total += t
        if j > 5 and t < tol * total:
            return total
    raise NonConvergedError("HS norm series did not converge")


def quadratic_form(params: QNuParams, f) -> float:
    """<f, G f> = sum_k q^k (sum_j q^((1+nu)j/2) f_{k+j})^2 for finitely supported f."""
    f = np.asarray(f, dtype=float)
    q, nu = params.q, params.nu
    w = q ** ((1.0 + nu) * np.arange(len(f)) / 2.0)
    total = 0.0
    for k in range(len(f)):
        inner = float(np.dot(w[: len(f) - k], f[k:]))
        total += q**k * inner * inner
    return total


def quadratic_form_entrywise(params: QNuParams, f) -> float:
    f = np.asarray(f, dtype=float)
    G = green_truncation(params, len(f)).G
    return float(f @ G @ f)


def inverse_residual(params: QNuParams, f, N: int, boundary_rows: int = 2) -> float:
    """||T (G_N f) - f|| over rows 0..N-1-boundary_rows.

    The last rows are excluded because T couples row N-1 to the absent index N.
    With ``boundary_rows=0`` the truncation defect of the final row is included.
    """
    f = np.zeros(N) if f is None else np.asarray(f, dtype=float)
    if len(f) > N:
        raise DomainError("support of f exceeds N")
    fN = np.zeros(N)
    fN[: len(f)] = f
    g = green_truncation(params, N).G @ fN
    r = apply_T(params, g) - fN
    keep = N - boundary_rows
    return float(np.linalg.norm(r[:keep]))


def power_iteration_max(G: np.ndarray, tol: float = 1e-15, maxiter: int = 100000) -> float:
    """Largest eigenvalue of a symmetric positive matrix by power iteration."""
    v = np.ones(G.shape[0]) / np.sqrt(G.shape[0])
    lam = 0.0
    for _ in range(maxiter):
        w = G @ v
        lam_new = float(v @ w)
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v = w / nrm
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    raise NonConvergedError("power iteration did not converge")


def green_xi1_estimate(params: QNuParams, N: int) -> float:
    """1 / lambda_max(G_N), which tends to the smallest eigenvalue of T^F."""
    return 1.0 / power_iteration_max(green_truncation(params, N).G)

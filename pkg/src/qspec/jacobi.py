"""The Jacobi matrix family T^(nu), its formal eigenvector P^_n(x) and related sequences.

Conventions (q fixed, 0 < q < 1):

    alpha_n = -q^(-n + (nu-1)/2),   beta_n = (1 + q^nu) q^(-n)

P^_n(x) is the formal eigenvector of T normalized by P^_{-1} = 0, P^_0 = 1.
Numerically it is carried in the bounded scaling

    H_n = q^((nu-1) n / 2) P^_n(x),
    H_{n+1} = (1 + q^nu - x q^n) H_n - q^nu H_{n-1},   H_{-1} = 0, H_0 = 1,

which follows from substituting the scaling into the eigenvalue recurrence.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IllConditionedError, OverflowGuardError
from .params import QNuParams
from .qhyper import phi_2_1_terminating, q_pochhammer

SequenceLike = Sequence[float] | np.ndarray | Callable[[int], float]

TAIL_WINDOW = 8
_MAX_COND = 1e10
_EXPLICIT_MAX_N = 60


def entries(params: QNuParams, n: int) -> tuple[float, float]:
    """Return (alpha_n, beta_n)."""
    if n < 0:
        raise DomainError(f"matrix index must be >= 0, got {n}")
    q, nu = params.q, params.nu
    return -(q ** (-n + (nu - 1.0) / 2.0)), (1.0 + q**nu) * q ** (-n)


def alpha(params: QNuParams, n: int) -> float:
    # Defined for every integer n; |alpha_{-1}| = q^((nu+1)/2) is the value the
    # factorization T = A^H A assigns to the absent entry.
    return -(params.q ** (-n + (params.nu - 1.0) / 2.0))


def entries_arrays(params: QNuParams, N: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal beta_0..beta_{N-1} and off-diagonal alpha_0..alpha_{N-2}."""
    n = np.arange(N, dtype=float)
    q, nu = params.q, params.nu
    diag = (1.0 + q**nu) * q ** (-n)
    off = -(q ** (-n[:-1] + (nu - 1.0) / 2.0))
    return diag, off


def scaling_factor(nu: float, q: float) -> float:
    """q^(-nu): spec(T^(-nu)) = q^(-nu) spec(T^(nu))."""
    return q ** (-nu)


# ---------------------------------------------------------------------------
# kernel solutions at x = 0


@dataclass(frozen=True)
class KernelSolutions:
    """Q1, Q2: solutions of the x = 0 recurrence on all of Z.

    Q1 satisfies Q1(-1) = 0, Q1(0) = 1, so Q1(n) = P^_n(0); Q2 is the minimal
    solution at +infinity.  W_n(Q1, Q2) = 1.
    """

    params: QNuParams

    def Q1(self, n: int) -> float:
        q, nu = self.params.q, self.params.nu
        if nu == 0.0:
            return (n + 1) * q ** (n / 2.0)
        return (q ** ((1.0 - nu) * n / 2.0) - q ** (nu + (1.0 + nu) * n / 2.0)) / (1.0 - q**nu)

    def Q2(self, n: int) -> float:
        q, nu = self.params.q, self.params.nu
        return q ** ((1.0 + nu) * n / 2.0)

    def Q1_array(self, N: int) -> np.ndarray:
        return np.array([self.Q1(n) for n in range(N)])

    def Q2_array(self, N: int) -> np.ndarray:
        return self.params.q ** ((1.0 + self.params.nu) * np.arange(N) / 2.0)

    def scaled_Q1(self, n: int) -> float:
        """q^((nu-1) n / 2) Q1(n), bounded for n >= 0."""
        q, nu = self.params.q, self.params.nu
        if nu == 0.0:
            return float(n + 1)
        return (1.0 - q ** (nu * (n + 1))) / (1.0 - q**nu)


def kernel_solutions(params: QNuParams) -> KernelSolutions:
    return KernelSolutions(params)


def const_coeff_residual(params: QNuParams, Q: Callable[[int], float], n: int) -> float:
    """q^((nu-1)/2) Q_{n+1} - (1 + q^nu) Q_n + q^((nu+1)/2) Q_{n-1}."""
    q, nu = params.q, params.nu
    return q ** ((nu - 1.0) / 2.0) * Q(n + 1) - (1.0 + q**nu) * Q(n) + q ** ((nu + 1.0) / 2.0) * Q(n - 1)


# ---------------------------------------------------------------------------
# formal eigenvector P^_n(x)


@dataclass(frozen=True)
class ScaledPolySeq:
    """H_0..H_length-1 with H_n = q^((nu-1) n/2) P^_n(x)."""

    params: QNuParams
    x: float
    H: tuple[float, ...]

    @property
    def length(self) -> int:
        return len(self.H)

    def phat(self, n: int) -> float:
        """Unscaled P^_n(x)."""
        if n == -1:
            return 0.0
        return self.H[n] * self.params.q ** (-(self.params.nu - 1.0) * n / 2.0)

    def phat_array(self) -> np.ndarray:
        n = np.arange(self.length)
        return np.asarray(self.H) * self.params.q ** (-(self.params.nu - 1.0) * n / 2.0)

    def hn_bound(self, n: int) -> float:
        """(-a; q)_n / (1 - q^nu) with a = |x| / (1 - q^nu); valid for nu > 0."""
        one_m = 1.0 - self.params.qnu
        return q_pochhammer(-abs(self.x) / one_m, self.params.q, n) / one_m


def iter_scaled(params: QNuParams, x: float):
    """Yield H_0, H_1, ... indefinitely."""
    q, qnu = params.q, params.qnu
    h_prev, h = 0.0, 1.0
    qn = 1.0
    while True:
        yield h
        h_prev, h = h, (1.0 + qnu - x * qn) * h - qnu * h_prev
        qn *= q


def scaled_poly_seq(params: QNuParams, x: float, N: int) -> ScaledPolySeq:
    """H_0..H_N from the three-term recurrence (N + 1 values)."""
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    gen = iter_scaled(params, x)
    return ScaledPolySeq(params, float(x), tuple(next(gen) for _ in range(N + 1)))


def poly_via_volterra(params: QNuParams, x: float, N: int) -> ScaledPolySeq:
    """H_0..H_N from the summation relation

        P^_n(x) = Q1(n) - x q^((1-nu)/2) sum_{k=0}^{n} Q1(n-k-1) q^k P^_k(x),

    evaluated in the H scaling, where it reads
    H_n = Q1~(n) - x sum_{k<n} Q1~(n-k-1) q^k H_k with Q1~(m) = q^((nu-1)m/2) Q1(m).
    The k = n summand carries Q1(-1) = 0 and is dropped.
    """
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    ker = KernelSolutions(params)
    q = params.q
    kern = np.array([ker.scaled_Q1(m) for m in range(N + 1)])
    weighted = np.empty(N + 1)  # q^k H_k
    H = np.empty(N + 1)
    for n in range(N + 1):
        # sum_{k=0}^{n-1} Q1~(n-k-1) q^k H_k
        conv = float(np.dot(kern[n - 1 :: -1][:n], weighted[:n])) if n else 0.0
        H[n] = kern[n] - x * conv
        weighted[n] = q**n * H[n]
    return ScaledPolySeq(params, float(x), tuple(H.tolist()))


def poly_explicit(params: QNuParams, x: float, n: int) -> float:
    """P^_n(x) from the closed 2phi1 expansion; a small-n cross-check only."""
    if params.nu <= 0.0:
        raise DomainError("poly_explicit requires nu > 0")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    if n > _EXPLICIT_MAX_N:
        raise OverflowGuardError(f"poly_explicit is limited to n <= {_EXPLICIT_MAX_N} in double precision")
    q, nu = params.q, params.nu
    total = 0.0
    for j in range(n + 1):
        coef = q ** (n * (j - nu / 2.0)) * q_pochhammer(q ** (-n), q, j) / q_pochhammer(q, q, j)
        inner = phi_2_1_terminating(q ** (j - n), q ** (j + 1), q ** (-n), q, q ** (-j + nu), n - j)
        total += coef * inner * x**j
    return q ** (n / 2.0) * total


def phat_coefficients(params: QNuParams, degree: int, N: int) -> np.ndarray:
    """Scaled Taylor coefficients h[k, j] = q^((nu-1)k/2) [x^j] P^_k(x), k <= N, j <= degree.

    Obtained by running the H recurrence on coefficient vectors truncated at
    ``degree``; the truncation is exact because -x q^n H_n only raises degrees.
    """
    q, qnu = params.q, params.qnu
    out = np.zeros((N + 1, degree + 1))
    prev = np.zeros(degree + 1)
    cur = np.zeros(degree + 1)
    cur[0] = 1.0
    qn = 1.0
    for k in range(N + 1):
        out[k] = cur
        nxt = (1.0 + qnu) * cur - qnu * prev
        nxt[1:] -= qn * cur[:-1]
        prev, cur = cur, nxt
        qn *= q
    return out


# ---------------------------------------------------------------------------
# Wronskian, factor matrix, asymptotic constants


def _value(f: SequenceLike, n: int) -> float:
    if callable(f):
        return f(n)
    return f[n]


def wronskian(params: QNuParams, f: SequenceLike, g: SequenceLike, n: int) -> float:
    """W_n(f, g) = alpha_n (f_n g_{n+1} - g_n f_{n+1})."""
    fn, fn1 = _value(f, n), _value(f, n + 1)
    gn, gn1 = _value(g, n), _value(g, n + 1)
    return alpha(params, n) * (fn * gn1 - gn * fn1)


def factor_matrix_apply(params: QNuParams, f: Sequence[float] | np.ndarray) -> np.ndarray:
    """(A f)_n = q^(-(n-nu)/2) f_n - q^(-(n-1)/2) f_{n-1}, truncated to len(f).

    T = A^H A; for a finitely supported f pad one trailing zero to keep the
    full image.
    """
    f = np.asarray(f, dtype=float)
    q, nu = params.q, params.nu
    n = np.arange(len(f), dtype=float)
    out = q ** (-(n - nu) / 2.0) * f
    out[1:] -= q ** (-(n[1:] - 1.0) / 2.0) * f[:-1]
    return out


def apply_T(params: QNuParams, f: Sequence[float] | np.ndarray) -> np.ndarray:
    """Rows 0..len(f)-1 of T f with f_n = 0 beyond the given prefix."""
    f = np.asarray(f, dtype=float)
    diag, off = entries_arrays(params, len(f))
    out = diag * f
    out[:-1] += off * f[1:]
    out[1:] += off * f[:-1]
    return out


def quadratic_form_T(params: QNuParams, f: Sequence[float] | np.ndarray) -> float:
    """<f, T f> for a finitely supported real f."""
    f = np.asarray(f, dtype=float)
    return float(np.dot(f, apply_T(params, f)))


def quadratic_form_T_squares(params: QNuParams, f: Sequence[float] | np.ndarray) -> float:
    """<f, T f> as the positive sum |alpha_{-1}| q^((nu-1)/2) f_0^2 + sum |alpha_{n-1}| (...)^2."""
    f = np.asarray(f, dtype=float)
    q, nu = params.q, params.nu
    total = abs(alpha(params, -1)) * q ** ((nu - 1.0) / 2.0) * f[0] ** 2
    for n in range(1, len(f) + 1):
        fn = f[n] if n < len(f) else 0.0
        total += abs(alpha(params, n - 1)) * (q ** ((nu - 1.0) / 4.0) * fn - q ** (-(nu - 1.0) / 4.0) * f[n - 1]) ** 2
    return float(total)


@dataclass(frozen=True)
class AsymptoticConstants:
    C1: float
    C2: float
    quality: float

    @property
    def ratio(self) -> float:
        """C2 / C1, the boundary parameter kappa of the extension f belongs to."""
        return self.C2 / self.C1 if self.C1 != 0.0 else math.copysign(math.inf, self.C2)


def asymptotic_profiles(params: QNuParams, n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Leading profiles (g1, g2) with f_n ~ C1 g1_n + C2 g2_n."""
    q, nu = params.q, params.nu
    n = np.asarray(n, dtype=float)
    if nu == 0.0:
        return (n + 1.0) * q ** (n / 2.0), q ** (n / 2.0)
    return q ** ((1.0 - nu) * n / 2.0), q ** ((1.0 + nu) * n / 2.0)


def extract_constants(params: QNuParams, f: Sequence[float] | np.ndarray, window: int = TAIL_WINDOW) -> AsymptoticConstants:
    """Fit f_n = C1 g1_n + C2 g2_n on the last ``window`` entries of f.

    Only meaningful in the indeterminate regime 0 <= nu < 1.  ``quality`` is
    the relative residual of the least-squares fit.
    """
    params.require_indeterminate("extract_constants")
    f = np.asarray(f, dtype=float)
    N = len(f)
    if N < window or window < 2:
        raise DomainError(f"need at least window={window} >= 2 entries, got {N}")
    n = np.arange(N - window, N)
    g1, g2 = asymptotic_profiles(params, n)
    # divide rows by g1 and rescale the second column to unit size
    col2 = g2 / g1
    s2 = np.max(np.abs(col2))
    A = np.column_stack([np.ones(window), col2 / s2])
    rhs = f[n] / g1
    cond = np.linalg.cond(A)
    if not math.isfinite(cond) or cond > _MAX_COND:
        raise IllConditionedError(f"tail-window fit is ill-conditioned (cond={cond:.3g})")
    coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    resid = rhs - A @ coef
    quality = float(np.linalg.norm(resid) / max(np.linalg.norm(rhs), np.finfo(float).tiny))
    return AsymptoticConstants(float(coef[0]), float(coef[1] / s2), quality)

"""Discrete spectra of the Friedrichs extension and of the extensions T(kappa).

Eigenvalues of T^F are the zeros of Phi; eigenvalues of T(kappa) are the
roots of kappa Phi + Psi, which interlace with the zeros of Phi.  Zeros of Phi
are bracketed by a sign scan on a geometric grid (16 points per factor 1/q,
matching the asymptotic spacing xi_{m+1} / xi_m -> 1/q) and refined with
Brent's method.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .charfn import phi, psi
from .errors import BracketError, DomainError
from .jacobi import KernelSolutions, apply_T, entries_arrays, scaled_poly_seq
from .params import QNuParams
from .qhyper import hahn_exton_J, hahn_exton_J_dz, phi_1_1

SCAN_STEPS_PER_LEVEL = 16
LOW_EXPANSIONS = 40
_EPS = 2.0**-52
_SIGNIFICANT = 1e-4


class ExtensionKind(str, enum.Enum):
    FRIEDRICHS = "FRIEDRICHS"
    KAPPA = "KAPPA"


@dataclass(frozen=True)
class ExtensionId:
    kind: ExtensionKind
    kappa: float | None = None

    def __post_init__(self):
        if self.kind is ExtensionKind.KAPPA:
            if self.kappa is None or not math.isfinite(self.kappa):
                raise DomainError("a KAPPA extension needs a finite kappa")
        elif self.kappa is not None:
            raise DomainError("the Friedrichs extension carries no kappa")

    @classmethod
    def friedrichs(cls) -> ExtensionId:
        return cls(ExtensionKind.FRIEDRICHS)

    @classmethod
    def of_kappa(cls, kappa: float) -> ExtensionId:
        return cls(ExtensionKind.KAPPA, float(kappa))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues xi_1 < xi_2 < ... with their residuals and refinement brackets.

    ``residuals`` holds |F(xi)| / max(1, |xi F'(xi)|), the relative distance to
    the exact root to first order.  Raw |F(xi)| grows like eps |xi F'(xi)| and
    is meaningless for large xi.
    """

    ext: ExtensionId
    eigenvalues: tuple[float, ...]
    residuals: tuple[float, ...]
    brackets: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class BesselZeros:
    params: QNuParams
    w: tuple[float, ...]


@dataclass(frozen=True)
class Eigenvector:
    """Closed-form eigenvector ``u`` and the polynomial-route vector ``phat``.

    ``defect`` is the relative distance of u from the line through phat on the
    prefix where |u_k| >= 1e-4 max|u|; beyond it the forward recurrence for
    phat loses the recessive solution.
    """

    u: np.ndarray
    phat: np.ndarray
    defect: float


def semibound(params: QNuParams) -> float:
    """Lower bound on xi_1^2 for the Friedrichs extension."""
    q, nu = params.q, params.nu
    return (1.0 - q * q) * (1.0 - q ** (1.0 + nu)) ** 2 * (1.0 - q ** (2.0 + nu)) / (1.0 + q ** (2.0 + nu))


def _phi_value(params: QNuParams):
    return lambda x: phi(params, x).value


def _char_fn(params: QNuParams, kappa: float):
    return lambda x: kappa * phi(params, x).value + psi(params, x).value


def _refine(f, lo: float, hi: float) -> float:
    return brentq(f, lo, hi, xtol=1e-300, rtol=4.0 * _EPS, maxiter=500)


def _residual(f, x: float) -> float:
    h = max(abs(x), 1.0) * 1e-7
    slope = abs(x) * abs(f(x + h) - f(x - h)) / (2.0 * h)
    return abs(f(x)) / max(1.0, slope)


def _build(ext, f, roots, brackets) -> Spectrum:
    res = tuple(_residual(f, x) for x in roots)
    return Spectrum(ext, tuple(roots), res, tuple(brackets))


def friedrichs_spectrum(params: QNuParams, count: int) -> Spectrum:
    """The ``count`` smallest zeros of Phi."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    f = _phi_value(params)
    step = params.q ** (-1.0 / SCAN_STEPS_PER_LEVEL)
    x = 0.99 * math.sqrt(semibound(params))
    x_max = x * params.q ** -(count + 40)
    fx = f(x)
    if fx <= 0.0:
        raise BracketError("Phi is not positive below the spectral lower bound", cell=(0.0, x))
    roots, brackets = [], []
    while len(roots) < count:
        x2 = x * step
        if x2 > x_max:
            raise BracketError(f"found only {len(roots)} of {count} zeros of Phi below {x_max:.6g}", cell=(x, x2))
        f2 = f(x2)
        if fx == 0.0:
            roots.append(x)
            brackets.append((x, x))
        elif fx * f2 < 0.0:
            roots.append(_refine(f, x, x2))
            brackets.append((x, x2))
        x, fx = x2, f2
    return _build(ExtensionId.friedrichs(), f, roots, brackets)


def _kappa_roots(params: QNuParams, kappa: float, fried: Spectrum, count: int):
    f = _char_fn(params, kappa)
    xi = fried.eigenvalues
    roots, brackets = [], []
    # lowest level: expand downward from xi_1 until F changes sign
    hi = xi[0]
    f_hi = f(hi)
    for k in range(LOW_EXPANSIONS + 1):
        lo = hi - 0.5 * hi * 4.0**k
        f_lo = f(lo)
        if f_lo * f_hi < 0.0:
            break
    else:
        raise BracketError(f"no root of kappa Phi + Psi below xi_1 for kappa={kappa}", cell=(lo, hi))
    roots.append(_refine(f, lo, hi))
    brackets.append((lo, hi))
    for n in range(1, count):
        lo, hi = xi[n - 1], xi[n]
        if f(lo) * f(hi) >= 0.0:
            raise BracketError(f"kappa Phi + Psi shows no sign change on level {n + 1}", cell=(lo, hi))
        roots.append(_refine(f, lo, hi))
        brackets.append((lo, hi))
    return f, roots, brackets


def kappa_spectrum(params: QNuParams, kappa: float, count: int, fried: Spectrum | None = None) -> Spectrum:
    """The ``count`` smallest roots of kappa Phi + Psi (0 <= nu < 1).

    Root n lies in (xi_{n-1}, xi_n) of the Friedrichs spectrum; the lowest one
    lies below xi_1 and may be negative.
    """
    params.require_indeterminate("kappa_spectrum")
    ext = ExtensionId.of_kappa(kappa)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if fried is None or len(fried.eigenvalues) < count:
        fried = friedrichs_spectrum(params, count)
    f, roots, brackets = _kappa_roots(params, ext.kappa, fried, count)
    return _build(ext, f, roots, brackets)


def kappa_sweep(params: QNuParams, kappas, count: int) -> np.ndarray:
    """Matrix of xi_n(kappa): one row per kappa, one column per level."""
    params.require_indeterminate("kappa_sweep")
    fried = friedrichs_spectrum(params, count)
    return np.array([kappa_spectrum(params, k, count, fried).eigenvalues for k in kappas])


def interlaces(kappa_levels, friedrichs_levels) -> bool:
    """xi_1(kappa) < xi_1 < xi_2(kappa) < xi_2 < ..."""
    merged = []
    for a, b in zip(kappa_levels, friedrichs_levels):
        merged += [a, b]
    return all(a < b for a, b in zip(merged, merged[1:]))


def strictly_increasing(values) -> bool:
    return all(a < b for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# eigenvectors


def _closed_form_vector(params: QNuParams, ext: ExtensionId, x: float, N: int) -> np.ndarray:
    q, nu = params.q, params.nu
    k = np.arange(N)
    if ext.kind is ExtensionKind.FRIEDRICHS:
        if x <= 0.0:
            raise DomainError("Friedrichs eigenvalues are positive")
        rx = math.sqrt(x)
        return np.array([q ** (j / 2.0) * hahn_exton_J(nu, q ** (j / 2.0) * rx, q, params.tol) for j in k])
    tol = params.tol
    a = [phi_1_1(q ** (nu + 1.0), q, q ** (j + 1.0) * x, tol).value for j in k]
    b = [phi_1_1(q ** (1.0 - nu), q, q ** (j + 1.0 - nu) * x, tol).value for j in k]
    g1 = q ** ((1.0 - nu) * k / 2.0)
    g2 = q ** ((1.0 + nu) * k / 2.0)
    return ext.kappa * g2 * np.array(a) + g1 * np.array(b)


def eigenvector(params: QNuParams, ext: ExtensionId, x: float, N: int) -> Eigenvector:
    """Components k = 0..N-1 of the eigenvector of ``ext`` at eigenvalue ``x``.

    Friedrichs: u_k = q^(k/2) J_nu(q^(k/2) sqrt(x); q).
    T(kappa), nu > 0: u_k = kappa q^((1+nu)k/2) 1phi1(0; q^(nu+1); q, q^(k+1) x)
                          + q^((1-nu)k/2) 1phi1(0; q^(1-nu); q, q^(k+1-nu) x),
    normalized so that C1 = 1 and C2 = kappa.  At nu = 0 the T(kappa) vector is
    the polynomial sequence P^_k(x) itself.
    """
    if N < 2:
        raise DomainError("N must be >= 2")
    if ext.kind is ExtensionKind.KAPPA:
        params.require_indeterminate("a KAPPA eigenvector")
    p = scaled_poly_seq(params, x, N - 1).phat_array()
    if ext.kind is ExtensionKind.KAPPA and params.nu == 0.0:
        return Eigenvector(p, p, 0.0)
    u = _closed_form_vector(params, ext, x, N)
    return Eigenvector(u, p, collinearity_defect(u, p))


def collinearity_defect(u, p) -> float:
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    mask = np.abs(u) >= _SIGNIFICANT * np.max(np.abs(u))
    # the significant prefix ends at the first index that drops below the threshold
    end = int(np.argmin(mask)) if not mask.all() else len(u)
    end = max(end, 1)
    uu, pp = u[:end], p[:end]
    pnorm = float(np.dot(pp, pp))
    if pnorm == 0.0:
        return 1.0
    c = float(np.dot(uu, pp) / pnorm)
    return float(np.linalg.norm(uu - c * pp) / np.linalg.norm(uu))


def eigen_residual(params: QNuParams, u, x: float, rowwise: bool = False) -> float:
    """||(T - x) u|| over rows 0..N-3, relative to ||u||.

    With ``rowwise`` each row is instead divided by the sum of the magnitudes
    of its three terms and the maximum is returned; this removes the rounding
    growth carried by the q^(-k) entries deep in the vector.
    """
    u = np.asarray(u, dtype=float)
    r = apply_T(params, u) - x * u
    if not rowwise:
        return float(np.linalg.norm(r[:-2]) / np.linalg.norm(u))
    diag, off = entries_arrays(params, len(u))
    mag = np.abs(diag - x) * np.abs(u)
    mag[:-1] += np.abs(off * u[1:])
    mag[1:] += np.abs(off * u[:-1])
    mag = np.where(mag > 0.0, mag, 1.0)
    return float(np.max(np.abs(r[:-2]) / mag[:-2]))


# ---------------------------------------------------------------------------
# q-Bessel zeros and orthogonality


def bessel_zeros(params: QNuParams, count: int, fried: Spectrum | None = None) -> BesselZeros:
    """Positive zeros w_m of J_nu(z; q), from xi_m = q w_m^2."""
    if fried is None or len(fried.eigenvalues) < count:
        fried = friedrichs_spectrum(params, count)
    w = tuple(math.sqrt(xi / params.q) for xi in fried.eigenvalues[:count])
    return BesselZeros(params, w)


def _zeros(params: QNuParams, count: int, zeros: BesselZeros | None) -> tuple[float, ...]:
    if zeros is None or len(zeros.w) < count:
        zeros = bessel_zeros(params, count)
    return zeros.w


def orthogonality_qJ(params: QNuParams, m: int, n: int, N: int | None = None,
                     zeros: BesselZeros | None = None) -> tuple[float, float]:
    """sum_k q^k J(q^((k+1)/2) w_m) J(q^((k+1)/2) w_n) and its closed-form value.

    The closed form is -(q^(-1+nu/2) / (2 w_n)) J(q^(1/2) w_n) J'(w_n) for
    m = n and zero otherwise.  With N=None the sum runs until three successive
    terms fall below 1e-17 times the partial sum.
    """
    if m < 1 or n < 1:
        raise DomainError("zero indices start at 1")
    q, nu, tol = params.q, params.nu, params.tol
    w = _zeros(params, max(m, n), zeros)
    wm, wn = w[m - 1], w[n - 1]
    total = 0.0
    small = 0
    k = 0
    while True:
        s = q ** ((k + 1) / 2.0)
        t = q**k * hahn_exton_J(nu, s * wm, q, tol) * hahn_exton_J(nu, s * wn, q, tol)
        total += t
        k += 1
        if N is not None:
            if k >= N:
                break
        else:
            small = small + 1 if abs(t) < 1e-17 * abs(total) else 0
            if small >= 3 or k > 5000:
                break
    rhs = 0.0
    if m == n:
        rhs = -(q ** (-1.0 + nu / 2.0) / (2.0 * wn)) * hahn_exton_J(nu, math.sqrt(q) * wn, q, tol) * hahn_exton_J_dz(nu, wn, q, tol)
    return total, rhs


def _direct_weight(params: QNuParams, wk: float) -> float:
    q, nu, tol = params.q, params.nu, params.tol
    return -2.0 * q ** (1.0 - nu / 2.0) * wk * hahn_exton_J(nu, math.sqrt(q) * wk, q, tol) / hahn_exton_J_dz(nu, wk, q, tol)


def _stable_weight(params: QNuParams, k: int, xi: float) -> float:
    """1 / sum_j P^_j(xi)^2 for the k-th Friedrichs eigenvalue xi.

    Equal to the direct weight through the diagonal q-Bessel orthogonality
    relation.  P^_j is taken from the forward recurrence up to the peak of the
    eigenvector and from the closed-form eigenvector u_j beyond it, where the
    forward recurrence starts losing the recessive solution.
    """
    q, nu = params.q, params.nu
    J = k + int(math.ceil(92.0 / ((1.0 + nu) * math.log(1.0 / q)))) + 2
    u = _closed_form_vector(params, ExtensionId.friedrichs(), xi, J + 1)
    p = scaled_poly_seq(params, xi, J).phat_array()
    lo = max(0, k - 4)
    js = lo + int(np.argmax(np.abs(u[lo:])))
    scale = p[js] / u[js]
    norm_sq = float(np.dot(p[:js], p[:js])) + scale * scale * float(np.dot(u[js:], u[js:]))
    return 1.0 / norm_sq


def orthogonality_weights(params: QNuParams, K: int, zeros: BesselZeros | None = None,
                          method: str = "stable") -> np.ndarray:
    """Weights -2 q^(1-nu/2) w_k J(q^(1/2) w_k) / J'(w_k), k = 1..K.

    ``method="direct"`` evaluates the quotient as written.  Since q^(1/2) w_k
    lies superexponentially close to w_{k-1}, J(q^(1/2) w_k) is then rounding
    noise beyond the first handful of zeros.  ``method="stable"`` (default)
    uses the equivalent form 1 / ||P^(q w_k^2)||^2.
    """
    w = _zeros(params, K, zeros)[:K]
    if method == "direct":
        return np.array([_direct_weight(params, wk) for wk in w])
    if method != "stable":
        raise DomainError(f"unknown weight method {method!r}")
    return np.array([_stable_weight(params, k, params.q * wk * wk) for k, wk in enumerate(w, start=1)])


def orthogonality_polys(params: QNuParams, m: int, n: int, K: int = 25,
                        zeros: BesselZeros | None = None, method: str = "stable") -> float:
    """K-term partial sum of sum_k weight_k P^_m(q w_k^2) P^_n(q w_k^2), to compare with delta_{m,n}."""
    q = params.q
    w = _zeros(params, K, zeros)[:K]
    weights = orthogonality_weights(params, K, BesselZeros(params, tuple(w)), method)
    top = max(m, n)
    total = 0.0
    for weight, wk in zip(weights, w):
        ph = scaled_poly_seq(params, q * wk * wk, top)
        total += weight * ph.phat(m) * ph.phat(n)
    return total


def form_identity_check(params: QNuParams, kappa: float, N: int | None = None) -> tuple[float, float]:
    """<h, T h> for h = tau Q2 + Q1, tau = (kappa + q^nu) / (1 - q^nu), against tau (tau + 1).

    The series sum_n h_n (T h)_n has exactly vanishing terms for n >= 1, so the
    truncated sum carries only rounding, which grows like eps q^(-nu n); N
    defaults to the largest depth where that stays below 1e-14.
    """
    if not (0.0 < params.nu < 1.0):
        raise DomainError("form_identity_check requires 0 < nu < 1")
    q, nu = params.q, params.nu
    tau = (kappa + params.qnu) / (1.0 - params.qnu)
    if N is None:
        N = max(2, min(200, int(math.log(1e-14 / _EPS) / (nu * math.log(1.0 / q)))))
    ker = KernelSolutions(params)
    h = tau * ker.Q2_array(N + 1) + ker.Q1_array(N + 1)
    Th = apply_T(params, h)[:N]  # rows < N see the true h_{n+1}
    return float(np.dot(h[:N], Th)), tau * (tau + 1.0)

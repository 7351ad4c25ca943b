"""q-Pochhammer symbols, the 1phi1(0; b; q, z) series and the Hahn-Exton q-Bessel function.

The series

    1phi1(0; b; q, z) = sum_n (-1)^n q^(n(n-1)/2) z^n / ((q; q)_n (b; q)_n)

is entire in z, but for z > 0 its terms alternate and can exceed the sum by
many orders of magnitude (already ~1e13 at q = 0.9, z = 5).  When the
rounding estimate of the direct sum is not within tolerance, the value is
continued outward from a small argument with the q-difference equation

    (b/q) f(q^2 y) + (y - 1 - b/q) f(q y) + f(y) = 0,

which the series satisfies for every b.  Run from small |y| toward large |y|
this recursion propagates the regular solution in its dominant direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NonConvergedError, OverflowGuardError, PoleError
from .params import DEFAULT_TOL

INFINITY = math.inf

_EPS = 2.0**-52
_MAX_TERMS = 20000


@dataclass(frozen=True)
class SeriesValue:
    """A truncated-series value with its truncation and rounding diagnostics.

    ``tail_bound`` bounds the omitted tail; ``rounding_err`` estimates the
    floating-point error of the summation (or of the q-shift continuation).
    """

    value: float
    terms_used: int
    tail_bound: float
    rounding_err: float = 0.0
    method: str = "direct"

    @property
    def est_err(self) -> float:
        return self.tail_bound + self.rounding_err


def _check_q(q: float) -> None:
    if not (0.0 < q < 1.0):
        raise DomainError(f"q must lie strictly inside (0, 1), got {q}")


def q_pochhammer(a: float, q: float, n: int | float) -> float:
    """(a; q)_n for finite n >= 0 or n = INFINITY."""
    _check_q(q)
    if n == INFINITY:
        return _q_pochhammer_inf(a, q)[0]
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer or INFINITY, got {n}")
    prod = 1.0
    aqk = a
    for _ in range(int(n)):
        prod *= 1.0 - aqk
        aqk *= q
    return prod


def _q_pochhammer_inf(a: float, q: float) -> tuple[float, int, float]:
    # Stops once |a q^k| < eps (1 - q); the omitted factors then change the
    # product by a relative amount below ~eps.
    prod = 1.0
    aqk = a
    k = 0
    cutoff = _EPS * (1.0 - q)
    while abs(aqk) >= cutoff:
        prod *= 1.0 - aqk
        aqk *= q
        k += 1
        if k > _MAX_TERMS:
            raise NonConvergedError("infinite q-Pochhammer product did not converge")
    # |log prod_{j>=k}(1 - a q^j)| <= |a q^k| / ((1 - q)(1 - |a q^k|))
    tail = abs(aqk) / ((1.0 - q) * (1.0 - abs(aqk)))
    return prod, k, abs(prod) * math.expm1(tail)


def q_pochhammer_inf(a: float, q: float) -> SeriesValue:
    """(a; q)_inf with the number of factors used and a bound on the omitted part."""
    _check_q(q)
    value, k, tail = _q_pochhammer_inf(a, q)
    return SeriesValue(value, k, tail)


def _direct(b: float, q: float, z: float, tol: float):
    """Direct summation of 1phi1(0; b; q, z) and its z-derivative."""
    s = 1.0
    ds = 0.0
    abs_s = 1.0
    abs_ds = 0.0
    term = 1.0
    dcoef = 0.0  # derivative term n * c_n * z^(n-1)
    hump = math.log(abs(z)) / math.log(1.0 / q) if abs(z) > 1.0 else 0.0
    qn = 1.0  # q^(n-1) entering the ratio for term n
    n = 0
    while True:
        n += 1
        bq = b * qn
        den_b = 1.0 - bq
        if abs(den_b) < 1e-14:
            raise PoleError(f"1phi1 lower parameter b={b} hits q^(-{n - 1})")
        ratio = -qn * z / ((1.0 - qn * q) * den_b)
        # derivative of c_n z^n is n c_n z^(n-1); build it from the previous term
        if z != 0.0:
            term *= ratio
            dcoef = n * term / z
        else:
            dcoef = -1.0 / ((1.0 - q) * (1.0 - b)) if n == 1 else 0.0
            term = 0.0
        s += term
        ds += dcoef
        abs_s += abs(term)
        abs_ds += abs(dcoef)
        if not math.isfinite(s):
            raise OverflowGuardError(f"1phi1 terms overflow at z={z}")
        qn *= q
        if n > hump and abs(term) < tol * max(1.0, abs(s)) and abs(dcoef) < tol * max(1.0, abs(ds)):
            break
        if n > _MAX_TERMS:
            raise NonConvergedError(f"1phi1 series did not converge at z={z}")
    # bound on the ratio of all later consecutive terms
    den = min(abs(1.0 - b * qn), 1.0) * (1.0 - q)
    r = abs(qn * z) / den
    if r < 1.0:
        tail = abs(term) * r / (1.0 - r)
        dtail = abs(dcoef) * r / (1.0 - r) * (n + 1) / max(n, 1)
    else:
        tail, dtail = abs(term), abs(dcoef)
    round_v = 4.0 * _EPS * abs_s
    round_d = 4.0 * _EPS * abs_ds
    return (s, tail, round_v), (ds, dtail, round_d), n + 1


def _phi11_pair(b: float, q: float, z: float, tol: float) -> tuple[SeriesValue, SeriesValue]:
    _check_q(q)
    if not (tol > 0.0):
        raise DomainError("tol must be positive")
    (v, vt, vr), (d, dt, dr), terms = _direct(b, q, z, tol)
    if vr <= tol * max(1.0, abs(v)) and dr <= tol * max(1.0, abs(d)):
        return (SeriesValue(v, terms, vt, vr, "direct"), SeriesValue(d, terms, dt, dr, "direct"))
    return _continued(b, q, z, tol)


def _continued(b: float, q: float, z: float, tol: float) -> tuple[SeriesValue, SeriesValue]:
    # Find the smallest shift K for which the direct sum at q^K z is clean.
    k = 0
    yk = z
    while True:
        k += 1
        yk *= q
        (v, vt, vr), (d, dt, dr), terms = _direct(b, q, yk, tol)
        if vr <= tol * max(1.0, abs(v)) and dr <= tol * max(1.0, abs(d)):
            break
        if k > _MAX_TERMS:
            raise NonConvergedError("q-shift continuation could not find a clean seed")
    (v2, vt2, _), (d2, dt2, _), terms2 = _direct(b, q, yk * q, tol)
    # f_hi = f(y_{j+1}), f_lo2 = f(y_{j+2}) while stepping j = K-1, ..., 0
    f1, f2 = v, v2
    g1, g2 = d, d2
    c = b / q
    y = yk
    top = 0.0
    for _ in range(k):
        y /= q
        lin = y - 1.0 - c
        f0 = -c * f2 - lin * f1
        g0 = -c * q * q * g2 - f1 - lin * q * g1
        top = abs(c * f2) + abs(lin * f1)
        dtop = abs(c * q * q * g2) + abs(f1) + abs(lin * q * g1)
        f2, f1 = f1, f0
        g2, g1 = g1, g0
        if not (math.isfinite(f1) and math.isfinite(g1)):
            raise OverflowGuardError(f"1phi1 continuation overflows at z={z}")
    seed_rel = max(vt / max(1.0, abs(v)), vt2 / max(1.0, abs(v2)))
    dseed_rel = max(dt / max(1.0, abs(d)), dt2 / max(1.0, abs(d2)))
    scale = 4.0 * _EPS * math.sqrt(k + 1.0)
    value = SeriesValue(f1, terms + terms2 + k, seed_rel * max(1.0, abs(f1)), scale * top, "q-shift")
    deriv = SeriesValue(g1, terms + terms2 + k, dseed_rel * max(1.0, abs(g1)), scale * dtop, "q-shift")
    return value, deriv


def phi_1_1(b: float, q: float, z: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """Evaluate 1phi1(0; b; q, z).

    Raises PoleError if b = q^(-m) for some m >= 0 reached by the summation.
    """
    return _phi11_pair(b, q, z, tol)[0]


def phi_1_1_dz(b: float, q: float, z: float, tol: float = DEFAULT_TOL) -> SeriesValue:
    """z-derivative of 1phi1(0; b; q, z), summed term by term."""
    return _phi11_pair(b, q, z, tol)[1]


def phi_2_1_terminating(a1: float, a2: float, b1: float, q: float, z: float, nterms: int) -> float:
    """Finite sum of 2phi1(a1, a2; b1; q, z) over n = 0..nterms.

    Used with a1 = q^(-m), which makes every term past n = m vanish.
    """
    s = 0.0
    term = 1.0
    for n in range(nterms + 1):
        s += term
        if n == nterms:
            break
        den = (1.0 - q ** (n + 1)) * (1.0 - b1 * q**n)
        if den == 0.0:
            raise PoleError(f"2phi1 lower parameter b1={b1} hits q^(-{n})")
        term *= (1.0 - a1 * q**n) * (1.0 - a2 * q**n) * z / den
    return s


def _power(z: float, nu: float) -> float:
    if z > 0.0:
        return z**nu
    if z == 0.0:
        if nu > 0.0:
            return 0.0
        if nu == 0.0:
            return 1.0
        raise DomainError(f"z^nu is singular at z=0 for nu={nu}")
    if float(nu).is_integer():
        return (-1.0) ** int(nu) * (-z) ** nu
    raise DomainError(f"z={z} < 0 needs integer nu for a real z^nu (got nu={nu})")


def _bessel_prefactor(nu: float, q: float) -> float:
    return q_pochhammer(q ** (nu + 1.0), q, INFINITY) / q_pochhammer(q, q, INFINITY)


def hahn_exton_J(nu: float, z: float, q: float, tol: float = DEFAULT_TOL) -> float:
    """Hahn-Exton q-Bessel function J_nu(z; q).

    Negative z is allowed only for integer nu, where J_nu(-z) = (-1)^nu J_nu(z).
    Negative non-integer nu is accepted (it is needed for J_{-nu} in the
    extension eigenvectors) as long as z > 0.
    """
    _check_q(q)
    zp = _power(z, nu)
    if zp == 0.0:
        return 0.0
    series = phi_1_1(q ** (nu + 1.0), q, q * z * z, tol)
    return _bessel_prefactor(nu, q) * zp * series.value


def hahn_exton_J_dz(nu: float, z: float, q: float, tol: float = DEFAULT_TOL) -> float:
    """dJ_nu(z; q)/dz for z > 0, differentiating the defining series term by term."""
    _check_q(q)
    if not z > 0.0:
        raise DomainError(f"hahn_exton_J_dz needs z > 0, got {z}")
    val, der = _phi11_pair(q ** (nu + 1.0), q, q * z * z, tol)
    inner = nu * z ** (nu - 1.0) * val.value + 2.0 * q * z ** (nu + 1.0) * der.value
    return _bessel_prefactor(nu, q) * inner


def residual_diffeq(nu: float, z: float, q: float, tol: float = DEFAULT_TOL, relative: bool = True) -> float:
    """Residual of J(qz) + q^(-nu/2)(q z^2 - 1 - q^nu) J(q^(1/2) z) + J(z) = 0.

    With ``relative`` the absolute residual is divided by the sum of the
    magnitudes of the three terms.
    """
    if not z > 0.0:
        raise DomainError(f"residual_diffeq needs z > 0, got {z}")
    t1 = hahn_exton_J(nu, q * z, q, tol)
    t2 = q ** (-nu / 2.0) * (q * z * z - 1.0 - q**nu) * hahn_exton_J(nu, math.sqrt(q) * z, q, tol)
    t3 = hahn_exton_J(nu, z, q, tol)
    res = abs(t1 + t2 + t3)
    if not relative:
        return res
    scale = abs(t1) + abs(t2) + abs(t3)
    return res / scale if scale > 0.0 else res

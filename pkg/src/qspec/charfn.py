"""Characteristic functions Phi (spectrum of the Friedrichs extension) and Psi.

Three routes are provided:

* POLY_LIMIT   Phi as the limit of H_n(x) (nu > 0).  For nu = 0 the sequence
               H_n grows like (n + 1) Phi, and the first difference
               H_n - H_{n-1} is used; it tends to Phi geometrically.
* SERIES_SUM   Phi = (1 - x sum q^k H_k) / (1 - q^nu)  (for nu = 0 the
               denominator is dropped), Psi = (q^nu - x sum q^((1-nu)k) H_k) / (1 - q^nu),
               and at nu = 0  Psi = -x sum (k + 1) q^k H_k.
* HYPERGEOM    the closed 1phi1 forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergedError
from .jacobi import iter_scaled, phat_coefficients
from .params import QNuParams
from .qhyper import phi_1_1, q_pochhammer

DEPTH_CAP = 2000
_EPS = 2.0**-52


class Route(str, enum.Enum):
    POLY_LIMIT = "POLY_LIMIT"
    SERIES_SUM = "SERIES_SUM"
    HYPERGEOM = "HYPERGEOM"


@dataclass(frozen=True)
class CharFnEval:
    x: float
    value: float
    route: Route
    terms: int
    est_err: float


def _as_route(route) -> Route:
    try:
        return Route(route.upper() if isinstance(route, str) else route)
    except ValueError as exc:
        raise DomainError(f"unknown route {route!r}") from exc


def _poly_limit(params: QNuParams, x: float, cap: int) -> CharFnEval:
    tol = params.tol
    differenced = params.nu == 0.0
    rate = params.q if differenced else params.qnu
    gen = iter_scaled(params, x)
    h_prev = next(gen)
    prev = h_prev
    streak = 0
    for n in range(1, cap + 1):
        h = next(gen)
        # for nu = 0 track D_n = H_n - H_{n-1}, which tends to Phi
        cur = h - h_prev if differenced else h
        h_prev = h
        diff = abs(cur - prev)
        streak = streak + 1 if diff < tol * max(1.0, abs(prev)) else 0
        prev = cur
        if streak >= 3:
            # geometric extrapolation of the remaining drift
            err = diff * rate / (1.0 - rate) + 4 * _EPS * max(1.0, abs(h))
            return CharFnEval(x, cur, Route.POLY_LIMIT, n + 1, err)
    raise NonConvergedError(f"POLY_LIMIT did not converge within {cap} iterations at x={x}")


def _weighted_sum(params: QNuParams, x: float, weight, ratio: float, cap: int):
    """S = sum_k weight(k) H_k until the tail is negligible.

    ``weight(k)`` must decay like ``ratio**k`` up to a polynomial factor.  Past
    the hump |x| q^k < 1 the terms decay geometrically (up to the linear
    growth of H_k at nu = 0), and the tail is bounded from the last term with
    a factor 2 margin for that linear growth.
    """
    tol = params.tol
    gen = iter_scaled(params, x)
    s = 0.0
    abs_s = 0.0
    hump = math.log(abs(x)) / math.log(1.0 / params.q) if abs(x) > 1.0 else 0.0
    for k in range(cap + 1):
        t = weight(k) * next(gen)
        s += t
        abs_s += abs(t)
        if k > hump + 2:
            tail = 2.0 * abs(t) * ratio / (1.0 - ratio) * (1.0 + 2.0 / ((k + 1.0) * (1.0 - ratio)))
            if abs(x) * tail < tol * max(1.0, abs(x * s)):
                return s, k + 1, tail, abs_s
    raise NonConvergedError(f"SERIES_SUM did not converge within {cap} terms at x={x}")


def phi(params: QNuParams, x: float, route=Route.HYPERGEOM, cap: int = DEPTH_CAP) -> CharFnEval:
    """Phi(x), whose zeros are the eigenvalues of the Friedrichs extension."""
    route = _as_route(route)
    x = float(x)
    q, nu = params.q, params.nu
    norm = 1.0 if nu == 0.0 else 1.0 / (1.0 - params.qnu)
    if route is Route.POLY_LIMIT:
        return _poly_limit(params, x, cap)
    if route is Route.SERIES_SUM:
        s, terms, tail, abs_s = _weighted_sum(params, x, lambda k: q**k, q, cap)
        value = norm * (1.0 - x * s)
        err = norm * abs(x) * (tail + 4 * _EPS * abs_s) + 4 * _EPS * abs(value)
        return CharFnEval(x, value, route, terms, err)
    sv = phi_1_1(q ** (nu + 1.0), q, x, params.tol)
    return CharFnEval(x, norm * sv.value, route, sv.terms_used, norm * sv.est_err)


def psi(params: QNuParams, x: float, route=None, cap: int = DEPTH_CAP) -> CharFnEval:
    """Psi(x) for 0 <= nu < 1; the roots of kappa Phi + Psi give the spectrum of T(kappa).

    At nu = 0 only the series route exists; ``route=None`` picks HYPERGEOM for
    nu > 0 and SERIES_SUM at nu = 0.
    """
    params.require_indeterminate("psi")
    q, nu = params.q, params.nu
    x = float(x)
    if route is None:
        route = Route.SERIES_SUM if nu == 0.0 else Route.HYPERGEOM
    route = _as_route(route)
    if route is Route.POLY_LIMIT:
        raise DomainError("psi has no POLY_LIMIT route")
    if nu == 0.0:
        if route is not Route.SERIES_SUM:
            raise DomainError("psi at nu = 0 is only available through SERIES_SUM")
        s, terms, tail, abs_s = _weighted_sum(params, x, lambda k: (k + 1.0) * q**k, q, cap)
        value = -x * s
        return CharFnEval(x, value, route, terms, abs(x) * (tail + 4 * _EPS * abs_s))
    norm = 1.0 / (1.0 - params.qnu)
    if route is Route.SERIES_SUM:
        r = q ** (1.0 - nu)
        s, terms, tail, abs_s = _weighted_sum(params, x, lambda k: r**k, r, cap)
        value = norm * (params.qnu - x * s)
        err = norm * abs(x) * (tail + 4 * _EPS * abs_s) + 4 * _EPS * abs(value)
        return CharFnEval(x, value, route, terms, err)
    sv = phi_1_1(q ** (1.0 - nu), q, q ** (-nu) * x, params.tol)
    c = params.qnu * norm
    return CharFnEval(x, c * sv.value, route, sv.terms_used, c * sv.est_err)


def agree(a: CharFnEval, b: CharFnEval, floor: float = 1e-10) -> bool:
    """Route agreement within max(est_err_a, est_err_b, floor * max(1, |value|))."""
    scale = max(1.0, abs(a.value), abs(b.value))
    return abs(a.value - b.value) <= max(a.est_err, b.est_err, floor * scale)


def deriv_sum_identity(params: QNuParams, m: int, sigma: float, N: int | None = None) -> tuple[float, float]:
    """Both sides of

        sum_k q^((sigma + (nu-1)/2) k) P^_k^(m)(0)
            = (-1)^m m! q^(m sigma + m(m-1)/2) / ((q^sigma; q)_{m+1} (q^(sigma+nu); q)_{m+1}).

    The left side propagates Taylor coefficient vectors through the recurrence
    (exact, no differencing); N defaults to a depth where q^(sigma N) < 1e-17.
    """
    if params.nu <= 0.0:
        raise DomainError("deriv_sum_identity requires nu > 0")
    if m < 0 or sigma <= 0.0:
        raise DomainError("need m >= 0 and sigma > 0")
    q, nu = params.q, params.nu
    if N is None:
        N = int(math.ceil(40.0 / (sigma * math.log(1.0 / q)))) + 20
    h = phat_coefficients(params, m, N)
    # q^((sigma+(nu-1)/2)k) * q^(-(nu-1)k/2) h[k, m] = q^(sigma k) h[k, m]
    w = q ** (sigma * np.arange(N + 1))
    fact = math.factorial(m)
    lhs = fact * float(np.dot(w, h[:, m]))
    rhs = (-1) ** m * fact * q ** (m * sigma + m * (m - 1) / 2.0)
    rhs /= q_pochhammer(q**sigma, q, m + 1) * q_pochhammer(q ** (sigma + nu), q, m + 1)
    return lhs, rhs


def taylor_coefficient(params: QNuParams, m: int) -> float:
    """[x^m] Phi(x) from the defining power series."""
    q, nu = params.q, params.nu
    c = (-1) ** m * q ** (m * (m - 1) / 2.0) / (q_pochhammer(q, q, m) * q_pochhammer(q ** (nu + 1.0), q, m))
    return c if nu == 0.0 else c / (1.0 - params.qnu)

"""Shared fixtures and the high-precision mpmath reference implementations.

The mpmath helpers are written from the defining series and the raw matrix
recurrence, without touching the package, so they serve as independent oracles.
"""

import mpmath as mp
import pytest

from qspec.params import QNuParams


def mp_phi11(b, q, z, dps=60):
    """1phi1(0; b; q, z) summed at ``dps`` digits."""
    with mp.workdps(dps):
        b, q, z = mp.mpf(b), mp.mpf(q), mp.mpf(z)
        s, t, n = mp.mpf(0), mp.mpf(1), 0
        while True:
            s += t
            t *= -(q**n) * z / ((1 - q ** (n + 1)) * (1 - b * q**n))
            n += 1
            if n > 20 and abs(t) < mp.mpf(10) ** (-dps - 5) * max(1, abs(s)):
                return s


def mp_J(nu, z, q, dps=60):
    with mp.workdps(dps):
        nu, z, q = mp.mpf(nu), mp.mpf(z), mp.mpf(q)
        pref = mp.qp(q ** (nu + 1), q) / mp.qp(q, q)
        return pref * z**nu * mp_phi11(q ** (nu + 1), q, q * z * z, dps)


def mp_Phi(q, nu, x, dps=60):
    with mp.workdps(dps):
        v = mp_phi11(mp.mpf(q) ** (mp.mpf(nu) + 1), q, x, dps)
        return v if nu == 0 else v / (1 - mp.mpf(q) ** mp.mpf(nu))


def mp_phat(q, nu, x, n, dps=60):
    """P^_n(x) from the matrix recurrence alpha_k P_{k+1} + beta_k P_k + alpha_{k-1} P_{k-1} = x P_k."""
    with mp.workdps(dps):
        q, nu, x = mp.mpf(q), mp.mpf(nu), mp.mpf(x)
        pm, p = mp.mpf(0), mp.mpf(1)
        for k in range(n):
            a_k = -(q ** (-k + (nu - 1) / 2))
            a_km = -(q ** (-(k - 1) + (nu - 1) / 2))
            b = (1 + q**nu) * q ** (-k)
            pn = ((x - b) * p - (a_km * pm if k > 0 else 0)) / a_k
            pm, p = p, pn
        return p


@pytest.fixture
def p_half_one():
    return QNuParams(0.5, 1.0)


@pytest.fixture
def p_indet():
    return QNuParams(0.5, 0.5)

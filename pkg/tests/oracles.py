"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath


def z_oracle(t, dps=30):
    """Hardy Z(t) from mpmath's own zeta and theta."""
    with mpmath.workdps(dps):
        return float(mpmath.siegelz(t))


def z_from_definition(t, dps=30):
    """exp(i theta(t)) zeta(1/2 + it), computed from the definition."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        theta = mpmath.im(mpmath.loggamma(mpmath.mpf(1) / 4 + 1j * t / 2)) - t / 2 * mpmath.log(mpmath.pi)
        val = mpmath.exp(1j * theta) * mpmath.zeta(mpmath.mpf(1) / 2 + 1j * t)
        return float(mpmath.re(val)), float(mpmath.im(val))


def theta_oracle(t, dps=30):
    with mpmath.workdps(dps):
        return float(mpmath.siegeltheta(t))


def j_oracle(a, b, dps=20):
    """Integral of Z^2 over [a, b] by mpmath quadrature split at unit steps."""
    with mpmath.workdps(dps):
        pts = [mpmath.mpf(a)]
        k = math.floor(a) + 1
        while k < b:
            pts.append(mpmath.mpf(k))
            k += 1
        pts.append(mpmath.mpf(b))
        return float(mpmath.quad(lambda s: mpmath.siegelz(s) ** 2, pts))


def prime_pi_trial(n):
    """Primes <= n by trial division."""
    count = 0
    for m in range(2, int(n) + 1):
        if all(m % p for p in range(2, math.isqrt(m) + 1)):
            count += 1
    return count


def fermat_brute(epsilon, n_max, z_max):
    """Every (x, y, z, n) with x <= y <= z, 3 <= n, window tested with Fractions."""
    eps = Fraction(epsilon)
    out = set()
    for n in range(3, n_max + 1):
        for z in range(1, z_max + 1):
            for y in range(1, z + 1):
                for x in range(1, y + 1):
                    q = Fraction(x**n + y**n, z**n)
                    if abs(q - 1) < eps:
                        out.add((x, y, z, n))
    return out

"""Bracketed Newton iteration with bisection fallback for monotone functions."""

from __future__ import annotations

import math


class BracketError(RuntimeError):
    """No sign change could be established."""


def expand_bracket(f, lo, hi, upper_limit=math.inf, factor=2.0, max_steps=60):
    """Grow ``hi`` geometrically (relative to ``lo``) until f(lo) <= 0 <= f(hi)."""
    f_lo = f(lo)
    if f_lo > 0:
        raise BracketError(f"f(lo={lo!r}) = {f_lo!r} > 0; root lies below the bracket")
    width = hi - lo
    for _ in range(max_steps):
        f_hi = f(hi)
        if f_hi >= 0:
            return lo, hi, f_lo, f_hi
        lo, f_lo = hi, f_hi
        width *= factor
        hi = min(lo + width, upper_limit)
        if hi <= lo:
            break
    raise BracketError(f"could not bracket a root below {upper_limit!r}")


def newton_bisect(f, fprime, lo, hi, xtol, ftol=0.0, maxiter=200, f_lo=None, f_hi=None):
    """Root of an increasing ``f`` on [lo, hi] with f(lo) <= 0 <= f(hi).

    A Newton step is taken from the current iterate when it lands strictly
    inside the bracket; otherwise the bracket is bisected.
    """
    f_lo = f(lo) if f_lo is None else f_lo
    f_hi = f(hi) if f_hi is None else f_hi
    if f_lo > 0 or f_hi < 0:
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f = {f_lo!r}, {f_hi!r}")
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    # secant guess as a starting point
    x = lo - f_lo * (hi - lo) / (f_hi - f_lo)
    if not lo < x < hi:
        x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if fx == 0 or abs(fx) <= ftol:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        if hi - lo <= xtol:
            return 0.5 * (lo + hi)
        d = fprime(x)
        step_ok = False
        if d > 0 and math.isfinite(d):
            x_new = x - fx / d
            step_ok = lo < x_new < hi
        if not step_ok:
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= 0.5 * xtol:
            # a Newton step this small means we are done up to xtol
            return x_new
        x = x_new
    raise BracketError(f"no convergence after {maxiter} iterations; bracket [{lo!r}, {hi!r}]")

"""Residuals and limit functionals built on J, J1 and the ladder.

Every quantity is assembled from cached J / J1 values, so the algebraic links
between them (the "identity web") hold to rounding error:

* conservation_law_residual - lemma1_residual = -c0
* zero_limit_law_residual(T, r) = conservation(T, r + 1) - conservation(T, r)
* segment_limit_functional(x, N) = scaled((N + 1) x) - scaled(x)

Finite-T values approach the stated limits only as T, tau -> infinity; reports
carry a ``resolution_achieved`` field stating how close the desk-scale values
actually got.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .ladder import LadderConstants, reverse_iter
from .oscillation import DEFAULT_RESOLUTION, build_partition, signed_areas
from .quadrature import Integrator
from .reports import FunctionalReport

T0 = 10.0


@dataclass(frozen=True)
class FermatRational:
    x: int
    y: int
    z: int
    n: int

    def __post_init__(self):
        if min(self.x, self.y, self.z) < 1:
            raise ValueError("x, y, z must be positive integers")
        if self.n < 3:
            raise ValueError("Fermat rationals need n >= 3")

    @property
    def exact(self) -> Fraction:
        return Fraction(self.x**self.n + self.y**self.n, self.z**self.n)

    @property
    def value(self) -> float:
        return float(self.exact)

    @property
    def distance_from_one(self) -> Fraction:
        return abs(self.exact - 1)


def _ctx(consts, integ):
    return consts or LadderConstants(), integ or Integrator()


def kappa_conservation(consts) -> float:
    """log 2 pi - 1 - c, about 0.26."""
    return consts.ln2pi - 1.0 - consts.c


def kappa_lemma2(consts) -> float:
    """log 2 pi - 2 c, about 0.68."""
    return consts.ln2pi - 2.0 * consts.c


def _tower_pair(T, r, consts, integ):
    if r < 1:
        raise ValueError("r must be >= 1")
    lo = reverse_iter(T, r - 1, consts, integ)
    hi = reverse_iter(lo, 1, consts, integ)
    return lo, hi


def increment_integral(T, r=1, consts=None, integ=None) -> float:
    """Integral of Z^2 over [^{r-1}T, ^rT]; compare with (1 - c) ^{r-1}T."""
    consts, integ = _ctx(consts, integ)
    lo, hi = _tower_pair(T, r, consts, integ)
    return integ.integrate(lo, hi)


def lemma1_residual(T, r=1, consts=None, integ=None, via_areas=False, resolution=DEFAULT_RESOLUTION):
    consts, integ = _ctx(consts, integ)
    lo, hi = _tower_pair(T, r, consts, integ)
    if via_areas:
        plus, minus = signed_areas(build_partition(lo, integ.cfg, resolution), integ)
        j1 = plus - minus
    else:
        j1 = float(integ.J1(lo)[0])
    return j1 - integ.integrate(lo, hi) - kappa_conservation(consts) * lo + consts.c0


def lemma2_residual(rho, consts=None, integ=None) -> float:
    consts, integ = _ctx(consts, integ)
    if not rho > 0:
        raise ValueError("rho must be positive")
    return float(integ.J1(rho)[0]) - kappa_lemma2(consts) * rho


def scaled_argument(x, tau, consts) -> float:
    return x * tau / kappa_lemma2(consts)


def scaled_limit_functional(x, tau, consts=None, integ=None) -> float:
    """(1 / tau) J1(x tau / (log 2 pi - 2c)); tends to x."""
    consts, integ = _ctx(consts, integ)
    if not x > 0:
        raise ValueError("x must be positive")
    arg = scaled_argument(x, tau, consts)
    if not arg >= T0:
        raise ValueError(f"tau too small: J1 argument {arg!r} below T0 = {T0}")
    return float(integ.J1(arg)[0]) / tau


def fermat_functional(fr: FermatRational, tau, consts=None, integ=None) -> float:
    return scaled_limit_functional(fr.value, tau, consts, integ)


def conservation_law_residual(T, r=1, consts=None, integ=None, resolution=DEFAULT_RESOLUTION,
                              partition=None):
    """Bracket of the area conservation law; tends to -c0."""
    consts, integ = _ctx(consts, integ)
    lo, hi = _tower_pair(T, r, consts, integ)
    part = partition if partition is not None else build_partition(lo, integ.cfg, resolution)
    plus, minus = signed_areas(part, integ, upper=lo)
    return plus - minus - integ.integrate(lo, hi) - kappa_conservation(consts) * lo


def zero_limit_law_residual(T, r=1, consts=None, integ=None, resolution=DEFAULT_RESOLUTION,
                            partition=None):
    """Segment form of the conservation law over (^{r-1}T, ^rT]; tends to 0."""
    consts, integ = _ctx(consts, integ)
    lo, hi = _tower_pair(T, r, consts, integ)
    top = reverse_iter(hi, 1, consts, integ)
    part = partition if partition is not None else build_partition(hi, integ.cfg, resolution)
    plus, minus = signed_areas(part, integ, lower=lo, upper=hi)
    return (
        plus
        - minus
        + integ.integrate(lo, hi)
        - integ.integrate(hi, top)
        - kappa_conservation(consts) * (hi - lo)
    )


def formula_4_1_functional(x, tau, consts=None, integ=None) -> float:
    """(1 / tau) integral of Z^2 over [a, ^1a], a = x tau / (1 - c); tends to x."""
    consts, integ = _ctx(consts, integ)
    if not x > 0:
        raise ValueError("x must be positive")
    a = x * tau / (1.0 - consts.c)
    return increment_integral(a, 1, consts, integ) / tau


def segment_limit_functional(x, N, tau, consts=None, integ=None) -> float:
    """(1 / tau) integral of log t - Z^2 over [a, (N + 1) a], a = x tau / (log 2 pi - 2c).

    Evaluated as scaled((N + 1) x, tau) - scaled(x, tau), the telescoped sum over
    the segments [m a, (m + 1) a], m = 1..N.  Tends to N x.
    """
    if not (isinstance(N, int) and N >= 1):
        raise ValueError(f"N must be a positive integer, got {N!r}")
    consts, integ = _ctx(consts, integ)
    return scaled_limit_functional((N + 1) * x, tau, consts, integ) - scaled_limit_functional(
        x, tau, consts, integ
    )


def enumerate_fermat_rationals(epsilon, n_max, z_max) -> list:
    """All x <= y <= z <= z_max, 3 <= n <= n_max with (x^n + y^n) / z^n in (1 - eps, 1 + eps).

    The window test is done in exact rational arithmetic.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    eps = Fraction(epsilon)
    out = []
    for n in range(3, n_max + 1):
        for z in range(1, z_max + 1):
            zn = z**n
            lo, hi = (1 - eps) * zn, (1 + eps) * zn
            for y in range(1, z + 1):
                yn = y**n
                if yn >= hi:
                    break
                for x in range(1, y + 1):
                    s = x**n + yn
                    if s >= hi:
                        break
                    if s > lo:
                        out.append(FermatRational(x, y, z, n))
    return out


# -- reports ---------------------------------------------------------------------------------


def _report(name, grid, values, target, consts, integ, targets=None, metadata=None):
    rep = FunctionalReport(
        name=name,
        grid=grid,
        values=values,
        target=target,
        targets=targets,
        constants=consts.as_dict(),
        cache_fingerprint=integ.fingerprint,
        metadata=metadata or {},
    )
    if rep.values:
        rep.resolution_achieved = abs(rep.residuals[-1])
    return rep


def lemma1_report(T_grid, r=1, consts=None, integ=None):
    consts, integ = _ctx(consts, integ)
    grid = sorted(T_grid)
    vals = [lemma1_residual(T, r, consts, integ) for T in grid]
    return _report("lemma1", grid, vals, 0.0, consts, integ, metadata={"r": r})


def increment_report(T_grid, r=1, consts=None, integ=None):
    """Ratio of the increment integral to (1 - c) ^{r-1}T, plus the T^0.4 envelope."""
    consts, integ = _ctx(consts, integ)
    grid = sorted(T_grid)
    ratios, raw, env = [], [], []
    for T in grid:
        lo = reverse_iter(T, r - 1, consts, integ)
        v = increment_integral(T, r, consts, integ)
        raw.append(v)
        ratios.append(v / ((1.0 - consts.c) * lo))
        env.append((v - (1.0 - consts.c) * lo) / T**0.4)
    return _report("increment", grid, ratios, 1.0, consts, integ,
                   metadata={"r": r, "increments": raw, "residual_over_T^0.4": env})


def lemma2_report(rho_grid, consts=None, integ=None):
    consts, integ = _ctx(consts, integ)
    grid = sorted(rho_grid)
    vals = [lemma2_residual(rho, consts, integ) for rho in grid]
    ratios = [float(integ.J1(rho)[0]) / rho for rho in grid]
    return _report("lemma2", grid, vals, 0.0, consts, integ,
                   metadata={"J1_over_rho": ratios, "constant": kappa_lemma2(consts)})


def scaled_report(x, tau_grid, consts=None, integ=None):
    consts, integ = _ctx(consts, integ)
    grid = sorted(tau_grid)
    vals = [scaled_limit_functional(x, tau, consts, integ) for tau in grid]
    return _report("scaled", grid, vals, x, consts, integ, metadata={"x": x})


def fermat_report(fr: FermatRational, tau_grid, consts=None, integ=None):
    """Functional for a Fermat rational next to its exact distance from 1."""
    consts, integ = _ctx(consts, integ)
    grid = sorted(tau_grid)
    vals = [fermat_functional(fr, tau, consts, integ) for tau in grid]
    rep = _report("fermat", grid, vals, fr.value, consts, integ)
    dist = fr.distance_from_one
    rep.metadata = {
        "tuple": [fr.x, fr.y, fr.z, fr.n],
        "rational": f"{fr.exact.numerator}/{fr.exact.denominator}",
        "distance_from_one": float(dist),
        "functional_distance_from_one": [abs(v - 1.0) for v in vals],
        "separable": bool(rep.resolution_achieved is not None and rep.resolution_achieved < float(dist)),
    }
    return rep


def conservation_report(T_grid, r=1, consts=None, integ=None, resolution=DEFAULT_RESOLUTION):
    consts, integ = _ctx(consts, integ)
    grid = sorted(T_grid)
    vals = [conservation_law_residual(T, r, consts, integ, resolution) for T in grid]
    return _report("conservation", grid, vals, -consts.c0, consts, integ, metadata={"r": r})


def zero_limit_report(T_grid, r=1, consts=None, integ=None, resolution=DEFAULT_RESOLUTION):
    consts, integ = _ctx(consts, integ)
    grid = sorted(T_grid)
    vals = [zero_limit_law_residual(T, r, consts, integ, resolution) for T in grid]
    return _report("zero-limit", grid, vals, 0.0, consts, integ, metadata={"r": r})


def formula41_report(x, tau_grid, consts=None, integ=None):
    consts, integ = _ctx(consts, integ)
    grid = sorted(tau_grid)
    vals = [formula_4_1_functional(x, tau, consts, integ) for tau in grid]
    return _report("formula41", grid, vals, x, consts, integ, metadata={"x": x})


def segment_report(x, N, tau_grid, consts=None, integ=None):
    consts, integ = _ctx(consts, integ)
    grid = sorted(tau_grid)
    vals = [segment_limit_functional(x, N, tau, consts, integ) for tau in grid]
    return _report("segment", grid, vals, N * x, consts, integ, metadata={"x": x, "N": N})


def localized_scan(epsilon, N, n_max, z_max, tau, consts=None, integ=None) -> FunctionalReport:
    """Segment functional over Fermat rationals in (1 - eps/N, 1 + eps/N).

    Grid points are the distinct rational values; tuples sharing a value are
    listed together.  ``resolution_achieved`` is the largest distance between a
    functional value and its own limit N * value; a rational is reported as
    separable from the integer N when N |value - 1| exceeds it.
    """
    if not (isinstance(N, int) and N >= 1):
        raise ValueError(f"N must be a positive integer, got {N!r}")
    consts, integ = _ctx(consts, integ)
    rationals = enumerate_fermat_rationals(epsilon / N, n_max, z_max)
    by_value = {}
    for fr in rationals:
        by_value.setdefault(fr.exact, []).append(fr)
    keys = sorted(by_value)
    grid = [float(k) for k in keys]
    vals = [segment_limit_functional(float(k), N, tau, consts, integ) for k in keys]
    targets = [N * g for g in grid]
    rep = FunctionalReport(
        name="localized",
        grid=grid,
        values=vals,
        target=float(N),
        targets=targets,
        constants=consts.as_dict(),
        cache_fingerprint=integ.fingerprint,
    )
    resolution = max((abs(r) for r in rep.residuals), default=None)
    rep.resolution_achieved = resolution
    rep.metadata = {
        "epsilon": epsilon,
        "window": [1 - epsilon / N, 1 + epsilon / N],
        "N": N,
        "tau": tau,
        "points": [
            {
                "rational": f"{k.numerator}/{k.denominator}",
                "tuples": [[fr.x, fr.y, fr.z, fr.n] for fr in by_value[k]],
                "distance_from_N": abs(v - N),
                "exact_limit_distance_from_N": float(abs(N * k - N)),
                "separable": bool(resolution is not None and float(abs(N * k - N)) > resolution),
            }
            for k, v in zip(keys, vals)
        ],
    }
    return rep


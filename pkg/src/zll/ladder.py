"""Jacob's ladder phi_1, its direct and reverse iterations, and the constant c0.

phi_1(T) is the root phi >= 2 of

    J(T) = g(phi) + c0,    g(phi) = phi log phi + (c - log 2 pi) phi,

with the O(log T / T) term dropped.  g is strictly increasing for phi >= 2
because g'(phi) = log phi + 1 + c - log 2 pi > 0 there.  The reverse iterate
^rT solves J(^rT) = g(^{r-1}T) + c0, a root of the monotone J.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .quadrature import Integrator, QuadratureSpec, integrate_intervals
from .reports import FunctionalReport
from .roots import BracketError, expand_bracket, newton_bisect
from .special_functions import zeta_sq_values

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2.0 * math.pi)

# Output of estimate_c0(DEFAULT_DELTA_GRID) with the default evaluator and
# abs_tol=1e-10; regenerate with `zll law estimate-c0`.
DEFAULT_C0 = 3.1415913040882066
DEFAULT_DELTA_GRID = (0.02, 0.01, 0.005, 0.0025)

PHI_FLOOR = 2.0
T_GUARD = 10.0


class LadderError(RuntimeError):
    """Root bracketing failed or a guard was violated."""


class LowConfidenceWarning(UserWarning):
    """Richardson estimates of c0 disagree by more than the allowed spread."""


@dataclass(frozen=True)
class LadderConstants:
    c: float = EULER_GAMMA
    ln2pi: float = LOG_2PI
    c0: float = DEFAULT_C0
    root_tol: float = 1e-10

    def __post_init__(self):
        if not self.ln2pi - 2.0 * self.c > 0:
            raise ValueError("ln2pi - 2c must be positive")
        if not 0 < self.root_tol <= 1e-6:
            raise ValueError("root_tol must lie in (0, 1e-6]")

    def as_dict(self) -> dict:
        return {"c": self.c, "c0": self.c0, "ln2pi": self.ln2pi}


@dataclass
class IterationTower:
    base: float
    levels: list
    k: int
    residuals: list = field(default_factory=list)  # phi1(^rT) - ^{r-1}T, r = 1..k

    def validate(self, tol):
        if len(self.levels) != self.k + 1 or self.levels[0] != self.base:
            raise LadderError("tower levels do not match k")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise LadderError(f"tower not strictly increasing: {self.levels}")
        for r, res in enumerate(self.residuals, start=1):
            if abs(res) > tol * self.levels[r - 1]:
                raise LadderError(f"phi1(^{r}T) misses ^{r - 1}T by {res!r}")


def g(phi, consts: LadderConstants):
    return phi * math.log(phi) + (consts.c - consts.ln2pi) * phi


def g_prime(phi, consts: LadderConstants):
    return math.log(phi) + 1.0 + consts.c - consts.ln2pi


def _solve_g(target, consts, start):
    """phi >= PHI_FLOOR with g(phi) = target."""
    f = lambda phi: g(phi, consts) - target  # noqa: E731
    df = lambda phi: g_prime(phi, consts)  # noqa: E731
    if f(PHI_FLOOR) > 0:
        raise LadderError(f"g(phi) = {target!r} has no root with phi >= {PHI_FLOOR}")
    hi = max(start, 2 * PHI_FLOOR)
    lo, hi, f_lo, f_hi = expand_bracket(f, PHI_FLOOR, hi)
    ftol = consts.root_tol * max(abs(target), 1.0) * 1e-3
    return newton_bisect(f, df, lo, hi, xtol=consts.root_tol * 1e-3 * hi, ftol=ftol,
                         f_lo=f_lo, f_hi=f_hi)


def phi1(T: float, consts: LadderConstants | None = None, integ: Integrator | None = None) -> float:
    consts = consts or LadderConstants()
    integ = integ or Integrator()
    if not T >= T_GUARD:
        raise LadderError(f"phi1 needs T >= {T_GUARD}, got {T!r}")
    target = integ.J_scalar(T) - consts.c0
    return _solve_g(target, consts, start=T)


def phi1_direct_iter(t: float, k: int, consts=None, integ=None) -> float:
    if k < 0:
        raise ValueError("k must be >= 0")
    x = float(t)
    for stage in range(1, k + 1):
        if not x >= T_GUARD:
            raise LadderError(f"direct iteration stage {stage}: argument {x!r} below guard {T_GUARD}")
        x = phi1(x, consts, integ)
    return x


def _reverse_step(prev, consts, integ):
    target = g(prev, consts) + consts.c0
    f = lambda x: integ.J_scalar(x) - target  # noqa: E731
    df = lambda x: float(zeta_sq_values(x, integ.cfg)[0])  # noqa: E731
    width = 2.0 * (1.0 - consts.c) * prev / math.log(prev)
    try:
        lo, hi, f_lo, f_hi = expand_bracket(f, prev, prev + width)
        ftol = consts.root_tol * 1e-3 * abs(target)
        return newton_bisect(f, df, lo, hi, xtol=consts.root_tol * 1e-3 * prev, ftol=ftol,
                             f_lo=f_lo, f_hi=f_hi)
    except BracketError as exc:
        raise LadderError(f"reverse iteration from {prev!r}: {exc}") from exc


def reverse_iter(T: float, r: int, consts=None, integ=None) -> float:
    consts = consts or LadderConstants()
    integ = integ or Integrator()
    if r < 0:
        raise ValueError("r must be >= 0")
    if not T >= T_GUARD:
        raise LadderError(f"reverse iteration needs T >= {T_GUARD}, got {T!r}")
    x = float(T)
    for _ in range(r):
        x = _reverse_step(x, consts, integ)
    return x


def build_tower(T: float, k: int, consts=None, integ=None) -> IterationTower:
    consts = consts or LadderConstants()
    integ = integ or Integrator()
    levels = [float(T)]
    for _ in range(k):
        levels.append(reverse_iter(levels[-1], 1, consts, integ))
    residuals = [phi1(levels[r], consts, integ) - levels[r - 1] for r in range(1, k + 1)]
    tower = IterationTower(base=float(T), levels=levels, k=k, residuals=residuals)
    tower.validate(10 * consts.root_tol)
    return tower


_SIEVE_LIMIT = 10**8


def prime_pi(x: float) -> int:
    """Number of primes <= x (odd-only sieve of Eratosthenes)."""
    if x > _SIEVE_LIMIT:
        raise ValueError(f"prime_pi is limited to x <= {_SIEVE_LIMIT}")
    n = int(math.floor(x))
    if n < 2:
        return 0
    # index i stands for the odd number 2i + 1
    size = (n - 1) // 2 + 1
    sieve = np.ones(size, dtype=bool)
    sieve[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if sieve[i]:
            p = 2 * i + 1
            sieve[(p * p) // 2 :: p] = False
    return int(sieve.sum()) + 1


def tower_asymptotic_report(T_grid, k: int, consts=None, integ=None) -> list:
    """Per level r, (^rT - ^{r-1}T) / ((1 - c) pi(^rT)) across ``T_grid``; target 1."""
    consts = consts or LadderConstants()
    integ = integ or Integrator()
    grid = sorted(float(T) for T in T_grid)
    towers = [build_tower(T, k, consts, integ) for T in grid]
    reports = []
    for r in range(1, k + 1):
        ratios = []
        for tw in towers:
            step = tw.levels[r] - tw.levels[r - 1]
            ratios.append(step / ((1.0 - consts.c) * prime_pi(tw.levels[r])))
        reports.append(
            FunctionalReport(
                name=f"tower-asymptotics-r{r}",
                grid=grid,
                values=ratios,
                target=1.0,
                constants=consts.as_dict(),
                cache_fingerprint=integ.fingerprint,
                metadata={"level": r, "towers": [tw.levels for tw in towers]},
            )
        )
    return reports


@dataclass
class C0Estimate:
    value: float
    deltas: list
    laplace_values: list
    remainders: list
    table: list  # Neville rows, row i uses remainders[0..i]
    spread: float
    low_confidence: bool


def laplace_second_moment(delta: float, integ: Integrator | None = None, tol=1e-14) -> float:
    """D(delta) = integral_0^inf Z(t)^2 exp(-2 delta t) dt, truncated where the envelope is < tol."""
    integ = integ or Integrator()
    if not delta > 0:
        raise ValueError("delta must be positive")
    upper = 1.0
    while math.log(max(upper, math.e)) * math.exp(-2.0 * delta * upper) > tol:
        upper *= 1.1
    edges = np.arange(0.0, math.ceil(upper) + 1.0)
    weight = lambda t: zeta_sq_values(t, integ.cfg) * np.exp(-2.0 * delta * t)  # noqa: E731
    pieces, _ = integrate_intervals(weight, edges[:-1], edges[1:], integ.spec)
    return math.fsum(pieces)


def laplace_main_term(delta: float, consts: LadderConstants) -> float:
    return (consts.c - math.log(4.0 * math.pi * delta)) / (2.0 * math.sin(delta))


def c0_extrapolation(delta_grid=DEFAULT_DELTA_GRID, consts=None, integ=None, max_spread=0.10):
    consts = consts or LadderConstants()
    integ = integ or Integrator(spec=QuadratureSpec(abs_tol=1e-10))
    deltas = [float(d) for d in delta_grid]
    if len(deltas) < 2 or any(d <= 0 for d in deltas):
        raise ValueError("delta_grid needs at least two positive values")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta_grid must be decreasing")
    laplace = [laplace_second_moment(d, integ) for d in deltas]
    rem = [D - laplace_main_term(d, consts) for d, D in zip(deltas, laplace)]
    # Neville extrapolation to delta = 0 of a polynomial in delta
    table = [rem[:]]
    for m in range(1, len(deltas)):
        prev = table[-1]
        row = []
        for i in range(len(prev) - 1):
            d_lo, d_hi = deltas[i], deltas[i + m]
            row.append((d_lo * prev[i + 1] - d_hi * prev[i]) / (d_lo - d_hi))
        table.append(row)
    # successive estimates: last entry of each extrapolation order
    estimates = [row[-1] for row in table]
    value = estimates[-1]
    spread = (max(estimates) - min(estimates)) / abs(value) if value else math.inf
    return C0Estimate(
        value=value,
        deltas=deltas,
        laplace_values=laplace,
        remainders=rem,
        table=table,
        spread=spread,
        low_confidence=spread > max_spread,
    )


def estimate_c0(delta_grid=DEFAULT_DELTA_GRID, consts=None, integ=None) -> float:
    est = c0_extrapolation(delta_grid, consts, integ)
    if est.low_confidence:
        warnings.warn(
            f"c0 extrapolation spread {est.spread:.1%} exceeds 10%", LowConfidenceWarning, stacklevel=2
        )
    return est.value

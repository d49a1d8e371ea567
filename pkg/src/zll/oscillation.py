"""Oscillation of |zeta(1/2 + it)|^2 around the curve y = log t.

f(t) = log t - Z(t)^2 splits (0, T] into the set where f > 0 ("+") and the set
where f <= 0 ("-").  On (0, 1] log t <= 0 <= Z^2, so that piece is "-" without
evaluation and scanning starts at t = 1.

Sampling is anchored on unit cells [k, k + 1); each cell holds m * 2**j equal
steps with m = ceil(1 / resolution) and j the smallest power keeping the step
below half the local mean zero spacing.  Grids for resolutions h and h / 4 (with
1 / h integral) therefore nest, so refining never loses a sign change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .quadrature import Integrator, log_integral
from .special_functions import EvaluatorConfig, z_values

PLUS = "+"
MINUS = "-"

DEFAULT_RESOLUTION = 0.05
BISECTION_WIDTH = 1e-10
TANGENT_LEVEL = 1e-4


@dataclass
class SignedPartition:
    upper: float
    crossings: list
    segments: list  # (a, b, sign), tiling (0, upper]
    resolution: float = DEFAULT_RESOLUTION
    tangencies: list = field(default_factory=list)

    def validate(self):
        if not self.segments:
            raise ValueError("partition has no segments")
        if self.segments[0][0] != 0.0 or self.segments[0][2] != MINUS:
            raise ValueError("first segment must start at 0 with sign '-'")
        if self.segments[-1][1] != self.upper:
            raise ValueError("segments must end at the upper limit")
        for (a0, b0, s0), (a1, b1, s1) in zip(self.segments, self.segments[1:]):
            if b0 != a1:
                raise ValueError(f"gap between segments at {b0!r} / {a1!r}")
            if s0 == s1:
                raise ValueError(f"signs do not alternate at {b0!r}")
        for a, b, _ in self.segments:
            if not b > a:
                raise ValueError(f"empty segment ({a!r}, {b!r})")

    def segments_with_sign(self, sign):
        return [(a, b) for a, b, s in self.segments if s == sign]

    def clipped(self, lower, upper):
        """Segments intersected with (lower, upper]."""
        out = []
        for a, b, s in self.segments:
            lo, hi = max(a, lower), min(b, upper)
            if hi > lo:
                out.append((lo, hi, s))
        return out


def f_values(ts, cfg=None):
    ts = np.asarray(ts, dtype=float)
    z = z_values(ts, cfg)
    return np.log(ts) - z * z


def half_zero_spacing(t):
    spread = math.log(t / (2.0 * math.pi)) if t > 2.0 * math.pi else 0.0
    return math.pi / spread if spread > 0 else math.inf


def sample_grid(a, b, resolution):
    """Nested sampling abscissae covering [a, b], endpoints included."""
    if not resolution > 0:
        raise ValueError("resolution must be positive")
    m = max(1, math.ceil(1.0 / resolution - 1e-9))
    pieces = []
    for k in range(int(math.floor(a)), int(math.ceil(b))):
        n = m
        limit = half_zero_spacing(k + 1.0)
        while 1.0 / n > limit:
            n *= 2
        cell = k + np.arange(n) / n
        pieces.append(cell[(cell > a) & (cell < b)])
    return np.concatenate([[a], *pieces, [b]])


def _bisect(lo, hi, f_lo_pos, cfg, width):
    lo = lo.copy()
    hi = hi.copy()
    while lo.size and np.max(hi - lo) > width:
        mid = 0.5 * (lo + hi)
        pos = f_values(mid, cfg) > 0
        same = pos == f_lo_pos
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _scan(a, b, cfg, resolution):
    ts = sample_grid(a, b, resolution)
    fs = f_values(ts, cfg)
    pos = fs > 0
    change = np.nonzero(pos[1:] != pos[:-1])[0]
    roots = _bisect(ts[change], ts[change + 1], pos[change], cfg, BISECTION_WIDTH)
    # near-touches: local minima of |f| with no sign change on either side
    af = np.abs(fs)
    inner = np.arange(1, ts.size - 1)
    is_min = (af[inner] <= af[inner - 1]) & (af[inner] <= af[inner + 1]) & (af[inner] < TANGENT_LEVEL)
    quiet = (pos[inner] == pos[inner - 1]) & (pos[inner] == pos[inner + 1])
    tangencies = ts[inner[is_min & quiet]].tolist()
    return roots, tangencies, ts, fs


def find_crossings(a, b, cfg=None, resolution=DEFAULT_RESOLUTION) -> list:
    """Sign changes of log t - Z(t)^2 on (a, b), refined to width < 1e-8."""
    if not 0 < a < b:
        raise ValueError(f"need 0 < a < b, got {a!r}, {b!r}")
    roots, _, _, _ = _scan(a, b, cfg or EvaluatorConfig(), resolution)
    return roots.tolist()


def build_partition(T, cfg=None, resolution=DEFAULT_RESOLUTION) -> SignedPartition:
    if not T > 1:
        raise ValueError(f"partition needs T > 1, got {T!r}")
    cfg = cfg or EvaluatorConfig()
    roots, tangencies, _, _ = _scan(1.0, float(T), cfg, resolution)
    edges = [0.0, *roots.tolist(), float(T)]
    segments = []
    sign = MINUS
    for lo, hi in zip(edges, edges[1:]):
        segments.append((lo, hi, sign))
        sign = PLUS if sign == MINUS else MINUS
    part = SignedPartition(
        upper=float(T),
        crossings=roots.tolist(),
        segments=segments,
        resolution=resolution,
        tangencies=tangencies,
    )
    part.validate()
    return part


def signed_areas(partition: SignedPartition, integ: Integrator | None = None, lower=0.0, upper=None):
    """(area_plus, area_minus) over (lower, upper] for the integrand log t - Z^2.

    area_plus integrates log t - Z^2 over "+" segments, area_minus integrates
    Z^2 - log t over "-" segments; both are assembled from cached J values.
    """
    integ = integ or Integrator()
    upper = partition.upper if upper is None else upper
    if upper > partition.upper:
        raise ValueError("upper limit exceeds the partition")
    segs = partition.clipped(lower, upper)
    if not segs:
        return 0.0, 0.0
    edges = np.array([segs[0][0]] + [b for _, b, _ in segs])
    J = integ.J(edges)
    pieces = log_integral(edges[:-1], edges[1:]) - np.diff(J)
    plus = math.fsum(p for p, (_, _, s) in zip(pieces, segs) if s == PLUS)
    minus = math.fsum(-p for p, (_, _, s) in zip(pieces, segs) if s == MINUS)
    return plus, minus


def omega_witnesses(T, alpha, threshold_count, cfg=None, resolution=DEFAULT_RESOLUTION):
    """Local maxima t in (e, T] with |Z(t)| > exp(log(t)**alpha).

    When more than ``threshold_count`` qualify, the ones with the largest margin
    log|Z| - log(t)**alpha are kept.  Result sorted by t.
    """
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 1/2)")
    cfg = cfg or EvaluatorConfig()
    if T <= math.e:
        return []
    ts = sample_grid(math.e, float(T), resolution)
    az = np.abs(z_values(ts, cfg))
    peaks = np.nonzero((az[1:-1] >= az[:-2]) & (az[1:-1] > az[2:]))[0] + 1
    found = []
    for i in peaks:
        res = minimize_scalar(
            lambda t: -abs(z_values(t, cfg)[0]),
            bounds=(ts[i - 1], ts[i + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        t_peak = float(res.x)
        value = abs(float(z_values(t_peak, cfg)[0]))
        if value < az[i]:
            t_peak, value = float(ts[i]), float(az[i])
        margin = math.log(value) - math.log(t_peak) ** alpha
        if margin > 0:
            found.append((margin, t_peak, value))
    found.sort(reverse=True)
    kept = sorted((t, v) for _, t, v in found[: max(threshold_count, 0)])
    return kept


@dataclass
class BoundAudit:
    sign: str
    checked: int
    failures: list  # (t, log t - Z^2)

    @property
    def passed(self) -> bool:
        return not self.failures


def minus_set_bound_check(partition: SignedPartition, cfg=None, points_per_segment=5, sign=MINUS):
    """Check Z^2 >= log t inside "-" segments with t > 1 (reverse inequality for "+")."""
    cfg = cfg or EvaluatorConfig()
    frac = (np.arange(points_per_segment) + 0.5) / points_per_segment
    ts = []
    for a, b, s in partition.segments:
        if s != sign:
            continue
        a = max(a, 1.0)
        if b <= a:
            continue
        ts.append(a + (b - a) * frac)
    if not ts:
        return BoundAudit(sign=sign, checked=0, failures=[])
    ts = np.concatenate(ts)
    fs = f_values(ts, cfg)
    bad = fs > 0 if sign == MINUS else fs <= 0
    return BoundAudit(
        sign=sign,
        checked=int(ts.size),
        failures=[(float(t), float(v)) for t, v in zip(ts[bad], fs[bad])],
    )

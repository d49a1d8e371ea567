"""Hardy-Littlewood integral J(T), segment integrals and the log-modified J1(T).

The integrand Z(t)^2 oscillates on the mean zero spacing 2 pi / log(t / 2 pi),
so panels start at about half that spacing and are bisected until a fixed-order
Gauss-Legendre rule agrees with its two-half refinement to ``abs_tol`` per unit
length.  Cumulative values J(i * grid_step) are kept in an :class:`IntegralCache`
that can be written to and read from a small CSV file.
"""

from __future__ import annotations

import contextlib
import fcntl
import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .special_functions import EvaluatorConfig, zeta_sq_values

log = logging.getLogger(__name__)

_CHUNK_UNITS = 2000
_ROUNDING = 1e3 * np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Adaptive refinement hit its depth limit."""

    def __init__(self, message, achieved_error):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")
        self.achieved_error = achieved_error


class CacheError(RuntimeError):
    """Unreadable or corrupt cache file."""


class CacheFingerprintError(CacheError):
    """Cache entries were produced under a different configuration."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-6
    panel_rule: int = 10
    refinement_limit: int = 12

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.panel_rule < 7:
            raise ValueError("panel_rule needs at least 7 Gauss-Legendre nodes")
        if self.refinement_limit < 1:
            raise ValueError("refinement_limit must be >= 1")


def fingerprint(cfg: EvaluatorConfig, spec: QuadratureSpec, grid_step: float) -> str:
    payload = {
        "evaluator": cfg.fingerprint_fields(),
        "abs_tol": repr(float(spec.abs_tol)),
        "panel_rule": spec.panel_rule,
        "grid_step": repr(float(grid_step)),
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def base_panel_length(t):
    """About half the mean zero spacing at t, capped at 1."""
    t = np.asarray(t, dtype=float)
    spread = np.log(np.maximum(t, math.e) / (2.0 * math.pi))
    with np.errstate(divide="ignore"):
        return np.where(spread > math.pi, math.pi / np.maximum(spread, math.pi), 1.0)


def _gauss_legendre(n):
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def _panel_sums(f, lo, hi, nodes, weights):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    return half * (vals @ weights)


def integrate_intervals(f, a, b, spec: QuadratureSpec, split=True):
    """Integrate vectorised ``f`` over each [a_i, b_i]; returns (values, error estimates).

    ``f`` maps a 1-d array of abscissae to values.  Each interval is cut into
    base panels (see :func:`base_panel_length`) when ``split`` is set, then
    refined adaptively.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise ValueError("a and b must have the same shape")
    if np.any(b < a):
        raise ValueError("intervals must satisfy a <= b")
    nodes, weights = _gauss_legendre(spec.panel_rule)

    if split:
        n_pan = np.maximum(1, np.ceil((b - a) / base_panel_length(b)).astype(np.int64))
    else:
        n_pan = np.ones(a.shape, dtype=np.int64)
    owner = np.repeat(np.arange(a.size), n_pan)
    start = np.cumsum(n_pan) - n_pan
    k = np.arange(owner.size) - np.repeat(start, n_pan)
    width = (b - a)[owner] / n_pan[owner]
    lo = a[owner] + k * width
    hi = np.where(k == n_pan[owner] - 1, b[owner], lo + width)

    total = np.zeros(a.size)
    err = np.zeros(a.size)
    for depth in range(spec.refinement_limit + 1):
        if owner.size == 0:
            break
        mid = 0.5 * (lo + hi)
        whole = _panel_sums(f, lo, hi, nodes, weights)
        left = _panel_sums(f, lo, mid, nodes, weights)
        right = _panel_sums(f, mid, hi, nodes, weights)
        fine = left + right
        est = np.abs(fine - whole)
        # noise floor: phases t log n carry absolute rounding error ~ eps * t
        noise = _ROUNDING * (np.abs(fine) + (hi - lo) * np.maximum(hi, 1.0))
        allowed = np.maximum(spec.abs_tol * (hi - lo), noise)
        ok = est <= allowed
        if depth == spec.refinement_limit and not ok.all():
            raise QuadratureError("refinement limit exhausted", float(est[~ok].max()))
        total += np.bincount(owner[ok], weights=fine[ok], minlength=a.size)
        err += np.bincount(owner[ok], weights=est[ok], minlength=a.size)
        bad = ~ok
        owner = np.concatenate([owner[bad], owner[bad]])
        lo, hi = np.concatenate([lo[bad], mid[bad]]), np.concatenate([mid[bad], hi[bad]])
    return total, err


@dataclass
class IntegralCache:
    """Cumulative J(t_i) at t_i = i * grid_step, i = 0, 1, ...

    ``values`` is stored densely because the grid is uniform; ``checkpoints``
    exposes it as the ordered map t_i -> J(t_i).
    """

    grid_step: float = 1.0
    fingerprint: str = ""
    values: list = field(default_factory=list)

    @classmethod
    def empty(cls, cfg=None, spec=None, grid_step=1.0):
        cfg = cfg or EvaluatorConfig()
        spec = spec or QuadratureSpec()
        return cls(grid_step=grid_step, fingerprint=fingerprint(cfg, spec, grid_step))

    @property
    def checkpoints(self) -> dict:
        return {i * self.grid_step: v for i, v in enumerate(self.values)}

    @property
    def upper(self) -> float:
        return (len(self.values) - 1) * self.grid_step if self.values else 0.0

    def clear(self):
        self.values = []


def cache_save(cache: IntegralCache, path):
    path = Path(path)
    lines = [f"# fingerprint={cache.fingerprint}"]
    lines += [f"{i * cache.grid_step:.17g},{v:.17g}" for i, v in enumerate(cache.values)]
    tmp = path.with_name(path.name + ".tmp")
    with _locked(path):
        tmp.write_text("\n".join(lines) + "\n")
        os.replace(tmp, path)


def cache_load(path, expected_fingerprint=None, override=False) -> IntegralCache:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CacheError(f"cannot read cache {path}: {exc}") from exc
    rows = text.splitlines()
    if not rows or not rows[0].startswith("# fingerprint="):
        raise CacheError(f"{path}: missing '# fingerprint=' header")
    fp = rows[0].split("=", 1)[1].strip()
    ts, vals = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row.strip():
            continue
        try:
            t_str, v_str = row.split(",")
            ts.append(float(t_str))
            vals.append(float(v_str))
        except ValueError as exc:
            raise CacheError(f"{path}:{lineno}: corrupt row {row!r}") from exc
    step = ts[1] - ts[0] if len(ts) > 1 else 1.0
    if ts and (ts[0] != 0.0 or not np.allclose(np.diff(ts), step, rtol=0, atol=1e-9 * step)):
        raise CacheError(f"{path}: checkpoints are not a uniform grid from 0")
    if any(v2 < v1 for v1, v2 in zip(vals, vals[1:])):
        raise CacheError(f"{path}: checkpoint values decrease")
    if expected_fingerprint is not None and fp != expected_fingerprint and not override:
        raise CacheFingerprintError(
            f"{path}: cache fingerprint {fp} does not match current configuration "
            f"{expected_fingerprint}"
        )
    return IntegralCache(grid_step=step, fingerprint=fp, values=vals)


@contextlib.contextmanager
def _locked(path):
    lock_path = Path(str(path) + ".lock")
    with open(lock_path, "w") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


class Integrator:
    """Evaluator settings, quadrature settings and a cache bound together."""

    def __init__(self, cfg=None, spec=None, cache=None):
        self.cfg = cfg or EvaluatorConfig()
        self.spec = spec or QuadratureSpec()
        if cache is None:
            cache = IntegralCache.empty(self.cfg, self.spec)
        expected = fingerprint(self.cfg, self.spec, cache.grid_step)
        if cache.fingerprint != expected:
            if cache.values:
                raise CacheFingerprintError(
                    f"cache fingerprint {cache.fingerprint} does not match request {expected}"
                )
            cache.fingerprint = expected
        self.cache = cache

    @property
    def fingerprint(self) -> str:
        return self.cache.fingerprint

    def integrand(self, t):
        return zeta_sq_values(t, self.cfg)

    def direct(self, a, b):
        """Integral of Z^2 over each [a_i, b_i] without touching the cache."""
        vals, _ = integrate_intervals(self.integrand, a, b, self.spec)
        return vals

    def extend(self, upto: float):
        """Grow the checkpoint table to cover ``upto``."""
        cache = self.cache
        h = cache.grid_step
        need = int(math.floor(upto / h)) + 1
        if not cache.values:
            cache.values.append(0.0)
        while len(cache.values) < need:
            i0 = len(cache.values) - 1
            i1 = min(need - 1, i0 + _CHUNK_UNITS)
            edges = np.arange(i0, i1 + 1, dtype=float) * h
            pieces = self.direct(edges[:-1], edges[1:])
            base = cache.values[-1]
            cache.values.extend((base + np.cumsum(pieces)).tolist())
            log.info("J checkpoints extended to t=%g", i1 * h)

    def J(self, ts):
        """Vectorised J(t) = integral of Z^2 over [0, t]."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if ts.size and ts.min() < 0:
            raise ValueError("J(t) needs t >= 0")
        if ts.size == 0:
            return ts.copy()
        self.extend(float(ts.max()))
        h = self.cache.grid_step
        idx = np.floor(ts / h).astype(np.int64)
        left = idx * h
        base = np.asarray(self.cache.values)[idx]
        part = np.zeros_like(ts)
        gap = ts > left
        if gap.any():
            part[gap] = self.direct(left[gap], ts[gap])
        return base + part

    def J_scalar(self, t: float) -> float:
        return float(self.J(t)[0])

    def integrate(self, a: float, b: float) -> float:
        if not 0 <= a < b:
            raise ValueError(f"need 0 <= a < b, got a={a!r}, b={b!r}")
        ja, jb = self.J([a, b])
        return float(jb - ja)

    def J1(self, ts):
        """Vectorised J1(T) = T log T - T - J(T)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return _t_log_t_minus_t(ts) - self.J(ts)


def _t_log_t_minus_t(ts):
    ts = np.asarray(ts, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = ts * np.log(ts) - ts
    return np.where(ts > 0, out, 0.0)


def log_integral(a, b):
    """Integral of log t over [a, b]."""
    return _t_log_t_minus_t(b) - _t_log_t_minus_t(a)


def _resolve(spec, cache, cfg):
    return Integrator(cfg=cfg, spec=spec, cache=cache)


def integrate_abs_zeta_sq(a, b, spec=None, cache=None, cfg=None) -> float:
    return _resolve(spec, cache, cfg).integrate(a, b)


def hardy_littlewood_J(T, spec=None, cache=None, cfg=None) -> float:
    if not T > 0:
        raise ValueError(f"J(T) needs T > 0, got {T!r}")
    return _resolve(spec, cache, cfg).J_scalar(T)


def log_modified_J1(T, spec=None, cache=None, cfg=None) -> float:
    if not T > 0:
        raise ValueError(f"J1(T) needs T > 0, got {T!r}")
    return float(_resolve(spec, cache, cfg).J1(T)[0])

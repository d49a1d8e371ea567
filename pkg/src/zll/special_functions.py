"""Hardy Z-function and |zeta(1/2 + it)|^2 on the critical line.

Two evaluation paths share one vectorised kernel:

* ``t >= method_switch_t``: Riemann-Siegel main sum (compensated summation)
  plus up to five remainder terms C0..C4 built from the Taylor table of
  Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p).
* ``t < method_switch_t``: Euler-Maclaurin summation of zeta(1/2 + it)
  rotated by the exact theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi.

Scalar calls go through the same kernel as batches, so a batch equals the
corresponding scalar calls bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import bernoulli, loggamma

from ._rs_tables import PSI_TAYLOR

TWO_PI = 2.0 * math.pi
LOG_PI = math.log(math.pi)
EPS = float(np.finfo(float).eps)

# classical Riemann-Siegel remainder bounds: |error after C0..Ck| <= ERR_COEF[k] * t**(-(2k+3)/4).
# They are stated for t >= 200; the safety factor covers 100 <= t < 200.
_RS_ERR_COEF = (0.127, 0.053, 0.011, 0.031, 0.017)
_RS_ERR_SAFETY = 4.0

# theta(t) ~ (t/2) log(t/2pi) - t/2 - pi/8 + sum_k a_k / t**(2k-1)
_THETA_SERIES = (
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
)

_EM_TERMS_DEFAULT = 12


class DomainError(ValueError):
    """Argument outside the domain of an evaluator."""


class AccuracyWarning(UserWarning):
    """Reported error bound exceeds the configured target."""


@dataclass(frozen=True)
class EvaluatorConfig:
    rs_correction_terms: int = 4
    method_switch_t: float = 100.0
    em_terms: int = _EM_TERMS_DEFAULT
    target_abs_error: float = 1e-6

    def __post_init__(self):
        if not 0 <= self.rs_correction_terms <= 4:
            raise ValueError("rs_correction_terms must lie in [0, 4]")
        if not self.method_switch_t > 0:
            raise ValueError("method_switch_t must be positive")
        if self.em_terms < 1:
            raise ValueError("em_terms must be at least 1")
        if not self.target_abs_error > 0:
            raise ValueError("target_abs_error must be positive")

    def fingerprint_fields(self) -> dict:
        return {
            "rs_correction_terms": self.rs_correction_terms,
            "method_switch_t": repr(float(self.method_switch_t)),
            "em_terms": self.em_terms,
        }


@dataclass(frozen=True)
class CriticalLineSample:
    t: float
    theta: float
    z: float
    zeta_sq: float
    err_bound: float
    accuracy_warning: bool = False


def _build_rs_polys():
    psi = np.asarray(PSI_TAYLOR, dtype=float)

    def d(k):
        return P.polyder(psi, k) if k else psi

    pi2, pi4, pi6, pi8 = (math.pi**k for k in (2, 4, 6, 8))
    terms = [
        [(1.0, 0)],
        [(-1.0 / (96 * pi2), 3)],
        [(1.0 / (64 * pi2), 2), (1.0 / (18432 * pi4), 6)],
        [(-1.0 / (64 * pi2), 1), (-1.0 / (3840 * pi4), 5), (-1.0 / (5308416 * pi6), 9)],
        [
            (1.0 / (128 * pi2), 0),
            (19.0 / (24576 * pi4), 4),
            (11.0 / (5898240 * pi6), 8),
            (1.0 / (2038431744 * pi8), 12),
        ],
    ]
    polys = []
    for combo in terms:
        acc = np.zeros(1)
        for coef, order in combo:
            acc = P.polyadd(acc, coef * d(order))
        polys.append(acc)
    return tuple(polys)


RS_POLYS = _build_rs_polys()


def rs_coefficient(k: int, p):
    """C_k(p) of the Riemann-Siegel remainder, p the fractional part in [0, 1)."""
    return P.polyval(np.asarray(p, dtype=float) - 0.5, RS_POLYS[k])


def _theta_asymptotic(t):
    t = np.asarray(t, dtype=float)
    out = 0.5 * t * np.log(t / TWO_PI) - 0.5 * t - math.pi / 8.0
    inv = 1.0 / t
    inv2 = inv * inv
    power = inv
    for a in _THETA_SERIES:
        out = out + a * power
        power = power * inv2
    return out


def riemann_siegel_theta(t: float) -> float:
    """Riemann-Siegel theta by its asymptotic series (valid for t >= 1)."""
    if not t >= 1.0:
        raise DomainError(f"asymptotic theta needs t >= 1, got {t!r}")
    return float(_theta_asymptotic(t))


def theta_series_terms(t: float) -> list[float]:
    """Magnitudes of the successive correction terms used in the theta series."""
    if not t >= 1.0:
        raise DomainError(f"asymptotic theta needs t >= 1, got {t!r}")
    return [abs(a) * t ** -(2 * k + 1) for k, a in enumerate(_THETA_SERIES)]


def theta_exact(t):
    """theta(t) from the complex log-Gamma function; valid for all real t."""
    t = np.asarray(t, dtype=float)
    return np.imag(loggamma(0.25 + 0.5j * t)) - 0.5 * t * LOG_PI


def _kahan_cos_sum(t, theta, n_max):
    """sum_{n <= n_max(t)} cos(theta - t log n) / sqrt(n), compensated per point."""
    total = np.zeros_like(t)
    comp = np.zeros_like(t)
    top = int(n_max.max()) if n_max.size else 0
    for n in range(1, top + 1):
        active = n_max >= n
        y = np.cos(theta - t * math.log(n)) / math.sqrt(n) - comp
        s = total + y
        comp = np.where(active, (s - total) - y, comp)
        total = np.where(active, s, total)
    return total


def _z_riemann_siegel(t, terms):
    a = np.sqrt(t / TWO_PI)
    n = np.floor(a)
    p = a - n
    theta = _theta_asymptotic(t)
    main = 2.0 * _kahan_cos_sum(t, theta, n.astype(np.int64))
    scale = 1.0 / np.sqrt(a)
    inv_a = 1.0 / a
    rem = np.zeros_like(t)
    power = np.ones_like(t)
    for k in range(terms + 1):
        rem = rem + rs_coefficient(k, p) * power
        power = power * inv_a
    sign = np.where(n.astype(np.int64) % 2 == 1, 1.0, -1.0)
    z = main + sign * scale * rem
    err = _RS_ERR_SAFETY * _RS_ERR_COEF[terms] * t ** (-(2 * terms + 3) / 4.0)
    # phase rounding: each cos argument carries ~eps * (|theta| + t log n)
    n_f = np.maximum(n, 1.0)
    err = err + 4.0 * np.sqrt(n_f) * EPS * (np.abs(theta) + t * np.log(n_f))
    return theta, z, err


_BERNOULLI = bernoulli(2 * 40)


def _zeta_euler_maclaurin(s, n_terms, em_terms):
    """Vectorised Euler-Maclaurin zeta(s) for complex s with scalar cut-off n_terms."""
    s = np.asarray(s, dtype=complex)
    ns = np.arange(1, n_terms, dtype=float)
    head = np.exp(-np.outer(s, np.log(ns))).sum(axis=1) if n_terms > 1 else 0.0
    big_n = float(n_terms)
    log_n = math.log(big_n)
    n_pow = np.exp(-s * log_n)
    out = head + big_n * n_pow / (s - 1.0) + 0.5 * n_pow
    rising = s.copy()
    n_pow_k = n_pow / big_n
    last = np.zeros_like(s)
    for k in range(1, em_terms + 1):
        last = _BERNOULLI[2 * k] / math.factorial(2 * k) * rising * n_pow_k
        out = out + last
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
        n_pow_k = n_pow_k / (big_n * big_n)
    return out, np.abs(last)


def _z_euler_maclaurin(t, em_terms):
    theta = theta_exact(t)
    z = np.empty_like(t)
    err = np.empty_like(t)
    # one cut-off per integer band keeps the work bounded and deterministic
    cut = np.floor(t).astype(np.int64) + 20
    for n_terms in np.unique(cut):
        sel = cut == n_terms
        zeta, tail = _zeta_euler_maclaurin(0.5 + 1j * t[sel], int(n_terms), em_terms)
        z[sel] = np.real(np.exp(1j * theta[sel]) * zeta)
        err[sel] = tail + 1e-14 * (1.0 + np.abs(z[sel]))
    return theta, z, err


def evaluate_z(ts, cfg: EvaluatorConfig | None = None):
    """Vectorised core: return (theta, z, err_bound) arrays for ``ts`` > 0."""
    cfg = cfg or EvaluatorConfig()
    t = np.atleast_1d(np.asarray(ts, dtype=float))
    if t.size and not np.all(t > 0):
        raise DomainError("Z(t) is evaluated only for t > 0")
    theta = np.empty_like(t)
    z = np.empty_like(t)
    err = np.empty_like(t)
    rs = t >= cfg.method_switch_t
    if rs.any():
        theta[rs], z[rs], err[rs] = _z_riemann_siegel(t[rs], cfg.rs_correction_terms)
    if (~rs).any():
        theta[~rs], z[~rs], err[~rs] = _z_euler_maclaurin(t[~rs], cfg.em_terms)
    return theta, z, err


def z_values(ts, cfg: EvaluatorConfig | None = None) -> np.ndarray:
    return evaluate_z(ts, cfg)[1]


def zeta_sq_values(ts, cfg: EvaluatorConfig | None = None) -> np.ndarray:
    z = evaluate_z(ts, cfg)[1]
    return z * z


def _samples(t, theta, z, err, cfg):
    return [
        CriticalLineSample(
            t=float(ti),
            theta=float(th),
            z=float(zi),
            zeta_sq=float(zi) * float(zi),
            err_bound=float(e),
            accuracy_warning=bool(e > cfg.target_abs_error),
        )
        for ti, th, zi, e in zip(t, theta, z, err)
    ]


def hardy_Z(t: float, cfg: EvaluatorConfig | None = None) -> CriticalLineSample:
    cfg = cfg or EvaluatorConfig()
    if not t > 0:
        raise DomainError(f"Z(t) is evaluated only for t > 0, got {t!r}")
    arr = np.array([t], dtype=float)
    return _samples(arr, *evaluate_z(arr, cfg), cfg)[0]


def zeta_sq_batch(ts, cfg: EvaluatorConfig | None = None) -> list[CriticalLineSample]:
    """Element-wise ``hardy_Z`` over a strictly increasing sequence."""
    cfg = cfg or EvaluatorConfig()
    arr = np.asarray(ts, dtype=float)
    if arr.ndim != 1:
        raise ValueError("ts must be one-dimensional")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ValueError("ts must be strictly increasing")
    return _samples(arr, *evaluate_z(arr, cfg), cfg)

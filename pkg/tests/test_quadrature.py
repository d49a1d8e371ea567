import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import j_oracle
from zll.quadrature import (
    CacheError,
    CacheFingerprintError,
    IntegralCache,
    Integrator,
    QuadratureError,
    QuadratureSpec,
    cache_load,
    cache_save,
    fingerprint,
    hardy_littlewood_J,
    integrate_intervals,
    log_integral,
    log_modified_J1,
)
from zll.special_functions import EvaluatorConfig

EULER_GAMMA = 0.5772156649015329


def test_unit_interval_against_oracle(integ):
    # mpmath integration of siegelz^2 at 20 digits
    assert integ.integrate(0.0, 1.0) == pytest.approx(j_oracle(0, 1), abs=1e-9)
    assert integ.integrate(0.0, 1.0) == pytest.approx(1.2429228616011458, abs=1e-9)


def test_segments_against_oracle(integ):
    assert integ.integrate(0.0, 20.0) == pytest.approx(j_oracle(0, 20), abs=20e-6)
    assert integ.integrate(1000.0, 1003.5) == pytest.approx(j_oracle(1000, 1003.5), abs=4e-6)


def test_J100_classical_asymptotic(integ):
    main = 100 * math.log(100 / (2 * math.pi)) + (2 * EULER_GAMMA - 1) * 100
    assert abs(integ.J_scalar(100.0) - main) < 10


def test_J_monotone_and_vanishing(integ):
    ts = np.array([1e-9, 0.5, 3.0, 17.2, 100.0, 250.0, 1000.0])
    J = integ.J(ts)
    assert np.all(np.diff(J) > 0)
    assert J[0] < 1e-8
    assert np.all(integ.J(2 * ts) >= J)


def test_zero_length_limit(integ):
    assert abs(integ.integrate(5.0, 5.0 + 1e-9)) < 1e-8
    with pytest.raises(ValueError):
        integ.integrate(5.0, 5.0)
    with pytest.raises(ValueError):
        integ.integrate(-1.0, 5.0)


def test_J1_identity(integ):
    for T in (1.0, 10.0, 123.4, 1e4):
        J1 = float(integ.J1(T)[0])
        assert J1 + integ.J_scalar(T) == pytest.approx(T * math.log(T) - T, abs=1e-12 * max(T * math.log(T), 1))
    assert float(integ.J1(1.0)[0]) < 0


def test_J1_over_T_near_constant(integ):
    kappa = math.log(2 * math.pi) - 2 * EULER_GAMMA
    assert abs(float(integ.J1(1e4)[0]) / 1e4 - kappa) < 0.05


def test_module_level_wrappers():
    spec = QuadratureSpec()
    assert hardy_littlewood_J(30.0, spec) == pytest.approx(Integrator().J_scalar(30.0), abs=0)
    assert log_modified_J1(30.0, spec) == pytest.approx(30 * math.log(30) - 30 - hardy_littlewood_J(30.0), abs=1e-12)
    with pytest.raises(ValueError):
        hardy_littlewood_J(0.0)


def test_log_integral():
    assert log_integral(1.0, math.e) == pytest.approx(1.0, abs=1e-15)
    assert log_integral(0.0, 1.0) == pytest.approx(-1.0, abs=1e-15)


def test_integrate_intervals_polynomial():
    vals, errs = integrate_intervals(lambda x: x**5 - 2 * x, [0.0, 1.0], [2.0, 3.0], QuadratureSpec())
    assert vals == pytest.approx([64 / 6 - 4, (729 - 1) / 6 - 8], abs=1e-12)
    assert np.all(errs >= 0)


def test_refinement_limit_reports_error():
    spiky = lambda x: np.sin(50.0 * x**2)  # noqa: E731
    with pytest.raises(QuadratureError) as info:
        integrate_intervals(spiky, [0.0], [20.0], QuadratureSpec(abs_tol=1e-13, refinement_limit=1), split=False)
    assert info.value.achieved_error > 0


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(panel_rule=6)
    with pytest.raises(ValueError):
        QuadratureSpec(refinement_limit=0)


@settings(max_examples=25, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=400.0),
    st.floats(min_value=0.01, max_value=50.0),
    st.floats(min_value=0.01, max_value=50.0),
)
def test_additivity(integ, a, d1, d2):
    m, b = a + d1, a + d1 + d2
    whole = integ.direct(a, b)[0]
    parts = integ.direct(a, m)[0] + integ.direct(m, b)[0]
    assert abs(whole - parts) <= 2 * integ.spec.abs_tol * (b - a) + 1e-12


def test_additivity_example(integ):
    assert integ.direct(0, 10)[0] == pytest.approx(integ.direct(0, 7)[0] + integ.direct(7, 10)[0], abs=2e-5)


def test_cached_matches_direct(integ):
    for a, b in ((0.0, 57.3), (400.25, 812.5)):
        assert integ.integrate(a, b) == pytest.approx(integ.direct(a, b)[0], abs=1e-6 * (b - a))


# -- cache -----------------------------------------------------------------------------------


def _filled_cache(upto=40.0):
    integ = Integrator()
    integ.extend(upto)
    return integ.cache


def test_cache_round_trip_byte_identical(tmp_path):
    cache = _filled_cache()
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    cache_save(cache, p1)
    loaded = cache_load(p1, cache.fingerprint)
    assert loaded.values == cache.values
    assert loaded.checkpoints == cache.checkpoints
    cache_save(loaded, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().splitlines()[0] == f"# fingerprint={cache.fingerprint}"


def test_cache_fingerprint_refusal(tmp_path):
    cache = _filled_cache(10.0)
    path = tmp_path / "c.csv"
    cache_save(cache, path)
    other = fingerprint(EvaluatorConfig(), QuadratureSpec(abs_tol=1e-8), 1.0)
    assert other != cache.fingerprint
    with pytest.raises(CacheFingerprintError):
        cache_load(path, other)
    assert cache_load(path, other, override=True).fingerprint == cache.fingerprint
    with pytest.raises(CacheFingerprintError):
        Integrator(spec=QuadratureSpec(abs_tol=1e-8), cache=cache)


def test_fingerprint_tracks_settings():
    base = fingerprint(EvaluatorConfig(), QuadratureSpec(), 1.0)
    assert base == fingerprint(EvaluatorConfig(), QuadratureSpec(), 1.0)
    assert base != fingerprint(EvaluatorConfig(rs_correction_terms=3), QuadratureSpec(), 1.0)
    assert base != fingerprint(EvaluatorConfig(), QuadratureSpec(panel_rule=12), 1.0)
    assert base != fingerprint(EvaluatorConfig(), QuadratureSpec(), 0.5)


def test_cache_rejects_corruption(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,0\n1,2\n")
    with pytest.raises(CacheError):
        cache_load(path)
    path.write_text("# fingerprint=abc\n0,0\n1,5\n2,4\n")
    with pytest.raises(CacheError):
        cache_load(path)
    path.write_text("# fingerprint=abc\n0,0\n1,x\n")
    with pytest.raises(CacheError):
        cache_load(path)
    with pytest.raises(CacheError):
        cache_load(tmp_path / "missing.csv")


def test_empty_cache_and_clear():
    cache = IntegralCache.empty()
    assert cache.checkpoints == {} and cache.upper == 0.0
    Integrator(cache=cache).extend(5.0)
    assert cache.upper == 5.0
    vals = list(cache.checkpoints.values())
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    cache.clear()
    assert cache.checkpoints == {}

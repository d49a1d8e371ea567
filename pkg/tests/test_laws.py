import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fermat_brute
from zll.ladder import reverse_iter
from zll.laws import (
    FermatRational,
    conservation_law_residual,
    conservation_report,
    enumerate_fermat_rationals,
    fermat_functional,
    fermat_report,
    formula41_report,
    formula_4_1_functional,
    increment_integral,
    increment_report,
    kappa_conservation,
    kappa_lemma2,
    lemma1_report,
    lemma1_residual,
    lemma2_report,
    lemma2_residual,
    localized_scan,
    scaled_limit_functional,
    scaled_report,
    segment_limit_functional,
    segment_report,
    zero_limit_law_residual,
    zero_limit_report,
)


def test_kappas(consts):
    assert kappa_lemma2(consts) == pytest.approx(0.6834457366062796, abs=1e-15)
    assert kappa_conservation(consts) == pytest.approx(0.26, abs=0.005)


def test_lemma1(consts, integ):
    assert abs(lemma1_residual(1e4, 1, consts, integ)) < 0.5
    direct = lemma1_residual(1e3, 1, consts, integ)
    via_areas = lemma1_residual(1e3, 1, consts, integ, via_areas=True)
    assert direct == pytest.approx(via_areas, abs=1e-6 * 1e3)
    for T in (1e3, 2e3, 4e3):
        assert abs(lemma1_residual(2 * T, 1, consts, integ)) <= abs(lemma1_residual(T, 1, consts, integ)) + 0.1


def test_increment(consts, integ):
    for T, r in ((100.0, 1), (1e3, 2), (1e4, 1)):
        assert increment_integral(T, r, consts, integ) > 0
    ratio = increment_integral(1e4, 1, consts, integ) / ((1 - consts.c) * 1e4)
    assert 0.9 <= ratio <= 1.1
    rep = increment_report([2e3, 5e3, 1e4], 1, consts, integ)
    assert all(abs(v) < 5 for v in rep.metadata["residual_over_T^0.4"])


def test_lemma2(consts, integ):
    assert abs(lemma2_residual(1e4, consts, integ)) / 1e4 < 0.05
    assert abs(lemma2_residual(1e4, consts, integ)) / 1e4 < abs(lemma2_residual(1e3, consts, integ)) / 1e3


def test_lemma2_is_lemma1_plus_increment(consts, integ):
    rho = 3e3
    inc = increment_integral(rho, 1, consts, integ)
    combined = lemma1_residual(rho, 1, consts, integ) + inc - (1 - consts.c) * rho - consts.c0
    assert lemma2_residual(rho, consts, integ) == pytest.approx(combined, abs=1e-8)


def test_scaled(consts, integ):
    kappa = kappa_lemma2(consts)
    tau = 3e3
    assert scaled_limit_functional(kappa, tau, consts, integ) == pytest.approx(
        float(integ.J1(tau)[0]) / tau, rel=1e-14
    )
    assert 0.9 <= scaled_limit_functional(1.0, 1e4, consts, integ) <= 1.1
    with pytest.raises(ValueError):
        scaled_limit_functional(1.0, 1.0, consts, integ)
    with pytest.raises(ValueError):
        scaled_limit_functional(-1.0, 1e3, consts, integ)


def test_fermat_functional(consts, integ):
    ones = FermatRational(1, 1, 1, 3)
    assert ones.value == 2.0
    assert fermat_functional(ones, 1e3, consts, integ) == pytest.approx(2.0, rel=0.1)
    near = FermatRational(6, 8, 9, 3)
    assert near.exact == Fraction(728, 729)
    assert fermat_functional(near, 1e3, consts, integ) == scaled_limit_functional(728 / 729, 1e3, consts, integ)
    with pytest.raises(ValueError):
        FermatRational(1, 1, 1, 2)


def test_fermat_report_flags_resolution(consts, integ):
    rep = fermat_report(FermatRational(6, 8, 9, 3), [1e3, 2e3], consts, integ)
    assert rep.target == pytest.approx(728 / 729)
    assert rep.metadata["distance_from_one"] == pytest.approx(1 / 729)
    assert rep.metadata["separable"] is (rep.resolution_achieved < 1 / 729)


def test_conservation(consts, integ):
    T = 1e4
    value = conservation_law_residual(T, 1, consts, integ)
    assert value - lemma1_residual(T, 1, consts, integ) == pytest.approx(-consts.c0, abs=1e-6 * T)
    assert abs(value + consts.c0) < 0.5
    coarse = conservation_law_residual(2e3, 1, consts, integ, resolution=0.1)
    fine = conservation_law_residual(2e3, 1, consts, integ, resolution=0.05)
    assert coarse == pytest.approx(fine, abs=1e-3)


def test_zero_limit(consts, integ):
    T = 2e3
    z = zero_limit_law_residual(T, 1, consts, integ)
    diff = conservation_law_residual(T, 2, consts, integ) - conservation_law_residual(T, 1, consts, integ)
    assert z == pytest.approx(diff, abs=2e-6 * T)
    assert abs(zero_limit_law_residual(1e4, 1, consts, integ)) < 0.5


def test_formula41(consts, integ):
    v = formula_4_1_functional(1.0, 1e4, consts, integ)
    assert v > 0 and 0.85 <= v <= 1.15
    a = 0.5 * 4e3 / (1 - consts.c)
    assert formula_4_1_functional(0.5, 4e3, consts, integ) == increment_integral(a, 1, consts, integ) / 4e3


def test_segment(consts, integ):
    assert 1.8 <= segment_limit_functional(1.0, 2, 1e4, consts, integ) <= 2.2
    with pytest.raises(ValueError):
        segment_limit_functional(1.0, 0, 1e3, consts, integ)
    with pytest.raises(ValueError):
        segment_limit_functional(1.0, 1.5, 1e3, consts, integ)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=3.0),
    st.integers(min_value=1, max_value=4),
    st.sampled_from([500.0, 1000.0, 2000.0]),
)
def test_segment_telescopes_exactly(consts, integ, x, N, tau):
    direct = segment_limit_functional(x, N, tau, consts, integ)
    assert direct == scaled_limit_functional((N + 1) * x, tau, consts, integ) - scaled_limit_functional(
        x, tau, consts, integ
    )
    pieces = math.fsum(
        scaled_limit_functional((m + 1) * x, tau, consts, integ) - scaled_limit_functional(m * x, tau, consts, integ)
        for m in range(1, N + 1)
    )
    assert direct == pytest.approx(pieces, abs=1e-12 * max(1.0, abs(direct)))


def test_enumeration_matches_brute_force():
    for eps, n_max, z_max in ((0.3, 5, 30), (0.05, 4, 25), (0.3, 3, 9)):
        found = {(f.x, f.y, f.z, f.n) for f in enumerate_fermat_rationals(eps, n_max, z_max)}
        assert found == fermat_brute(eps, n_max, z_max)
    small = enumerate_fermat_rationals(0.3, 3, 9)
    assert FermatRational(6, 8, 9, 3) in small


def test_enumeration_tight_window():
    assert enumerate_fermat_rationals(1e-6, 3, 20) == []
    # for n = 5 the trivial family 1 + 1 / z**5 already enters the window at z = 16
    tight = {(f.x, f.y, f.z, f.n) for f in enumerate_fermat_rationals(1e-6, 5, 20)}
    assert tight == fermat_brute(1e-6, 5, 20) == {(1, z, z, 5) for z in range(16, 21)}


def test_no_exact_fermat_solutions():
    for f in enumerate_fermat_rationals(0.3, 5, 30):
        assert f.x**f.n + f.y**f.n != f.z**f.n
        assert f.exact != 1


def test_localized_scan(consts, integ):
    empty = localized_scan(1e-6, 1, 3, 9, 1e3, consts, integ)
    assert empty.grid == [] and empty.values == []
    rep = localized_scan(0.3, 1, 3, 9, 3e3, consts, integ)
    assert len(rep.grid) == len({f.exact for f in enumerate_fermat_rationals(0.3, 3, 9)})
    i = rep.grid.index(728 / 729)
    assert rep.values[i] == pytest.approx(728 / 729, abs=0.05)
    point = rep.metadata["points"][i]
    assert point["rational"] == "728/729"
    assert point["separable"] is (point["exact_limit_distance_from_N"] > rep.resolution_achieved)
    narrowed = localized_scan(0.3, 2, 3, 9, 3e3, consts, integ)
    assert all(abs(g - 1) < 0.15 for g in narrowed.grid)
    assert narrowed.target == 2.0


def test_reports_carry_constants(consts, integ):
    reps = [
        lemma1_report([1e3, 2e3], 1, consts, integ),
        lemma2_report([1e3, 2e3], consts, integ),
        scaled_report(1.0, [1e3, 2e3], consts, integ),
        conservation_report([1e3], 1, consts, integ),
        zero_limit_report([1e3], 1, consts, integ),
        formula41_report(1.0, [1e3], consts, integ),
        segment_report(1.0, 2, [1e3], consts, integ),
    ]
    for rep in reps:
        assert rep.constants["c0"] == consts.c0
        assert rep.cache_fingerprint == integ.fingerprint
        assert rep.resolution_achieved == pytest.approx(abs(rep.residuals[-1]))
    assert reps[3].target == -consts.c0

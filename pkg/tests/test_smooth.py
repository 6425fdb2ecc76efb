import math

import numpy as np
import pytest

from ffchar.algebra import Field, enumerate_monic, is_smooth
from ffchar.characters import (
    all_characters,
    character_by_index,
    character_sum_Ad,
    chi_eval,
    principal_character,
)
from ffchar.residue import Modulus
from ffchar.smooth import (
    SmoothCountTable,
    all_smooth_char_sums,
    default_dickman_table,
    dickman_residual,
    dickman_rho,
    smooth_char_sum,
    smooth_count,
    smooth_count_by_enumeration,
    smooth_dlog_histogram,
    soundararajan_check,
)

F2 = Field.get(2)
F3 = Field.get(3)
F4 = Field.get(2, 2)


# -- exact counts --------------------------------------------------------


def test_smooth_count_trivial_when_r_geq_d():
    for q in (2, 3, 4):
        for d in range(9):
            for r in range(max(d, 1), d + 3):
                assert smooth_count(q, d, r) == q**d


def test_smooth_count_small_example():
    # q=2, d=2, r=1: t^2, t(t+1), (t+1)^2
    assert smooth_count(2, 2, 1) == 3


def test_smooth_count_matches_filter_oracle():
    # brute force with per-polynomial is_smooth over the full stream
    for F, d in [(F2, 4), (F2, 6), (F3, 4), (F4, 3)]:
        for r in range(1, d + 1):
            brute = sum(is_smooth(f, r) for f in enumerate_monic(F, d))
            assert smooth_count(F.q, d, r) == brute


def test_generating_function_equals_enumeration_grid():
    # exact integer equality across the full small grid
    for F in (F2, F3, F4):
        for d in range(9):
            for r in range(1, max(d, 1) + 1):
                assert smooth_count(F.q, d, r) == smooth_count_by_enumeration(F, d, r)


def test_smooth_count_table_invariants():
    tab = SmoothCountTable.build(2, 8, 3)
    assert tab.counts[0] == 1
    for d in range(9):
        assert tab.counts[d] <= 2**d
    tab_enum = SmoothCountTable.build_by_enumeration(F2, 8, 3)
    assert tab.counts == tab_enum.counts
    assert tab_enum.method == "enumeration"
    # nondecreasing in r at fixed d
    for d in range(9):
        vals = [smooth_count(2, d, r) for r in range(1, d + 2)]
        assert vals == sorted(vals)


# -- smooth character sums -----------------------------------------------


def test_smooth_sum_principal_counts():
    m = Modulus.irreducible(F2, 5)
    chi0 = principal_character(m)
    for d in range(5):  # d < n: no multiples of Q
        for r in range(1, d + 2):
            s = smooth_char_sum(chi0, d, r)
            assert s.value == smooth_count(2, d, r)


def test_smooth_sum_equals_full_sum_when_r_geq_d():
    m = Modulus.irreducible(F2, 4)
    for chi in all_characters(m):
        for d in range(5):
            a = character_sum_Ad(chi, d)
            s = smooth_char_sum(chi, d, max(d, 1))
            assert abs(a.value - s.value) < 1e-10


def test_smooth_sum_matches_filter_oracle():
    # generated multisets vs literal filtering of A_d by is_smooth
    for field, n in [(F2, 4), (F3, 2)]:
        m = Modulus.irreducible(field, n)
        for chi in all_characters(m):
            for d in range(1, 6):
                for r in (1, 2, d):
                    brute = 0j
                    for f in enumerate_monic(field, d):
                        if is_smooth(f, r):
                            brute += chi_eval(chi, f).to_complex()
                    got = smooth_char_sum(chi, d, r)
                    assert abs(got.value - brute) < 1e-9, (field.q, n, chi.label, d, r)


def test_smooth_sum_filter_oracle_q2_d10():
    # the deeper q=2 check: d up to 10 against the filter route
    m = Modulus.irreducible(F2, 13)
    from ffchar.smooth import max_degree_profile_cached

    prof = max_degree_profile_cached(F2, 10)
    hist_smooth, _ = smooth_dlog_histogram(m, 10, 4)
    # filter route: dlogs of A_10 restricted to profile <= 4
    vec = m.dlog_table.dlogs_of_monic_degree(10)
    mask = prof <= 4
    brute = np.bincount(vec[mask & (vec >= 0)], minlength=2**13 - 1)
    assert np.array_equal(hist_smooth, brute)


def test_smooth_histogram_matches_scalar_path():
    m = Modulus.irreducible(F2, 4)
    hist, nonunit = smooth_dlog_histogram(m, 5, 2)
    total = 0
    for f in enumerate_monic(F2, 5):
        if is_smooth(f, 2):
            total += 1
    assert hist.sum() + nonunit == total


def test_bulk_smooth_sums_match_per_character():
    m = Modulus.irreducible(F2, 5)
    for d, r in [(3, 2), (4, 2), (5, 3)]:
        bulk = all_smooth_char_sums(m, d, r)
        for k in range(31):
            got = smooth_char_sum(character_by_index(m, k), d, r)
            assert abs(bulk[k] - got.value) < 1e-9


def test_mobius_like_m_series_identity():
    # prod_{deg P <= r} (1 - chi(P) z^deg P)^(-1) has k-th coefficient
    # equal to the smooth sum, checked by truncated formal expansion
    from ffchar.algebra import irreducibles_up_to

    m = Modulus.irreducible(F2, 4)
    kmax, r = 8, 2
    for chi in all_characters(m):
        series = np.zeros(kmax + 1, dtype=np.complex128)
        series[0] = 1.0
        for level in irreducibles_up_to(F2, r):
            for P in level:
                v = chi_eval(chi, P).to_complex()
                # multiply by (1 + v z^deg + v^2 z^(2 deg) + ...)
                geom = np.zeros(kmax + 1, dtype=np.complex128)
                acc = 1.0 + 0j
                for j in range(0, kmax + 1, P.degree):
                    geom[j] = acc
                    acc *= v
                series = np.convolve(series, geom)[: kmax + 1]
        for k in range(kmax + 1):
            got = smooth_char_sum(chi, k, r)
            assert abs(series[k] - got.value) < 1e-9


# -- Dickman -------------------------------------------------------------


def test_rho_is_one_below_one():
    tab = default_dickman_table()
    for u in (0.0, 0.25, 0.5, 0.99, 1.0):
        assert dickman_rho(u, tab) == pytest.approx(1.0, abs=1e-12)


def test_rho_log_branch():
    tab = default_dickman_table()
    for u in np.linspace(1.0, 2.0, 101):
        assert abs(dickman_rho(float(u), tab) - (1 - math.log(u) if u > 1 else 1.0)) < 1e-9


def test_rho_at_three_dual_method():
    """Independent scheme: fixed-step RK4 on u rho' = -rho(u-1) over [2, 3].

    On [1, 2] the closed form 1 - log u feeds the delay term, so this march
    shares nothing with the Chebyshev panel construction.
    """
    h = 1.0 / 4096
    u, y = 2.0, 1 - math.log(2.0)

    def fprime(u_, y_, shift):
        return -(1 - math.log(u_ - 1.0 + shift)) / (u_ + shift)

    # rho(t-1) = 1 - log(t-1) for t in [2, 3]
    def deriv(u_, y_):
        return -(1 - math.log(u_ - 1.0)) / u_ if u_ > 1 else -1.0 / u_

    steps = int(round(1.0 / h))
    for _ in range(steps):
        k1 = deriv(u, y)
        k2 = deriv(u + h / 2, y + h * k1 / 2)
        k3 = deriv(u + h / 2, y + h * k2 / 2)
        k4 = deriv(u + h, y + h * k3)
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        u += h
    got = dickman_rho(3.0)
    assert abs(got - y) < 1e-8
    assert got == pytest.approx(0.0486083882911316, abs=1e-8)  # frozen from both schemes


def test_rho_positive_nonincreasing():
    tab = default_dickman_table()
    us = np.linspace(1.0, 30.0, 400)
    vals = tab.rho_many(us)
    assert (vals > 0).all()
    assert (np.diff(vals) <= 1e-15).all()


def test_defining_equation_residual():
    tab = default_dickman_table()
    for u in np.linspace(1.5, 30.0, 58):
        # relative-to-rho(u-1) residual far below 1e-6 absolute
        assert dickman_residual(tab, float(u)) <= 1e-6


def test_rho_upper_bound_exp():
    tab = default_dickman_table()
    for u in np.linspace(10.0, 30.0, 41):
        assert tab.rho(float(u)) <= math.exp(-u * math.log(u))


def test_rho_rejects_negative():
    with pytest.raises(ValueError):
        dickman_rho(-0.5)


def test_rho_extends_beyond_default():
    v = dickman_rho(32.5)
    assert 0 < v < 1e-50


# -- Soundararajan comparison ---------------------------------------------


def test_soundararajan_ratio_one_when_r_geq_d():
    rep = soundararajan_check(2, 6, 6)
    assert rep.ratio == pytest.approx(1.0, abs=1e-12)


def test_soundararajan_reports_finite_exponent():
    rep = soundararajan_check(2, 10, 5)
    assert rep.n_exact == smooth_count(2, 10, 5)
    assert rep.normalized_exponent is not None
    assert math.isfinite(rep.normalized_exponent)
    assert rep.prediction == pytest.approx(2**10 * dickman_rho(2.0), rel=1e-12)


def test_soundararajan_range_flag():
    assert soundararajan_check(2, 10, 5).in_range is False  # log_2(10 ln^2 10) ~ 5.7
    assert soundararajan_check(2, 10, 8).in_range is True

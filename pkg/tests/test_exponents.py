import math
import pickle

import numpy as np
import pytest

from bellpure import (UNDEFINED, DomainError, ErrorRates, apply_bn, apply_pn, arc_k, bb84_state,
                      binomial_tail, chernoff_ratio, exceeds, exponent_r, exponent_report,
                      exponent_rp, independent_state, is_defined, make_state, region_f,
                      separability_after_pn, stirling_lower_bound_check, werner)
from bellpure.binomial import lower_tail, log_lower_tail
from bellpure.exponents import r_from_log_ratio, rp_region_flags
from bellpure.steps import bn_xy

from .conftest import simplex_points

SIX_STATE_F = (5 + 3 * math.sqrt(5)) / 20


def test_r_at_thresholds():
    assert math.isclose(exponent_r(werner(SIX_STATE_F)), 2.0, abs_tol=1e-12)
    assert math.isclose(exponent_r(bb84_state(0.6)), 2.0, abs_tol=1e-12)


def test_r_special_values():
    assert exponent_r(make_state(0.7, 0, 0.3, 0)) == math.inf
    assert exponent_r(make_state(0.9, 0.1, 0, 0)) == math.inf
    assert exponent_r(make_state(0.5, 0.5, 0, 0)) is UNDEFINED
    assert exponent_r(make_state(0.25, 0.25, 0.25, 0.25)) is UNDEFINED
    assert exponent_r(make_state(0.4, 0.1, 0.3, 0.2)) == 0.0


def test_undefined_marker():
    assert repr(UNDEFINED) == "UNDEFINED"
    assert pickle.loads(pickle.dumps(UNDEFINED)) is UNDEFINED
    assert not is_defined(UNDEFINED) and is_defined(math.inf)
    assert not exceeds(UNDEFINED, 2) and exceeds(math.inf, 2) and not exceeds(2.0, 2)
    with pytest.raises(TypeError):
        UNDEFINED > 2


def test_r_from_log_ratio_small_b():
    # b far below machine epsilon relative to a still yields a finite exponent
    r = r_from_log_ratio(math.log(4.0), 0.8, 1e-20)
    assert math.isfinite(r) and r > 1e15


def test_region_f_examples():
    assert region_f(0.5, 0) == 0
    assert abs(region_f(0.6, 0.2)) < 1e-15
    assert region_f(0.25, 0.25) == -0.125
    assert region_f(0.7, 0.05) > 0
    a, b = 0.37, 0.21
    assert math.isclose(region_f(a, b), (a - 0.25) ** 2 + (b - 0.25) ** 2 - 0.125, abs_tol=1e-15)


def test_rp_examples():
    assert math.isclose(exponent_rp(bb84_state(0.6)), math.log(0.64) / (2 * math.log(0.6)), rel_tol=1e-12)
    assert math.isclose(exponent_rp(bb84_state(0.6)), 0.436829205, abs_tol=1e-9)
    B = 0.5 - 1 / (2 * math.sqrt(2))
    assert math.isclose(exponent_rp(independent_state(B, B)), 1.0, abs_tol=1e-12)
    assert exponent_rp(make_state(1, 0, 0, 0)) == math.inf
    assert exponent_rp(make_state(0.4, 0.1, 0.3, 0.2)) is UNDEFINED


def test_rp_region_flags():
    assert rp_region_flags(ErrorRates(0, 0)) == (True, True)
    assert rp_region_flags(ErrorRates(0.25, 0.25))[0] is False
    assert rp_region_flags(ErrorRates(0, 0.2)) == (True, True)
    with pytest.raises(DomainError):
        rp_region_flags(ErrorRates(0.6, 0.1))


def test_rp_flags_agree_with_value(rng):
    for s in simplex_points(rng, 500, a_min=0.5):
        B, P = s.B, s.P
        if B > 0.5 or P > 0.5:
            continue
        rp = exponent_rp(s)
        if rp is UNDEFINED or not math.isfinite(rp):
            continue
        gt1, gt2 = rp_region_flags(ErrorRates(B, P))
        if abs(rp - 1) > 1e-9:
            assert gt1 == (rp > 1)
        if abs(rp - 2) > 1e-9:
            assert gt2 == (rp > 2)


def test_report_flags(rng):
    for s in simplex_points(rng, 300, a_min=0.5):
        rep = exponent_report(s)
        assert rep.region_flags["r_gt_2"] == exceeds(rep.r, 2.0) or abs(rep.f_value) < 1e-9
        assert rep.region_flags["r_gt_2"] == (rep.f_value > 0)
    doc = exponent_report(make_state(0.7, 0, 0.3, 0)).to_dict()
    assert doc["r"] == "inf"


def test_r_invariant_under_bn(rng):
    for s in simplex_points(rng, 200, a_min=0.5):
        r = exponent_r(s)
        if not is_defined(r) or not math.isfinite(r) or s.a + s.b <= 0.5:
            continue
        for n in range(1, 11):
            # a' - b' shrinks like ((a-b)/(a+b))^n; below ~1e-6 doubles cannot resolve it
            if ((s.a - s.b) / (s.a + s.b)) ** n < 1e-6:
                break
            assert math.isclose(exponent_r(apply_bn(s, n).state), r, rel_tol=1e-9, abs_tol=1e-9)


def test_sign_agreement(rng):
    for s in simplex_points(rng, 1000, a_min=0.5):
        r = exponent_r(s)
        if r is UNDEFINED:
            continue
        assert exceeds(r, 2.0) == (region_f(s.a, s.b) > 0)


def test_r_gt_1_iff_entangled(rng):
    for s in simplex_points(rng, 1000):
        r = exponent_r(s)
        if r is UNDEFINED or s.a + s.b <= s.c + s.d:
            continue
        assert exceeds(r, 1.0) == (s.a > 0.5)


PANEL = [werner(0.55), werner(0.6), werner(0.65), bb84_state(0.56), bb84_state(0.62),
         bb84_state(0.66), bb84_state(0.7), make_state(0.65, 0.15, 0.12, 0.08),
         make_state(0.62, 0.1, 0.2, 0.08), make_state(0.55, 0.2, 0.15, 0.1)]


def test_scaling_panel_has_moderate_r():
    for s in PANEL:
        r = exponent_r(s)
        assert 1 < r < 4
        assert abs(s.c - s.d) < s.a - s.b


def test_scaling_law_at_200():
    for s in PANEL:
        x, y = bn_xy(s, [200])
        ratio = x[0] / (2 * y[0]) ** exponent_r(s)
        assert abs(ratio - 1) <= 0.1


@pytest.mark.parametrize("t", [-0.9, -0.7, -0.5, -0.3])
def test_arc_scaling_limit(t):
    x, y = bn_xy(arc_k(t), [500])
    assert abs(x[0] / y[0] ** 2 - 4) <= 0.05


# -- binomial quantities --------------------------------------------------------

def test_binomial_tail_examples():
    for n in (1, 3, 11, 101):
        assert math.isclose(binomial_tail(n, 0.5), 0.5, abs_tol=1e-12)
    assert binomial_tail(3, 1.0) == 0.0
    assert math.isclose(binomial_tail(3, 0.8), 0.104, abs_tol=1e-15)
    for bad in [(2, 0.7), (3, 0.4), (3, 1.1)]:
        with pytest.raises(DomainError):
            binomial_tail(*bad)


def test_lower_tail_paths_agree():
    for n in (61, 99, 150):
        for p in (0.3, 0.55, 0.9):
            k = n // 2
            exact = math.fsum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in range(k + 1))
            assert math.isclose(lower_tail(n, k, p), exact, rel_tol=1e-10)
    assert log_lower_tail(5, -1, 0.3) == -math.inf


def test_chernoff_ratio_examples():
    assert math.isclose(chernoff_ratio(3, 0.8), 0.203125, rel_tol=1e-12)
    for bad in [(3, 0.5), (3, 1.0), (4, 0.7)]:
        with pytest.raises(DomainError):
            chernoff_ratio(*bad)


def test_chernoff_ratio_in_unit_interval():
    for n in range(1, 502, 2):
        for p in np.arange(0.55, 0.951, 0.05):
            c = chernoff_ratio(n, float(p))
            assert 0.0 <= c <= 1.0


def test_chernoff_ratio_decays_subexponentially():
    for p in (0.6, 0.8):
        scaled = [chernoff_ratio(n, p) * math.sqrt(n) for n in range(101, 2002, 100)]
        assert min(scaled) > 0.05


def test_tail_rate():
    n = 2001
    for p in (0.6, 0.75, 0.9):
        rate = math.exp(log_lower_tail(n, (n - 1) // 2, p) / n)
        assert abs(rate - 2 * math.sqrt(p * (1 - p))) <= 0.01


def test_stirling_bound():
    assert all(stirling_lower_bound_check(n) for n in range(1, 201))
    assert 3 >= 8 * math.exp(-1 / 6) * 0.75 / math.sqrt(math.pi)
    with pytest.raises(DomainError):
        stirling_lower_bound_check(0)


# -- separability ---------------------------------------------------------------

def test_separability_examples():
    assert not separability_after_pn(make_state(1, 0, 0, 0), 3)
    weak = independent_state(0.25, 0.25)
    assert exponent_rp(weak) < 1
    assert separability_after_pn(weak, 41)
    strong = independent_state(0.1, 0.1)
    assert exponent_rp(strong) > 1
    assert not separability_after_pn(strong, 41)


def test_pn_output_bit_and_phase_bounded(rng):
    for s in simplex_points(rng, 50, a_min=0.5):
        if s.a + s.b - s.c - s.d <= 0:
            continue
        out = apply_pn(s, 5)
        assert max(out.b, out.c, out.d) <= 0.5 + 1e-12

import json
import math

import pytest
from hypothesis import given, strategies as st

from bellpure import (BellDiagonalState, DomainError, arc_k, bb84_state, error_rates,
                      in_closure_sv, independent_state, is_bit_phase_independent,
                      is_entangled_wrt_phi_plus, make_state, parse_state, region_f, werner,
                      z_param)
from bellpure.states import BellLabel, PHI_MINUS, PHI_PLUS, PSI_MINUS, PSI_PLUS

from .conftest import states


def close(s, expected, tol=1e-12):
    return all(abs(x - y) <= tol for x, y in zip(s.as_tuple(), expected))


def test_make_state_accepts_valid():
    assert make_state(0.25, 0.25, 0.25, 0.25).as_tuple() == (0.25, 0.25, 0.25, 0.25)
    s = make_state(0.7, 0.1, 0.15, 0.05)
    assert math.isclose(sum(s.as_tuple()), 1.0, abs_tol=1e-15)


def test_make_state_rejects_bad_sum():
    with pytest.raises(DomainError):
        make_state(0.5, 0.5, 0.1, 0.0)


def test_make_state_rejects_negative():
    with pytest.raises(DomainError):
        make_state(1.1, -0.1, 0.0, 0.0)


def test_make_state_clamps_rounding_noise():
    s = make_state(1.0 + 1e-12, -1e-12, 0.0, 0.0)
    assert s.b == 0.0 and s.a == 1.0


def test_direct_construction_validates():
    with pytest.raises(DomainError):
        BellDiagonalState(0.5, 0.5, 0.5, 0.0)
    with pytest.raises(DomainError):
        BellDiagonalState(float("nan"), 0, 0, 0)


def test_error_rates():
    B, P = error_rates(make_state(0.7, 0.1, 0.15, 0.05))
    assert math.isclose(B, 0.20) and math.isclose(P, 0.15)
    assert error_rates(make_state(1, 0, 0, 0)) == (0, 0)
    B, P = error_rates(werner(0.7))
    assert math.isclose(B, 0.2) and math.isclose(P, 0.2)


def test_entanglement_predicate_is_strict():
    assert is_entangled_wrt_phi_plus(make_state(0.6, 0.2, 0.2, 0.0))
    boundary = make_state(0.5, 0.5, 0, 0)
    assert not is_entangled_wrt_phi_plus(boundary)
    assert in_closure_sv(boundary)
    assert not is_entangled_wrt_phi_plus(make_state(0.25, 0.25, 0.25, 0.25))
    assert not in_closure_sv(make_state(0.25, 0.25, 0.25, 0.25))


def test_werner():
    assert werner(1).as_tuple() == (1, 0, 0, 0)
    assert close(werner(0.25), (0.25,) * 4)
    with pytest.raises(DomainError):
        werner(1.2)


def test_bb84_state():
    s = bb84_state(0.6)
    assert close(s, (0.6, 0.2, 0.2, 0.0))
    assert abs(region_f(s.a, s.b)) < 1e-15
    assert bb84_state(1).as_tuple() == (1, 0, 0, 0)
    assert close(bb84_state(0.7), (0.7, 0.15, 0.15, 0))
    with pytest.raises(DomainError):
        bb84_state(-0.1)


@given(st.floats(0, 1))
def test_family_rates_are_symmetric(F):
    for s in (werner(F), bb84_state(F)):
        B, P = error_rates(s)
        assert abs(B - P) <= 1e-12
        assert all(x >= 0 for x in s.as_tuple())
        assert abs(sum(s.as_tuple()) - 1) <= 1e-12


def test_z_param():
    assert close(z_param(0.6, 0.2, 1), (0.6, 0.2, 0.2, 0))
    assert close(z_param(0.6, 0.2, 0), (0.6, 0.2, 0, 0.2))
    assert close(z_param(0.5, 0.5, 0.5), (0.5, 0.5, 0, 0))
    for bad in [(0.4, 0.2, 0.5), (0.6, 0.5, 0.5), (0.6, 0.1, 1.5)]:
        with pytest.raises(DomainError):
            z_param(*bad)


@given(st.floats(0.5, 1), st.floats(0, 1), st.floats(0, 1))
def test_z_param_bit_rate_ignores_z(a, frac, z):
    b = frac * (1 - a)
    s = z_param(a, b, z)
    assert abs(s.c + s.d - (1 - a - b)) <= 1e-12
    assert in_closure_sv(s)


def test_arc_endpoints_and_middle():
    assert arc_k(-1).as_tuple() == (0.5, 0.0, 0.5, 0.0)
    assert arc_k(1).as_tuple() == (0.5, 0.5, 0.0, 0.0)
    mid = arc_k(0)
    assert math.isclose(mid.a, 0.25 + 1 / (2 * math.sqrt(2)), abs_tol=1e-12)
    assert math.isclose(mid.b, 0.25, abs_tol=1e-12)
    assert mid.d == 0.0
    assert abs(region_f(mid.a, mid.b)) <= 1e-12
    with pytest.raises(DomainError):
        arc_k(1.5)


@given(st.floats(-1, 1))
def test_arc_lies_on_boundary(t):
    s = arc_k(t)
    assert abs(region_f(s.a, s.b)) <= 1e-10
    assert s.d == 0.0
    assert in_closure_sv(s)


def test_independence():
    assert not is_bit_phase_independent(bb84_state(0.6))
    s = independent_state(0.2, 0.1)
    assert close(s, (0.72, 0.08, 0.18, 0.02))
    assert is_bit_phase_independent(s)
    assert is_bit_phase_independent(make_state(1, 0, 0, 0))


def test_labels():
    assert PHI_PLUS == BellLabel(0, 0) and PHI_PLUS.index == 0
    assert PHI_MINUS.index == 1 and PSI_PLUS.index == 2 and PSI_MINUS.index == 3
    assert all(BellLabel.from_index(i).index == i for i in range(4))


@given(states())
def test_json_and_csv_round_trip(s):
    again = BellDiagonalState.from_dict(json.loads(json.dumps(s.to_dict())))
    assert close(again, s.as_tuple(), 1e-15)
    again = BellDiagonalState.from_csv_row(s.to_csv_row())
    assert close(again, s.as_tuple(), 1e-15)


def test_parse_state():
    assert close(parse_state("0.7,0.1,0.1,0.1"), werner(0.7).as_tuple())
    assert close(parse_state("werner:0.7"), werner(0.7).as_tuple())
    assert close(parse_state("BB84:0.6"), (0.6, 0.2, 0.2, 0))
    assert close(parse_state("k:0"), arc_k(0).as_tuple())
    assert close(parse_state("z:0.6,0.2,0"), (0.6, 0.2, 0, 0.2))
    for bad in ["1,0,0", "foo:1", "werner:x", "werner:0.5,0.1", ""]:
        with pytest.raises(DomainError):
            parse_state(bad)

"""Maximum tolerable bit error rates for the six-state and BB84 protocols."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError
from .exponents import region_f
from .states import BellDiagonalState, bb84_state, make_state, werner

BRACKET = (0.5, 0.99)
BISECT_XTOL = 1e-12
BISECT_MAXITER = 200

SIX_STATE_FIDELITY = (5.0 + 3.0 * math.sqrt(5.0)) / 20.0
SIX_STATE_BIT_ERROR = 0.5 - 1.0 / (2.0 * math.sqrt(5.0))
BB84_FIDELITY = 3.0 / 5.0
BB84_BIT_ERROR = 1.0 / 5.0


class Protocol(enum.Enum):
    SIX_STATE = "six-state"
    BB84 = "bb84"


class Method(enum.Enum):
    CLOSED_FORM = "closed-form"
    BISECTION = "bisection"


@dataclass(frozen=True)
class ThresholdResult:
    protocol: Protocol
    critical_fidelity: float
    critical_bit_error_rate: float
    method: Method

    def to_dict(self) -> dict:
        return {"protocol": self.protocol.value, "method": self.method.value,
                "critical_fidelity": self.critical_fidelity,
                "critical_bit_error_rate": self.critical_bit_error_rate}


_FAMILY = {
    Protocol.SIX_STATE: (werner, lambda F: 2.0 * (1.0 - F) / 3.0, SIX_STATE_FIDELITY, SIX_STATE_BIT_ERROR),
    Protocol.BB84: (bb84_state, lambda F: (1.0 - F) / 2.0, BB84_FIDELITY, BB84_BIT_ERROR),
}


def _threshold(protocol: Protocol, method: Method) -> ThresholdResult:
    family, bit_error, closed_F, closed_B = _FAMILY[protocol]
    method = Method(method)
    if method is Method.CLOSED_FORM:
        return ThresholdResult(protocol, closed_F, closed_B, method)

    def f_of(F: float) -> float:
        s = family(F)
        return region_f(s.a, s.b)

    F = bisect(f_of, *BRACKET, xtol=BISECT_XTOL, maxiter=BISECT_MAXITER)
    return ThresholdResult(protocol, F, bit_error(F), method)


def six_state_threshold(method: Method = Method.CLOSED_FORM) -> ThresholdResult:
    """Werner-state fidelity and bit error rate at which ``r`` crosses 2."""
    return _threshold(Protocol.SIX_STATE, method)


def bb84_threshold(method: Method = Method.CLOSED_FORM) -> ThresholdResult:
    """BB-state fidelity and bit error rate at which ``r`` crosses 2."""
    return _threshold(Protocol.BB84, method)


def threshold(protocol: Protocol | str, method: Method | str = Method.CLOSED_FORM) -> ThresholdResult:
    return _threshold(Protocol(protocol), Method(method))


def delta_quadratic(B: float, delta: float) -> float:
    return 2.0 * delta**2 + (2.0 - 6.0 * B) * delta + (0.5 - 3.5 * B + 5.0 * B**2)


def bb84_delta_family(B: float, delta: float) -> tuple[BellDiagonalState, float]:
    """State ``(1-2B+delta, B-delta, B-delta, delta)`` with equal bit and phase error rates.

    Returns the state and ``f`` from the closed quadratic in ``delta``; the
    quadratic is checked against ``region_f`` of the state.
    """
    if not (0.0 <= delta <= B <= 0.5):
        raise DomainError(f"need 0 <= delta <= B <= 1/2, got B={B!r}, delta={delta!r}")
    state = make_state(1.0 - 2.0 * B + delta, B - delta, B - delta, delta)
    quad = delta_quadratic(B, delta)
    direct = region_f(1.0 - 2.0 * B + delta, B - delta)
    if abs(quad - direct) > 1e-12:
        raise AssertionError(f"quadratic {quad!r} disagrees with region_f {direct!r}")
    return state, quad


def bb84_worst_case_check(B: float, grid_size: int = 1001, tie_tol: float = 1e-12) -> bool:
    """True iff, on a uniform ``delta`` grid over ``[0, B]``, ``f`` is smallest at ``delta = 0``."""
    if not (0.0 <= B <= 0.5):
        raise DomainError(f"B must lie in [0, 1/2], got {B!r}")
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    deltas = np.linspace(0.0, B, grid_size)
    values = np.array([bb84_delta_family(B, float(dl))[1] for dl in deltas])
    return bool(values.min() >= values[0] - tie_tol)

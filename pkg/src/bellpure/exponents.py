"""Characteristic exponents r (for B_n) and r_P (for P_n) and their region tests.

Exponents are extended reals: a ``float`` (possibly ``math.inf``) or the
:data:`UNDEFINED` marker when the defining quotient degenerates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .binomial import (binomial_tail, chernoff_ratio, chernoff_z,  # noqa: F401
                       lower_tail, stirling_h, stirling_lower_bound_check)
from .errors import DomainError
from .extended import UNDEFINED, ExtendedReal, exceeds, is_defined  # noqa: F401
from .states import BellDiagonalState, ErrorRates, error_rates
from .formatting import ext_json
from .steps import apply_pn


def region_f(a: float, b: float) -> float:
    """``a^2 + b^2 - (a+b)/2``; positive exactly where ``r > 2`` (for ``a > b``)."""
    return a * a + b * b - (a + b) / 2.0


def r_from_log_ratio(log_bit_ratio: float, a: float, b: float) -> ExtendedReal:
    """r given ``ln((a+b)/(c+d))`` supplied separately.

    Lets callers that know the bit-rate gap analytically avoid the
    cancellation in ``(a+b) - (c+d)`` when both are close to 1/2.
    """
    if a <= b:
        return UNDEFINED
    if log_bit_ratio == 0.0:
        return 0.0
    if b == 0.0:
        return math.copysign(math.inf, log_bit_ratio)
    denominator = -math.log1p(-2.0 * b / (a + b))
    if denominator == 0.0:
        return math.copysign(math.inf, log_bit_ratio)
    return log_bit_ratio / denominator


def exponent_r(s: BellDiagonalState) -> ExtendedReal:
    """``ln((a+b)/(c+d)) / ln((a+b)/(a-b))``.

    ``+inf`` when ``c+d = 0`` or (``b = 0`` and ``a+b > c+d``); ``0`` when
    ``a+b = c+d`` and ``a > b``; ``UNDEFINED`` when ``a <= b``.
    """
    a, b, c, d = s.as_tuple()
    if a <= b:
        return UNDEFINED
    lo = c + d
    if lo == 0.0:
        return math.inf
    return r_from_log_ratio(math.log((a + b) / lo), a, b)


def exponent_rp(s: BellDiagonalState) -> ExtendedReal:
    """``ln(4(a+c)(b+d)) / (2 ln(a+b-c-d))``.

    ``+inf`` when ``b+d = 0`` or ``a+c = 0``; ``UNDEFINED`` when the bit
    contrast ``F = a+b-c-d`` is not in ``(0, 1)``.
    """
    a, b, c, d = s.as_tuple()
    phase, no_phase = b + d, a + c
    if phase == 0.0 or no_phase == 0.0:
        return math.inf
    bit = c + d
    if bit == 0.0 or 1.0 - 2.0 * bit <= 0.0:
        return UNDEFINED
    gap = no_phase - phase
    log_z2 = math.log1p(-gap * gap) if abs(gap) < 0.5 else math.log(4.0 * phase * no_phase)
    return log_z2 / (2.0 * math.log1p(-2.0 * bit))


def rp_region_flags(rates: ErrorRates) -> tuple[bool, bool]:
    """``(r_P > 1, r_P > 2)`` from the closed-form circle and quartic inequalities."""
    B, P = rates
    if not (0.0 <= B <= 0.5 and 0.0 <= P <= 0.5):
        raise DomainError(f"error rates must lie in [0, 1/2], got {rates!r}")
    gt_1 = (0.5 - B) ** 2 + (0.5 - P) ** 2 > 0.25
    gt_2 = (1.0 - 2.0 * B) ** 4 - 4.0 * P * (1.0 - P) > 0.0
    return gt_1, gt_2


@dataclass(frozen=True)
class ExponentReport:
    r: ExtendedReal
    r_p: ExtendedReal
    f_value: float
    region_flags: dict[str, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"r": ext_json(self.r), "r_p": ext_json(self.r_p),
                "f_value": ext_json(self.f_value), "region_flags": dict(self.region_flags)}


def exponent_report(s: BellDiagonalState) -> ExponentReport:
    B, P = error_rates(s)
    f_value = region_f(s.a, s.b)
    if B <= 0.5 and P <= 0.5:
        rp_gt_1, rp_gt_2 = rp_region_flags(ErrorRates(B, P))
    else:
        rp = exponent_rp(s)
        rp_gt_1, rp_gt_2 = exceeds(rp, 1.0), exceeds(rp, 2.0)
    flags = {"r_gt_1": s.a > 0.5, "r_gt_2": s.a > s.b and f_value > 0.0,
             "rp_gt_1": rp_gt_1, "rp_gt_2": rp_gt_2}
    return ExponentReport(exponent_r(s), exponent_rp(s), f_value, flags)


def separability_after_pn(s: BellDiagonalState, n: int) -> bool:
    """True iff ``P_n(s)`` is separable, i.e. its fidelity is at most 1/2."""
    return apply_pn(s, n).a <= 0.5

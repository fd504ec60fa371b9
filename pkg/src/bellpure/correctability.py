"""Shannon-bound correctability of Bell-diagonal states under B_n or P_n sequences."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DomainError
from .exponents import ExponentReport, exponent_report, region_f
from .formatting import ext_json
from .states import BellDiagonalState, ErrorRates, error_rates, in_closure_sv
from .steps import bn_xy, pn_error_rates

TIE_TOL = 1e-12
DEFAULT_N_MAX = 10_000

_LN2 = math.log(2.0)


class SequenceKind(enum.Enum):
    BN = "Bn"
    PN = "Pn"


class Verdict(enum.Enum):
    CORRECTABLE = "Correctable"
    NOT_CORRECTABLE = "NotCorrectable"
    INCONCLUSIVE = "Inconclusive"


def binary_entropy(x: float) -> float:
    """Binary Shannon entropy in bits, with ``H(0) = H(1) = 0``."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"binary entropy needs x in [0, 1], got {x!r}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def _entropy_array(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    inside = (x > 0) & (x < 1)
    safe = np.where(inside, x, 0.5)
    return np.where(inside, -safe * np.log2(safe) - (1 - safe) * np.log2(1 - safe), 0.0)


def _capacity_near_half(y: np.ndarray) -> np.ndarray:
    """``1 - H(1/2 - y)`` without cancellation for small ``y``."""
    two_y = 2.0 * np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = (two_y * np.arctanh(two_y) + 0.5 * np.log1p(-two_y * two_y)) / _LN2
    return np.where(np.abs(two_y) >= 1.0, 1.0, value)


def asymcss(rates: ErrorRates) -> float:
    """``1 - H(B) - H(P)``: positive when a CSS code can finish the purification."""
    B, P = rates
    return 1.0 - (binary_entropy(B) + binary_entropy(P))


def asymcss_xy(x, y):
    """``asymcss((x, 1/2 - y))`` evaluated stably for small ``y``; accepts arrays."""
    value = _capacity_near_half(y) - _entropy_array(x)
    return float(value) if np.ndim(value) == 0 else value


def asymcss_lower_bound(x: float, y: float) -> float:
    """``(x ln x - x + 2 y^2) / ln 2``, a lower bound on ``asymcss((x, 1/2 - y))``."""
    if not (0.0 <= x <= 0.5 and 0.0 <= y <= 0.5):
        raise DomainError(f"lower bound needs x, y in [0, 1/2], got ({x!r}, {y!r})")
    x_log_x = x * math.log(x) if x > 0 else 0.0
    return (x_log_x - x + 2.0 * y * y) / _LN2


def correctability_curve(s: BellDiagonalState, kind: SequenceKind, n_max: int = DEFAULT_N_MAX):
    """``(ns, asymcss after S_n)`` for every admissible ``n <= n_max``."""
    kind = SequenceKind(kind)
    if kind is SequenceKind.BN:
        ns = np.arange(1, n_max + 1)
        x, y = bn_xy(s, ns)
        return ns, asymcss_xy(x, y)
    ns = np.arange(1, n_max + 1, 2)
    B, P = error_rates(s)
    values = np.empty(ns.size)
    for i, n in enumerate(ns):
        new_P = pn_error_rates(ErrorRates(B, P), int(n)).P
        values[i] = asymcss_xy(new_P, _bit_margin(B, int(n)))
    return ns, values


def _bit_margin(B: float, n: int) -> float:
    """``1/2 - B'`` after P_n, i.e. ``(1 - 2B)**n / 2``."""
    F = 1.0 - 2.0 * B
    if F > 0 and B > 0:
        return math.exp(n * math.log1p(-2.0 * B)) / 2.0
    return F**n / 2.0


def smallest_correcting_n(s: BellDiagonalState, kind: SequenceKind,
                          n_max: int = DEFAULT_N_MAX) -> Optional[int]:
    """Least ``n <= n_max`` with ``asymcss(S_n(s)) > 0``, or ``None``.

    ``None`` only means nothing was found below the bound.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be positive, got {n_max!r}")
    ns, values = correctability_curve(s, kind, n_max)
    hits = np.flatnonzero(values > 0.0)
    return int(ns[hits[0]]) if hits.size else None


@dataclass(frozen=True)
class CorrectabilityReport:
    state: BellDiagonalState
    asymcss_now: float
    verdict: Verdict
    smallest_n: Optional[int]
    sequence_kind: SequenceKind
    exponent_basis: ExponentReport
    n_max: int = DEFAULT_N_MAX

    def to_dict(self) -> dict:
        return {
            "state": {k: ext_json(v) for k, v in self.state.to_dict().items()},
            "asymcss_now": ext_json(self.asymcss_now),
            "verdict": self.verdict.value,
            "smallest_n": self.smallest_n,
            "n_max": self.n_max,
            "sequence_kind": self.sequence_kind.value,
            "exponent_basis": self.exponent_basis.to_dict(),
        }


def bn_verdict(s: BellDiagonalState) -> Verdict:
    """Asymptotic B_n correctability holds exactly when ``r > 2`` (``f > 0``).

    ``r = 2`` (``|f| <= TIE_TOL``) is not correctable: ``x_n / y_n^2`` tends to 4.
    """
    f = region_f(s.a, s.b)
    if abs(f) <= TIE_TOL or f < 0:
        return Verdict.NOT_CORRECTABLE
    return Verdict.CORRECTABLE


def pn_verdict(s: BellDiagonalState) -> Verdict:
    """``r_P > 2`` suffices and ``r_P >= 2`` is necessary; the tie is left open."""
    B, P = error_rates(s)
    margin = (1.0 - 2.0 * B) ** 4 - 4.0 * P * (1.0 - P)
    if abs(margin) <= TIE_TOL:
        return Verdict.INCONCLUSIVE
    return Verdict.CORRECTABLE if margin > 0 else Verdict.NOT_CORRECTABLE


def decide_correctability(s: BellDiagonalState, kind: SequenceKind = SequenceKind.BN,
                          n_max: int = DEFAULT_N_MAX) -> CorrectabilityReport:
    kind = SequenceKind(kind)
    if not in_closure_sv(s):
        raise DomainError(f"state must have fidelity >= 1/2, got a={s.a!r}")
    verdict = bn_verdict(s) if kind is SequenceKind.BN else pn_verdict(s)
    basis = exponent_report(s)
    smallest = smallest_correcting_n(s, kind, n_max) if verdict is Verdict.CORRECTABLE else None
    return CorrectabilityReport(s, asymcss(error_rates(s)), verdict, smallest, kind, basis, n_max)


def estimate_r_sup(xy_sequence: Sequence[tuple[float, float]]) -> float:
    """Tail slope of ``ln x_n`` against ``ln y_n`` (least squares over the last third).

    A finite-sample estimate of the supremal scaling exponent, not the supremum itself.
    """
    xy = np.asarray(xy_sequence, dtype=float)
    if xy.ndim != 2 or xy.shape[1] != 2 or xy.shape[0] < 2:
        raise DomainError("need a sequence of at least two (x, y) pairs")
    if np.any(xy <= 0) or not np.all(np.isfinite(xy)):
        raise DomainError("all x_n and y_n must be positive and finite")
    tail = xy[-max(2, len(xy) // 3):]
    log_x, log_y = np.log(tail[:, 0]), np.log(tail[:, 1])
    slope, _ = np.polyfit(log_y, log_x, 1)
    return float(slope)

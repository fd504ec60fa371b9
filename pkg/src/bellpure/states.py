"""Bell-diagonal qubit-pair states and the state families used in the analysis.

A state is the probability vector ``(a, b, c, d)`` over the Bell basis
``(Phi+, Phi-, Psi+, Psi-)``.  Bell states are also addressed by their
binary labels ``(l, m)`` (phase bit, bit-flip bit)::

    (0,0) = Phi+   (1,0) = Phi-   (0,1) = Psi+   (1,1) = Psi-

so the component index of label ``(l, m)`` is ``l + 2*m``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError

TOL_PROB = 1e-9

_SQRT2 = math.sqrt(2.0)


class BellLabel(NamedTuple):
    """Binary label of a Bell state: ``l`` is the phase bit, ``m`` the bit-flip bit."""

    l: int
    m: int

    @property
    def index(self) -> int:
        return self.l + 2 * self.m

    @classmethod
    def from_index(cls, index: int) -> "BellLabel":
        return cls(index & 1, index >> 1)


PHI_PLUS = BellLabel(0, 0)
PHI_MINUS = BellLabel(1, 0)
PSI_PLUS = BellLabel(0, 1)
PSI_MINUS = BellLabel(1, 1)


class ErrorRates(NamedTuple):
    """Total bit error rate ``B = c + d`` and phase error rate ``P = b + d``."""

    B: float
    P: float


@dataclass(frozen=True)
class BellDiagonalState:
    """Immutable Bell-diagonal state.

    Direct construction only validates; use :func:`make_state` to clamp
    rounding noise and renormalize.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        comps = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(x) for x in comps):
            raise DomainError(f"non-finite component in {comps}")
        if min(comps) < -TOL_PROB:
            raise DomainError(f"negative component in {comps}")
        if abs(math.fsum(comps) - 1.0) > TOL_PROB:
            raise DomainError(f"components sum to {math.fsum(comps)!r}, not 1")

    @property
    def fidelity(self) -> float:
        return self.a

    @property
    def B(self) -> float:
        return self.c + self.d

    @property
    def P(self) -> float:
        return self.b + self.d

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def __getitem__(self, index: int) -> float:
        return self.as_tuple()[index]

    def to_dict(self) -> dict[str, float]:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}

    @classmethod
    def from_dict(cls, data: dict) -> "BellDiagonalState":
        try:
            return make_state(*(float(data[k]) for k in "abcd"))
        except KeyError as exc:
            raise DomainError(f"state object is missing component {exc}") from None

    def to_csv_row(self) -> list[str]:
        return [format(x, ".17g") for x in self.as_tuple()]

    @classmethod
    def from_csv_row(cls, row: Sequence[str]) -> "BellDiagonalState":
        if len(row) != 4:
            raise DomainError(f"expected 4 columns a,b,c,d, got {len(row)}")
        return make_state(*(float(x) for x in row))


def make_state(a: float, b: float, c: float, d: float) -> BellDiagonalState:
    """Validate ``(a, b, c, d)``, clamp tiny negatives to zero and renormalize."""
    comps = [float(a), float(b), float(c), float(d)]
    if not all(math.isfinite(x) for x in comps):
        raise DomainError(f"non-finite component in {comps}")
    if min(comps) < -TOL_PROB:
        raise DomainError(f"component below zero: {comps}")
    total = math.fsum(comps)
    if abs(total - 1.0) > TOL_PROB:
        raise DomainError(f"components sum to {total!r}, not 1")
    comps = [max(x, 0.0) for x in comps]
    total = math.fsum(comps)
    return BellDiagonalState(*(x / total for x in comps))


def state_from_array(values) -> BellDiagonalState:
    return make_state(*(float(x) for x in values))


def error_rates(s: BellDiagonalState) -> ErrorRates:
    return ErrorRates(s.c + s.d, s.b + s.d)


def is_entangled_wrt_phi_plus(s: BellDiagonalState) -> bool:
    """Membership in the open set of states with fidelity above 1/2."""
    return s.a > 0.5


def in_closure_sv(s: BellDiagonalState, tol: float = TOL_PROB) -> bool:
    return s.a >= 0.5 - tol


def _check_probability(name: str, x: float) -> None:
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {x!r}")


def werner(F: float) -> BellDiagonalState:
    """Werner state ``(F, (1-F)/3, (1-F)/3, (1-F)/3)``."""
    _check_probability("F", F)
    e = (1.0 - F) / 3.0
    return make_state(F, e, e, e)


def bb84_state(F: float) -> BellDiagonalState:
    """Worst-case BB84 state ``(F, (1-F)/2, (1-F)/2, 0)``."""
    _check_probability("F", F)
    e = (1.0 - F) / 2.0
    return make_state(F, e, e, 0.0)


def z_param(a: float, b: float, z: float) -> BellDiagonalState:
    """``(a, b, z(1-a-b), (1-z)(1-a-b))``; the remaining error mass is split by ``z``."""
    if a < 0.5 - TOL_PROB:
        raise DomainError(f"need a >= 1/2, got {a!r}")
    if b < -TOL_PROB or a + b > 1.0 + TOL_PROB:
        raise DomainError(f"need b >= 0 and a + b <= 1, got a={a!r}, b={b!r}")
    _check_probability("z", z)
    rest = max(1.0 - a - b, 0.0)
    return make_state(a, max(b, 0.0), z * rest, (1.0 - z) * rest)


def arc_k(t: float) -> BellDiagonalState:
    """Point ``t`` in [-1, 1] on the ``d = 0`` boundary arc of the ``r <= 2`` disc.

    Evaluated through sum-to-product forms so that components that vanish at
    the endpoints (``b`` at ``t = -1``, ``c`` at ``t = +1``) keep full
    relative precision.
    """
    if not (-1.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [-1, 1], got {t!r}")
    if t == -1.0:
        return BellDiagonalState(0.5, 0.0, 0.5, 0.0)
    if t == 1.0:
        return BellDiagonalState(0.5, 0.5, 0.0, 0.0)
    u = math.pi * (1.0 + t) / 8.0
    v = math.pi * (1.0 - t) / 8.0
    a = math.cos(u) * math.cos(v) / _SQRT2
    b = math.sin(u) * math.cos(v) / _SQRT2
    c = math.sin(v) ** 2
    return make_state(a, b, c, 0.0)


def is_bit_phase_independent(s: BellDiagonalState, tol: float = TOL_PROB) -> bool:
    """True iff bit and phase errors are statistically independent: ``P*B == d``."""
    return abs((s.b + s.d) * (s.c + s.d) - s.d) <= tol


def independent_state(B: float, P: float) -> BellDiagonalState:
    """Product state with independent bit error rate ``B`` and phase error rate ``P``."""
    _check_probability("B", B)
    _check_probability("P", P)
    return make_state((1 - B) * (1 - P), (1 - B) * P, B * (1 - P), B * P)


def parse_state(text: str) -> BellDiagonalState:
    """Parse ``a,b,c,d`` or a named family ``werner:F``, ``bb84:F``, ``k:t``, ``z:a,b,z``."""
    text = text.strip()
    family, sep, args = text.partition(":")
    try:
        if not sep:
            values = [float(x) for x in text.split(",")]
            if len(values) != 4:
                raise DomainError(f"inline state needs 4 components, got {len(values)}")
            return make_state(*values)
        family = family.lower()
        values = [float(x) for x in args.split(",")]
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"cannot parse state {text!r}: {exc}") from None
    constructors = {"werner": (werner, 1), "bb84": (bb84_state, 1), "k": (arc_k, 1), "z": (z_param, 3)}
    if family not in constructors:
        raise DomainError(f"unknown state family {family!r}")
    fn, arity = constructors[family]
    if len(values) != arity:
        raise DomainError(f"{family} takes {arity} parameter(s), got {len(values)}")
    return fn(*values)

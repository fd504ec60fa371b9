"""Exact state maps of the bit-error (B_n) and phase-error (P_n) purification steps.

B_n keeps the first of ``n`` pairs only when every bilateral bit parity agrees;
P_n (``n`` odd) sets the first pair's phase by majority vote and its bit by the
total bit parity, and never discards it.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .binomial import lower_tail
from .errors import DegenerateInput, DomainError
from .states import BellDiagonalState, BellLabel, ErrorRates, make_state

# Exact integer multinomials are converted to float up to this n; the
# log-gamma path takes over beyond it (4**n would overflow doubles near 512).
PN_EXACT_MAX_N = 256


class StepKind(enum.Enum):
    BIT = "B"
    PHASE = "P"


@dataclass(frozen=True)
class StepSpec:
    kind: StepKind
    n: int

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"step size must be a positive integer, got {self.n!r}")
        if self.kind is StepKind.PHASE and self.n % 2 == 0:
            raise DomainError(f"phase steps need odd n, got P{self.n}")

    def __str__(self) -> str:
        return f"{self.kind.value}{self.n}"


_TOKEN = re.compile(r"([BbPp])(\d+)")


@dataclass(frozen=True)
class StepSequence:
    """Ordered steps, applied left to right.  Parses ``"B4 P3 B2"``."""

    steps: tuple[StepSpec, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "StepSequence":
        steps = []
        for token in text.split():
            match = _TOKEN.fullmatch(token)
            if match is None:
                raise DomainError(f"bad step token {token!r}; expected e.g. B4 or P3")
            steps.append(StepSpec(StepKind(match.group(1).upper()), int(match.group(2))))
        return cls(tuple(steps))

    def __iter__(self) -> Iterator[StepSpec]:
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __str__(self) -> str:
        return " ".join(str(s) for s in self.steps)


@dataclass(frozen=True)
class StepResult:
    state: BellDiagonalState
    survival_probability: float = 1.0


# -- label level ----------------------------------------------------------------

def bxor_labels(p1: BellLabel, p2: BellLabel) -> tuple[BellLabel, BellLabel]:
    """Bilateral XOR with the first pair as control: phase flows back, bit flows forward."""
    (l1, m1), (l2, m2) = p1, p2
    return BellLabel(l1 ^ l2, m1), BellLabel(l2, m1 ^ m2)


def bn_label_transform(labels: Sequence[BellLabel]) -> tuple[BellLabel, list[BellLabel]]:
    """Apply BXOR(QP1, QPk) for k = 2..n.  QP1 is kept iff every partner has bit 0."""
    if not labels:
        raise DomainError("need at least one label")
    first = BellLabel(*labels[0])
    partners = []
    for label in labels[1:]:
        first, partner = bxor_labels(first, BellLabel(*label))
        partners.append(partner)
    return first, partners


def bn_keeps(partners: Sequence[BellLabel]) -> bool:
    return all(p.m == 0 for p in partners)


def pn_label_transform(labels: Sequence[BellLabel]) -> BellLabel:
    """Outcome label of QP1 after a P step on ``2k+1`` pairs.

    Working in the Hadamard-rotated frame, BXOR(QP1, QPj) leaves QP1 as
    ``(l_1, xor of all m)`` and partners as ``(l_1 ^ l_j, m_j)``.  Measuring the
    partners reveals how many phases differ from QP1's; at least ``k + 1``
    differences trigger a phase flip, so QP1 ends with the majority phase.
    """
    size = len(labels)
    if size < 1 or size % 2 == 0:
        raise DomainError(f"need an odd number of labels, got {size}")
    k = (size - 1) // 2
    l1 = labels[0][0]
    bit = 0
    for _, m in labels:
        bit ^= m
    disagreements = sum((l1 ^ l) for l, _ in labels[1:])
    phase = l1 ^ 1 if disagreements >= k + 1 else l1
    return BellLabel(phase, bit)


# -- B steps --------------------------------------------------------------------

def b2_pair(rho: BellDiagonalState, sigma: BellDiagonalState) -> StepResult:
    """B_2 on two possibly different input states; QP1 is ``rho``."""
    a, b, c, d = rho.as_tuple()
    p, q, r, s = sigma.as_tuple()
    norm = (a + b) * (p + q) + (c + d) * (r + s)
    if norm <= 0.0:
        raise DegenerateInput("bit parities never agree: surviving pair has probability 0")
    state = make_state((a * p + b * q) / norm, (b * p + a * q) / norm,
                       (c * r + d * s) / norm, (d * r + c * s) / norm)
    return StepResult(state, norm)


def _pow_pair(u: float, v: float, n):
    """``(1 + w**n, 1 - w**n)`` with ``w = (u - v)/(u + v)``, free of cancellation.

    ``n`` may be an integer array.
    """
    total = u + v
    n = np.asarray(n)
    if total <= 0.0:
        zero = np.zeros(n.shape)
        return zero, zero
    small, sign_flips = (v, False) if u >= v else (u, True)
    with np.errstate(divide="ignore"):
        log_abs_w = math.log1p(-2.0 * small / total) if 2.0 * small < total else -math.inf
        power = np.exp(n * log_abs_w)
        one_minus = -np.expm1(n * log_abs_w)
    one_plus = 1.0 + power
    if sign_flips:
        odd = (n % 2) == 1
        return np.where(odd, one_minus, one_plus), np.where(odd, one_plus, one_minus)
    return one_plus, one_minus


def _bn_components(s: BellDiagonalState, n):
    """Unnormalized-free B_n output components and log survival; ``n`` may be an array."""
    a, b, c, d = s.as_tuple()
    hi_sum, lo_sum = a + b, c + d
    top = max(hi_sum, lo_sum)
    n = np.asarray(n)
    with np.errstate(divide="ignore"):
        weight_ab = np.exp(n * math.log(hi_sum / top)) if hi_sum > 0 else np.zeros(n.shape)
        weight_cd = np.exp(n * math.log(lo_sum / top)) if lo_sum > 0 else np.zeros(n.shape)
    plus_ab, minus_ab = _pow_pair(a, b, n)
    plus_cd, minus_cd = _pow_pair(c, d, n)
    denom = 2.0 * (weight_ab + weight_cd)
    comps = (weight_ab * plus_ab / denom, weight_ab * minus_ab / denom,
             weight_cd * plus_cd / denom, weight_cd * minus_cd / denom)
    log_survival = n * math.log(top) + np.log(weight_ab + weight_cd)
    return comps, log_survival


def apply_bn(s: BellDiagonalState, n: int) -> StepResult:
    """Closed-form B_n map.

    Powers are evaluated relative to ``max(a+b, c+d)`` and through
    ``log1p``/``expm1`` so that outputs keep full relative precision for
    large ``n`` (tiny bit or phase error rates do not underflow prematurely).
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if n == 1:
        return StepResult(s, 1.0)
    comps, log_survival = _bn_components(s, int(n))
    return StepResult(make_state(*(float(x) for x in comps)), float(math.exp(log_survival)))


def _signed_power(u: float, v: float, n) -> np.ndarray:
    """``((u - v)/(u + v))**n`` for an integer array ``n``."""
    n = np.asarray(n)
    total = u + v
    if total <= 0.0 or u == v:
        return np.zeros(n.shape)
    w = (u - v) / total
    with np.errstate(divide="ignore"):
        small = min(u, v)
        log_abs = math.log1p(-2.0 * small / total) if small > 0 else 0.0
    magnitude = np.exp(n * log_abs)
    return np.where((n % 2 == 1) & (w < 0), -magnitude, magnitude)


def bn_xy(s: BellDiagonalState, ns) -> tuple[np.ndarray, np.ndarray]:
    """Bit error rate ``x_n`` and inverse phase error rate ``y_n = 1/2 - P'`` after B_n.

    Computed without forming ``P'`` so that ``y_n`` keeps relative precision
    as it decays towards zero.
    """
    ns = np.asarray(ns, dtype=np.int64)
    a, b, c, d = s.as_tuple()
    hi_sum, lo_sum = a + b, c + d
    top = max(hi_sum, lo_sum)
    with np.errstate(divide="ignore"):
        weight_ab = np.exp(ns * math.log(hi_sum / top)) if hi_sum > 0 else np.zeros(ns.shape)
        weight_cd = np.exp(ns * math.log(lo_sum / top)) if lo_sum > 0 else np.zeros(ns.shape)
    total = weight_ab + weight_cd
    x = weight_cd / total
    two_y = (weight_ab * _signed_power(a, b, ns) + weight_cd * _signed_power(c, d, ns)) / total
    return x, two_y / 2.0


def bn_error_rates_many(s: BellDiagonalState, ns) -> tuple[np.ndarray, np.ndarray]:
    """Bit and phase error rates ``(B', P')`` after B_n for every ``n`` in ``ns``."""
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size and ns.min() < 1:
        raise DomainError("all n must be positive")
    (a, b, c, d), _ = _bn_components(s, ns)
    total = a + b + c + d
    return (c + d) / total, (b + d) / total


# -- P steps --------------------------------------------------------------------

@lru_cache(maxsize=None)
def pn_index_set(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Count vectors ``(A, B, C, D)`` whose pattern maps QP1 to Phi+, with multinomials.

    A count vector records how many of the ``n`` pairs are Phi+, Phi-, Psi+, Psi-.
    QP1 ends in Phi+ when the phase majority is 0 (``A + C > B + D``) and the
    total bit parity is 0 (``C + D`` even, i.e. ``A + B`` odd for odd ``n``).
    Returns ``(counts, log_multinomial)``; counts has shape ``(m, 4)``.
    """
    rows = []
    for A in range(n + 1):
        for B in range(n + 1 - A):
            for C in range(n + 1 - A - B):
                D = n - A - B - C
                if A + C > B + D and (A + B) % 2 == 1:
                    rows.append((A, B, C, D))
    counts = np.array(rows, dtype=np.int64).reshape(-1, 4)
    lg = [math.lgamma(k + 1) for k in range(n + 1)]
    log_multinomial = np.array([lg[n] - lg[A] - lg[B] - lg[C] - lg[D] for A, B, C, D in rows])
    counts.setflags(write=False)
    log_multinomial.setflags(write=False)
    return counts, log_multinomial


@lru_cache(maxsize=None)
def _exact_multinomials(n: int) -> np.ndarray:
    counts, _ = pn_index_set(n)
    f = math.factorial
    values = np.array([float(f(n) // (f(A) * f(B) * f(C) * f(D))) for A, B, C, D in counts])
    values.setflags(write=False)
    return values


# Output component k collects monomials with the exponents permuted by _PERMS[k].
_PERMS = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))


def pn_map(states: np.ndarray, n: int, use_log: bool | None = None) -> np.ndarray:
    """Vectorized P_n over an ``(k, 4)`` array of states; returns ``(k, 4)``.

    The output is not renormalized.  ``use_log`` forces the log-gamma path
    (default: only above ``PN_EXACT_MAX_N``).
    """
    _check_odd(n)
    states = np.atleast_2d(np.asarray(states, dtype=float))
    counts, log_mult = pn_index_set(n)
    if use_log is None:
        use_log = n > PN_EXACT_MAX_N
    out = np.empty((states.shape[0], 4))
    if not use_log:
        mult = _exact_multinomials(n)
        powers = states[:, :, None] ** np.arange(n + 1)[None, None, :]
        for k, perm in enumerate(_PERMS):
            term = mult[None, :].copy()
            for comp in range(4):
                term = term * powers[:, comp, counts[:, perm[comp]]]
            out[:, k] = term.sum(axis=1)
        return out
    with np.errstate(divide="ignore"):
        logs = np.log(states)
    for k, perm in enumerate(_PERMS):
        acc = np.broadcast_to(log_mult, (states.shape[0], log_mult.size)).copy()
        for comp in range(4):
            e = counts[:, perm[comp]][None, :]
            acc = acc + np.where(e == 0, 0.0, e * logs[:, comp, None])
        out[:, k] = np.exp(acc).sum(axis=1)
    return out


def _check_odd(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1 or n % 2 == 0:
        raise DomainError(f"P steps need an odd positive n, got {n!r}")


def apply_pn(s: BellDiagonalState, n: int) -> BellDiagonalState:
    """Exact P_n map by enumeration of pair-type counts (``O(n^3)`` terms)."""
    _check_odd(n)
    if n == 1:
        return s
    return make_state(*pn_map(s.as_array(), n)[0])


def _bit_contrast_power(B: float, n: int) -> float:
    """``(1 - 2B)**n``."""
    F = 1.0 - 2.0 * B
    if F > 0 and B > 0:
        return math.exp(n * math.log1p(-2.0 * B))
    return F**n


def pn_error_rates(rates: ErrorRates, n: int) -> ErrorRates:
    """Closed-form ``(B', P')`` after P_n; depends on ``B`` and ``P`` separately."""
    _check_odd(n)
    B, P = rates
    if not (0.0 <= B <= 1.0 and 0.0 <= P <= 1.0):
        raise DomainError(f"error rates must lie in [0, 1], got {rates!r}")
    if n == 1:
        return ErrorRates(B, P)
    F = 1.0 - 2.0 * B
    if F > 0 and B > 0:
        new_B = -math.expm1(n * math.log1p(-2.0 * B)) / 2.0
    else:
        new_B = (1.0 - F**n) / 2.0
    new_P = lower_tail(n, (n - 1) // 2, 1.0 - P)
    return ErrorRates(new_B, new_P)


# -- sequences ------------------------------------------------------------------

def apply_step(s: BellDiagonalState, step: StepSpec) -> StepResult:
    if step.kind is StepKind.BIT:
        return apply_bn(s, step.n)
    return StepResult(apply_pn(s, step.n), 1.0)


def apply_sequence(s: BellDiagonalState, seq: StepSequence | str) -> StepResult:
    """Apply steps left to right; survival probabilities multiply."""
    if isinstance(seq, str):
        seq = StepSequence.parse(seq)
    survival = 1.0
    for step in seq:
        result = apply_step(s, step)
        s = result.state
        survival *= result.survival_probability
    return StepResult(s, survival)

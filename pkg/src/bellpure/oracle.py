"""Brute-force ground truth for the step maps.

``oracle_bn`` and ``oracle_pn`` enumerate every Bell-label tuple of the ``n``
input pairs, push each through the literal label-level protocol of
:mod:`bellpure.steps` and add up the outcome probabilities.  They share no
code with the closed-form maps beyond the label transforms themselves.

``monte_carlo_step`` samples label tuples instead.  Random numbers come from
numpy's counter-based Philox generator keyed by ``(seed, shot-range index)``;
shot ranges have a fixed size, so results never depend on how work is split.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .errors import DegenerateInput, DomainError, ResourceLimit
from .parallel import stream
from .states import BellDiagonalState, BellLabel, make_state
from .steps import (StepKind, StepResult, StepSpec, bn_keeps, bn_label_transform,
                    pn_label_transform)

N_ORACLE_MAX = 10
SHOT_RANGE = 1 << 16

_LABELS = tuple(BellLabel.from_index(i) for i in range(4))


def _check_size(n: int) -> None:
    if n < 1:
        raise DomainError(f"n must be positive, got {n!r}")
    if n > N_ORACLE_MAX:
        raise ResourceLimit(f"exhaustive enumeration limited to n <= {N_ORACLE_MAX}, got {n}")


@lru_cache(maxsize=None)
def _outcome_table(kind: StepKind, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Outcome index of QP1 and keep flag for each label tuple, in lexicographic order."""
    size = 4**n
    outcome = np.empty(size, dtype=np.int64)
    keep = np.ones(size, dtype=bool)
    for code, labels in enumerate(itertools.product(_LABELS, repeat=n)):
        if kind is StepKind.BIT:
            first, partners = bn_label_transform(labels)
            outcome[code] = first.index
            keep[code] = bn_keeps(partners)
        else:
            outcome[code] = pn_label_transform(labels).index
    outcome.setflags(write=False)
    keep.setflags(write=False)
    return outcome, keep


def tuple_weights(s: BellDiagonalState, n: int) -> np.ndarray:
    """Probability of every label tuple (first label most significant)."""
    p = s.as_array()
    weights = np.ones(1)
    for _ in range(n):
        weights = np.outer(weights, p).ravel()
    return weights


def oracle_bn(s: BellDiagonalState, n: int) -> StepResult:
    _check_size(n)
    outcome, keep = _outcome_table(StepKind.BIT, n)
    weights = tuple_weights(s, n)
    kept = np.bincount(outcome[keep], weights=weights[keep], minlength=4)
    survival = float(kept.sum())
    if survival <= 0.0:
        raise DegenerateInput("bit parities never agree")
    return StepResult(make_state(*(kept / survival)), survival)


def oracle_pn(s: BellDiagonalState, n: int) -> BellDiagonalState:
    if n % 2 == 0:
        raise DomainError(f"P steps need odd n, got {n}")
    _check_size(n)
    outcome, _ = _outcome_table(StepKind.PHASE, n)
    dist = np.bincount(outcome, weights=tuple_weights(s, n), minlength=4)
    return make_state(*dist)


def _simulate(labels: np.ndarray, step: StepSpec) -> tuple[np.ndarray, np.ndarray]:
    phase, bit = labels & 1, labels >> 1
    if step.kind is StepKind.BIT:
        keep = np.all(bit == bit[:, :1], axis=1)
        out_phase = np.bitwise_xor.reduce(phase, axis=1)
        out_bit = bit[:, 0]
    else:
        keep = np.ones(labels.shape[0], dtype=bool)
        out_phase = (phase.sum(axis=1) > step.n // 2).astype(np.int64)
        out_bit = np.bitwise_xor.reduce(bit, axis=1)
    return out_phase + 2 * out_bit, keep


def monte_carlo_step(s: BellDiagonalState, step: StepSpec, shots: int,
                     seed: int = 0) -> tuple[BellDiagonalState, float]:
    """Empirical output state and survival fraction from ``shots`` sampled label tuples."""
    if shots < 1:
        raise DomainError(f"shots must be positive, got {shots!r}")
    p = s.as_array()
    tally = np.zeros(4, dtype=np.int64)
    survived = 0
    for index, start in enumerate(range(0, shots, SHOT_RANGE)):
        count = min(SHOT_RANGE, shots - start)
        rng = stream(seed, index)
        labels = rng.choice(4, size=(count, step.n), p=p)
        outcome, keep = _simulate(labels, step)
        tally += np.bincount(outcome[keep], minlength=4)
        survived += int(keep.sum())
    if survived == 0:
        raise DegenerateInput("no sampled tuple survived the step")
    return make_state(*(tally / survived)), survived / shots

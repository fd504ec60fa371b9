"""Binomial partial sums and the Chernoff-type quantities built on them."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

EXACT_BINOMIAL_MAX_N = 60


def _log_terms(n: int, k_max: int, p: float) -> np.ndarray:
    k = np.arange(k_max + 1)
    log_comb = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.where(k == 0, 0.0, k * np.log(p)) if p > 0 else np.where(k == 0, 0.0, -np.inf)
        lq = np.where(n - k == 0, 0.0, (n - k) * np.log1p(-p)) if p < 1 else np.where(n - k == 0, 0.0, -np.inf)
    return log_comb + lp + lq


def log_lower_tail(n: int, k_max: int, p: float) -> float:
    """``log sum_{k<=k_max} C(n,k) p^k (1-p)^(n-k)``; ``-inf`` when the sum is zero."""
    if k_max < 0:
        return -math.inf
    k_max = min(k_max, n)
    if n <= EXACT_BINOMIAL_MAX_N:
        total = lower_tail(n, k_max, p)
        return math.log(total) if total > 0 else -math.inf
    terms = _log_terms(n, k_max, p)
    top = terms.max()
    if top == -math.inf:
        return -math.inf
    return float(top + math.log(np.sum(np.exp(terms - top))))


def lower_tail(n: int, k_max: int, p: float) -> float:
    """``sum_{k=0}^{k_max} C(n,k) p^k (1-p)^(n-k)`` for any ``p`` in [0, 1].

    Exact integer binomials up to ``n = 60``; log-space beyond.
    """
    if k_max < 0:
        return 0.0
    k_max = min(k_max, n)
    if n <= EXACT_BINOMIAL_MAX_N:
        q = 1.0 - p
        return math.fsum(math.comb(n, k) * p**k * q ** (n - k) for k in range(k_max + 1))
    return math.exp(log_lower_tail(n, k_max, p))


def _check_odd(n: int) -> None:
    if n < 1 or n % 2 == 0:
        raise DomainError(f"n must be an odd positive integer, got {n!r}")


def binomial_tail(n: int, p: float) -> float:
    """Probability of fewer than half successes in ``n`` (odd) trials with success rate ``p``."""
    _check_odd(n)
    if not (0.5 <= p <= 1.0):
        raise DomainError(f"p must lie in [1/2, 1], got {p!r}")
    return lower_tail(n, (n - 1) // 2, p)


def chernoff_z(p: float) -> float:
    return 2.0 * math.sqrt(p * (1.0 - p))


def chernoff_ratio(n: int, p: float) -> float:
    """``binomial_tail(n, p) / (2 sqrt(p(1-p)))**n``, evaluated in log space."""
    _check_odd(n)
    if not (0.5 < p < 1.0):
        raise DomainError(f"p must lie in (1/2, 1), got {p!r}")
    log_tail = log_lower_tail(n, (n - 1) // 2, p)
    return math.exp(log_tail - n * math.log(chernoff_z(p)))


def stirling_h(n: int) -> float:
    return math.exp(-1.0 / (6 * n)) * (1.0 - 1.0 / (2 * (n + 1))) / math.sqrt(math.pi * n)


def stirling_lower_bound_check(n: int) -> bool:
    """Check ``C(2n+1, n) >= 2^(2n+1) h(n)`` in log space."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n!r}")
    lhs = math.log(math.comb(2 * n + 1, n))
    rhs = (2 * n + 1) * math.log(2.0) + math.log(stirling_h(n))
    return lhs >= rhs

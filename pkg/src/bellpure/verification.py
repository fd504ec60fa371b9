"""Numerical certification scans.

Every scan returns a :class:`ScanResult`: one :class:`ScanRecord` per tested
point plus a summary.  A record passes when its ``margin`` (slack of the
inequality being checked; negative means violated) is at least
``-TOL_SCAN``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .binomial import lower_tail
from .correctability import asymcss, binary_entropy
from .exponents import exponent_r, exponent_rp, r_from_log_ratio, region_f
from .extended import UNDEFINED, exceeds
from .formatting import ext_json, fmt_num
from .parallel import chunk_bounds, map_ordered, stream
from .states import BellDiagonalState, ErrorRates, arc_k, make_state
from .errors import ResourceLimit
from .oracle import N_ORACLE_MAX, oracle_bn, oracle_pn
from .steps import apply_bn, apply_pn, pn_map

TOL_SCAN = 1e-9
IDENTITY_TOL = 1e-12


@dataclass(frozen=True)
class ScanRecord:
    inputs: dict
    computed: dict
    margin: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.margin >= -TOL_SCAN))


@dataclass
class ScanResult:
    op: str
    params: dict
    records: list[ScanRecord]
    extra: dict = field(default_factory=dict)

    @property
    def violations(self) -> list[ScanRecord]:
        return [r for r in self.records if not r.passed]

    @property
    def worst_margin(self) -> float:
        return min((r.margin for r in self.records), default=math.inf)

    def summary(self) -> dict:
        out = {"op": self.op, "params": self.params, "n_records": len(self.records),
               "n_violations": len(self.violations), "worst_margin": ext_json(self.worst_margin)}
        out.update(self.extra)
        return out

    def columns(self) -> list[str]:
        if not self.records:
            return ["pass", "margin"]
        first = self.records[0]
        return [*first.inputs, *first.computed, "pass", "margin"]

    def write_csv(self, stream_out) -> None:
        writer = csv.writer(stream_out, lineterminator="\n")
        writer.writerow(self.columns())
        for rec in self.records:
            writer.writerow([*(fmt_num(v) for v in rec.inputs.values()),
                             *(fmt_num(v) for v in rec.computed.values()),
                             fmt_num(rec.passed), fmt_num(rec.margin)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _chunked(total: int, seed: int, fn: Callable[[np.random.Generator, int], list[ScanRecord]],
             threads: int | None) -> list[ScanRecord]:
    chunks = chunk_bounds(total)
    parts = map_ordered(lambda c: fn(stream(seed, c[0]), c[2]), chunks, threads)
    return [rec for part in parts for rec in part]


def _simplex(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Uniform points on the ``dim``-part simplex via spacings of sorted uniforms."""
    cuts = np.sort(rng.random((count, dim - 1)), axis=1)
    padded = np.hstack([np.zeros((count, 1)), cuts, np.ones((count, 1))])
    return np.diff(padded, axis=1)


def sample_closure_sv(rng: np.random.Generator, count: int) -> np.ndarray:
    """Uniform states on the simplex restricted to ``a >= 1/2``.

    That region is the whole simplex shrunk by 1/2 towards Phi+, so the affine
    image of a uniform simplex point is uniform on it (no rejection needed).
    """
    u = _simplex(rng, count, 4)
    out = u / 2.0
    out[:, 0] += 0.5
    return out


# -- implication chain ----------------------------------------------------------

def _chain_record(s: BellDiagonalState) -> ScanRecord:
    rates = ErrorRates(s.c + s.d, s.b + s.d)
    shannon = asymcss(rates)
    rp = exponent_rp(s)
    r = exponent_r(s)
    margins = []
    if shannon > 0:
        margins.append(-math.inf if rp is UNDEFINED else rp - 1.0)
    if exceeds(rp, 1.0):
        margins.append(-math.inf if r is UNDEFINED else r - 2.0)
    margin = min(margins, default=math.inf)
    return ScanRecord(dict(zip("abcd", s.as_tuple())),
                      {"asymcss": shannon, "r_p": rp, "r": r}, margin)


def verify_theorem_chain(samples: int, seed: int = 0, threads: int | None = 1) -> ScanResult:
    """Check ``AsymCSS > 0 => r_P > 1 => r > 2`` on random states with ``a >= 1/2``."""
    if samples < 1:
        raise ValueError("samples must be positive")

    def work(rng, count):
        return [_chain_record(make_state(*row)) for row in sample_closure_sv(rng, count)]

    records = _chunked(samples, seed, work, threads)
    return ScanResult("theorem_chain", {"samples": samples, "seed": seed}, records)


# -- entropy and boundary-gap inequalities --------------------------------------

def h_function(t: float) -> float:
    return 1.0 - binary_entropy(math.cos(t) / 2.0) - binary_entropy(math.sin(t) / 2.0)


def verify_h_inequality(grid: int) -> ScanResult:
    """``1 - H(cos t / 2) - H(sin t / 2) <= 0`` on a uniform grid of ``[0, pi/2]``."""
    if grid < 2:
        raise ValueError("grid must be at least 2")
    records = []
    for t in np.linspace(0.0, math.pi / 2.0, grid):
        h = h_function(float(t))
        records.append(ScanRecord({"t": float(t)}, {"h": h}, -h))
    return ScanResult("h_inequality", {"grid": grid}, records)


def f_r2_boundary(b: float) -> float:
    """Smallest fidelity with ``r > 2`` at pure phase error ``b``."""
    return 0.25 + math.sqrt(max(0.125 - (b - 0.25) ** 2, 0.0))


def f_rp1_boundary(b: float) -> float:
    """Smallest fidelity with ``r_P > 1`` at pure phase error ``b`` (best case ``d = 0``)."""
    return 1.0 - b - (0.5 - math.sqrt(b * (1.0 - b)))


def delta_gap(b: float) -> float:
    return f_rp1_boundary(b) - f_r2_boundary(b)


def quartic_expanded(b: float) -> float:
    return 5 * b**4 - 6 * b**3 + 9 * b**2 / 4 - b / 4


def quartic_factored(b: float) -> float:
    return 5 * b * (b - 0.2) * (b - 0.5) ** 2


def verify_delta_inequality(grid: int) -> ScanResult:
    """``f_{r_P=1}(b) >= f_{r=2}(b)`` on ``[0, 1/2]``; also the data behind the threshold-fidelity figure."""
    if grid < 2:
        raise ValueError("grid must be at least 2")
    records = []
    interior_zeros = 0
    for b in np.linspace(0.0, 0.5, grid):
        b = float(b)
        gap = delta_gap(b)
        residual = quartic_expanded(b) - quartic_factored(b)
        if 0.0 < b < 0.5 and abs(gap) <= TOL_SCAN:
            interior_zeros += 1
        margin = gap if abs(residual) <= IDENTITY_TOL else -math.inf
        records.append(ScanRecord({"b": b}, {"f_r2": f_r2_boundary(b), "f_rp1": f_rp1_boundary(b),
                                            "delta": gap, "quartic_residual": residual}, margin))
    return ScanResult("delta_inequality", {"grid": grid}, records, {"interior_zeros": interior_zeros})


# -- conjecture on the arc ------------------------------------------------------

def arc_bit_contrast(t: float) -> float:
    """``a + b - c - d`` of ``arc_k(t)``, i.e. ``sin(pi (t+1) / 4)``."""
    return math.sin(math.pi * (1.0 + t) / 4.0)


def _pn_log_bit_ratio(F: float, n: int) -> float:
    """``ln((1 + F^n) / (1 - F^n))``: after P_n the bit contrast is exactly ``F^n``."""
    if F <= 0.0:
        return 0.0
    log_F = math.log(F)
    return math.log1p(math.exp(n * log_F)) - math.log(-math.expm1(n * log_F))


def _conjecture_records(n: int, ts: np.ndarray) -> list[ScanRecord]:
    states = np.array([arc_k(float(t)).as_tuple() for t in ts])
    out = pn_map(states, n)
    out = np.maximum(out, 0.0)
    out /= out.sum(axis=1, keepdims=True)
    records = []
    for t, (a, b, c, d) in zip(ts, out):
        t = float(t)
        F = arc_bit_contrast(t)
        r = r_from_log_ratio(_pn_log_bit_ratio(F, n), a, b) if F < 1.0 else exponent_r(make_state(a, b, c, d))
        f = region_f(a, b)
        if r is UNDEFINED:
            # a' <= b': no B_n correction possible; classify by the sign of f.
            margin = -f
        elif math.isinf(r):
            margin = -math.inf
        else:
            margin = 2.0 - r
        records.append(ScanRecord({"t": t, "n": n},
                                  {"a": a, "b": b, "c": c, "d": d, "r": r, "f": f}, margin))
    return records


def scan_conjecture(t_grid: int, n_list: Sequence[int], threads: int | None = 1) -> ScanResult:
    """``r[P_n(K(t))] <= 2`` on a uniform grid of ``t`` in ``[-1, 1]`` for each ``n``."""
    if t_grid < 2:
        raise ValueError("t_grid must be at least 2")
    n_list = [int(n) for n in n_list]
    if any(n < 1 or n % 2 == 0 for n in n_list):
        raise ValueError(f"n values must be odd and positive, got {n_list}")
    ts = np.linspace(-1.0, 1.0, t_grid)
    parts = map_ordered(lambda n: _conjecture_records(n, ts), n_list, threads)
    records = [rec for part in parts for rec in part]
    max_r = {}
    for n, part in zip(n_list, parts):
        finite = [rec.computed["r"] for rec in part if rec.computed["r"] is not UNDEFINED]
        max_r[str(n)] = ext_json(max(finite, default=-math.inf))
    return ScanResult("conjecture", {"t_grid": t_grid, "n_list": n_list}, records, {"max_r": max_r})


# -- parameter reductions -------------------------------------------------------

def _sample_ab(rng: np.random.Generator, count: int) -> np.ndarray:
    """Uniform ``(a, b)`` on the triangle ``a >= 1/2, b >= 0, a + b <= 1``."""
    u = _simplex(rng, count, 3)
    return np.column_stack([0.5 + u[:, 0] / 2.0, u[:, 1] / 2.0])


def verify_lemma_diag(samples: int, seed: int = 0, threads: int | None = 1) -> ScanResult:
    """Moving along a diagonal ``(a - delta, b + delta)`` never leaves ``f <= 0``."""

    def work(rng, count):
        ab = _sample_ab(rng, count)
        fractions = rng.random(count)
        out = []
        for (a, b), u in zip(ab, fractions):
            a, b = float(a), float(b)
            delta = float(u) * (a - 0.5)
            f0 = region_f(a, b)
            f1 = region_f(a - delta, b + delta)
            residual = f1 - (f0 + 2.0 * delta * (-a + b + delta))
            if abs(residual) > IDENTITY_TOL:
                margin = -math.inf
            elif f0 <= 0.0:
                margin = -f1
            else:
                margin = math.inf
            out.append(ScanRecord({"a": a, "b": b, "delta": delta},
                                  {"f": f0, "f_shifted": f1, "identity_residual": residual}, margin))
        return out

    records = _chunked(samples, seed, work, threads)
    vacuous = sum(1 for r in records if r.margin == math.inf)
    return ScanResult("lemma_diag", {"samples": samples, "seed": seed}, records, {"vacuous": vacuous})


def _sample_ab_inside(rng: np.random.Generator, count: int) -> np.ndarray:
    """Uniform ``(a, b)`` on the triangle restricted to ``f(a, b) <= 0``."""
    kept = []
    have = 0
    while have < count:
        cand = _sample_ab(rng, 4 * count)
        cand = cand[cand[:, 0] ** 2 + cand[:, 1] ** 2 - cand.sum(axis=1) / 2.0 <= 0.0]
        kept.append(cand)
        have += len(cand)
    return np.vstack(kept)[:count]


def _monotone_margin(values: np.ndarray, increasing: bool) -> np.ndarray:
    steps = np.diff(values, axis=1)
    return (steps if increasing else -steps).min(axis=1)


def verify_reductions(samples: int, n_list: Sequence[int] = (3, 5), seed: int = 0,
                      grid: int = 11, threads: int | None = 1) -> ScanResult:
    """Fidelity monotonicity behind the two parameter reductions, plus binomial-tail monotonicity.

    * ``z`` reduction: ``a'`` of ``P_n(Z(a, b; z))`` increases with ``z``, so ``z = 1`` is best.
    * diagonal reduction: ``a'`` of ``P_n(Z(a - eps, b + eps; 1))`` decreases with ``eps``.
    * binomial tail: ``sum_{k<=r} C(n,k) x^k (1-x)^(n-k)`` decreases in ``x``.
    """
    n_list = [int(n) for n in n_list]
    zs = np.linspace(0.0, 1.0, grid)
    fractions = np.linspace(0.0, 1.0, grid)
    xs = np.linspace(0.0, 1.0, 21)

    def work(rng, count):
        ab = _sample_ab_inside(rng, count)
        a, b = ab[:, :1], ab[:, 1:]
        rest = 1.0 - a - b
        z_states = np.stack([np.broadcast_to(a, (count, grid)), np.broadcast_to(b, (count, grid)),
                             zs * rest, (1.0 - zs) * rest], axis=-1).reshape(-1, 4)
        eps = fractions * (a - 0.5)
        e_states = np.stack([a - eps, b + eps, np.broadcast_to(rest, (count, grid)),
                             np.zeros((count, grid))], axis=-1).reshape(-1, 4)
        out = []
        for n in n_list:
            fid_z = pn_map(z_states, n)[:, 0].reshape(count, grid)
            fid_e = pn_map(e_states, n)[:, 0].reshape(count, grid)
            mz = _monotone_margin(fid_z, increasing=True)
            me = _monotone_margin(fid_e, increasing=False)
            for i in range(count):
                ai, bi = float(ab[i, 0]), float(ab[i, 1])
                out.append(ScanRecord({"check": "z_reduction", "n": n, "a": ai, "b": bi, "param": 1.0},
                                      {"fid_best": float(fid_z[i, -1]), "fid_worst": float(fid_z[i, 0])},
                                      float(mz[i])))
                out.append(ScanRecord({"check": "diag_reduction", "n": n, "a": ai, "b": bi,
                                       "param": float(ai - 0.5)},
                                      {"fid_best": float(fid_e[i, 0]), "fid_worst": float(fid_e[i, -1])},
                                      float(me[i])))
        sizes = rng.integers(0, 31, size=count)
        cut_fracs = rng.random(count)
        for size, frac in zip(sizes, cut_fracs):
            size = int(size)
            cut = int(frac * (size + 1))
            cut = min(cut, size)
            tail = np.array([[lower_tail(size, cut, float(x)) for x in xs]])
            out.append(ScanRecord({"check": "binomial_monotone", "n": size, "a": float("nan"),
                                   "b": float("nan"), "param": float(cut)},
                                  {"fid_best": float(tail[0, 0]), "fid_worst": float(tail[0, -1])},
                                  float(_monotone_margin(tail, increasing=False)[0])))
        return out

    records = _chunked(samples, seed, work, threads)
    return ScanResult("reductions", {"samples": samples, "n_list": n_list, "seed": seed, "grid": grid},
                      records)


# -- figure data ----------------------------------------------------------------

def classify_region(a: float, b: float) -> str:
    if a + b > 1.0 + 1e-12 or a < 0 or b < 0:
        return "unphysical"
    return "r_gt_2" if region_f(a, b) > 0.0 else "r_le_2"


def region_figure_data(grid: int) -> ScanResult:
    """Raster over ``(a, b)`` in the unit square: unphysical, ``r > 2`` or ``r <= 2``."""
    if grid < 2:
        raise ValueError("grid must be at least 2")
    records = []
    for a in np.linspace(0.0, 1.0, grid):
        for b in np.linspace(0.0, 1.0, grid):
            a_, b_ = float(a), float(b)
            f = region_f(a_, b_)
            records.append(ScanRecord({"a": a_, "b": b_},
                                      {"region": classify_region(a_, b_), "in_closure_sv": a_ >= 0.5,
                                       "f": f}, abs(f)))
    return ScanResult("region_figure", {"grid": grid}, records)


# -- closed forms against enumeration --------------------------------------------

ORACLE_TOL = 1e-12


def verify_oracle_equivalence(samples: int = 50, bn_ns: Sequence[int] = range(1, 8),
                              pn_ns: Sequence[int] = (1, 3, 5, 7), seed: int = 0,
                              threads: int | None = 1) -> ScanResult:
    """Largest componentwise gap between the closed-form step maps and exhaustive enumeration.

    States are uniform on the whole simplex.  A record passes when the gap is at most
    ``ORACLE_TOL``; the margin is the remaining slack ``ORACLE_TOL - gap``, or ``-inf``
    once the gap exceeds it.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    states = [make_state(*row) for row in _simplex(stream(seed, 0), samples, 4)]
    jobs = [("B", int(n)) for n in bn_ns] + [("P", int(n)) for n in pn_ns]
    too_big = [n for _, n in jobs if n > N_ORACLE_MAX]
    if too_big:
        raise ResourceLimit(f"exhaustive enumeration limited to n <= {N_ORACLE_MAX}, got {max(too_big)}")

    def work(job):
        kind, n = job
        out = []
        for i, s in enumerate(states):
            if kind == "B":
                fast, slow = apply_bn(s, n), oracle_bn(s, n)
                gap = max(np.max(np.abs(fast.state.as_array() - slow.state.as_array())),
                          abs(fast.survival_probability - slow.survival_probability))
            else:
                gap = np.max(np.abs(apply_pn(s, n).as_array() - oracle_pn(s, n).as_array()))
            slack = ORACLE_TOL - float(gap)
            out.append(ScanRecord({"kind": kind, "n": n, "sample": i},
                                  {"max_deviation": float(gap)}, slack if slack >= 0 else -math.inf))
        return out

    parts = map_ordered(work, jobs, threads)
    records = [rec for part in parts for rec in part]
    worst = max((r.computed["max_deviation"] for r in records), default=0.0)
    return ScanResult("oracle_equivalence", {"samples": samples, "bn_ns": [j[1] for j in jobs if j[0] == "B"],
                                             "pn_ns": [j[1] for j in jobs if j[0] == "P"], "seed": seed},
                      records, {"max_deviation": ext_json(worst)})

"""Learners that recover the hidden coefficient string from subroutine outcomes.

Two aggregation rules over m runs of the Fourier-sampling subroutine:

* OR: a successful run never reports a 1 on an unused coordinate, so the
  coordinatewise OR of successful outputs converges to the target from below.
  Works for any bounded bias.
* Majority: per-coordinate majority vote over successful runs, ties broken
  toward 0.  Needs bias small enough that each coordinate is right more often
  than not, but tolerates label noise and miscalibrated gates.

Also here: the classical GF(2) elimination baseline, empirical bias
estimation from measured data registers, and the two-phase learner that
estimates an unknown product distribution before majority-voting with gates
calibrated to the estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fourier import BiasVector, IndexString, PmOneVector, TargetString
from .sampler import (
    CleanDrawSource,
    DrawSource,
    NoiseParams,
    NoisyDrawSource,
    PerturbedDrawSource,
    SubroutineOutcome,
    sample_points,
)
from .statevector import DEFAULT_CAPACITY

__all__ = [
    "LearnerOutput",
    "ClassicalExample",
    "EliminationResult",
    "aggregate_or",
    "aggregate_majority",
    "learn_or_aggregate",
    "learn_majority",
    "learn_majority_noisy",
    "learn_unknown_distribution",
    "classical_baseline",
    "estimate_bias",
    "bias_sample_size",
    "bias_estimate_radius",
]


@dataclass(frozen=True)
class LearnerOutput:
    """Result of one learner invocation.

    ``result`` is None when the learner abstains (no successful subroutine
    run).  ``subroutine_log`` is populated only when the caller asked to keep
    it; ``subroutine_successes`` is always counted.  ``gate_error`` is set by
    the unknown-distribution learner (summed per-gate operator error of the
    calibrated transforms); ``warnings`` collects regime and clamping notes.
    """

    result: TargetString | None
    copies_used: int
    subroutine_successes: int
    subroutine_log: tuple[SubroutineOutcome, ...] = ()
    warnings: tuple[str, ...] = ()
    gate_error: float | None = None

    def __post_init__(self):
        if self.result is not None and self.subroutine_successes < 1:
            raise ValueError("a non-abstaining result requires a successful run")


@dataclass(frozen=True)
class ClassicalExample:
    """One labeled classical example (point of the hypercube, 0/1 label)."""

    point: PmOneVector
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0/1, got {self.label!r}")


@dataclass(frozen=True)
class EliminationResult:
    """GF(2) elimination outcome: unique solution or abstention, with rank.

    ``inconsistent`` can only be set when labels are noisy (the clean system
    is satisfiable by construction).
    """

    result: TargetString | None
    rank: int
    inconsistent: bool


def _validate_m(m: int) -> int:
    m = int(m)
    if m < 1:
        raise ValueError(f"need at least one subroutine run, got m={m}")
    return m


def _log_from_arrays(success: np.ndarray, bits: np.ndarray) -> tuple[SubroutineOutcome, ...]:
    log = []
    for ok, row in zip(success, bits):
        if ok:
            log.append(SubroutineOutcome(True, IndexString(tuple(int(b) for b in row))))
        else:
            log.append(SubroutineOutcome(False, None))
    return tuple(log)


def aggregate_or(
    m: int,
    source: DrawSource,
    rng: np.random.Generator,
    keep_log: bool = False,
    warnings: tuple[str, ...] = (),
) -> LearnerOutput:
    """Coordinatewise OR of the successful outputs of m subroutine runs."""
    m = _validate_m(m)
    success, bits = source.draw_many(m, rng)
    k = int(success.sum())
    log = _log_from_arrays(success, bits) if keep_log else ()
    if k == 0:
        return LearnerOutput(None, m, 0, log, warnings)
    combined = bits[success].max(axis=0)
    result = TargetString(tuple(int(b) for b in combined))
    return LearnerOutput(result, m, k, log, warnings)


def aggregate_majority(
    m: int,
    source: DrawSource,
    rng: np.random.Generator,
    keep_log: bool = False,
    warnings: tuple[str, ...] = (),
    gate_error: float | None = None,
    copies_used: int | None = None,
) -> LearnerOutput:
    """Per-coordinate majority vote over successful runs; ties go to 0."""
    m = _validate_m(m)
    success, bits = source.draw_many(m, rng)
    k = int(success.sum())
    log = _log_from_arrays(success, bits) if keep_log else ()
    used = m if copies_used is None else copies_used
    if k == 0:
        return LearnerOutput(None, used, 0, log, warnings, gate_error)
    ones = bits[success].sum(axis=0, dtype=np.int64)
    majority = (2 * ones > k).astype(int)
    result = TargetString(tuple(int(b) for b in majority))
    return LearnerOutput(result, used, k, log, warnings, gate_error)


def learn_or_aggregate(
    m: int,
    target: TargetString,
    bias: BiasVector,
    rng: np.random.Generator,
    source: DrawSource | None = None,
    keep_log: bool = True,
) -> LearnerOutput:
    """OR-aggregation learner; draws from the clean analytic law by default."""
    if source is None:
        source = CleanDrawSource(target, bias)
    return aggregate_or(m, source, rng, keep_log)


def learn_majority(
    m: int,
    target: TargetString,
    bias: BiasVector,
    rng: np.random.Generator,
    source: DrawSource | None = None,
    keep_log: bool = True,
) -> LearnerOutput:
    """Majority-vote learner; draws from the clean analytic law by default."""
    if source is None:
        source = CleanDrawSource(target, bias)
    return aggregate_majority(m, source, rng, keep_log)


def _noisy_regime_warnings(n: int, bias: BiasVector, noise: NoiseParams) -> tuple[str, ...]:
    notes = []
    c_floor = 1.0 - 1.0 / (2.0 * math.sqrt(n))
    if bias.c_bound <= c_floor:
        notes.append(
            f"bias bound c={bias.c_bound:.6g} is outside the guaranteed regime c > {c_floor:.6g}"
        )
    rho_cap = 1.0 / (5.0 * n)
    if noise.rho >= rho_cap:
        notes.append(
            f"noise flip probability rho={noise.rho:.6g} is outside the guaranteed regime rho < {rho_cap:.6g}"
        )
    return tuple(notes)


def learn_majority_noisy(
    m: int,
    target: TargetString,
    bias: BiasVector,
    noise: NoiseParams,
    rng: np.random.Generator,
    source: DrawSource | None = None,
    keep_log: bool = True,
) -> LearnerOutput:
    """Majority-vote learner under label noise.

    Regime violations (bias bound or flip probability) are reported as
    warnings on the output, never raised: the vote itself is well defined
    everywhere, only its guarantee is regime-bound.
    """
    warnings = _noisy_regime_warnings(target.n, bias, noise)
    if source is None:
        source = NoisyDrawSource(target, bias, noise)
    return aggregate_majority(m, source, rng, keep_log, warnings=warnings)


def bias_sample_size(n: int, delta: float) -> int:
    """Copies spent on bias estimation: ceil(n^4 ln(2n/delta)).

    By Hoeffding plus a union bound this many measured data registers pin
    every coordinate mean within sqrt(2)/n^2, hence the whole vector within
    sqrt(2)/n in l1, with probability at least 1 - delta.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    return math.ceil(n**4 * math.log(2 * n / delta))


def bias_estimate_radius(m: int, n: int, delta: float) -> float:
    """l1 radius guaranteed by m estimation samples: n sqrt(2 ln(2n/delta) / m)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return n * math.sqrt(2.0 * math.log(2 * n / delta) / m)


def estimate_bias(samples, delta: float = 0.05) -> BiasVector:
    """Empirical per-coordinate means of measured data registers.

    Accepts an (m, n) array of +-1 entries or a sequence of PmOneVector.
    Means are clamped just inside (-1, 1) so the estimate remains a valid
    bounded bias even for degenerate samples.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if isinstance(samples, np.ndarray):
        arr = samples.astype(float)
    else:
        seq = list(samples)
        if seq and isinstance(seq[0], PmOneVector):
            arr = np.array([s.entries for s in seq], dtype=float)
        else:
            arr = np.asarray(seq, dtype=float)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError("need a non-empty (m, n) sample array")
    if not np.all(np.abs(arr) == 1.0):
        raise ValueError("sample entries must be +-1")
    clamp = 1.0 - 1e-9
    means = np.clip(arr.mean(axis=0), -clamp, clamp)
    return BiasVector.from_values(tuple(float(v) for v in means))


def learn_unknown_distribution(
    m_total: int,
    target: TargetString,
    bias: BiasVector,
    c: float,
    delta: float,
    rng: np.random.Generator,
    capacity: int = DEFAULT_CAPACITY,
    keep_log: bool = False,
) -> LearnerOutput:
    """Two-phase learner when only the bias bound c is promised, not the bias.

    Phase one measures the data register of ceil(n^4 ln(2n/delta)) copies
    (capped at half the budget) and estimates the bias; phase two majority-
    votes over the remaining copies with transforms calibrated to the clamped
    estimate.  ``copies_used`` counts both phases; ``gate_error`` reports the
    summed operator error of the calibrated gates against the true bias.
    """
    m_total = int(m_total)
    if m_total < 2:
        raise ValueError(f"need at least two copies to estimate and learn, got {m_total}")
    if not 0.0 < c <= 1.0:
        raise ValueError(f"c must be in (0, 1], got {c}")
    n = target.n
    m_est = min(bias_sample_size(n, delta), m_total // 2)
    m_learn = m_total - m_est

    points = sample_points(bias, m_est, rng)
    estimate = estimate_bias(points, delta)
    warnings: tuple[str, ...] = ()
    lo, hi = -1.0 + c, 1.0 - c
    clamped = np.clip(estimate.as_array(), lo, hi)
    if not np.array_equal(clamped, estimate.as_array()):
        warnings += ("bias estimate clamped to the promised bound",)
    calibrated = BiasVector(tuple(float(v) for v in clamped), c)

    source = PerturbedDrawSource(target, bias, calibrated, capacity)
    return aggregate_majority(
        m_learn,
        source,
        rng,
        keep_log,
        warnings=warnings,
        gate_error=source.gate_error,
        copies_used=m_total,
    )


def _solve_gf2(rows: Sequence[int], n: int) -> tuple[int | None, int, bool]:
    """Eliminate packed rows (coefficient bits 0..n-1, label at bit n).

    Returns (solution word or None, rank, inconsistency flag); the solution
    exists exactly when the system is consistent with full rank n.
    """
    pivots: dict[int, int] = {}
    inconsistent = False
    for row in rows:
        r = int(row)
        for col in range(n):
            if not (r >> col) & 1:
                continue
            if col in pivots:
                r ^= pivots[col]
            else:
                pivots[col] = r
                break
        else:
            if (r >> n) & 1:
                inconsistent = True
    rank = len(pivots)
    if inconsistent or rank < n:
        return None, rank, inconsistent
    solution = 0
    coeff_mask = (1 << n) - 1
    for col in range(n - 1, -1, -1):
        row = pivots[col]
        above = (row & coeff_mask) ^ (1 << col)
        val = (row >> n) & 1
        val ^= bin(above & solution).count("1") & 1
        if val:
            solution |= 1 << col
    return solution, rank, False


def classical_baseline(examples: Sequence[ClassicalExample]) -> EliminationResult:
    """Recover the coefficient string from classical examples by GF(2) elimination.

    Each example contributes the equation <a, bit description of x> = label.
    Abstains (result None) unless the system is consistent with full rank.
    """
    examples = list(examples)
    if not examples:
        raise ValueError("need at least one example")
    n = examples[0].point.n
    if any(e.point.n != n for e in examples):
        raise ValueError("examples have mismatched dimensions")
    rows = [e.point.word | (e.label << n) for e in examples]
    solution, rank, inconsistent = _solve_gf2(rows, n)
    result = None if solution is None else TargetString.from_word(solution, n)
    return EliminationResult(result, rank, inconsistent)

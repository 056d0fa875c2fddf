"""
Single-machine column selectors.

- ``greedy``: commit the candidate with the largest marginal gain, r times.
- ``lazier_greedy``: same, but each step only scores a uniform sample of
  ceil(n_B * ln(1/delta) / k) candidates.
- ``random_baseline``: r distinct columns drawn uniformly.

All selectors break ties by lowest column index and stop early once every
remaining candidate is dead.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..config import get_settings
from ..errors import DimensionMismatchError, InvalidParameterError
from ..utils import substream
from .matcore import ColumnMatrix, ColumnSet, frobenius_sq
from .objective import commit, coverage_of, gains, init_state, refresh_dead

logger = logging.getLogger(__name__)


@dataclass
class SelectionResult:
    method: str
    chosen: ColumnSet
    coverage_trace: List[float]
    final_coverage: float
    coverage_ratio: float
    gain_evaluations: int
    wall_time: float
    seed: Optional[int] = None
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "chosen": self.chosen.to_list(),
            "coverage_trace": list(self.coverage_trace),
            "final_coverage": self.final_coverage,
            "coverage_ratio": self.coverage_ratio,
            "gain_evaluations": self.gain_evaluations,
            "wall_time": self.wall_time,
            "seed": self.seed,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class LazierParams:
    """
    Sampling parameters for lazier-than-lazy greedy.

    ``k`` is the benchmark size in the sample-size formula; when absent the
    selection budget r is used instead.
    """

    delta: float
    sample_size_override: Optional[int] = None
    k: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise InvalidParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if self.sample_size_override is not None and self.sample_size_override < 1:
            raise InvalidParameterError("sample_size_override must be >= 1")
        if self.k is not None and self.k < 1:
            raise InvalidParameterError("k must be >= 1")

    def sample_size(self, n_candidates: int, k: int) -> int:
        if self.sample_size_override is not None:
            return self.sample_size_override
        return max(1, math.ceil(n_candidates * math.log(1.0 / self.delta) / k))


def guarantee_budget(k: int, epsilon: float, sigma_min: float, cap: Optional[int] = None) -> int:
    """r = ceil(16k / (epsilon * sigma_min)), optionally capped (e.g. at n_B)."""
    if k < 1 or not 0.0 < epsilon:
        raise InvalidParameterError(f"need k >= 1 and epsilon > 0, got k={k}, epsilon={epsilon}")
    if sigma_min <= 0.0:
        if cap is None:
            raise InvalidParameterError("sigma_min is zero; a cap is required")
        return cap
    r = math.ceil(16 * k / (epsilon * sigma_min))
    return min(r, cap) if cap is not None else r


def _check_inputs(a: ColumnMatrix, b: ColumnMatrix, r: int) -> None:
    if r < 1:
        raise InvalidParameterError(f"selection budget r must be >= 1, got {r}")
    if a.rows != b.rows:
        raise DimensionMismatchError(f"A has {a.rows} rows but B has {b.rows}")


def pick_best(candidates: Sequence[int], candidate_gains: np.ndarray, tie_rtol: float) -> int:
    """Largest gain; gains within ``tie_rtol`` of the best count as ties and the lowest index wins."""
    best = float(np.max(candidate_gains))
    threshold = best - tie_rtol * max(abs(best), np.finfo(float).tiny)
    return min(j for j, g in zip(candidates, candidate_gains) if g >= threshold)


def _prefix_trace(a: ColumnMatrix, b: ColumnMatrix, chosen: ColumnSet) -> List[float]:
    """Exact f_A of every prefix of ``chosen``; monotone by construction of f."""
    trace = [coverage_of(a, b, chosen.indices[:t]) for t in range(1, len(chosen) + 1)]
    return [float(v) for v in np.maximum.accumulate(trace)] if trace else []


def _ratio(coverage: float, a_norm_sq: float) -> float:
    return coverage / a_norm_sq if a_norm_sq > 0.0 else 0.0


def greedy(a: ColumnMatrix, b: ColumnMatrix, r: int, *, dead_tol: Optional[float] = None,
           tie_rtol: Optional[float] = None) -> SelectionResult:
    """
    Greedy column selection: r rounds of committing the max-gain candidate.

    Args:
        a: target matrix A
        b: candidate matrix B (same row count)
        r: number of columns to select

    Returns:
        SelectionResult; ``chosen`` may be shorter than r if candidates run out
    """
    _check_inputs(a, b, r)
    tie_rtol = get_settings().tie_rtol if tie_rtol is None else tie_rtol
    start = time.perf_counter()
    state = init_state(a, b, dead_tol)
    trace: List[float] = []

    for step in range(r):
        refresh_dead(state)
        candidates = state.available()
        if not candidates:
            logger.info(f"Greedy stopped after {step} picks: no live candidates remain")
            break
        candidate_gains = gains(state, candidates)
        commit(state, pick_best(candidates, candidate_gains, tie_rtol))
        trace.append(state.coverage)

    result = SelectionResult(
        method="greedy",
        chosen=state.selected,
        coverage_trace=trace,
        final_coverage=state.coverage,
        coverage_ratio=_ratio(state.coverage, state.a_frobenius_sq),
        gain_evaluations=state.gain_evaluations,
        wall_time=time.perf_counter() - start,
    )
    logger.info(f"Greedy picked {len(result.chosen)}/{r} columns, coverage ratio {result.coverage_ratio:.6f}")
    return result


def lazier_greedy(a: ColumnMatrix, b: ColumnMatrix, r: int, params: LazierParams, seed: int, *,
                  dead_tol: Optional[float] = None, tie_rtol: Optional[float] = None) -> SelectionResult:
    """Greedy that scores only a uniform sample of live candidates per iteration."""
    _check_inputs(a, b, r)
    tie_rtol = get_settings().tie_rtol if tie_rtol is None else tie_rtol
    start = time.perf_counter()
    rng = substream(seed, "lazier-greedy")
    sample_size = params.sample_size(b.cols, params.k or r)
    state = init_state(a, b, dead_tol)
    trace: List[float] = []

    for step in range(r):
        refresh_dead(state)
        pool = state.available()
        if not pool:
            logger.info(f"Lazier greedy stopped after {step} picks: no live candidates remain")
            break
        if len(pool) > sample_size:
            sample = sorted(int(j) for j in rng.choice(pool, size=sample_size, replace=False))
        else:
            sample = pool
        sample_gains = gains(state, sample)
        commit(state, pick_best(sample, sample_gains, tie_rtol))
        trace.append(state.coverage)
        logger.debug(f"Lazier step {step}: sampled {len(sample)} of {len(pool)} candidates")

    return SelectionResult(
        method="lazier",
        chosen=state.selected,
        coverage_trace=trace,
        final_coverage=state.coverage,
        coverage_ratio=_ratio(state.coverage, state.a_frobenius_sq),
        gain_evaluations=state.gain_evaluations,
        wall_time=time.perf_counter() - start,
        seed=seed,
    )


def random_baseline(a: ColumnMatrix, b: ColumnMatrix, r: int, seed: int) -> SelectionResult:
    """r distinct columns of B uniformly at random; the trace is filled by prefix evaluation."""
    _check_inputs(a, b, r)
    if r > b.cols:
        raise InvalidParameterError(f"cannot draw {r} distinct columns from {b.cols}")
    start = time.perf_counter()
    rng = substream(seed, "random-baseline")
    chosen = ColumnSet.of(int(j) for j in rng.choice(b.cols, size=r, replace=False))
    trace = _prefix_trace(a, b, chosen)
    return SelectionResult(
        method="random",
        chosen=chosen,
        coverage_trace=trace,
        final_coverage=trace[-1],
        coverage_ratio=_ratio(trace[-1], frobenius_sq(a)),
        gain_evaluations=0,
        wall_time=time.perf_counter() - start,
        seed=seed,
    )


def evaluate_exact(a: ColumnMatrix, b: ColumnMatrix, result: SelectionResult) -> SelectionResult:
    """Recompute a result's coverage trace against the exact target A (e.g. after sketched selection)."""
    trace = _prefix_trace(a, b, result.chosen)
    final = trace[-1] if trace else 0.0
    return replace(result, coverage_trace=trace, final_coverage=final,
                   coverage_ratio=_ratio(final, frobenius_sq(a)))

"""
Distributed greedy over a random column partition.

One round:
1. Randomly assign every column of B to one of l machines.
2. (Parallel) each machine runs greedy(A, B[T_i], k').
3. (Single machine) greedy(A, union of S_i, k'') over the pooled picks.
4. Return the best of {S, S_1, ..., S_l} under the exact objective f_A.

Machines are threads inside one process sharing a read-only target (A or its
sketch). Every random draw comes from a substream keyed by (seed, purpose,
epoch), so results do not depend on thread scheduling.

Epochs: epoch t runs a round on A and B with their projections onto the
accumulated columns C^{t-1} removed, so the per-epoch objective is exactly
f_A(V + C^{t-1}) - f_A(C^{t-1}).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config import get_settings
from ..errors import GuardExceededError, InvalidParameterError
from ..utils import substream
from .matcore import ColumnMatrix, ColumnSet, frobenius_sq
from .objective import coverage_of, orthonormal_basis, residualize
from .select import SelectionResult, evaluate_exact, greedy
from .sketch import SketchSpec, apply_sketch

logger = logging.getLogger(__name__)

OPT_SPLIT_MAX_CANDIDATES = 64


@dataclass(frozen=True)
class PartitionPlan:
    machines: int
    assignment: Tuple[int, ...]
    seed: int

    def part(self, machine: int) -> ColumnSet:
        return ColumnSet(tuple(j for j, owner in enumerate(self.assignment) if owner == machine))

    def parts(self) -> List[ColumnSet]:
        return [self.part(i) for i in range(self.machines)]

    def sizes(self) -> List[int]:
        return [int(c) for c in np.bincount(np.asarray(self.assignment, dtype=np.intp), minlength=self.machines)]


@dataclass(frozen=True)
class DistConfig:
    """
    Sizes for one distributed run.

    k is the benchmark size; k_prime and k_dprime are the per-machine and
    aggregation budgets (32k / sigma_min and 12k / sigma_min for the guarantee,
    see ``from_sigma``).
    """

    k: int
    k_prime: int
    k_dprime: int
    machines: int
    epochs: int = 1
    seed: int = 0
    sketch: Optional[SketchSpec] = None
    max_workers: Optional[int] = None

    def __post_init__(self):
        for name in ("k", "k_prime", "k_dprime", "machines", "epochs"):
            if getattr(self, name) < 1:
                raise InvalidParameterError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.seed < 0:
            raise InvalidParameterError("seed must be non-negative")

    @classmethod
    def from_sigma(cls, k: int, sigma_min: float, machines: int, **kwargs) -> "DistConfig":
        """Derive k' = ceil(32k/sigma) and k'' = ceil(12k/sigma) from a sigma_min estimate."""
        if not 0.0 < sigma_min:
            raise InvalidParameterError(f"sigma_min estimate must be positive, got {sigma_min}")
        return cls(k=k, k_prime=math.ceil(32 * k / sigma_min), k_dprime=math.ceil(12 * k / sigma_min),
                   machines=machines, **kwargs)

    def to_dict(self) -> Dict:
        return {"k": self.k, "k_prime": self.k_prime, "k_dprime": self.k_dprime, "machines": self.machines,
                "epochs": self.epochs, "seed": self.seed,
                "sketch": self.sketch.to_dict() if self.sketch else None}


@dataclass
class DistResult:
    per_machine: List[SelectionResult]
    aggregated: SelectionResult
    winner: SelectionResult
    epoch_union: ColumnSet
    epoch_trace: List[float]
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "per_machine": [r.to_dict() for r in self.per_machine],
            "aggregated": self.aggregated.to_dict(),
            "winner": self.winner.to_dict(),
            "epoch_union": self.epoch_union.to_list(),
            "epoch_trace": list(self.epoch_trace),
            "warnings": list(self.warnings),
        }


def random_partition(n_b: int, machines: int, seed: int, epoch: int = 0) -> PartitionPlan:
    """Assign every column independently and uniformly to one of ``machines``."""
    if machines < 1:
        raise InvalidParameterError(f"machines must be >= 1, got {machines}")
    if n_b < 1:
        raise InvalidParameterError(f"need at least one column, got {n_b}")
    rng = substream(seed, "partition", epoch)
    assignment = rng.integers(0, machines, size=n_b)
    return PartitionPlan(machines=machines, assignment=tuple(int(x) for x in assignment), seed=seed)


def _empty_result(method: str) -> SelectionResult:
    return SelectionResult(method=method, chosen=ColumnSet(), coverage_trace=[], final_coverage=0.0,
                           coverage_ratio=0.0, gain_evaluations=0, wall_time=0.0)


def _lift(result: SelectionResult, columns: ColumnSet, method: str) -> SelectionResult:
    """Map a result over B[columns] back to indices of B."""
    return replace(result, method=method, chosen=ColumnSet(tuple(columns.indices[j] for j in result.chosen)))


def _greedy_on(target: ColumnMatrix, b: ColumnMatrix, columns: ColumnSet, budget: int,
               method: str, warnings: List[str]) -> SelectionResult:
    if len(columns) == 0:
        return _empty_result(method)
    if budget > len(columns):
        message = f"{method}: budget {budget} exceeds {len(columns)} available candidates; truncated"
        logger.warning(message)
        warnings.append(message)
        budget = len(columns)
    result = greedy(target, b.submatrix(columns), budget)
    return _lift(result, columns, method)


def _shared_target(a: ColumnMatrix, b: ColumnMatrix, cfg: DistConfig, epoch: int) -> ColumnMatrix:
    if cfg.sketch is None:
        return a
    spec = replace(cfg.sketch, seed=int(substream(cfg.sketch.seed, "dist-sketch", epoch).integers(2**62)))
    if spec.kind == "gaussian-rows":
        raise InvalidParameterError("distributed runs share a column sketch of A; use pcps-cols or column-sample")
    sketched, _ = apply_sketch(a, b, spec)
    return sketched


def _round(a: ColumnMatrix, b: ColumnMatrix, cfg: DistConfig, plan: PartitionPlan, epoch: int) -> DistResult:
    if len(plan.assignment) != b.cols:
        raise InvalidParameterError(f"plan covers {len(plan.assignment)} columns but B has {b.cols}")
    if plan.machines != cfg.machines:
        raise InvalidParameterError(f"plan has {plan.machines} machines, config {cfg.machines}")
    target = _shared_target(a, b, cfg, epoch)
    parts = plan.parts()
    max_workers = cfg.max_workers or get_settings().max_workers
    machine_warnings: List[List[str]] = [[] for _ in parts]

    logger.info(f"Distributed round: {cfg.machines} machines, sizes {plan.sizes()}, k'={cfg.k_prime}")
    with ThreadPoolExecutor(max_workers=min(max_workers, len(parts))) as executor:
        futures = [
            executor.submit(_greedy_on, target, b, part, cfg.k_prime, f"machine-{i}", machine_warnings[i])
            for i, part in enumerate(parts)
        ]
        per_machine = [future.result() for future in futures]

    warnings = [w for ws in machine_warnings for w in ws]
    pooled = ColumnSet(tuple(sorted({j for res in per_machine for j in res.chosen})))
    aggregated = _greedy_on(target, b, pooled, cfg.k_dprime, "aggregated", warnings)

    # winner is judged on the exact objective even when selection used a sketch
    per_machine = [evaluate_exact(a, b, res) if len(res.chosen) else res for res in per_machine]
    aggregated = evaluate_exact(a, b, aggregated) if len(aggregated.chosen) else aggregated
    winner = aggregated
    for res in per_machine:
        if res.final_coverage > winner.final_coverage:
            winner = res
    logger.info(f"Round winner: {winner.method} with coverage {winner.final_coverage:.6g}")
    return DistResult(per_machine=per_machine, aggregated=aggregated, winner=winner,
                      epoch_union=winner.chosen, epoch_trace=[winner.final_coverage], warnings=warnings)


def dist_greedy_round(a: ColumnMatrix, b: ColumnMatrix, cfg: DistConfig,
                      plan: Optional[PartitionPlan] = None) -> DistResult:
    """
    One partition/aggregate round.

    Args:
        a: target matrix
        b: candidate matrix
        cfg: budgets, machine count, seed and optional shared sketch
        plan: column assignment; drawn from ``cfg.seed`` when omitted

    Returns:
        DistResult with every per-machine result, the aggregate and the winner
    """
    plan = plan or random_partition(b.cols, cfg.machines, cfg.seed)
    return _round(a, b, cfg, plan, epoch=0)


def dist_greedy_epochs(a: ColumnMatrix, b: ColumnMatrix, cfg: DistConfig) -> DistResult:
    """Repeat rounds on the residual instance, accumulating every epoch winner into C."""
    a_norm_sq = frobenius_sq(a)
    union = ColumnSet()
    epoch_trace: List[float] = []
    warnings: List[str] = []
    last: Optional[DistResult] = None

    for epoch in range(cfg.epochs):
        if len(union) == 0:
            target, candidates = a, b
        else:
            basis = orthonormal_basis(b.submatrix(union).to_dense())
            target = ColumnMatrix(residualize(a, basis))
            candidates = ColumnMatrix(residualize(b, basis))
        if frobenius_sq(target) <= get_settings().dead_tol * a_norm_sq:
            logger.info(f"Residual target exhausted after {epoch} epochs")
            break

        plan = random_partition(b.cols, cfg.machines, cfg.seed, epoch=epoch)
        last = _round(target, candidates, cfg, plan, epoch)
        warnings.extend(last.warnings)
        union = union.union(last.winner.chosen)
        epoch_trace.append(coverage_of(a, b, union) if len(union) else 0.0)
        logger.info(f"Epoch {epoch + 1}/{cfg.epochs}: |C| = {len(union)}, f_A(C) = {epoch_trace[-1]:.6g}")

    if last is None:
        last = dist_greedy_round(a, b, cfg)
        union, epoch_trace = last.winner.chosen, list(last.epoch_trace)
    epoch_trace = [float(v) for v in np.maximum.accumulate(epoch_trace)]
    return DistResult(per_machine=last.per_machine, aggregated=last.aggregated, winner=last.winner,
                      epoch_union=union, epoch_trace=epoch_trace, warnings=warnings)


def opt_split(a: ColumnMatrix, b: ColumnMatrix, opt: ColumnSet, part: ColumnSet,
              k_prime: int) -> Tuple[ColumnSet, ColumnSet]:
    """
    Split OPT by whether greedy on ``part + {x}`` keeps x.

    Diagnostic for small instances only; refuses more than 64 candidates.
    """
    if b.cols > OPT_SPLIT_MAX_CANDIDATES:
        raise GuardExceededError(f"opt_split is limited to {OPT_SPLIT_MAX_CANDIDATES} candidates, B has {b.cols}")
    selected: List[int] = []
    not_selected: List[int] = []
    for x in opt:
        columns = ColumnSet(tuple(sorted(set(part.indices) | {x})))
        result = _greedy_on(a, b, columns, min(k_prime, len(columns)), "opt-split", [])
        (selected if x in result.chosen else not_selected).append(x)
    return ColumnSet(tuple(selected)), ColumnSet(tuple(not_selected))

"""
colsel Algorithms Module

Matrix storage, the coverage objective, the selectors (greedy, lazier,
random, distributed), sketches, the brute-force oracle and the acceptance
suites.
"""

from .matcore import ColumnMatrix, ColumnSet, load_matrix, save_matrix, frobenius_sq, normalized_columns
from .objective import SelectionState, GainReport, init_state, marginal_gain, gains, commit, refresh_dead, coverage_of
from .select import SelectionResult, LazierParams, greedy, lazier_greedy, random_baseline, evaluate_exact, guarantee_budget
from .sketch import SketchSpec, SketchedPair, gaussian_rows, pcps_cols, column_sample, apply_sketch, recommend_dims
from .dist import PartitionPlan, DistConfig, DistResult, random_partition, dist_greedy_round, dist_greedy_epochs, opt_split
from .oracle import (
    SpectrumStats,
    OptResult,
    spectrum,
    brute_force_opt,
    make_tight_example,
    make_random_instance,
    pca_upper_bound
)
from .report import RunConfig, RunReport, SuiteReport

__all__ = [
    "ColumnMatrix",
    "ColumnSet",
    "load_matrix",
    "save_matrix",
    "frobenius_sq",
    "normalized_columns",
    "SelectionState",
    "GainReport",
    "init_state",
    "marginal_gain",
    "gains",
    "commit",
    "refresh_dead",
    "coverage_of",
    "SelectionResult",
    "LazierParams",
    "greedy",
    "lazier_greedy",
    "random_baseline",
    "evaluate_exact",
    "guarantee_budget",
    "SketchSpec",
    "SketchedPair",
    "gaussian_rows",
    "pcps_cols",
    "column_sample",
    "apply_sketch",
    "recommend_dims",
    "PartitionPlan",
    "DistConfig",
    "DistResult",
    "random_partition",
    "dist_greedy_round",
    "dist_greedy_epochs",
    "opt_split",
    "SpectrumStats",
    "OptResult",
    "spectrum",
    "brute_force_opt",
    "make_tight_example",
    "make_random_instance",
    "pca_upper_bound",
    "RunConfig",
    "RunReport",
    "SuiteReport"
]

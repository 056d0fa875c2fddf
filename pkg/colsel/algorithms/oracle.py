"""
Ground truth for small instances.

Sigma convention: ``sigma_min``/``sigma_max`` are the extreme SQUARED
singular values of the matrix whose columns are the unit-normalized selected
vectors, i.e. the extreme eigenvalues of their Gram matrix. Every bound
formula in this package (16k / (eps * sigma_min), f(OPT) / (8 kappa), ...)
uses this convention.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from ..config import get_settings
from ..errors import ConvergenceError, GuardExceededError, InvalidParameterError
from ..utils import substream
from .matcore import ColumnMatrix, ColumnSet, normalized_columns
from .objective import coverage_naive

logger = logging.getLogger(__name__)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
PCA_OVERSAMPLE = 10


@dataclass(frozen=True)
class SpectrumStats:
    sigma_min: float
    sigma_max: float
    kappa: float
    eigenvalues: Tuple[float, ...] = ()


@dataclass(frozen=True)
class OptResult:
    opt_set: ColumnSet
    opt_value: float
    spectrum: SpectrumStats
    subsets_evaluated: int


def jacobi_eigenvalues(matrix: np.ndarray, tol: float = JACOBI_TOL,
                       max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    """
    Eigenvalues of a small symmetric matrix by cyclic Jacobi sweeps.

    Sweeps continue until the off-diagonal Frobenius norm drops below
    ``tol`` times the full Frobenius norm. Returns eigenvalues ascending.
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidParameterError(f"expected a square matrix, got {a.shape}")
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off <= tol * scale:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def spectrum(b: ColumnMatrix, columns: ColumnSet) -> SpectrumStats:
    """Extreme squared singular values of the normalized columns B[S]."""
    if len(columns) == 0:
        raise InvalidParameterError("spectrum of an empty column set is undefined")
    unit = np.column_stack(normalized_columns(b, columns))
    eig = jacobi_eigenvalues(unit.T @ unit)
    size = len(columns)
    sigma_max = max(float(eig[-1]), 0.0)
    sigma_min = float(eig[0])
    # eigenvalues this close to zero are rank deficiency, not conditioning
    if sigma_min <= JACOBI_TOL * size:
        sigma_min = 0.0
    kappa = math.inf if sigma_min == 0.0 else sigma_max / sigma_min
    return SpectrumStats(sigma_min=sigma_min, sigma_max=sigma_max, kappa=kappa,
                         eigenvalues=tuple(float(v) for v in eig))


def brute_force_opt(a: ColumnMatrix, b: ColumnMatrix, k: int, limit: Optional[int] = None) -> OptResult:
    """
    Exact OPT_k by enumerating every k-subset of B's columns.

    Ties go to the lexicographically smallest index tuple.
    """
    if not 1 <= k <= b.cols:
        raise InvalidParameterError(f"k must lie in [1, {b.cols}], got {k}")
    limit = get_settings().brute_force_limit if limit is None else limit
    total = math.comb(b.cols, k)
    if total > limit:
        raise GuardExceededError(f"C({b.cols}, {k}) = {total} subsets exceeds the limit of {limit}")

    dense_a = a.to_dense()
    dense_b = b.to_dense()
    best_value = -1.0
    best_subset: Tuple[int, ...] = ()
    evaluated = 0
    for subset in itertools.combinations(range(b.cols), k):
        value = coverage_naive(dense_a, dense_b[:, list(subset)])
        evaluated += 1
        if value > best_value + 1e-12 * max(best_value, 1.0):
            best_value = value
            best_subset = subset
    opt_set = ColumnSet(best_subset)
    nonzero = b.column_norms_sq()[list(best_subset)] > 0.0
    stats = spectrum(b, opt_set) if np.all(nonzero) else SpectrumStats(0.0, 0.0, math.inf)
    logger.info(f"Brute force over {evaluated} subsets: OPT_{k} = {best_subset}, f = {best_value:.6g}")
    return OptResult(opt_set=opt_set, opt_value=best_value, spectrum=stats, subsets_evaluated=evaluated)


def make_tight_example(a_count: int, theta: float) -> Tuple[ColumnMatrix, ColumnMatrix]:
    """
    Instance on which greedy needs ~1/(theta^2 eps) picks to reach 1 - eps.

    Ambient space R^(n+1) with basis e_0..e_n. A is the single column e_0;
    B holds e_1, theta e_0 + e_1, and 2 theta e_0 + e_j for j = 2..n, left
    unnormalized. Columns 0 and 1 of B span e_0 exactly.
    """
    n = a_count
    if n < 2:
        raise InvalidParameterError(f"tight example needs n >= 2, got {n}")
    if not 0.0 < theta < 1.0:
        raise InvalidParameterError(f"theta must lie in (0, 1), got {theta}")
    dim = n + 1
    a = np.zeros((dim, 1))
    a[0, 0] = 1.0
    b = np.zeros((dim, n + 1))
    b[1, 0] = 1.0
    b[0, 1], b[1, 1] = theta, 1.0
    for j in range(2, n + 1):
        b[0, j] = 2.0 * theta
        b[j, j] = 1.0
    return ColumnMatrix(a), ColumnMatrix(b)


def tight_example_coverage(theta: float, t: int) -> float:
    """Greedy's coverage of e_0 after t picks on the tight example: 4θ²/(1/t + 4θ²)."""
    return 4 * theta ** 2 / (1.0 / t + 4 * theta ** 2)


def pca_upper_bound(a: ColumnMatrix, k: int, limit: Optional[int] = None,
                    rtol: float = 1e-10, max_iter: int = 10_000) -> float:
    """
    Sum of the top-k squared singular values of A.

    Orthogonal iteration on the smaller Gram matrix with a block of
    k + PCA_OVERSAMPLE vectors; the estimate is the sum of the top-k
    Rayleigh-Ritz values of the block.
    """
    limit = get_settings().pca_dim_limit if limit is None else limit
    if k < 1:
        raise InvalidParameterError(f"k must be >= 1, got {k}")
    if min(a.rows, a.cols) > limit:
        raise GuardExceededError(f"min(m, n) = {min(a.rows, a.cols)} exceeds the PCA limit of {limit}")
    dense = a.to_dense()
    gram = dense.T @ dense if a.cols <= a.rows else dense @ dense.T
    p = gram.shape[0]
    if k >= p:
        return float(np.trace(gram))

    block = min(p, k + PCA_OVERSAMPLE)
    q, _ = np.linalg.qr(substream(0, "pca-start").standard_normal((p, block)))
    previous = None
    for _ in range(max_iter):
        q, _ = np.linalg.qr(gram @ q)
        ritz = np.linalg.eigvalsh(q.T @ gram @ q)
        current = float(np.sum(ritz[-k:]))
        # a block spanning the whole space gives exact values
        if block == p:
            return current
        if previous is not None and abs(current - previous) <= rtol * max(abs(current), np.finfo(float).tiny):
            return current
        previous = current
    raise ConvergenceError(f"orthogonal iteration did not converge in {max_iter} iterations")


def make_random_instance(m: int, n_a: int, n_b: int, rank_hint: int, seed: int, *,
                         noise: float = 0.0,
                         candidate_pool: Literal["self", "gaussian"] = "self",
                         ) -> Tuple[ColumnMatrix, ColumnMatrix]:
    """
    A = L R^T + noise * N with L (m x rank) and R (n_A x rank) standard normal.

    ``candidate_pool="self"`` returns B = A (requires n_b == n_a);
    ``"gaussian"`` draws an independent standard normal m x n_B pool.
    """
    if min(m, n_a, n_b, rank_hint) < 1:
        raise InvalidParameterError("all dimensions and rank_hint must be >= 1")
    rng = substream(seed, "random-instance")
    left = rng.standard_normal((m, rank_hint))
    right = rng.standard_normal((n_a, rank_hint))
    a = left @ right.T
    if noise > 0.0:
        a = a + noise * rng.standard_normal((m, n_a))
    if candidate_pool == "self":
        if n_b != n_a:
            raise InvalidParameterError("candidate_pool='self' requires n_b == n_a")
        return ColumnMatrix(a), ColumnMatrix(a)
    if candidate_pool == "gaussian":
        return ColumnMatrix(a), ColumnMatrix(rng.standard_normal((m, n_b)))
    raise InvalidParameterError(f"unknown candidate_pool {candidate_pool!r}")

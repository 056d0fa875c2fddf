"""
Coverage objective f_A(S) = ||Pi_{span B[S]} A||_F^2 and its incremental state.

``SelectionState`` keeps A and B with their projections onto the selected
span removed. The marginal gain of candidate j is then
||R_A^T b'||^2 with b' = R_B[:, j] / ||R_B[:, j]||, which costs O(m * n_A)
and never revisits previously selected columns.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Set, Union

import numpy as np

from ..config import get_settings
from ..errors import (
    AlreadySelectedError,
    DeadCandidateError,
    DimensionMismatchError,
    IndexOutOfRangeError,
)
from .matcore import ColumnMatrix, ColumnSet, frobenius_sq

logger = logging.getLogger(__name__)

VectorsLike = Union[np.ndarray, Sequence[np.ndarray]]


@dataclass(frozen=True)
class GainReport:
    candidate: int
    gain: float


@dataclass
class SelectionState:
    """Selected columns of B plus the residuals of A and B against their span."""

    selected: ColumnSet
    basis: List[np.ndarray]
    residual_a: np.ndarray
    residual_b: np.ndarray
    coverage: float
    dead_candidates: Set[int]
    a_frobenius_sq: float
    b_norms_sq: np.ndarray
    dead_tol: float = 1e-12
    gain_evaluations: int = 0
    last_gain: float = 0.0

    @property
    def n_candidates(self) -> int:
        return self.residual_b.shape[1]

    def is_dead(self, j: int) -> bool:
        return j in self.dead_candidates

    def available(self) -> List[int]:
        """Candidates that are neither selected nor known dead, ascending."""
        taken = set(self.selected.indices)
        return [j for j in range(self.n_candidates) if j not in taken and j not in self.dead_candidates]

    def basis_matrix(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((self.residual_a.shape[0], 0))
        return np.column_stack(self.basis)


def _as_dense(matrix: Union[ColumnMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(matrix, ColumnMatrix):
        return matrix.to_dense()
    return np.array(matrix, dtype=np.float64, order="F", copy=True)


def _vectors_matrix(vectors: VectorsLike, rows: int) -> np.ndarray:
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        mat = vectors
    else:
        vectors = list(vectors)
        if not vectors:
            return np.zeros((rows, 0))
        mat = np.column_stack([np.asarray(v, dtype=np.float64).ravel() for v in vectors])
    if mat.shape[0] != rows:
        raise DimensionMismatchError(f"vectors have {mat.shape[0]} rows, target has {rows}")
    return mat


def orthonormal_basis(vectors: np.ndarray, rank_tol: Optional[float] = None) -> np.ndarray:
    """
    Modified Gram-Schmidt with one re-orthogonalization pass.

    Vectors whose residual norm falls below ``rank_tol`` times their original
    norm are dropped, so the result spans the same space even when the input
    is rank deficient.
    """
    rank_tol = get_settings().rank_tol if rank_tol is None else rank_tol
    kept: List[np.ndarray] = []
    for col in vectors.T:
        original = float(np.linalg.norm(col))
        if original == 0.0:
            continue
        v = col.astype(np.float64, copy=True)
        for _ in range(2):
            for q in kept:
                v -= np.dot(q, v) * q
        norm = float(np.linalg.norm(v))
        if norm <= rank_tol * original:
            continue
        kept.append(v / norm)
    if not kept:
        return np.zeros((vectors.shape[0], 0))
    return np.column_stack(kept)


def coverage_naive(a: Union[ColumnMatrix, np.ndarray], vectors: VectorsLike,
                   rank_tol: Optional[float] = None) -> float:
    """Squared Frobenius norm of the projection of A onto span(vectors), from scratch."""
    dense = a.to_dense() if isinstance(a, ColumnMatrix) else np.asarray(a, dtype=np.float64)
    q = orthonormal_basis(_vectors_matrix(vectors, dense.shape[0]), rank_tol)
    if q.shape[1] == 0:
        return 0.0
    inner = q.T @ dense
    return float(np.einsum("ij,ij->", inner, inner))


def coverage_of(a: ColumnMatrix, b: ColumnMatrix, columns: Iterable[int]) -> float:
    """f_A(S) for S given as column indices of B."""
    idx = list(columns)
    if not idx:
        return 0.0
    if a.rows != b.rows:
        raise DimensionMismatchError(f"A has {a.rows} rows but B has {b.rows}")
    return coverage_naive(a, b.submatrix(idx).to_dense())


def residualize(matrix: Union[ColumnMatrix, np.ndarray], basis: np.ndarray,
                dead_tol: Optional[float] = None) -> np.ndarray:
    """
    Remove the projection onto an orthonormal ``basis`` from every column.

    Columns left with squared norm below ``dead_tol`` times their original
    squared norm are set exactly to zero.
    """
    dead_tol = get_settings().dead_tol if dead_tol is None else dead_tol
    dense = _as_dense(matrix)
    if basis.shape[1] == 0:
        return dense
    before = np.einsum("ij,ij->j", dense, dense)
    for _ in range(2):
        dense -= basis @ (basis.T @ dense)
    after = np.einsum("ij,ij->j", dense, dense)
    dense[:, after < dead_tol * before] = 0.0
    return dense


def init_state(a: ColumnMatrix, b: ColumnMatrix, dead_tol: Optional[float] = None) -> SelectionState:
    """Empty selection: residuals equal the inputs and coverage is zero."""
    if a.rows != b.rows:
        raise DimensionMismatchError(f"A has {a.rows} rows but B has {b.rows}")
    dead_tol = get_settings().dead_tol if dead_tol is None else dead_tol
    b_norms_sq = b.column_norms_sq()
    return SelectionState(
        selected=ColumnSet(),
        basis=[],
        residual_a=a.to_dense(),
        residual_b=b.to_dense(),
        coverage=0.0,
        dead_candidates={int(j) for j in np.flatnonzero(b_norms_sq == 0.0)},
        a_frobenius_sq=frobenius_sq(a),
        b_norms_sq=b_norms_sq,
        dead_tol=dead_tol,
    )


def _check_candidate(state: SelectionState, j: int) -> None:
    if not 0 <= j < state.n_candidates:
        raise IndexOutOfRangeError(f"candidate {j} out of range for {state.n_candidates} columns")
    if j in state.selected:
        raise AlreadySelectedError(f"candidate {j} is already selected")


def _dead_threshold(state: SelectionState, idx: np.ndarray) -> np.ndarray:
    return state.dead_tol * state.b_norms_sq[idx]


def gains(state: SelectionState, candidates: Sequence[int]) -> np.ndarray:
    """
    Marginal gains of many candidates against the frozen state.

    Candidates found dead are added to ``state.dead_candidates`` and get gain 0.
    """
    idx = np.asarray(list(candidates), dtype=np.intp)
    if idx.size == 0:
        return np.zeros(0)
    for j in idx:
        _check_candidate(state, int(j))
    cols = state.residual_b[:, idx]
    norms_sq = np.einsum("ij,ij->j", cols, cols)
    alive = (norms_sq >= _dead_threshold(state, idx)) & (state.b_norms_sq[idx] > 0.0)
    out = np.zeros(idx.size)
    if np.any(alive):
        inner = state.residual_a.T @ cols[:, alive]
        out[alive] = np.einsum("ij,ij->j", inner, inner) / norms_sq[alive]
    state.dead_candidates.update(int(j) for j in idx[~alive])
    state.gain_evaluations += int(idx.size)
    return out


def marginal_gain(state: SelectionState, j: int) -> GainReport:
    """f_A(selected + {j}) - f_A(selected), computed from the maintained residuals."""
    return GainReport(candidate=j, gain=float(gains(state, [j])[0]))


def commit(state: SelectionState, j: int) -> SelectionState:
    """
    Append candidate j to the selection and deflate both residuals.

    Mutates and returns ``state``; ``state.coverage`` grows by exactly
    ``state.last_gain``.
    """
    _check_candidate(state, j)
    r = state.residual_b[:, j].copy()
    norm_sq = float(np.dot(r, r))
    if j in state.dead_candidates or state.b_norms_sq[j] == 0.0 or norm_sq < state.dead_tol * state.b_norms_sq[j]:
        state.dead_candidates.add(j)
        raise DeadCandidateError(f"candidate {j} lies in the span of the current selection")
    q = r / np.sqrt(norm_sq)
    if state.basis:
        basis = state.basis_matrix()
        q -= basis @ (basis.T @ q)
        q /= np.linalg.norm(q)

    proj_a = q @ state.residual_a
    gain = float(np.dot(proj_a, proj_a))
    state.residual_a -= np.outer(q, proj_a)
    state.residual_b -= np.outer(q, q @ state.residual_b)
    state.residual_b[:, j] = 0.0

    state.basis.append(q)
    state.selected = state.selected.appended(j)
    state.coverage += gain
    state.last_gain = gain
    logger.debug(f"Committed column {j}: gain={gain:.6g}, coverage={state.coverage:.6g}")
    return state


def refresh_dead(state: SelectionState) -> Set[int]:
    """Mark every unselected candidate whose residual fell below the dead threshold."""
    norms_sq = np.einsum("ij,ij->j", state.residual_b, state.residual_b)
    dead = np.flatnonzero((norms_sq < state.dead_tol * state.b_norms_sq) | (state.b_norms_sq == 0.0))
    taken = set(state.selected.indices)
    state.dead_candidates.update(int(j) for j in dead if int(j) not in taken)
    return state.dead_candidates

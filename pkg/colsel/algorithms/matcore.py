"""
Matrix storage and IO for column subset selection.

A ``ColumnMatrix`` carries both the target matrix A and the candidate pool B.
Storage is either a dense Fortran-ordered float64 array or a CSC sparse
matrix; both are read-only after construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.io
import scipy.sparse as sp

from ..errors import (
    DegenerateColumnError,
    DimensionMismatchError,
    EmptyMatrixError,
    IndexOutOfRangeError,
    InvalidParameterError,
    MatrixFormatError,
    NonFiniteValueError,
)

logger = logging.getLogger(__name__)

MatrixFormat = Literal["dense-csv", "matrix-market"]
MM_BANNER = "%%matrixmarket matrix coordinate real general"


class ColumnMatrix:
    """Immutable column-major matrix, dense or compressed-by-column."""

    __slots__ = ("_data",)

    def __init__(self, data: Union[np.ndarray, sp.spmatrix, Sequence[Sequence[float]]]):
        if sp.issparse(data):
            csc = sp.csc_matrix(data, dtype=np.float64, copy=True)
            csc.sum_duplicates()
            csc.eliminate_zeros()
            csc.sort_indices()
            if not np.all(np.isfinite(csc.data)):
                raise NonFiniteValueError("matrix contains NaN or Inf")
            stored: Union[np.ndarray, sp.csc_matrix] = csc
        else:
            arr = np.array(data, dtype=np.float64, order="F", copy=True)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1, order="F")
            if arr.ndim != 2:
                raise DimensionMismatchError(f"expected a 2-D matrix, got {arr.ndim} dimensions")
            if not np.all(np.isfinite(arr)):
                raise NonFiniteValueError("matrix contains NaN or Inf")
            arr.flags.writeable = False
            stored = arr
        if stored.shape[0] < 1 or stored.shape[1] < 1:
            raise EmptyMatrixError(f"matrix must have at least one row and column, got {stored.shape}")
        object.__setattr__(self, "_data", stored)

    def __setattr__(self, name, value):
        raise AttributeError("ColumnMatrix is immutable")

    @property
    def rows(self) -> int:
        return int(self._data.shape[0])

    @property
    def cols(self) -> int:
        return int(self._data.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self._data)

    @property
    def storage(self) -> Union[np.ndarray, sp.csc_matrix]:
        return self._data

    def to_dense(self) -> np.ndarray:
        """Writable dense copy."""
        if self.is_sparse:
            return np.asfortranarray(self._data.toarray())
        return np.array(self._data, order="F", copy=True)

    def column(self, j: int) -> np.ndarray:
        self._check_index(j)
        if self.is_sparse:
            return self._data.getcol(j).toarray().ravel()
        return np.array(self._data[:, j], copy=True)

    def column_norms_sq(self) -> np.ndarray:
        if self.is_sparse:
            return np.asarray(self._data.multiply(self._data).sum(axis=0)).ravel()
        return np.einsum("ij,ij->j", self._data, self._data)

    def submatrix(self, indices: Iterable[int]) -> "ColumnMatrix":
        idx = list(indices)
        for j in idx:
            self._check_index(j)
        if not idx:
            raise EmptyMatrixError("cannot take an empty column submatrix")
        return ColumnMatrix(self._data[:, idx])

    def scale_columns(self, factors: Sequence[float]) -> "ColumnMatrix":
        factors = np.asarray(factors, dtype=np.float64)
        if factors.shape != (self.cols,):
            raise DimensionMismatchError(f"need {self.cols} scale factors, got {factors.shape}")
        if self.is_sparse:
            return ColumnMatrix(self._data @ sp.diags(factors))
        return ColumnMatrix(self._data * factors[np.newaxis, :])

    def left_multiply(self, left: np.ndarray) -> np.ndarray:
        """Dense ``left @ M``."""
        if left.shape[1] != self.rows:
            raise DimensionMismatchError(f"cannot left-multiply {left.shape} by {self.shape}")
        if self.is_sparse:
            return np.asarray((self._data.T @ left.T).T)
        return left @ self._data

    def right_multiply(self, right: np.ndarray) -> np.ndarray:
        """Dense ``M @ right``."""
        if right.shape[0] != self.cols:
            raise DimensionMismatchError(f"cannot right-multiply {self.shape} by {right.shape}")
        return np.asarray(self._data @ right)

    def _check_index(self, j: int) -> None:
        if not 0 <= j < self.cols:
            raise IndexOutOfRangeError(f"column index {j} out of range for {self.cols} columns")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ColumnMatrix) or other.shape != self.shape:
            return False
        return bool(np.array_equal(self.to_dense(), other.to_dense()))

    __hash__ = None

    def __repr__(self) -> str:
        kind = f"sparse, nnz={self._data.nnz}" if self.is_sparse else "dense"
        return f"ColumnMatrix({self.rows}x{self.cols}, {kind})"


@dataclass(frozen=True)
class ColumnSet:
    """Ordered, duplicate-free column positions; order is the selection sequence."""

    indices: Tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise IndexOutOfRangeError(f"negative column index in {idx}")
        if len(set(idx)) != len(idx):
            raise InvalidParameterError(f"column indices must be distinct, got {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices: Iterable[int]) -> "ColumnSet":
        return cls(tuple(indices))

    def validate_for(self, matrix: ColumnMatrix) -> "ColumnSet":
        for j in self.indices:
            if j >= matrix.cols:
                raise IndexOutOfRangeError(f"column index {j} out of range for {matrix.cols} columns")
        return self

    def appended(self, j: int) -> "ColumnSet":
        return ColumnSet(self.indices + (j,))

    def union(self, other: Iterable[int]) -> "ColumnSet":
        """Keeps this set's order and appends unseen indices of ``other`` in their order."""
        seen = set(self.indices)
        extra = [j for j in other if not (j in seen or seen.add(j))]
        return ColumnSet(self.indices + tuple(extra))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, j) -> bool:
        return j in self.indices

    def to_list(self) -> List[int]:
        return list(self.indices)


def _infer_format(path: Path) -> MatrixFormat:
    return "matrix-market" if path.suffix.lower() == ".mtx" else "dense-csv"


def _parse_float(token: str, lineno: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise MatrixFormatError(f"cannot parse {token.strip()!r} as a number", line=lineno) from None
    if not math.isfinite(value):
        raise NonFiniteValueError(f"non-finite value {token.strip()!r}", line=lineno)
    return value


def _numbered_lines(path: Path) -> Iterator[Tuple[int, str]]:
    """(line number, text) pairs; bytes that are not UTF-8 fail with the offending line."""
    with path.open("rb") as f:
        for lineno, raw in enumerate(f, 1):
            try:
                yield lineno, raw.decode("utf-8")
            except UnicodeDecodeError:
                raise MatrixFormatError("not valid UTF-8 text", line=lineno) from None


def _load_dense_csv(path: Path) -> ColumnMatrix:
    rows: List[List[float]] = []
    width: Optional[int] = None
    for lineno, line in _numbered_lines(path):
        line = line.strip()
        if not line:
            continue
        values = [_parse_float(tok, lineno) for tok in line.split(",")]
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise MatrixFormatError(f"expected {width} values, found {len(values)}", line=lineno)
        rows.append(values)
    if not rows:
        raise EmptyMatrixError(f"{path} contains no matrix rows")
    return ColumnMatrix(np.array(rows, dtype=np.float64))


def _load_matrix_market(path: Path) -> ColumnMatrix:
    shape: Optional[Tuple[int, int, int]] = None
    row_idx: List[int] = []
    col_idx: List[int] = []
    values: List[float] = []
    for lineno, line in _numbered_lines(path):
        stripped = line.strip()
        if lineno == 1:
            if " ".join(stripped.lower().split()) != MM_BANNER:
                raise MatrixFormatError(
                    "only '%%MatrixMarket matrix coordinate real general' is supported", line=lineno)
            continue
        if not stripped or stripped.startswith("%"):
            continue
        parts = stripped.split()
        if shape is None:
            if len(parts) != 3:
                raise MatrixFormatError("size line must be 'rows cols nnz'", line=lineno)
            try:
                shape = tuple(int(p) for p in parts)
            except ValueError:
                raise MatrixFormatError(f"bad size line {stripped!r}", line=lineno) from None
            if shape[0] < 1 or shape[1] < 1:
                raise EmptyMatrixError(f"{path} declares an empty {shape[0]}x{shape[1]} matrix")
            continue
        if len(parts) != 3:
            raise MatrixFormatError("entry must be 'row col value'", line=lineno)
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise MatrixFormatError(f"bad coordinates {parts[:2]}", line=lineno) from None
        if not (1 <= i <= shape[0] and 1 <= j <= shape[1]):
            raise MatrixFormatError(f"entry ({i}, {j}) outside {shape[0]}x{shape[1]}", line=lineno)
        row_idx.append(i - 1)
        col_idx.append(j - 1)
        values.append(_parse_float(parts[2], lineno))
    if shape is None:
        raise MatrixFormatError(f"{path} has no size line")
    if len(values) != shape[2]:
        raise MatrixFormatError(f"declared {shape[2]} entries, found {len(values)}")
    coo = sp.coo_matrix((values, (row_idx, col_idx)), shape=shape[:2], dtype=np.float64)
    return ColumnMatrix(coo.tocsc())


def load_matrix(path: Union[str, Path], format: Optional[MatrixFormat] = None) -> ColumnMatrix:
    """
    Load a matrix exactly as stored; no normalization is applied.

    Args:
        path: file to read
        format: "dense-csv" or "matrix-market"; inferred from the extension when omitted

    Returns:
        ColumnMatrix (dense for CSV, sparse for MatrixMarket)
    """
    path = Path(path)
    fmt = format or _infer_format(path)
    if not path.is_file():
        raise FileNotFoundError(f"matrix file not found: {path}")
    if fmt == "dense-csv":
        matrix = _load_dense_csv(path)
    elif fmt == "matrix-market":
        matrix = _load_matrix_market(path)
    else:
        raise InvalidParameterError(f"unknown matrix format {fmt!r}")
    logger.info(f"Loaded {matrix!r} from {path}")
    return matrix


def save_matrix(matrix: ColumnMatrix, path: Union[str, Path], format: Optional[MatrixFormat] = None) -> None:
    """Write with 17 significant digits so that loading reproduces every double exactly."""
    path = Path(path)
    fmt = format or _infer_format(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "dense-csv":
        dense = matrix.to_dense()
        with path.open("w", encoding="utf-8") as f:
            for row in dense:
                f.write(",".join(f"{v:.17g}" for v in row) + "\n")
    elif fmt == "matrix-market":
        if path.suffix.lower() != ".mtx":
            raise InvalidParameterError("MatrixMarket output paths must end in .mtx")
        coo = sp.coo_matrix(matrix.storage) if matrix.is_sparse else sp.coo_matrix(matrix.to_dense())
        scipy.io.mmwrite(str(path), coo, field="real", precision=17, symmetry="general")
    else:
        raise InvalidParameterError(f"unknown matrix format {fmt!r}")
    logger.debug(f"Saved {matrix!r} to {path}")


def frobenius_sq(matrix: ColumnMatrix) -> float:
    """Sum of squared entries."""
    if matrix.is_sparse:
        data = matrix.storage.data
        return float(np.dot(data, data))
    dense = matrix.storage
    return float(np.einsum("ij,ij->", dense, dense))


def normalized_columns(matrix: ColumnMatrix, columns: ColumnSet) -> List[np.ndarray]:
    """Unit-norm copies of the indexed columns, in set order."""
    columns.validate_for(matrix)
    unit = []
    for j in columns:
        col = matrix.column(j)
        norm = float(np.linalg.norm(col))
        if norm == 0.0:
            raise DegenerateColumnError(j)
        unit.append(col / norm)
    return unit

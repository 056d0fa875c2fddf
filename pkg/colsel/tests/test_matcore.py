"""
Unit tests for matrix storage and IO.
"""

import math
import tempfile
import unittest
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from colsel.algorithms.matcore import (
    ColumnMatrix,
    ColumnSet,
    frobenius_sq,
    load_matrix,
    normalized_columns,
    save_matrix,
)
from colsel.errors import (
    DegenerateColumnError,
    EmptyMatrixError,
    IndexOutOfRangeError,
    InvalidParameterError,
    MatrixFormatError,
    NonFiniteValueError,
)

DEPENDENT_CSV = "1,0,1\n1,-1,0\n0,1,1\n"
DEPENDENT_A = np.array([[1.0, 0.0, 1.0], [1.0, -1.0, 0.0], [0.0, 1.0, 1.0]])


class TempDirTestCase(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name: str, content: str) -> Path:
        path = self.tmp / name
        path.write_text(content, encoding="utf-8")
        return path


class TestLoadMatrix(TempDirTestCase):
    """Test CSV and MatrixMarket parsing."""

    def test_dependent_csv(self):
        """The three-column CSV loads exactly as written."""
        m = load_matrix(self.write("a.csv", DEPENDENT_CSV))
        self.assertEqual(m.shape, (3, 3))
        self.assertFalse(m.is_sparse)
        np.testing.assert_array_equal(m.to_dense(), DEPENDENT_A)

    def test_single_value_csv(self):
        m = load_matrix(self.write("one.csv", "5\n"))
        self.assertEqual(m.shape, (1, 1))
        self.assertEqual(m.to_dense()[0, 0], 5.0)

    def test_matrix_market_single_entry(self):
        """One stored entry on a 2x2 shape gives a sparse matrix with one nonzero."""
        path = self.write("a.mtx", "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 1\n1 1 2.0\n")
        m = load_matrix(path)
        self.assertTrue(m.is_sparse)
        self.assertEqual(m.shape, (2, 2))
        self.assertEqual(m.storage.nnz, 1)
        np.testing.assert_array_equal(m.to_dense(), [[2.0, 0.0], [0.0, 0.0]])

    def test_ragged_csv_reports_line(self):
        with self.assertRaises(MatrixFormatError) as ctx:
            load_matrix(self.write("bad.csv", "1,2\n3\n"))
        self.assertEqual(ctx.exception.line, 2)
        self.assertIn("line 2", str(ctx.exception))

    def test_non_numeric_token(self):
        with self.assertRaises(MatrixFormatError) as ctx:
            load_matrix(self.write("bad.csv", "1,x\n"))
        self.assertEqual(ctx.exception.line, 1)

    def test_non_finite_value(self):
        with self.assertRaises(NonFiniteValueError):
            load_matrix(self.write("nan.csv", "1,nan\n"))

    def test_empty_file(self):
        with self.assertRaises(EmptyMatrixError):
            load_matrix(self.write("empty.csv", "\n\n"))

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_matrix(self.tmp / "nope.csv")

    def test_unsupported_banner(self):
        path = self.write("sym.mtx", "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 1 1\n")
        with self.assertRaises(MatrixFormatError):
            load_matrix(path)

    def test_entry_count_mismatch(self):
        path = self.write("short.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n")
        with self.assertRaises(MatrixFormatError):
            load_matrix(path)

    def test_entry_out_of_bounds(self):
        path = self.write("oob.mtx", "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n")
        with self.assertRaises(MatrixFormatError) as ctx:
            load_matrix(path)
        self.assertEqual(ctx.exception.line, 3)

    def test_invalid_utf8_reports_line(self):
        csv = self.tmp / "binary.csv"
        csv.write_bytes(b"1,2\n3,\xff\n")
        with self.assertRaises(MatrixFormatError) as ctx:
            load_matrix(csv)
        self.assertEqual(ctx.exception.line, 2)
        mtx = self.tmp / "binary.mtx"
        mtx.write_bytes(b"%%MatrixMarket matrix coordinate real general\n% \xfe\xff\n2 2 1\n1 1 1\n")
        with self.assertRaises(MatrixFormatError) as ctx:
            load_matrix(mtx)
        self.assertEqual(ctx.exception.line, 2)

    def test_crlf_line_endings(self):
        csv = self.tmp / "crlf.csv"
        csv.write_bytes(b"1,2\r\n3,4\r\n")
        np.testing.assert_array_equal(load_matrix(csv).to_dense(), [[1.0, 2.0], [3.0, 4.0]])


class TestSaveMatrix(TempDirTestCase):
    """Test that saved matrices load back bit-exactly."""

    def test_csv_round_trip(self):
        values = np.random.default_rng(7).standard_normal((4, 3)) * 1e3
        path = self.tmp / "m.csv"
        save_matrix(ColumnMatrix(values), path)
        np.testing.assert_array_equal(load_matrix(path).to_dense(), values)

    def test_matrix_market_round_trip(self):
        values = sp.random(6, 5, density=0.4, random_state=3, format="csc") * math.pi
        path = self.tmp / "m.mtx"
        save_matrix(ColumnMatrix(values), path)
        loaded = load_matrix(path)
        self.assertTrue(loaded.is_sparse)
        np.testing.assert_array_equal(loaded.to_dense(), values.toarray())

    def test_matrix_market_needs_mtx_suffix(self):
        with self.assertRaises(InvalidParameterError):
            save_matrix(ColumnMatrix(DEPENDENT_A), self.tmp / "m.txt", format="matrix-market")


class TestColumnMatrix(unittest.TestCase):
    """Test ColumnMatrix invariants."""

    def test_immutable(self):
        m = ColumnMatrix(DEPENDENT_A)
        with self.assertRaises(AttributeError):
            m.extra = 1
        with self.assertRaises(ValueError):
            m.storage[0, 0] = 9.0

    def test_to_dense_is_a_copy(self):
        m = ColumnMatrix(DEPENDENT_A)
        dense = m.to_dense()
        dense[0, 0] = 42.0
        self.assertEqual(m.to_dense()[0, 0], 1.0)

    def test_rejects_nan(self):
        with self.assertRaises(NonFiniteValueError):
            ColumnMatrix([[1.0, float("inf")]])

    def test_rejects_empty(self):
        with self.assertRaises(EmptyMatrixError):
            ColumnMatrix(np.zeros((0, 3)))

    def test_sparse_and_dense_agree(self):
        dense = ColumnMatrix(DEPENDENT_A)
        sparse = ColumnMatrix(sp.csc_matrix(DEPENDENT_A))
        self.assertEqual(dense, sparse)
        np.testing.assert_allclose(dense.column_norms_sq(), sparse.column_norms_sq())
        self.assertEqual(frobenius_sq(dense), frobenius_sq(sparse))

    def test_submatrix_and_scaling(self):
        m = ColumnMatrix(DEPENDENT_A)
        np.testing.assert_array_equal(m.submatrix([2, 0]).to_dense(), DEPENDENT_A[:, [2, 0]])
        np.testing.assert_array_equal(m.scale_columns([1.0, 2.0, 3.0]).to_dense(), DEPENDENT_A * [1.0, 2.0, 3.0])
        with self.assertRaises(IndexOutOfRangeError):
            m.column(3)


class TestColumnSet(unittest.TestCase):
    def test_rejects_duplicates(self):
        with self.assertRaises(InvalidParameterError):
            ColumnSet((1, 1))

    def test_union_keeps_order(self):
        self.assertEqual(ColumnSet((3, 1)).union([1, 0, 2]).to_list(), [3, 1, 0, 2])

    def test_validate_for(self):
        with self.assertRaises(IndexOutOfRangeError):
            ColumnSet((0, 5)).validate_for(ColumnMatrix(DEPENDENT_A))


class TestNorms(unittest.TestCase):
    """Test frobenius_sq and normalized_columns."""

    def test_frobenius_sq(self):
        self.assertEqual(frobenius_sq(ColumnMatrix(DEPENDENT_A)), 6.0)
        self.assertEqual(frobenius_sq(ColumnMatrix(np.zeros((2, 2)))), 0.0)
        self.assertEqual(frobenius_sq(ColumnMatrix(np.eye(3))), 3.0)

    def test_normalized_columns(self):
        m = ColumnMatrix([[3.0, 1.0, 1.0], [4.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
        unit = normalized_columns(m, ColumnSet((0, 1, 2)))
        np.testing.assert_allclose(unit[0], [0.6, 0.8, 0.0])
        np.testing.assert_array_equal(unit[1], [1.0, 0.0, 0.0])
        np.testing.assert_allclose(unit[2], [1 / math.sqrt(2), 1 / math.sqrt(2), 0.0])
        for v in unit:
            self.assertAlmostEqual(float(np.linalg.norm(v)), 1.0, delta=1e-12)

    def test_zero_column_is_degenerate(self):
        m = ColumnMatrix([[0.0, 1.0], [0.0, 0.0]])
        with self.assertRaises(DegenerateColumnError) as ctx:
            normalized_columns(m, ColumnSet((0,)))
        self.assertEqual(ctx.exception.index, 0)


if __name__ == "__main__":
    unittest.main()

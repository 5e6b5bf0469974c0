"""CSR sparse matrices with exact, deterministic kernels.

The canonical form keeps column indices sorted within each row, merges
duplicates, and stores no explicit zeros.  All values are float64.  spgemm
expands products row-block by row-block and merges with a stable lexsort, so
repeated runs produce bit-identical results; for 0/1 operands the entries are
exact integer counts.
"""

from __future__ import annotations

import csv

import numpy as np
import scipy.sparse as _sps

from .errors import IngestionError, NumericError, ShapeMismatchError

# cap on the intermediate (row, col, val) expansion per spgemm block
_SPGEMM_BLOCK_BUDGET = 4_000_000


def _ranges_concat(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Concatenation of arange(s, s+c) for each (s, c) pair, vectorized."""
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    seq = np.arange(total, dtype=np.int64)
    offsets = np.repeat(np.cumsum(counts) - counts, counts)
    return np.repeat(starts, counts) + (seq - offsets)


class SparseMatrix:
    """Immutable CSR matrix (indptr, indices, data)."""

    __slots__ = ("shape", "indptr", "indices", "data", "_t", "_sp")

    def __init__(self, shape, indptr, indices, data):
        self.shape = (int(shape[0]), int(shape[1]))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.float64)
        if self.indptr.shape != (self.shape[0] + 1,):
            raise ShapeMismatchError("indptr length must be n_rows + 1")
        if self.indices.shape != self.data.shape:
            raise ShapeMismatchError("indices and data length mismatch")
        if not np.all(np.isfinite(self.data)):
            raise NumericError("sparse matrix holds non-finite values")
        self._t = None
        self._sp = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_coo(rows, cols, vals, shape, binary: bool = False) -> "SparseMatrix":
        """Canonicalize COO triplets: sort, merge duplicates, drop zeros.

        With binary=True duplicate coordinates collapse to a single 1.0 entry
        instead of summing.
        """
        n_rows, n_cols = int(shape[0]), int(shape[1])
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.shape == cols.shape == vals.shape):
            raise ShapeMismatchError("rows, cols, vals must have equal length")
        if rows.size:
            if rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols:
                raise ShapeMismatchError("coordinate outside matrix shape")
        key = rows * n_cols + cols
        if binary:
            key = np.unique(key)
            rows, cols = key // n_cols, key % n_cols
            vals = np.ones(key.shape[0], dtype=np.float64)
        else:
            order = np.argsort(key, kind="stable")
            key, rows, cols, vals = key[order], rows[order], cols[order], vals[order]
            if key.size:
                boundary = np.empty(key.shape[0], dtype=bool)
                boundary[0] = True
                boundary[1:] = key[1:] != key[:-1]
                starts = np.flatnonzero(boundary)
                vals = np.add.reduceat(vals, starts)
                rows, cols = rows[starts], cols[starts]
        keep = vals != 0.0
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return SparseMatrix((n_rows, n_cols), indptr, cols, vals)

    @staticmethod
    def identity(n: int) -> "SparseMatrix":
        idx = np.arange(n, dtype=np.int64)
        return SparseMatrix((n, n), np.arange(n + 1, dtype=np.int64), idx,
                            np.ones(n, dtype=np.float64))

    @staticmethod
    def zeros(shape) -> "SparseMatrix":
        return SparseMatrix.from_coo([], [], [], shape)

    # -- accessors -----------------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def row_ids(self) -> np.ndarray:
        """Row index of every stored entry, aligned with indices/data."""
        return np.repeat(np.arange(self.shape[0], dtype=np.int64), np.diff(self.indptr))

    def row_sums(self) -> np.ndarray:
        out = np.zeros(self.shape[0], dtype=np.float64)
        np.add.at(out, self.row_ids(), self.data)
        return out

    def to_coo(self):
        return self.row_ids(), self.indices.copy(), self.data.copy()

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.float64)
        out[self.row_ids(), self.indices] = self.data
        return out

    def to_scipy(self) -> _sps.csr_matrix:
        """Zero-copy scipy view, cached; used as the dense-product backend."""
        if self._sp is None:
            self._sp = _sps.csr_matrix(
                (self.data, self.indices, self.indptr), shape=self.shape)
        return self._sp

    # -- algebra --------------------------------------------------------------

    def transpose(self) -> "SparseMatrix":
        if self._t is None:
            rows, cols, vals = self.to_coo()
            t = SparseMatrix.from_coo(cols, rows, vals, (self.shape[1], self.shape[0]))
            t._t = self
            self._t = t
        return self._t

    def scale(self, c: float) -> "SparseMatrix":
        return SparseMatrix.from_coo(self.row_ids(), self.indices, self.data * float(c),
                                     self.shape)

    def add(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ShapeMismatchError(f"cannot add shapes {self.shape} and {other.shape}")
        r1, c1, v1 = self.to_coo()
        r2, c2, v2 = other.to_coo()
        return SparseMatrix.from_coo(np.concatenate([r1, r2]), np.concatenate([c1, c2]),
                                     np.concatenate([v1, v2]), self.shape)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.to_scipy() @ x

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            return spgemm(self, other)
        return self.matvec(np.asarray(other))

    def allclose(self, other: "SparseMatrix", tol: float = 0.0) -> bool:
        return (self.shape == other.shape
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.allclose(self.data, other.data, rtol=0.0, atol=tol))

    def __repr__(self):
        return f"SparseMatrix(shape={self.shape}, nnz={self.nnz})"


def spgemm(left: SparseMatrix, right: SparseMatrix) -> SparseMatrix:
    """Exact sparse-sparse product in double precision.

    Products are expanded per block of left rows and merged by a stable sort
    on (row, col), so the accumulation order is fixed and results are
    bit-stable across runs.
    """
    if left.shape[1] != right.shape[0]:
        raise ShapeMismatchError(
            f"spgemm shapes do not chain: {left.shape} @ {right.shape}")
    n_rows, n_cols = left.shape[0], right.shape[1]
    right_counts = np.diff(right.indptr)
    left_rows_all = left.row_ids()
    # expansion size contributed by each stored entry of `left`
    expand_per_nnz = right_counts[left.indices]

    out_rows, out_cols, out_vals = [], [], []
    start = 0
    nnz = left.nnz
    while start < nnz:
        stop = start
        budget = 0
        while stop < nnz and (budget == 0 or budget + expand_per_nnz[stop] <= _SPGEMM_BLOCK_BUDGET):
            budget += expand_per_nnz[stop]
            stop += 1
        lrows = left_rows_all[start:stop]
        lcols = left.indices[start:stop]
        lvals = left.data[start:stop]
        cnt = expand_per_nnz[start:stop]
        gather = _ranges_concat(right.indptr[lcols], cnt)
        rows = np.repeat(lrows, cnt)
        cols = right.indices[gather]
        vals = np.repeat(lvals, cnt) * right.data[gather]
        if rows.size:
            order = np.lexsort((cols, rows))
            rows, cols, vals = rows[order], cols[order], vals[order]
            boundary = np.empty(rows.shape[0], dtype=bool)
            boundary[0] = True
            boundary[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            starts = np.flatnonzero(boundary)
            out_rows.append(rows[starts])
            out_cols.append(cols[starts])
            out_vals.append(np.add.reduceat(vals, starts))
        start = stop

    if not out_rows:
        return SparseMatrix.zeros((n_rows, n_cols))
    rows = np.concatenate(out_rows)
    cols = np.concatenate(out_cols)
    vals = np.concatenate(out_vals)
    # block boundaries can split a row; from_coo re-merges those stragglers
    return SparseMatrix.from_coo(rows, cols, vals, (n_rows, n_cols))


def spmm(mat: SparseMatrix, dense: np.ndarray) -> np.ndarray:
    """Sparse @ dense with a 2-d result."""
    dense = np.asarray(dense, dtype=np.float64)
    if mat.shape[1] != dense.shape[0]:
        raise ShapeMismatchError(f"spmm shapes do not chain: {mat.shape} @ {dense.shape}")
    return mat.to_scipy() @ dense


def write_coo_csv(path, mat: SparseMatrix) -> None:
    """Coordinate-triplet CSV with header row,col,value."""
    rows, cols, vals = mat.to_coo()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "value"])
        for r, c, v in zip(rows, cols, vals):
            writer.writerow([int(r), int(c), repr(float(v))])


def read_coo_csv(path, shape) -> SparseMatrix:
    rows, cols, vals = [], [], []
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:3]] != ["row", "col", "value"]:
            raise IngestionError(f"{path}: expected header 'row,col,value'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                rows.append(int(row[0]))
                cols.append(int(row[1]))
                vals.append(float(row[2]))
            except (ValueError, IndexError):
                raise IngestionError(f"{path}:{lineno}: malformed triplet {row!r}")
    return SparseMatrix.from_coo(rows, cols, vals, shape)

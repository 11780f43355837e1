"""Immutable sparse matrices used as constant structure (adjacency, incidence)."""

import numpy as np
import scipy.sparse as sp

from ..errors import ShapeError


class SparseMatrix:
    """CSR-backed sparse matrix with canonical (sorted, deduplicated) entries.

    Instances are constant once built: the autograd tape multiplies through
    them but never differentiates them.
    """

    __slots__ = ("csr",)

    def __init__(self, csr):
        if not sp.issparse(csr):
            raise ShapeError("SparseMatrix wraps a scipy sparse matrix")
        m = csr.tocsr().astype(np.float64)
        m.sum_duplicates()
        m.sort_indices()
        if not np.all(np.isfinite(m.data)):
            raise ShapeError("sparse entries must be finite")
        self.csr = m

    @classmethod
    def from_coo(cls, rows, cols, row_idx, col_idx, values):
        """Build from triplets; duplicate positions are summed."""
        row_idx = np.asarray(row_idx, dtype=np.intp)
        col_idx = np.asarray(col_idx, dtype=np.intp)
        values = np.asarray(values, dtype=np.float64)
        if not (row_idx.shape == col_idx.shape == values.shape):
            raise ShapeError("triplet arrays must share a shape")
        if row_idx.size:
            if row_idx.min() < 0 or row_idx.max() >= rows:
                raise ShapeError("row index out of range")
            if col_idx.min() < 0 or col_idx.max() >= cols:
                raise ShapeError("col index out of range")
        return cls(sp.coo_matrix((values, (row_idx, col_idx)), shape=(rows, cols)))

    @classmethod
    def identity(cls, n):
        return cls(sp.identity(n, format="csr"))

    @classmethod
    def zeros(cls, rows, cols):
        return cls(sp.csr_matrix((rows, cols)))

    @property
    def shape(self):
        return self.csr.shape

    @property
    def rows(self):
        return self.csr.shape[0]

    @property
    def cols(self):
        return self.csr.shape[1]

    @property
    def nnz(self):
        return self.csr.nnz

    def to_dense(self):
        return np.asarray(self.csr.todense(), dtype=np.float64)

    def entries(self):
        """Canonical (row, col, value) triplets, sorted, no duplicates or zeros."""
        coo = self.csr.tocoo()
        mask = coo.data != 0.0
        order = np.lexsort((coo.col[mask], coo.row[mask]))
        return list(
            zip(
                coo.row[mask][order].tolist(),
                coo.col[mask][order].tolist(),
                coo.data[mask][order].tolist(),
            )
        )

    def transpose(self):
        return SparseMatrix(self.csr.T.tocsr())

    def is_symmetric(self):
        if self.rows != self.cols:
            return False
        diff = self.csr - self.csr.T
        return diff.nnz == 0 or np.all(diff.data == 0.0)

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

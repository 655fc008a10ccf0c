#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include "cgl/dense.hpp"

namespace cgl {

/// Compressed sparse row matrix of 64-bit floats.
///
/// Invariants (checked by validate()):
///   - row_ptr is non-decreasing, row_ptr[0] == 0, row_ptr[n_rows] == nnz
///   - within each row, column indices are strictly increasing and < n_cols
struct SparseMatrixCsr {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    std::size_t nnz() const { return values.size(); }
    std::size_t row_degree(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }

    /// True when entry (i, j) is stored (binary search within the row).
    bool has_entry(std::size_t i, std::size_t j) const;

    /// Throws std::invalid_argument when any CSR invariant is violated.
    void validate() const;

    static SparseMatrixCsr identity(std::size_t n);

    /// Builds from (row, col, value) triplets; duplicates are summed.
    static SparseMatrixCsr from_coo(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<std::tuple<std::size_t, std::size_t, double>> coo);
};

/// result = s * d, shape s.n_rows x d.cols().
DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& d);

/// result = s^T * d, shape s.n_cols x d.cols().
DenseMatrix spmm_transposed(const SparseMatrixCsr& s, const DenseMatrix& d);

DenseMatrix to_dense(const SparseMatrixCsr& s);

}  // namespace cgl

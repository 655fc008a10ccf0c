#include "cgl/sparse.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cgl {

bool SparseMatrixCsr::has_entry(std::size_t i, std::size_t j) const {
    const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    return std::binary_search(begin, end, j);
}

void SparseMatrixCsr::validate() const {
    if (row_ptr.size() != n_rows + 1) throw std::invalid_argument("csr: row_ptr length != n_rows+1");
    if (row_ptr.front() != 0) throw std::invalid_argument("csr: row_ptr[0] != 0");
    if (row_ptr.back() != col_idx.size() || col_idx.size() != values.size())
        throw std::invalid_argument("csr: row_ptr[n_rows], col_idx and values disagree");
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (row_ptr[i] > row_ptr[i + 1]) throw std::invalid_argument("csr: row_ptr decreasing");
        for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            if (col_idx[p] >= n_cols)
                throw std::invalid_argument("csr: column index out of range in row " + std::to_string(i));
            if (p > row_ptr[i] && col_idx[p - 1] >= col_idx[p])
                throw std::invalid_argument("csr: columns not strictly increasing in row " +
                                            std::to_string(i));
        }
    }
}

SparseMatrixCsr SparseMatrixCsr::identity(std::size_t n) {
    SparseMatrixCsr s;
    s.n_rows = s.n_cols = n;
    s.row_ptr.resize(n + 1);
    s.col_idx.resize(n);
    s.values.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        s.row_ptr[i] = i;
        s.col_idx[i] = i;
    }
    s.row_ptr[n] = n;
    return s;
}

SparseMatrixCsr SparseMatrixCsr::from_coo(
    std::size_t n_rows, std::size_t n_cols,
    std::vector<std::tuple<std::size_t, std::size_t, double>> coo) {
    std::sort(coo.begin(), coo.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                                : std::get<1>(a) < std::get<1>(b);
    });
    SparseMatrixCsr s;
    s.n_rows = n_rows;
    s.n_cols = n_cols;
    s.row_ptr.assign(n_rows + 1, 0);
    bool have_last = false;
    std::size_t last_i = 0, last_j = 0;
    for (const auto& [i, j, v] : coo) {
        if (i >= n_rows || j >= n_cols) throw std::invalid_argument("from_coo: index out of range");
        if (have_last && i == last_i && j == last_j) {
            s.values.back() += v;  // merge duplicate
            continue;
        }
        s.col_idx.push_back(j);
        s.values.push_back(v);
        ++s.row_ptr[i + 1];
        last_i = i;
        last_j = j;
        have_last = true;
    }
    for (std::size_t i = 0; i < n_rows; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
    s.validate();
    return s;
}

DenseMatrix spmm(const SparseMatrixCsr& s, const DenseMatrix& d) {
    if (s.n_cols != d.rows())
        throw std::invalid_argument("spmm: dimension mismatch (" + std::to_string(s.n_cols) +
                                    " vs " + std::to_string(d.rows()) + ")");
    DenseMatrix out(s.n_rows, d.cols(), 0.0);
    const std::size_t n = d.cols();
    for (std::size_t i = 0; i < s.n_rows; ++i) {
        double* __restrict__ oi = out.row(i);
        for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
            const double v = s.values[p];
            const double* __restrict__ dj = d.row(s.col_idx[p]);
            for (std::size_t j = 0; j < n; ++j) oi[j] += v * dj[j];
        }
    }
    return out;
}

DenseMatrix spmm_transposed(const SparseMatrixCsr& s, const DenseMatrix& d) {
    if (s.n_rows != d.rows())
        throw std::invalid_argument("spmm_transposed: dimension mismatch");
    DenseMatrix out(s.n_cols, d.cols(), 0.0);
    const std::size_t n = d.cols();
    for (std::size_t i = 0; i < s.n_rows; ++i) {
        const double* __restrict__ di = d.row(i);
        for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p) {
            const double v = s.values[p];
            double* __restrict__ oj = out.row(s.col_idx[p]);
            for (std::size_t j = 0; j < n; ++j) oj[j] += v * di[j];
        }
    }
    return out;
}

DenseMatrix to_dense(const SparseMatrixCsr& s) {
    DenseMatrix out(s.n_rows, s.n_cols, 0.0);
    for (std::size_t i = 0; i < s.n_rows; ++i)
        for (std::size_t p = s.row_ptr[i]; p < s.row_ptr[i + 1]; ++p)
            out(i, s.col_idx[p]) = s.values[p];
    return out;
}

}  // namespace cgl

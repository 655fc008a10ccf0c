#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace cgl {

/// Row-major dense matrix of 64-bit floats.
///
/// The flat layout keeps matmul kernels cache-friendly and lets rows be
/// handed out as contiguous spans. All public operations on valid inputs
/// produce finite entries; dimension mismatches throw std::invalid_argument.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    double* row(std::size_t i) { return data_.data() + i * cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool all_finite() const;

    /// Appends `src`'s row `src_row` into row `dst_row` scaled by `alpha`.
    void axpy_row(std::size_t dst_row, double alpha, const DenseMatrix& src, std::size_t src_row);

    void fill(double v);
    void scale(double v);
    /// this += alpha * other (same shape).
    void add_scaled(const DenseMatrix& other, double alpha = 1.0);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// C = A * B. Skips exact zeros of A, which makes products with sparse
/// feature matrices cheap without changing the result.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);

/// C = A^T * B without materializing the transpose.
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);

/// C = A * B^T without materializing the transpose.
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

/// Row-wise softmax with max subtraction. Each output row sums to 1; an
/// all-equal row maps to the uniform distribution.
DenseMatrix softmax_rows(const DenseMatrix& d);

/// In-place row-wise softmax over a raw buffer (one row of length n).
void softmax_inplace(double* row, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);
double l2_norm(const double* a, std::size_t n);

DenseMatrix permute_rows(const DenseMatrix& m, const std::vector<std::size_t>& perm);

}  // namespace cgl

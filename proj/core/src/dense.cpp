#include "cgl/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cgl {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    DenseMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != c) throw std::invalid_argument("from_rows: ragged row lengths");
        std::copy(row.begin(), row.end(), m.row(i));
        ++i;
    }
    return m;
}

bool DenseMatrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void DenseMatrix::axpy_row(std::size_t dst_row, double alpha, const DenseMatrix& src,
                           std::size_t src_row) {
    double* d = row(dst_row);
    const double* s = src.row(src_row);
    for (std::size_t j = 0; j < cols_; ++j) d[j] += alpha * s[j];
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void DenseMatrix::scale(double v) {
    for (double& x : data_) x *= v;
}

void DenseMatrix::add_scaled(const DenseMatrix& other, double alpha) {
    if (other.rows_ != rows_ || other.cols_ != cols_)
        throw std::invalid_argument("add_scaled: shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
}

namespace {
constexpr std::size_t kRowBlock = 64;  // keeps the C block resident while B streams
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions differ (" +
                                    std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.rows()) + ")");
    DenseMatrix c(a.rows(), b.cols(), 0.0);
    const std::size_t n = b.cols();
    const std::size_t rows = a.rows(), inner = a.cols();

    std::size_t zeros = 0;
    for (double v : a.data()) zeros += v == 0.0;
    const bool sparse_a = zeros > a.size() / 2;

    if (sparse_a) {
        // zero-skipping row kernel: products with sparse feature matrices only
        // pay for the stored entries
        for (std::size_t i = 0; i < rows; ++i) {
            double* __restrict__ ci = c.row(i);
            for (std::size_t k = 0; k < inner; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                const double* __restrict__ bk = b.row(k);
                for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
            }
        }
        return c;
    }

    for (std::size_t i0 = 0; i0 < rows; i0 += kRowBlock) {
        const std::size_t i1 = std::min(i0 + kRowBlock, rows);
        std::size_t i = i0;
        // 4-row microkernel: each B row streams once per four C rows
        for (; i + 4 <= i1; i += 4) {
            double* __restrict__ c0 = c.row(i);
            double* __restrict__ c1 = c.row(i + 1);
            double* __restrict__ c2 = c.row(i + 2);
            double* __restrict__ c3 = c.row(i + 3);
            for (std::size_t k = 0; k < inner; ++k) {
                const double a0 = a(i, k), a1 = a(i + 1, k), a2 = a(i + 2, k), a3 = a(i + 3, k);
                const double* __restrict__ bk = b.row(k);
                for (std::size_t j = 0; j < n; ++j) {
                    const double bj = bk[j];
                    c0[j] += a0 * bj;
                    c1[j] += a1 * bj;
                    c2[j] += a2 * bj;
                    c3[j] += a3 * bj;
                }
            }
        }
        for (; i < i1; ++i) {
            double* __restrict__ ci = c.row(i);
            for (std::size_t k = 0; k < inner; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                const double* __restrict__ bk = b.row(k);
                for (std::size_t j = 0; j < n; ++j) ci[j] += aik * bk[j];
            }
        }
    }
    return c;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("matmul_at_b: row counts differ");
    DenseMatrix c(a.cols(), b.cols(), 0.0);
    const std::size_t n = b.cols();

    std::size_t zeros = 0;
    for (double v : a.data()) zeros += v == 0.0;
    if (zeros > a.size() / 2) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double* __restrict__ bi = b.row(i);
            for (std::size_t k = 0; k < a.cols(); ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                double* __restrict__ ck = c.row(k);
                for (std::size_t j = 0; j < n; ++j) ck[j] += aik * bi[j];
            }
        }
        return c;
    }

    std::size_t i = 0;
    for (; i + 4 <= a.rows(); i += 4) {
        const double* __restrict__ b0 = b.row(i);
        const double* __restrict__ b1 = b.row(i + 1);
        const double* __restrict__ b2 = b.row(i + 2);
        const double* __restrict__ b3 = b.row(i + 3);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double a0 = a(i, k), a1 = a(i + 1, k), a2 = a(i + 2, k), a3 = a(i + 3, k);
            double* __restrict__ ck = c.row(k);
            for (std::size_t j = 0; j < n; ++j)
                ck[j] += a0 * b0[j] + a1 * b1[j] + a2 * b2[j] + a3 * b3[j];
        }
    }
    for (; i < a.rows(); ++i) {
        const double* __restrict__ bi = b.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            double* __restrict__ ck = c.row(k);
            for (std::size_t j = 0; j < n; ++j) ck[j] += aik * bi[j];
        }
    }
    return c;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols())
        throw std::invalid_argument("matmul_a_bt: column counts differ");
    DenseMatrix c(a.rows(), b.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) ci[j] = dot(ai, b.row(j), a.cols());
    }
    return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
    DenseMatrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

void softmax_inplace(double* row, std::size_t n) {
    double mx = row[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        row[j] = std::exp(row[j] - mx);
        sum += row[j];
    }
    const double inv = 1.0 / sum;
    for (std::size_t j = 0; j < n; ++j) row[j] *= inv;
}

DenseMatrix softmax_rows(const DenseMatrix& d) {
    if (d.empty()) throw std::invalid_argument("softmax_rows: empty matrix");
    DenseMatrix out = d;
    for (std::size_t i = 0; i < out.rows(); ++i) softmax_inplace(out.row(i), out.cols());
    return out;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[j] * b[j];
    return s;
}

double l2_norm(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

DenseMatrix permute_rows(const DenseMatrix& m, const std::vector<std::size_t>& perm) {
    if (perm.size() != m.rows()) throw std::invalid_argument("permute_rows: bad permutation size");
    DenseMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        std::copy(m.row(perm[i]), m.row(perm[i]) + m.cols(), out.row(i));
    return out;
}

}  // namespace cgl

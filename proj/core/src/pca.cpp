#include "cgl/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace cgl {

namespace {

// Cyclic Jacobi for symmetric matrices. a is destroyed; returns eigenvalues on
// the diagonal of a and accumulates rotations into v (columns = eigenvectors).
void jacobi_eigen(DenseMatrix& a, DenseMatrix& v) {
    const std::size_t n = a.rows();
    v = DenseMatrix::identity(n);
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
}

}  // namespace

DenseMatrix pca_project(const DenseMatrix& d, std::size_t k) {
    if (k > d.cols()) throw std::invalid_argument("pca_project: k exceeds input dimensionality");
    if (d.rows() < 2) throw std::invalid_argument("pca_project: need at least 2 rows");

    const std::size_t n = d.rows(), dim = d.cols();
    std::vector<double> mean(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) mean[j] += d(i, j);
    for (double& m : mean) m /= static_cast<double>(n);

    DenseMatrix centered(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < dim; ++j) centered(i, j) = d(i, j) - mean[j];

    DenseMatrix cov = matmul_at_b(centered, centered);
    cov.scale(1.0 / static_cast<double>(n - 1));

    DenseMatrix vecs;
    jacobi_eigen(cov, vecs);

    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    auto lex_less = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < dim; ++i) {
            if (vecs(i, a) != vecs(i, b)) return vecs(i, a) < vecs(i, b);
        }
        return false;
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cov(a, a) != cov(b, b)) return cov(a, a) > cov(b, b);
        return lex_less(a, b);
    });

    DenseMatrix basis(dim, k);
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t src = order[c];
        double sign = 0.0;
        for (std::size_t i = 0; i < dim && sign == 0.0; ++i) {
            if (vecs(i, src) > 1e-12) sign = 1.0;
            else if (vecs(i, src) < -1e-12) sign = -1.0;
        }
        if (sign == 0.0) sign = 1.0;
        for (std::size_t i = 0; i < dim; ++i) basis(i, c) = sign * vecs(i, src);
    }

    return matmul(centered, basis);
}

}  // namespace cgl

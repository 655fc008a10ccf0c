#include "cgl/loss.hpp"

#include <cmath>
#include <stdexcept>

namespace cgl {

void ContrastTuples::validate(std::size_t f_rows, std::size_t g_rows) const {
    if (seed_idx.empty()) throw std::invalid_argument("tuples: empty");
    if (pos_idx.size() != seed_idx.size() || neg_idx.size() != seed_idx.size())
        throw std::invalid_argument("tuples: index arrays differ in length");
    const std::size_t seed_limit = seed_source == SeedSource::GReps ? g_rows : f_rows;
    for (std::size_t t = 0; t < seed_idx.size(); ++t) {
        if (seed_idx[t] >= seed_limit || pos_idx[t] >= f_rows || neg_idx[t] >= f_rows)
            throw std::invalid_argument("tuples: index out of range at tuple " + std::to_string(t));
    }
}

double log_sigmoid(double t) {
    // ln sigma(t) = -softplus(-t) = min(t, 0) - log1p(exp(-|t|))
    return std::min(t, 0.0) - std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

namespace {

struct Score {
    double s;
    // d(score)/d(u) = cu_v * v + cu_u * u, and symmetrically for v.
    double cu_v, cu_u, cv_u, cv_v;
};

Score score_pair(const double* u, const double* v, std::size_t h, const ScoreMode& mode) {
    const double c = dot(u, v, h);
    if (mode.kind == ScoreMode::Kind::Dot) return {c, 1.0, 0.0, 1.0, 0.0};
    const double a = l2_norm(u, h), b = l2_norm(v, h);
    if (a == 0.0 || b == 0.0)
        throw std::invalid_argument("cosine score: zero-norm representation row");
    if (mode.temperature <= 0.0)
        throw std::invalid_argument("cosine score: temperature must be > 0");
    const double denom = a * b * mode.temperature;
    const double s = c / denom;
    return {s, 1.0 / denom, -s / (a * a), 1.0 / denom, -s / (b * b)};
}

}  // namespace

LossOutput nce_loss(const DenseMatrix& seeds, const DenseMatrix& pos, const DenseMatrix& neg,
                    const ScoreMode& mode) {
    const std::size_t m = seeds.rows(), h = seeds.cols();
    if (m == 0) throw std::invalid_argument("nce_loss: need at least one tuple");
    if (pos.rows() != m || neg.rows() != m || pos.cols() != h || neg.cols() != h)
        throw std::invalid_argument("nce_loss: row matrices disagree in shape");

    LossOutput out;
    DenseMatrix d_seeds(m, h), d_pos(m, h), d_neg(m, h);
    const double inv_m = 1.0 / static_cast<double>(m);
    double value = 0.0;

    for (std::size_t i = 0; i < m; ++i) {
        const double* u = seeds.row(i);

        const double* vp = pos.row(i);
        const Score sp = score_pair(u, vp, h, mode);
        value -= log_sigmoid(sp.s);
        const double gp = -inv_m * sigmoid(-sp.s);  // d(value)/d(s+)
        for (std::size_t j = 0; j < h; ++j) {
            d_seeds(i, j) += gp * (sp.cu_v * vp[j] + sp.cu_u * u[j]);
            d_pos(i, j) += gp * (sp.cv_u * u[j] + sp.cv_v * vp[j]);
        }

        const double* vn = neg.row(i);
        const Score sn = score_pair(u, vn, h, mode);
        value -= log_sigmoid(-sn.s);
        const double gn = inv_m * sigmoid(sn.s);  // d(value)/d(s-)
        for (std::size_t j = 0; j < h; ++j) {
            d_seeds(i, j) += gn * (sn.cu_v * vn[j] + sn.cu_u * u[j]);
            d_neg(i, j) += gn * (sn.cv_u * u[j] + sn.cv_v * vn[j]);
        }
    }

    out.value = value * inv_m;
    out.grads.emplace("seeds", std::move(d_seeds));
    out.grads.emplace("pos", std::move(d_pos));
    out.grads.emplace("neg", std::move(d_neg));
    return out;
}

LossOutput contrast_reg_loss(const DenseMatrix& z, const DenseMatrix& z_tilde,
                             const DenseMatrix& w_reg, const DenseMatrix& r) {
    const std::size_t n = z.rows(), h = z.cols();
    if (z_tilde.rows() != n || z_tilde.cols() != h)
        throw std::invalid_argument("contrast_reg_loss: z and z_tilde shapes differ");
    if (w_reg.rows() != h || w_reg.cols() != h)
        throw std::invalid_argument("contrast_reg_loss: w_reg must be H x H");
    if (r.rows() != 1 || r.cols() != h)
        throw std::invalid_argument("contrast_reg_loss: r must be 1 x H");

    // q = W_reg * r
    std::vector<double> q(h, 0.0);
    for (std::size_t i = 0; i < h; ++i) q[i] = dot(w_reg.row(i), r.row(0), h);

    DenseMatrix d_z(n, h), d_zt(n, h);
    // dW_reg = u * r^T with u accumulated over both terms
    std::vector<double> u(h, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    double value = 0.0;

    for (std::size_t x = 0; x < n; ++x) {
        const double s = dot(z.row(x), q.data(), h);
        value -= log_sigmoid(s);
        const double g = -inv_n * sigmoid(-s);  // d(value)/d(s)
        for (std::size_t j = 0; j < h; ++j) {
            d_z(x, j) = g * q[j];
            u[j] += g * z(x, j);
        }

        const double st = dot(z_tilde.row(x), q.data(), h);
        value -= log_sigmoid(-st);
        const double gt = inv_n * sigmoid(st);
        for (std::size_t j = 0; j < h; ++j) {
            d_zt(x, j) = gt * q[j];
            u[j] += gt * z_tilde(x, j);
        }
    }

    DenseMatrix d_w_reg(h, h);
    for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < h; ++j) d_w_reg(i, j) = u[i] * r(0, j);

    LossOutput out;
    out.value = value * inv_n;
    out.grads.emplace("z", std::move(d_z));
    out.grads.emplace("z_tilde", std::move(d_zt));
    out.grads.emplace("w_reg", std::move(d_w_reg));
    return out;
}

LossOutput total_loss(const LossOutput& nce, const LossOutput& reg, double lambda_reg) {
    if (lambda_reg < 0.0) throw std::invalid_argument("total_loss: lambda_reg must be >= 0");
    if (lambda_reg == 0.0) return nce;
    LossOutput out = nce;
    out.value += lambda_reg * reg.value;
    for (const auto& [key, grad] : reg.grads) {
        auto it = out.grads.find(key);
        if (it == out.grads.end()) {
            DenseMatrix scaled = grad;
            scaled.scale(lambda_reg);
            out.grads.emplace(key, std::move(scaled));
        } else {
            it->second.add_scaled(grad, lambda_reg);
        }
    }
    return out;
}

}  // namespace cgl

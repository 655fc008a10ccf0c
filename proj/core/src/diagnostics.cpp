#include "cgl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cgl {

NormStats norm_stats(const DenseMatrix& z) {
    if (z.rows() == 0) throw std::invalid_argument("norm_stats: empty matrix");
    const std::size_t n = z.rows();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) norms[i] = l2_norm(z.row(i), z.cols());
    NormStats s;
    for (double v : norms) s.mean += v;
    s.mean /= static_cast<double>(n);
    if (n > 1) {
        double ss = 0.0;
        for (double v : norms) ss += (v - s.mean) * (v - s.mean);
        s.variance = ss / static_cast<double>(n - 1);
    }
    return s;
}

namespace {

constexpr std::size_t kPairAttemptFactor = 1000;

std::vector<std::vector<std::size_t>> class_members(const std::vector<int>& labels) {
    int max_label = -1;
    for (int c : labels) max_label = std::max(max_label, c);
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(max_label + 1));
    for (std::size_t i = 0; i < labels.size(); ++i)
        members[static_cast<std::size_t>(labels[i])].push_back(i);
    return members;
}

/// Draws a same-class pair (i, j), i != j.
std::pair<std::size_t, std::size_t> draw_same_class_pair(
    const std::vector<int>& labels, const std::vector<std::vector<std::size_t>>& members,
    Prng& rng, bool class_uniform) {
    if (class_uniform) {
        std::vector<std::size_t> eligible;
        for (std::size_t c = 0; c < members.size(); ++c)
            if (members[c].size() >= 2) eligible.push_back(c);
        if (eligible.empty())
            throw std::runtime_error("mu_ratio: no class has two members to pair");
        const auto& m = members[eligible[rng.next_below(eligible.size())]];
        const std::size_t a = rng.next_below(m.size());
        std::size_t b = rng.next_below(m.size() - 1);
        if (b >= a) ++b;
        return {m[a], m[b]};
    }
    const std::size_t n = labels.size();
    for (std::size_t attempt = 0; attempt < kPairAttemptFactor; ++attempt) {
        const std::size_t i = rng.next_below(n);
        const std::size_t j = rng.next_below(n);
        if (i != j && labels[i] == labels[j]) return {i, j};
    }
    throw std::runtime_error("mu_ratio: could not sample a same-class pair "
                             "(every class may have a single member)");
}

std::pair<std::size_t, std::size_t> draw_diff_class_pair(const std::vector<int>& labels,
                                                         Prng& rng) {
    const std::size_t n = labels.size();
    for (std::size_t attempt = 0; attempt < kPairAttemptFactor; ++attempt) {
        const std::size_t i = rng.next_below(n);
        const std::size_t j = rng.next_below(n);
        if (labels[i] != labels[j]) return {i, j};
    }
    throw std::runtime_error("mu_ratio: could not sample a different-class pair");
}

void require_two_classes(const DenseMatrix& z, const std::vector<int>& labels,
                         std::size_t num_pairs) {
    if (labels.size() != z.rows()) throw std::invalid_argument("labels length mismatch");
    if (num_pairs == 0) throw std::invalid_argument("num_pairs must be >= 1");
    int first = labels.empty() ? -1 : labels[0];
    bool two = false;
    for (int c : labels)
        if (c != first) {
            two = true;
            break;
        }
    if (!two) throw std::invalid_argument("need at least 2 classes present");
}

}  // namespace

MuRatio mu_ratio(const DenseMatrix& z, const std::vector<int>& labels, Prng& rng,
                 std::size_t num_pairs, bool class_uniform) {
    require_two_classes(z, labels, num_pairs);
    const auto members = class_members(labels);
    const std::size_t h = z.cols();

    MuRatio out;
    for (std::size_t s = 0; s < num_pairs; ++s) {
        const auto [i, j] = draw_same_class_pair(labels, members, rng, class_uniform);
        out.mu_plus += std::abs(dot(z.row(i), z.row(j), h));
    }
    out.mu_plus /= static_cast<double>(num_pairs);
    for (std::size_t s = 0; s < num_pairs; ++s) {
        const auto [i, j] = draw_diff_class_pair(labels, rng);
        out.mu_minus += std::abs(dot(z.row(i), z.row(j), h));
    }
    out.mu_minus /= static_cast<double>(num_pairs);
    out.ratio = out.mu_minus == 0.0 ? std::numeric_limits<double>::infinity()
                                    : out.mu_plus / out.mu_minus;
    return out;
}

double s_f_estimate(const DenseMatrix& z, const std::vector<int>& labels, Prng& rng,
                    std::size_t num_pairs, bool class_uniform) {
    require_two_classes(z, labels, num_pairs);
    const auto members = class_members(labels);
    double acc = 0.0;
    for (std::size_t s = 0; s < num_pairs; ++s) {
        const auto [i, j] = draw_same_class_pair(labels, members, rng, class_uniform);
        const double d = dot(z.row(i), z.row(j), z.cols());
        acc += d * d;
    }
    return 4.0 * std::sqrt(acc / static_cast<double>(num_pairs));
}

Lemma4Result verify_lemma4(const Lemma4Config& cfg) {
    if (cfg.tau <= 0.0 || cfg.tau > 1.0) throw std::invalid_argument("verify_lemma4: tau in (0,1]");
    if (cfg.c_sq < 0.0) throw std::invalid_argument("verify_lemma4: c_sq >= 0");
    if (cfg.n_samples < 2) throw std::invalid_argument("verify_lemma4: need n_samples >= 2");

    Prng rng(cfg.seed);
    auto draw_x = [&]() -> double {
        if (cfg.dist == Lemma4Config::Dist::UniformRange) {
            if (cfg.dist_lo < 1.5)
                throw std::invalid_argument("verify_lemma4: uniform lower bound below 1.5");
            if (cfg.dist_param < cfg.dist_lo)
                throw std::invalid_argument("verify_lemma4: uniform upper bound below its lower bound");
            return cfg.dist_lo + (cfg.dist_param - cfg.dist_lo) * rng.next_f64();
        }
        if (cfg.dist_param <= 0.0)
            throw std::invalid_argument("verify_lemma4: exponential rate must be > 0");
        return 1.5 - std::log(rng.next_f64_open_closed()) / cfg.dist_param;
    };

    // Welford accumulators, both transforms on common draws
    double mean_w = 0.0, m2_w = 0.0, mean_o = 0.0, m2_o = 0.0;
    for (std::size_t i = 1; i <= cfg.n_samples; ++i) {
        const double x = draw_x();
        const double perturbed = x + cfg.tau / (1.0 + std::exp(x));
        const double gw = std::sqrt(perturbed * perturbed + cfg.c_sq);
        const double go = std::sqrt(x * x + cfg.c_sq);
        const double dw = gw - mean_w;
        mean_w += dw / static_cast<double>(i);
        m2_w += dw * (gw - mean_w);
        const double do_ = go - mean_o;
        mean_o += do_ / static_cast<double>(i);
        m2_o += do_ * (go - mean_o);
    }

    Lemma4Result res;
    res.var_with = m2_w / static_cast<double>(cfg.n_samples - 1);
    res.var_without = m2_o / static_cast<double>(cfg.n_samples - 1);
    res.equal = res.var_with == res.var_without;
    res.holds = res.var_with < res.var_without;
    return res;
}

GradcheckResult gradcheck(const Graph& g, const TrainConfig& cfg, double epsilon) {
    if (g.num_nodes > 10)
        throw std::invalid_argument("gradcheck: only graphs with <= 10 nodes are accepted");
    if (epsilon <= 0.0) throw std::invalid_argument("gradcheck: epsilon must be > 0");

    const SparseMatrixCsr a_hat = normalized_adjacency(g);
    Prng rng(cfg.seed);
    ModelParams params = init_params(rng, g.features.cols(), cfg.hidden_dim,
                                     cfg.strategy.kind == StrategyKind::ML);

    // Record one epoch's randomness exactly as the training loop would.
    EncodeOut clean = encode(a_hat, g.features, params);
    StackedOut stacked;
    const bool is_ml = cfg.strategy.kind == StrategyKind::ML;
    if (is_ml) stacked = encode_stacked(a_hat, clean.z, params);
    CurriculumState cur;
    const EpochDraw draw =
        draw_epoch(g, clean.z, is_ml ? &stacked.g : nullptr, 1, cur, cfg, rng);

    GradcheckResult res;

    // Kink scan: pre-activations too close to the PReLU corner make the
    // central difference straddle a nondifferentiable point.
    auto scan_kink = [&](const DenseMatrix& pre) {
        for (double v : pre.data())
            if (std::abs(v) < 10.0 * epsilon) res.kink = true;
    };
    scan_kink(clean.cache.pre);
    if (is_ml) scan_kink(stacked.cache.pre);
    if (cfg.reg_enabled) {
        const DenseMatrix x_tilde = permute_rows(g.features, draw.perm);
        scan_kink(encode(a_hat, x_tilde, params).cache.pre);
    }

    const EpochEval analytic =
        evaluate_epoch(g, a_hat, params, cfg, draw, true, &clean, is_ml ? &stacked : nullptr);

    auto loss_at = [&]() {
        return evaluate_epoch(g, a_hat, params, cfg, draw, false).total;
    };
    auto check_scalar = [&](double& theta, double analytic_grad) {
        const double saved = theta;
        theta = saved + epsilon;
        const double up = loss_at();
        theta = saved - epsilon;
        const double down = loss_at();
        theta = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double err = std::abs(analytic_grad - numeric) /
                           std::max({1.0, std::abs(analytic_grad), std::abs(numeric)});
        res.max_rel_err = std::max(res.max_rel_err, err);
    };
    auto check_tensor = [&](DenseMatrix& theta, const DenseMatrix& grad) {
        for (std::size_t i = 0; i < theta.size(); ++i)
            check_scalar(theta.data()[i], grad.data()[i]);
    };

    check_tensor(params.w_enc, analytic.grads.d_w_enc);
    check_scalar(params.prelu_slope, analytic.grads.d_slope);
    if (is_ml) {
        check_tensor(params.w_stack, analytic.grads.d_w_stack);
        check_scalar(params.prelu_slope_stack, analytic.grads.d_slope_stack);
    }
    check_tensor(params.w_reg, analytic.grads.d_w_reg);
    return res;
}

}  // namespace cgl

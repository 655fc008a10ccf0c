#include "cgl/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cgl/pca.hpp"
#include "cgl/prng.hpp"

namespace cgl {

EvalReport make_report(std::string task, std::vector<double> values) {
    EvalReport r;
    r.task = std::move(task);
    r.values = std::move(values);
    if (r.values.empty()) throw std::invalid_argument("make_report: no values");
    r.mean = std::accumulate(r.values.begin(), r.values.end(), 0.0) /
             static_cast<double>(r.values.size());
    if (r.values.size() > 1) {
        double ss = 0.0;
        for (double v : r.values) ss += (v - r.mean) * (v - r.mean);
        r.stddev = std::sqrt(ss / static_cast<double>(r.values.size() - 1));
    }
    return r;
}

namespace {

// Softmax cross-entropy objective of the probe; W is (H+1) x C with the last
// input column fixed at 1 (bias). L2 excludes the bias row.
struct ProbeObjective {
    const DenseMatrix& x;  // n x (H+1)
    const std::vector<int>& y;
    std::size_t classes;
    double l2;

    double loss(const DenseMatrix& w, DenseMatrix* grad) const {
        const std::size_t n = x.rows(), h1 = x.cols(), c = classes;
        DenseMatrix logits = matmul(x, w);
        double ce = 0.0;
        if (grad) *grad = DenseMatrix(h1, c, 0.0);
        std::vector<double> p(c);
        for (std::size_t i = 0; i < n; ++i) {
            std::copy(logits.row(i), logits.row(i) + c, p.data());
            softmax_inplace(p.data(), c);
            ce -= std::log(std::max(p[static_cast<std::size_t>(y[i])], 1e-300));
            if (grad) {
                p[static_cast<std::size_t>(y[i])] -= 1.0;
                for (std::size_t k = 0; k < h1; ++k) {
                    const double xik = x(i, k);
                    if (xik == 0.0) continue;
                    double* gk = grad->row(k);
                    for (std::size_t j = 0; j < c; ++j) gk[j] += xik * p[j];
                }
            }
        }
        ce /= static_cast<double>(n);
        double reg = 0.0;
        for (std::size_t k = 0; k + 1 < h1; ++k)  // bias row exempt
            for (std::size_t j = 0; j < c; ++j) reg += w(k, j) * w(k, j);
        if (grad) {
            grad->scale(1.0 / static_cast<double>(n));
            for (std::size_t k = 0; k + 1 < h1; ++k)
                for (std::size_t j = 0; j < c; ++j) (*grad)(k, j) += l2 * w(k, j);
        }
        return ce + 0.5 * l2 * reg;
    }
};

DenseMatrix augment_rows(const DenseMatrix& z, const std::vector<std::size_t>& idx) {
    DenseMatrix out(idx.size(), z.cols() + 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        std::copy(z.row(idx[i]), z.row(idx[i]) + z.cols(), out.row(i));
        out(i, z.cols()) = 1.0;
    }
    return out;
}

double grad_norm(const DenseMatrix& g) {
    return l2_norm(g.data().data(), g.size());
}

}  // namespace

double linear_probe(const DenseMatrix& z, const std::vector<int>& labels,
                    const NodeSplits& splits, const ProbeConfig& cfg) {
    if (splits.train.empty() || splits.test.empty())
        throw std::invalid_argument("linear_probe: empty train or test split");
    if (labels.size() != z.rows()) throw std::invalid_argument("linear_probe: labels length mismatch");

    const std::size_t classes =
        static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
    const DenseMatrix x_train = augment_rows(z, splits.train);
    std::vector<int> y_train(splits.train.size());
    for (std::size_t i = 0; i < splits.train.size(); ++i) y_train[i] = labels[splits.train[i]];

    const ProbeObjective obj{x_train, y_train, classes, cfg.l2};
    DenseMatrix w(z.cols() + 1, classes, 0.0);
    DenseMatrix grad;
    obj.loss(w, &grad);

    // plain full-batch gradient descent at a fixed step; the probe budget is
    // part of the evaluation protocol, not a quantity to adapt per input
    for (std::size_t iter = 0; iter < cfg.max_iters; ++iter) {
        if (grad_norm(grad) < cfg.grad_tol) break;
        w.add_scaled(grad, -cfg.lr);
        if (!w.all_finite()) {
            w.add_scaled(grad, cfg.lr);  // keep the last finite iterate
            break;
        }
        obj.loss(w, &grad);
    }

    const DenseMatrix x_test = augment_rows(z, splits.test);
    const DenseMatrix logits = matmul(x_test, w);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < splits.test.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < classes; ++j)
            if (logits(i, j) > logits(i, best)) best = j;
        if (static_cast<int>(best) == labels[splits.test[i]]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(splits.test.size());
}

namespace {

double sq_dist(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

}  // namespace

KmeansResult kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = points.rows(), dim = points.cols();
    if (k == 0 || k > n) throw std::invalid_argument("kmeans: need 1 <= k <= points");
    Prng rng(seed);

    // k-means++ seeding
    DenseMatrix centers(k, dim);
    std::vector<double> d2(n, std::numeric_limits<double>::max());
    {
        const std::size_t first = rng.next_below(n);
        std::copy(points.row(first), points.row(first) + dim, centers.row(0));
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], sq_dist(points.row(i), centers.row(c - 1), dim));
                total += d2[i];
            }
            std::size_t pick;
            if (total <= 0.0) {
                pick = rng.next_below(n);  // all points coincide with a center
            } else {
                const double target = rng.next_f64() * total;
                double acc = 0.0;
                pick = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            }
            std::copy(points.row(pick), points.row(pick) + dim, centers.row(c));
        }
    }

    KmeansResult res;
    res.assignments.assign(n, 0);
    std::vector<std::size_t> counts(k);
    constexpr std::size_t kMaxIters = 300;

    for (std::size_t iter = 1; iter <= kMaxIters; ++iter) {
        res.iterations = iter;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = sq_dist(points.row(i), centers.row(0), dim);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = sq_dist(points.row(i), centers.row(c), dim);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignments[i] != best) {
                res.assignments[i] = best;
                changed = true;
            }
        }

        centers.fill(0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            centers.axpy_row(res.assignments[i], 1.0, points, i);
            ++counts[res.assignments[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (std::size_t j = 0; j < dim; ++j) centers(c, j) *= inv;
        }
        // re-seed any emptied cluster to the farthest point from its center
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double d = sq_dist(points.row(i), centers.row(res.assignments[i]), dim);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            std::copy(points.row(far), points.row(far) + dim, centers.row(c));
            changed = true;
        }

        if (!changed && iter > 1) break;
    }

    res.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        res.inertia += sq_dist(points.row(i), centers.row(res.assignments[i]), dim);
    return res;
}

std::vector<std::size_t> hungarian_max_assignment(const DenseMatrix& profit) {
    // Classic potentials-based assignment on the padded square cost matrix.
    const std::size_t nr = profit.rows(), nc = profit.cols();
    const std::size_t n = std::max(nr, nc);
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // cost = -profit (minimization), padding with 0
    auto cost = [&](std::size_t i, std::size_t j) -> double {
        return (i < nr && j < nc) ? -profit(i, j) : 0.0;
    };

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0);  // column -> row (1-based)
    for (std::size_t i = 1; i <= n; ++i) {
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        std::vector<std::size_t> way(n + 1, 0);
        std::size_t j0 = 0;
        match[0] = i;
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<std::size_t> row_to_col(nr, static_cast<std::size_t>(-1));
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= nr && j <= nc) row_to_col[i - 1] = j - 1;
    }
    return row_to_col;
}

ClusteringMetrics clustering_metrics(const std::vector<std::size_t>& pred,
                                     const std::vector<int>& truth) {
    if (pred.size() != truth.size()) throw std::invalid_argument("clustering_metrics: length mismatch");
    if (pred.empty()) throw std::invalid_argument("clustering_metrics: empty input");
    const std::size_t n = pred.size();
    const std::size_t kp = *std::max_element(pred.begin(), pred.end()) + 1;
    const std::size_t kt =
        static_cast<std::size_t>(*std::max_element(truth.begin(), truth.end())) + 1;

    DenseMatrix cont(kp, kt, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        cont(pred[i], static_cast<std::size_t>(truth[i])) += 1.0;

    const std::vector<std::size_t> mapping = hungarian_max_assignment(cont);

    ClusteringMetrics m;
    double matched = 0.0;
    for (std::size_t p = 0; p < kp; ++p)
        if (mapping[p] != static_cast<std::size_t>(-1)) matched += cont(p, mapping[p]);
    m.acc = matched / static_cast<double>(n);

    // NMI with natural logs
    std::vector<double> np(kp, 0.0), nt(kt, 0.0);
    for (std::size_t p = 0; p < kp; ++p)
        for (std::size_t t = 0; t < kt; ++t) {
            np[p] += cont(p, t);
            nt[t] += cont(p, t);
        }
    double hp = 0.0, ht = 0.0, mi = 0.0;
    const double dn = static_cast<double>(n);
    for (std::size_t p = 0; p < kp; ++p)
        if (np[p] > 0) hp -= np[p] / dn * std::log(np[p] / dn);
    for (std::size_t t = 0; t < kt; ++t)
        if (nt[t] > 0) ht -= nt[t] / dn * std::log(nt[t] / dn);
    for (std::size_t p = 0; p < kp; ++p)
        for (std::size_t t = 0; t < kt; ++t) {
            const double c = cont(p, t);
            if (c > 0) mi += c / dn * std::log(dn * c / (np[p] * nt[t]));
        }
    m.nmi = (hp > 0.0 && ht > 0.0) ? mi / std::sqrt(hp * ht) : 0.0;

    // macro F1 over true classes after the optimal mapping
    double f1_sum = 0.0;
    std::size_t class_count = 0;
    for (std::size_t t = 0; t < kt; ++t) {
        if (nt[t] == 0) continue;
        ++class_count;
        double tp = 0.0, fp = 0.0;
        for (std::size_t p = 0; p < kp; ++p) {
            if (mapping[p] != t) continue;
            tp += cont(p, t);
            fp += np[p] - cont(p, t);
        }
        const double fn = nt[t] - tp;
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        f1_sum += (prec + rec > 0) ? 2.0 * prec * rec / (prec + rec) : 0.0;
    }
    m.f1_macro = class_count ? f1_sum / static_cast<double>(class_count) : 0.0;
    return m;
}

ClusteringEval eval_clustering(const DenseMatrix& z, const std::vector<int>& labels,
                               std::size_t k, std::size_t pca_dim,
                               const std::vector<std::uint64_t>& seeds) {
    if (labels.size() != z.rows()) throw std::invalid_argument("eval_clustering: labels mismatch");
    if (seeds.empty()) throw std::invalid_argument("eval_clustering: need at least one seed");

    const DenseMatrix projected = pca_project(z, std::min(pca_dim, z.cols()));

    auto run_variant = [&](const DenseMatrix& pts, const std::string& tag) {
        std::vector<double> accs, nmis, f1s;
        for (std::uint64_t s : seeds) {
            const KmeansResult km = kmeans(pts, k, s);
            const ClusteringMetrics m = clustering_metrics(km.assignments, labels);
            accs.push_back(m.acc);
            nmis.push_back(m.nmi);
            f1s.push_back(m.f1_macro);
        }
        ClusteringVariant v;
        v.acc = make_report(tag + "/acc", std::move(accs));
        v.nmi = make_report(tag + "/nmi", std::move(nmis));
        v.f1 = make_report(tag + "/f1", std::move(f1s));
        return v;
    };

    ClusteringEval out;
    out.raw = run_variant(z, "cluster-raw");
    out.pca = run_variant(projected, "cluster-pca");
    out.pca_better = out.pca.acc.mean > out.raw.acc.mean;
    return out;
}

double link_auc(const DenseMatrix& z,
                const std::vector<std::pair<std::size_t, std::size_t>>& pos_edges,
                const std::vector<std::pair<std::size_t, std::size_t>>& neg_edges) {
    if (pos_edges.empty() || neg_edges.empty())
        throw std::invalid_argument("link_auc: empty edge list");
    std::vector<std::pair<double, int>> scored;  // (score, is_positive)
    scored.reserve(pos_edges.size() + neg_edges.size());
    for (auto [u, v] : pos_edges) scored.emplace_back(dot(z.row(u), z.row(v), z.cols()), 1);
    for (auto [u, v] : neg_edges) scored.emplace_back(dot(z.row(u), z.row(v), z.cols()), 0);
    std::sort(scored.begin(), scored.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // rank-sum with average ranks over ties
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < scored.size()) {
        std::size_t j = i;
        while (j < scored.size() && scored[j].first == scored[i].first) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t t = i; t < j; ++t)
            if (scored[t].second) rank_sum_pos += avg_rank;
        i = j;
    }
    const double m = static_cast<double>(pos_edges.size());
    const double n = static_cast<double>(neg_edges.size());
    return (rank_sum_pos - m * (m + 1.0) / 2.0) / (m * n);
}

}  // namespace cgl

#include "cgl/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cgl {

std::vector<double> entropy_scores(const DenseMatrix& z) {
    const std::size_t n = z.rows(), h = z.cols();
    if (n == 0) throw std::invalid_argument("entropy_scores: empty matrix");
    std::vector<double> entropy(n, 0.0);
    constexpr std::size_t kBlock = 256;
    std::vector<double> row(n);
    for (std::size_t i0 = 0; i0 < n; i0 += kBlock) {
        const std::size_t i1 = std::min(i0 + kBlock, n);
        for (std::size_t i = i0; i < i1; ++i) {
            const double* zi = z.row(i);
            for (std::size_t j = 0; j < n; ++j) row[j] = dot(zi, z.row(j), h);
            softmax_inplace(row.data(), n);
            double e = 0.0;
            for (std::size_t j = 0; j < n; ++j) e -= row[j] * std::log(row[j]);
            entropy[i] = e;
        }
    }
    return entropy;
}

const std::vector<std::size_t>& lc_seed_select(const DenseMatrix& z, std::size_t epoch,
                                               CurriculumState& state,
                                               const StrategyConfig& cfg) {
    const std::size_t r = cfg.r_rounds;
    if (r == 0 || cfg.total_epochs == 0)
        throw std::invalid_argument("lc_seed_select: R and e must be >= 1");
    const bool refresh = !state.valid || (epoch % r) == (1 % r);
    if (!refresh) return state.cached_seeds;

    const std::size_t n = z.rows();
    const double frac = static_cast<double>(epoch / r + 1) * static_cast<double>(r) /
                        static_cast<double>(cfg.total_epochs);
    const std::size_t m =
        std::min(n, static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n))));

    const std::vector<double> entropy = entropy_scores(z);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (entropy[a] != entropy[b]) return entropy[a] < entropy[b];
        return a < b;
    });
    order.resize(std::max<std::size_t>(m, 1));
    std::sort(order.begin(), order.end());
    state.cached_seeds = std::move(order);
    state.valid = true;
    return state.cached_seeds;
}

ContrastTuples lc_contrast(const DenseMatrix& z, const Graph& g,
                           const std::vector<std::size_t>& seeds, std::size_t k, Prng& rng) {
    if (seeds.empty()) throw std::invalid_argument("lc_contrast: empty seed set");
    const std::size_t n = g.num_nodes, h = z.cols();
    ContrastTuples tuples;
    tuples.seed_source = SeedSource::FReps;
    tuples.seed_idx.reserve(seeds.size());

    std::vector<std::pair<double, std::size_t>> scored;
    for (const std::size_t i : seeds) {
        std::size_t pos;
        const std::size_t deg = g.adjacency.row_degree(i);
        if (deg == 0) {
            pos = i;  // isolated: self is the only neighbor-free positive
        } else {
            scored.clear();
            for (std::size_t p = g.adjacency.row_ptr[i]; p < g.adjacency.row_ptr[i + 1]; ++p) {
                const std::size_t j = g.adjacency.col_idx[p];
                scored.emplace_back(dot(z.row(i), z.row(j), h), j);
            }
            const std::size_t pool = std::min(k, deg);
            std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(pool),
                              scored.end(), [](const auto& a, const auto& b) {
                                  if (a.first != b.first) return a.first > b.first;
                                  return a.second < b.second;
                              });
            pos = scored[rng.next_below(pool)].second;
        }
        tuples.seed_idx.push_back(i);
        tuples.pos_idx.push_back(pos);
        tuples.neg_idx.push_back(rng.next_below(n));
    }
    return tuples;
}

ContrastTuples ml_contrast(const DenseMatrix& z, const DenseMatrix& g_reps, Prng& rng) {
    if (z.rows() != g_reps.rows())
        throw std::invalid_argument("ml_contrast: representation row counts differ");
    const std::size_t n = z.rows();
    ContrastTuples tuples;
    tuples.seed_source = SeedSource::GReps;
    tuples.seed_idx.resize(n);
    tuples.pos_idx.resize(n);
    tuples.neg_idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        tuples.seed_idx[i] = i;
        tuples.pos_idx[i] = i;
        tuples.neg_idx[i] = rng.next_below(n);
    }
    return tuples;
}

ContrastTuples co_contrast(const Graph& g, Prng& rng, std::size_t num_samples) {
    std::vector<std::size_t> non_isolated;
    for (std::size_t i = 0; i < g.num_nodes; ++i)
        if (g.adjacency.row_degree(i) > 0) non_isolated.push_back(i);
    if (non_isolated.empty()) throw std::invalid_argument("co_contrast: graph has no edges");
    if (num_samples == 0) throw std::invalid_argument("co_contrast: num_samples must be >= 1");

    constexpr std::size_t kMaxRetries = 200;
    ContrastTuples tuples;
    tuples.seed_source = SeedSource::FReps;
    for (std::size_t s = 0; s < num_samples; ++s) {
        const std::size_t seed = non_isolated[rng.next_below(non_isolated.size())];
        const std::size_t deg = g.adjacency.row_degree(seed);
        const std::size_t pos =
            g.adjacency.col_idx[g.adjacency.row_ptr[seed] + rng.next_below(deg)];

        std::size_t neg = g.num_nodes;
        for (std::size_t attempt = 0; attempt < kMaxRetries; ++attempt) {
            const std::size_t cand = rng.next_below(g.num_nodes);
            if (cand != seed && !g.adjacency.has_entry(seed, cand)) {
                neg = cand;
                break;
            }
        }
        if (neg == g.num_nodes) {
            // Rejection exhausted; fall back to the explicit candidate set.
            std::vector<std::size_t> valid;
            for (std::size_t cand = 0; cand < g.num_nodes; ++cand)
                if (cand != seed && !g.adjacency.has_entry(seed, cand)) valid.push_back(cand);
            if (valid.empty())
                throw std::runtime_error("co_contrast: node " + std::to_string(seed) +
                                         " is adjacent to every other node, no negative exists");
            neg = valid[rng.next_below(valid.size())];
        }

        tuples.seed_idx.push_back(seed);
        tuples.pos_idx.push_back(pos);
        tuples.neg_idx.push_back(neg);
    }
    return tuples;
}

}  // namespace cgl

#pragma once

#include <cstddef>
#include <vector>

#include "cgl/graph.hpp"
#include "cgl/loss.hpp"
#include "cgl/prng.hpp"

namespace cgl {

enum class StrategyKind { LC, ML, CO };

struct StrategyConfig {
    StrategyKind kind = StrategyKind::ML;
    std::size_t r_rounds = 30;      // LC: curriculum update period R
    std::size_t k_candidates = 5;   // LC: positive-candidate pool size k
    std::size_t total_epochs = 300; // e, used by the LC seed-count schedule
    std::size_t co_samples = 0;     // CO: tuples per epoch, 0 = edge count
};

/// Cached LC seed set; valid within one curriculum round.
struct CurriculumState {
    std::vector<std::size_t> cached_seeds;
    bool valid = false;
};

/// Per-node entropy of the softmax-normalized similarity profile:
///   p_i = softmax_j(z_i . z_j),  H(i) = -sum_j p_ij ln p_ij.
/// Runs in row blocks; each H(i) lies in [0, ln N].
std::vector<double> entropy_scores(const DenseMatrix& z);

/// Curriculum seed selection. Recomputes entropies only at the first epoch of
/// each round (epoch == 1 mod R) and returns
///   m = min(N, ceil((floor(epoch/R)+1) * (R/e) * N))
/// nodes of smallest entropy, ties broken by ascending node id. Other epochs
/// return the cached set unchanged.
const std::vector<std::size_t>& lc_seed_select(const DenseMatrix& z, std::size_t epoch,
                                               CurriculumState& state, const StrategyConfig& cfg);

/// For each seed, the positive is drawn uniformly from its min(k, degree)
/// neighbors with the largest similarity score; an isolated seed uses itself.
/// The negative is drawn uniformly from all nodes.
ContrastTuples lc_contrast(const DenseMatrix& z, const Graph& g,
                           const std::vector<std::size_t>& seeds, std::size_t k, Prng& rng);

/// One tuple per node: (g-representation of i, f-representation of i, random
/// node's f-representation).
ContrastTuples ml_contrast(const DenseMatrix& z, const DenseMatrix& g_reps, Prng& rng);

/// Proximity tuples: seed uniform over non-isolated nodes, positive uniform
/// over its neighbors, negative uniform over non-adjacent non-self nodes.
/// A seed adjacent to every other node makes negative sampling fail.
ContrastTuples co_contrast(const Graph& g, Prng& rng, std::size_t num_samples);

}  // namespace cgl

#pragma once

#include <cstdint>
#include <vector>

#include "cgl/dense.hpp"
#include "cgl/graph.hpp"
#include "cgl/prng.hpp"
#include "cgl/trainer.hpp"

namespace cgl {

struct NormStats {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance of row norms
};

NormStats norm_stats(const DenseMatrix& z);

struct MuRatio {
    double mu_plus = 0.0;
    double mu_minus = 0.0;
    double ratio = 0.0;  // +inf sentinel when mu_minus is 0
};

/// Mean absolute inner product over sampled same-class pairs (mu_plus) and
/// different-class pairs (mu_minus), i != j throughout. With class_uniform,
/// the same-class pair's class is drawn uniformly over classes first;
/// otherwise pairs are uniform over all same-class pairs.
MuRatio mu_ratio(const DenseMatrix& z, const std::vector<int>& labels, Prng& rng,
                 std::size_t num_pairs, bool class_uniform = false);

/// 4 * sqrt(E[(z_i . z_j)^2]) over sampled same-class pairs: the
/// class-collision scale of the generalization bound.
double s_f_estimate(const DenseMatrix& z, const std::vector<int>& labels, Prng& rng,
                    std::size_t num_pairs, bool class_uniform = false);

struct Lemma4Config {
    double tau = 1.0;    // in (0, 1]
    double c_sq = 1.0;   // >= 0
    std::size_t n_samples = 100000;
    enum class Dist { UniformRange, ShiftedExponential } dist = Dist::UniformRange;
    double dist_param = 6.0;  // upper bound b for uniform[lo, b]; rate for the exponential
    double dist_lo = 1.5;     // uniform lower bound, never below the domain floor 1.5
    std::uint64_t seed = 0;
};

struct Lemma4Result {
    double var_with = 0.0;     // Var(sqrt((X + tau/(1+e^X))^2 + c^2))
    double var_without = 0.0;  // Var(sqrt(X^2 + c^2))
    bool holds = false;        // var_with < var_without
    bool equal = false;        // exact tie (degenerate input)
};

/// Monte-Carlo check of the variance-reduction inequality for X in [1.5, inf).
/// Both transforms are evaluated on the same draws.
Lemma4Result verify_lemma4(const Lemma4Config& cfg);

struct GradcheckResult {
    double max_rel_err = 0.0;
    bool kink = false;  // some pre-activation sits on the PReLU kink
};

/// Central-difference check of every trainable scalar against the analytic
/// gradient of the full epoch loss, with tuples, permutation and r frozen to
/// one recorded draw. Only graphs with at most 10 nodes are accepted.
GradcheckResult gradcheck(const Graph& g, const TrainConfig& cfg, double epsilon);

}  // namespace cgl

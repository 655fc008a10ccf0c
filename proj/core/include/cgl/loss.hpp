#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cgl/dense.hpp"

namespace cgl {

/// Which representation matrix the seed indices of a tuple set address.
/// Positive and negative indices always address the f-level representations.
enum class SeedSource { FReps, GReps };

/// Index triples (seed, positive, negative) produced by a contrast strategy.
struct ContrastTuples {
    std::vector<std::size_t> seed_idx, pos_idx, neg_idx;
    SeedSource seed_source = SeedSource::FReps;

    std::size_t size() const { return seed_idx.size(); }

    /// Checks equal lengths >= 1 and index ranges against the addressed
    /// matrices' row counts.
    void validate(std::size_t f_rows, std::size_t g_rows) const;
};

struct ScoreMode {
    enum class Kind { Dot, Cosine } kind = Kind::Dot;
    double temperature = 1.0;  // cosine only, > 0

    static ScoreMode dot() { return {}; }
    static ScoreMode cosine(double t) { return {Kind::Cosine, t}; }
};

/// Loss value plus exact gradients keyed per input matrix.
struct LossOutput {
    double value = 0.0;
    std::map<std::string, DenseMatrix> grads;
};

/// Binary NCE over M (seed, pos, neg) row triples:
///   -(1/M) sum_i [ln sigma(s_i+) + ln sigma(-s_i-)]
/// Dot mode scores by inner product; cosine mode by inner product over the
/// norms and temperature (a zero-norm row is an error there).
/// Gradient keys: "seeds", "pos", "neg".
LossOutput nce_loss(const DenseMatrix& seeds, const DenseMatrix& pos, const DenseMatrix& neg,
                    const ScoreMode& mode);

/// Contrastive regularizer over clean rows z and corrupted rows z_tilde:
///   -(1/N) sum_x [ln sigma(z_x . W r) + ln sigma(-z~_x . W r)]
/// with r a column of entries in (0,1] passed as a 1 x H matrix.
/// Gradient keys: "z", "z_tilde", "w_reg".
LossOutput contrast_reg_loss(const DenseMatrix& z, const DenseMatrix& z_tilde,
                             const DenseMatrix& w_reg, const DenseMatrix& r);

/// nce + lambda * reg over the value and every gradient buffer; buffers
/// present in both must agree in shape.
LossOutput total_loss(const LossOutput& nce, const LossOutput& reg, double lambda_reg);

/// Numerically stable ln(sigma(t)) and sigma(t).
double log_sigmoid(double t);
double sigmoid(double t);

}  // namespace cgl

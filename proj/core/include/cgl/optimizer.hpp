#pragma once

#include <optional>

#include "cgl/encoder.hpp"

namespace cgl {

struct LrDecay {
    double factor = 0.5;
    std::size_t every_n_epochs = 100;
};

/// Adam with bias correction and decoupled weight decay. Weight decay shrinks
/// the weight matrices before the Adam delta; PReLU slopes are exempt.
struct AdamState {
    double lr = 1e-3;
    double weight_decay = 0.0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::size_t t = 0;
    std::optional<LrDecay> decay;

    DenseMatrix m_w_enc, v_w_enc;
    double m_slope = 0.0, v_slope = 0.0;
    bool has_stack = false;
    DenseMatrix m_w_stack, v_w_stack;
    double m_slope_stack = 0.0, v_slope_stack = 0.0;
    DenseMatrix m_w_reg, v_w_reg;
};

AdamState make_adam_state(const ModelParams& p, double lr, double weight_decay,
                          std::optional<LrDecay> decay = std::nullopt);

/// One bias-corrected update. Throws on a non-finite gradient, naming the tensor.
void adam_step(ModelParams& params, const Gradients& grads, AdamState& state);

/// Multiplies lr by the configured factor at epochs congruent to 1 modulo the
/// period, skipping the very first epoch.
void maybe_decay_lr(AdamState& state, std::size_t epoch);

}  // namespace cgl

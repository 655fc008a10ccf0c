#pragma once

#include <optional>
#include <string>

#include "cgl/dense.hpp"
#include "cgl/prng.hpp"
#include "cgl/sparse.hpp"

namespace cgl {

/// All trainable tensors of the model.
///
/// w_enc drives the graph-convolution encoder f, w_stack the optional second
/// layer g stacked on f, and w_reg the bilinear weight of the regularizer.
/// PReLU slopes are single trainable scalars shared across hidden units.
struct ModelParams {
    DenseMatrix w_enc;  // F x H
    double prelu_slope = 0.25;
    bool has_stack = false;
    DenseMatrix w_stack;  // H x H, only when has_stack
    double prelu_slope_stack = 0.25;
    DenseMatrix w_reg;  // H x H

    std::size_t feature_dim() const { return w_enc.rows(); }
    std::size_t hidden_dim() const { return w_enc.cols(); }
    bool all_finite() const;
};

/// Glorot-uniform weights, PReLU slopes at 0.25.
ModelParams init_params(Prng& rng, std::size_t f_dim, std::size_t h_dim, bool with_stack);

/// Inputs and pre-activations retained by a forward pass for the backward pass.
struct ForwardCache {
    DenseMatrix pre;  // N x H pre-activations
    const SparseMatrixCsr* a_hat = nullptr;
    const DenseMatrix* x = nullptr;
};

struct EncodeOut {
    DenseMatrix z;
    ForwardCache cache;
};

/// z = PReLU(A_hat * x * w_enc). The zero point of PReLU belongs to the
/// non-negative branch (derivative 1 there).
EncodeOut encode(const SparseMatrixCsr& a_hat, const DenseMatrix& x, const ModelParams& p);

struct StackedCache {
    DenseMatrix pre;  // N x H
    const SparseMatrixCsr* a_hat = nullptr;
    const DenseMatrix* z = nullptr;
};

struct StackedOut {
    DenseMatrix g;
    StackedCache cache;
};

/// g = PReLU(A_hat * z * w_stack). Requires has_stack.
StackedOut encode_stacked(const SparseMatrixCsr& a_hat, const DenseMatrix& z,
                          const ModelParams& p);

/// Gradient accumulator mirroring ModelParams.
struct Gradients {
    DenseMatrix d_w_enc;
    double d_slope = 0.0;
    bool has_stack = false;
    DenseMatrix d_w_stack;
    double d_slope_stack = 0.0;
    DenseMatrix d_w_reg;

    static Gradients zeros_like(const ModelParams& p);
    bool all_finite() const;
};

/// Accumulates d(loss)/d(w_enc, slope) into grads given d(loss)/dz.
void encoder_backward(const ForwardCache& cache, const DenseMatrix& dz, const ModelParams& p,
                      Gradients& grads);

/// Accumulates d(loss)/d(w_stack, slope_stack) into grads and the input-side
/// gradient into dz_accum, given d(loss)/dg.
void stacked_backward(const StackedCache& cache, const DenseMatrix& dg, const ModelParams& p,
                      Gradients& grads, DenseMatrix& dz_accum);

/// Binary checkpoint (little-endian, "CGNN" magic). Round-trips bit-exactly.
void save_checkpoint(const ModelParams& p, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace cgl

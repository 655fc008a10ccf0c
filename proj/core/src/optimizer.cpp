#include "cgl/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cgl {

AdamState make_adam_state(const ModelParams& p, double lr, double weight_decay,
                          std::optional<LrDecay> decay) {
    AdamState s;
    s.lr = lr;
    s.weight_decay = weight_decay;
    s.decay = decay;
    s.m_w_enc = DenseMatrix(p.w_enc.rows(), p.w_enc.cols(), 0.0);
    s.v_w_enc = s.m_w_enc;
    s.has_stack = p.has_stack;
    if (p.has_stack) {
        s.m_w_stack = DenseMatrix(p.w_stack.rows(), p.w_stack.cols(), 0.0);
        s.v_w_stack = s.m_w_stack;
    }
    s.m_w_reg = DenseMatrix(p.w_reg.rows(), p.w_reg.cols(), 0.0);
    s.v_w_reg = s.m_w_reg;
    return s;
}

namespace {

void check_finite(const DenseMatrix& g, const char* name) {
    if (!g.all_finite()) throw std::runtime_error(std::string("adam_step: non-finite gradient for ") + name);
}

void check_finite(double g, const char* name) {
    if (!std::isfinite(g)) throw std::runtime_error(std::string("adam_step: non-finite gradient for ") + name);
}

void update_tensor(DenseMatrix& theta, const DenseMatrix& g, DenseMatrix& m, DenseMatrix& v,
                   const AdamState& s, double bc1, double bc2, bool apply_wd) {
    if (apply_wd && s.weight_decay > 0.0) theta.scale(1.0 - s.lr * s.weight_decay);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double gi = g.data()[i];
        m.data()[i] = s.beta1 * m.data()[i] + (1.0 - s.beta1) * gi;
        v.data()[i] = s.beta2 * v.data()[i] + (1.0 - s.beta2) * gi * gi;
        const double mhat = m.data()[i] / bc1;
        const double vhat = v.data()[i] / bc2;
        theta.data()[i] -= s.lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

void update_scalar(double& theta, double g, double& m, double& v, const AdamState& s, double bc1,
                   double bc2) {
    m = s.beta1 * m + (1.0 - s.beta1) * g;
    v = s.beta2 * v + (1.0 - s.beta2) * g * g;
    theta -= s.lr * (m / bc1) / (std::sqrt(v / bc2) + s.eps);
}

}  // namespace

void adam_step(ModelParams& params, const Gradients& grads, AdamState& state) {
    check_finite(grads.d_w_enc, "w_enc");
    check_finite(grads.d_slope, "prelu_slope");
    check_finite(grads.d_w_reg, "w_reg");
    if (state.has_stack) {
        check_finite(grads.d_w_stack, "w_stack");
        check_finite(grads.d_slope_stack, "prelu_slope_stack");
    }

    ++state.t;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));

    update_tensor(params.w_enc, grads.d_w_enc, state.m_w_enc, state.v_w_enc, state, bc1, bc2, true);
    update_scalar(params.prelu_slope, grads.d_slope, state.m_slope, state.v_slope, state, bc1, bc2);
    if (state.has_stack) {
        update_tensor(params.w_stack, grads.d_w_stack, state.m_w_stack, state.v_w_stack, state,
                      bc1, bc2, true);
        update_scalar(params.prelu_slope_stack, grads.d_slope_stack, state.m_slope_stack,
                      state.v_slope_stack, state, bc1, bc2);
    }
    update_tensor(params.w_reg, grads.d_w_reg, state.m_w_reg, state.v_w_reg, state, bc1, bc2, true);
}

void maybe_decay_lr(AdamState& state, std::size_t epoch) {
    if (epoch == 0) throw std::invalid_argument("maybe_decay_lr: epochs start at 1");
    if (!state.decay || epoch <= 1) return;
    const std::size_t n = state.decay->every_n_epochs;
    if (n == 0) return;
    if (epoch % n == 1 % n) state.lr *= state.decay->factor;
}

}  // namespace cgl

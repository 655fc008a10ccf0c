#include "cgl/encoder.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cgl {

namespace {

DenseMatrix glorot_uniform(Prng& rng, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseMatrix w(fan_in, fan_out);
    for (double& v : w.data()) v = (2.0 * rng.next_f64() - 1.0) * limit;
    return w;
}

DenseMatrix prelu(const DenseMatrix& pre, double slope) {
    DenseMatrix out = pre;
    for (double& v : out.data())
        if (v < 0.0) v *= slope;
    return out;
}

}  // namespace

bool ModelParams::all_finite() const {
    if (!w_enc.all_finite() || !w_reg.all_finite() || !std::isfinite(prelu_slope)) return false;
    if (has_stack && (!w_stack.all_finite() || !std::isfinite(prelu_slope_stack))) return false;
    return true;
}

ModelParams init_params(Prng& rng, std::size_t f_dim, std::size_t h_dim, bool with_stack) {
    if (f_dim == 0 || h_dim == 0) throw std::invalid_argument("init_params: dims must be >= 1");
    ModelParams p;
    p.w_enc = glorot_uniform(rng, f_dim, h_dim);
    p.prelu_slope = 0.25;
    p.has_stack = with_stack;
    if (with_stack) {
        p.w_stack = glorot_uniform(rng, h_dim, h_dim);
        p.prelu_slope_stack = 0.25;
    }
    p.w_reg = glorot_uniform(rng, h_dim, h_dim);
    return p;
}

EncodeOut encode(const SparseMatrixCsr& a_hat, const DenseMatrix& x, const ModelParams& p) {
    if (x.cols() != p.w_enc.rows()) throw std::invalid_argument("encode: feature dim mismatch");
    if (a_hat.n_cols != x.rows()) throw std::invalid_argument("encode: adjacency/feature mismatch");
    EncodeOut out;
    out.cache.pre = spmm(a_hat, matmul(x, p.w_enc));
    out.cache.a_hat = &a_hat;
    out.cache.x = &x;
    out.z = prelu(out.cache.pre, p.prelu_slope);
    return out;
}

StackedOut encode_stacked(const SparseMatrixCsr& a_hat, const DenseMatrix& z,
                          const ModelParams& p) {
    if (!p.has_stack) throw std::invalid_argument("encode_stacked: w_stack not present");
    if (z.cols() != p.w_stack.rows()) throw std::invalid_argument("encode_stacked: dim mismatch");
    StackedOut out;
    out.cache.pre = spmm(a_hat, matmul(z, p.w_stack));
    out.cache.a_hat = &a_hat;
    out.cache.z = &z;
    out.g = prelu(out.cache.pre, p.prelu_slope_stack);
    return out;
}

Gradients Gradients::zeros_like(const ModelParams& p) {
    Gradients g;
    g.d_w_enc = DenseMatrix(p.w_enc.rows(), p.w_enc.cols(), 0.0);
    g.has_stack = p.has_stack;
    if (p.has_stack) g.d_w_stack = DenseMatrix(p.w_stack.rows(), p.w_stack.cols(), 0.0);
    g.d_w_reg = DenseMatrix(p.w_reg.rows(), p.w_reg.cols(), 0.0);
    return g;
}

bool Gradients::all_finite() const {
    if (!d_w_enc.all_finite() || !d_w_reg.all_finite() || !std::isfinite(d_slope)) return false;
    if (has_stack && (!d_w_stack.all_finite() || !std::isfinite(d_slope_stack))) return false;
    return true;
}

namespace {

/// dpre = dz .* PReLU'(pre); also accumulates the slope gradient
/// sum_{pre<0} dz * pre.
DenseMatrix prelu_backward(const DenseMatrix& pre, const DenseMatrix& dz, double slope,
                           double& d_slope) {
    DenseMatrix dpre = dz;
    double acc = 0.0;
    const auto& pv = pre.data();
    auto& dv = dpre.data();
    for (std::size_t i = 0; i < pv.size(); ++i) {
        if (pv[i] < 0.0) {
            acc += dv[i] * pv[i];
            dv[i] *= slope;
        }
    }
    d_slope += acc;
    return dpre;
}

}  // namespace

void encoder_backward(const ForwardCache& cache, const DenseMatrix& dz, const ModelParams& p,
                      Gradients& grads) {
    if (dz.rows() != cache.pre.rows() || dz.cols() != cache.pre.cols())
        throw std::invalid_argument("encoder_backward: dz shape mismatch");
    const DenseMatrix dpre = prelu_backward(cache.pre, dz, p.prelu_slope, grads.d_slope);
    const DenseMatrix dt = spmm_transposed(*cache.a_hat, dpre);
    grads.d_w_enc.add_scaled(matmul_at_b(*cache.x, dt));
}

void stacked_backward(const StackedCache& cache, const DenseMatrix& dg, const ModelParams& p,
                      Gradients& grads, DenseMatrix& dz_accum) {
    if (dg.rows() != cache.pre.rows() || dg.cols() != cache.pre.cols())
        throw std::invalid_argument("stacked_backward: dg shape mismatch");
    const DenseMatrix dpre = prelu_backward(cache.pre, dg, p.prelu_slope_stack, grads.d_slope_stack);
    const DenseMatrix du = spmm_transposed(*cache.a_hat, dpre);
    grads.d_w_stack.add_scaled(matmul_at_b(*cache.z, du));
    dz_accum.add_scaled(matmul_a_bt(du, p.w_stack));
}

namespace {

constexpr char kMagic[4] = {'C', 'G', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kFlagStack = 1u;

void write_u32(std::ofstream& f, std::uint32_t v) {
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& f, const std::string& path) {
    std::uint32_t v = 0;
    if (!f.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw std::runtime_error(path + ": truncated checkpoint header");
    return v;
}

void write_f64s(std::ofstream& f, const double* p, std::size_t n) {
    f.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void read_f64s(std::ifstream& f, double* p, std::size_t n, const std::string& path) {
    if (!f.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double))))
        throw std::runtime_error(path + ": truncated checkpoint payload");
}

}  // namespace

void save_checkpoint(const ModelParams& p, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f.write(kMagic, 4);
    write_u32(f, kVersion);
    write_u32(f, static_cast<std::uint32_t>(p.feature_dim()));
    write_u32(f, static_cast<std::uint32_t>(p.hidden_dim()));
    write_u32(f, p.has_stack ? kFlagStack : 0u);
    write_f64s(f, p.w_enc.data().data(), p.w_enc.size());
    write_f64s(f, &p.prelu_slope, 1);
    if (p.has_stack) {
        write_f64s(f, p.w_stack.data().data(), p.w_stack.size());
        write_f64s(f, &p.prelu_slope_stack, 1);
    }
    write_f64s(f, p.w_reg.data().data(), p.w_reg.size());
}

ModelParams load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[4];
    if (!f.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error(path + ": bad checkpoint magic");
    const std::uint32_t version = read_u32(f, path);
    if (version != kVersion)
        throw std::runtime_error(path + ": unsupported checkpoint version " + std::to_string(version));
    const std::uint32_t fdim = read_u32(f, path);
    const std::uint32_t hdim = read_u32(f, path);
    const std::uint32_t flags = read_u32(f, path);

    ModelParams p;
    p.w_enc = DenseMatrix(fdim, hdim);
    read_f64s(f, p.w_enc.data().data(), p.w_enc.size(), path);
    read_f64s(f, &p.prelu_slope, 1, path);
    p.has_stack = (flags & kFlagStack) != 0;
    if (p.has_stack) {
        p.w_stack = DenseMatrix(hdim, hdim);
        read_f64s(f, p.w_stack.data().data(), p.w_stack.size(), path);
        read_f64s(f, &p.prelu_slope_stack, 1, path);
    }
    p.w_reg = DenseMatrix(hdim, hdim);
    read_f64s(f, p.w_reg.data().data(), p.w_reg.size(), path);
    f.peek();
    if (!f.eof()) throw std::runtime_error(path + ": trailing bytes after checkpoint payload");
    return p;
}

}  // namespace cgl

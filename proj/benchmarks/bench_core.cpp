#include <benchmark/benchmark.h>

#include "cgl/dense.hpp"
#include "cgl/encoder.hpp"
#include "cgl/graph.hpp"
#include "cgl/loss.hpp"
#include "cgl/prng.hpp"
#include "cgl/sparse.hpp"

namespace {

cgl::DenseMatrix random_dense(cgl::Prng& rng, std::size_t r, std::size_t c, double density = 1.0) {
    cgl::DenseMatrix m(r, c, 0.0);
    for (double& v : m.data())
        if (rng.next_f64() < density) v = 2.0 * rng.next_f64() - 1.0;
    return m;
}

cgl::Graph random_graph(std::size_t n, std::size_t f, double feat_density) {
    cgl::Prng rng(7);
    cgl::Graph g;
    g.num_nodes = n;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    for (std::size_t e = 0; e < 2 * n; ++e) {
        const std::size_t u = rng.next_below(n), v = rng.next_below(n);
        if (u != v) edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    g.adjacency = cgl::build_symmetric_adjacency(n, edges);
    g.features = random_dense(rng, n, f, feat_density);
    return g;
}

void BM_MatmulDense(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    cgl::Prng rng(1);
    const cgl::DenseMatrix a = random_dense(rng, n, 512);
    const cgl::DenseMatrix b = random_dense(rng, 512, 512);
    for (auto _ : state) {
        auto c = cgl::matmul(a, b);
        benchmark::DoNotOptimize(c.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 512 * 512 * 2);
}
BENCHMARK(BM_MatmulDense)->Arg(512)->Arg(2048);

void BM_MatmulSparseFeatures(benchmark::State& state) {
    cgl::Prng rng(2);
    const cgl::DenseMatrix x = random_dense(rng, 2048, 1433, 0.013);
    const cgl::DenseMatrix w = random_dense(rng, 1433, 512);
    for (auto _ : state) {
        auto c = cgl::matmul(x, w);
        benchmark::DoNotOptimize(c.data().data());
    }
}
BENCHMARK(BM_MatmulSparseFeatures);

void BM_Spmm(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const cgl::Graph g = random_graph(n, 8, 1.0);
    const cgl::SparseMatrixCsr a_hat = cgl::normalized_adjacency(g);
    cgl::Prng rng(3);
    const cgl::DenseMatrix d = random_dense(rng, n, 512);
    for (auto _ : state) {
        auto c = cgl::spmm(a_hat, d);
        benchmark::DoNotOptimize(c.data().data());
    }
}
BENCHMARK(BM_Spmm)->Arg(2048)->Arg(8192);

void BM_EncodeForward(benchmark::State& state) {
    const cgl::Graph g = random_graph(2048, 1433, 0.013);
    const cgl::SparseMatrixCsr a_hat = cgl::normalized_adjacency(g);
    cgl::Prng rng(4);
    const cgl::ModelParams p = cgl::init_params(rng, 1433, 512, false);
    for (auto _ : state) {
        auto out = cgl::encode(a_hat, g.features, p);
        benchmark::DoNotOptimize(out.z.data().data());
    }
}
BENCHMARK(BM_EncodeForward);

void BM_EncodeBackward(benchmark::State& state) {
    const cgl::Graph g = random_graph(2048, 1433, 0.013);
    const cgl::SparseMatrixCsr a_hat = cgl::normalized_adjacency(g);
    cgl::Prng rng(5);
    const cgl::ModelParams p = cgl::init_params(rng, 1433, 512, false);
    const cgl::EncodeOut out = cgl::encode(a_hat, g.features, p);
    const cgl::DenseMatrix dz = random_dense(rng, 2048, 512);
    for (auto _ : state) {
        cgl::Gradients grads = cgl::Gradients::zeros_like(p);
        cgl::encoder_backward(out.cache, dz, p, grads);
        benchmark::DoNotOptimize(grads.d_w_enc.data().data());
    }
}
BENCHMARK(BM_EncodeBackward);

void BM_NceLoss(benchmark::State& state) {
    cgl::Prng rng(6);
    const cgl::DenseMatrix seeds = random_dense(rng, 2048, 512);
    const cgl::DenseMatrix pos = random_dense(rng, 2048, 512);
    const cgl::DenseMatrix neg = random_dense(rng, 2048, 512);
    for (auto _ : state) {
        auto out = cgl::nce_loss(seeds, pos, neg, cgl::ScoreMode::dot());
        benchmark::DoNotOptimize(out.value);
    }
}
BENCHMARK(BM_NceLoss);

}  // namespace

BENCHMARK_MAIN();

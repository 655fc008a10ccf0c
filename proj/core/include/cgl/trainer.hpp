#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cgl/encoder.hpp"
#include "cgl/graph.hpp"
#include "cgl/loss.hpp"
#include "cgl/optimizer.hpp"
#include "cgl/strategies.hpp"

namespace cgl {

struct TrainConfig {
    StrategyConfig strategy;
    std::size_t epochs = 300;
    std::size_t hidden_dim = 512;
    double lr = 1e-3;
    double lambda_reg = 1.0;
    bool reg_enabled = true;
    ScoreMode score;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
    std::size_t trace_every = 1;
    std::size_t diagnostics_pairs = 10000;
    std::optional<LrDecay> lr_decay;
    std::size_t val_probe_every = 0;  // 0 = fixed-epoch final model (default)
};

struct TraceRecord {
    std::size_t epoch = 0;
    double loss_nce = 0, loss_reg = 0, loss_total = 0;
    double norm_mean = 0, norm_var = 0;
    double mu_plus = 0, mu_minus = 0, ratio = 0;
    double lr = 0;
};

struct TrainResult {
    ModelParams params;
    std::vector<TraceRecord> trace;
};

/// One epoch's frozen randomness: the contrast tuples, the feature
/// permutation of the corrupted pass, and the regularizer direction r.
struct EpochDraw {
    ContrastTuples tuples;
    DenseMatrix r;                  // 1 x H, present when the regularizer is on
    std::vector<std::size_t> perm;  // corrupted-pass feature permutation
};

/// Losses and parameter gradients of one epoch under a frozen draw.
struct EpochEval {
    double nce = 0, reg = 0, total = 0;
    Gradients grads;
    DenseMatrix z;  // clean f-representations used by the losses
};

/// Draws the epoch's tuples and regularizer randomness in the order the
/// training loop consumes them. LC and ML need the current representations.
EpochDraw draw_epoch(const Graph& g, const DenseMatrix& z, const DenseMatrix* g_reps,
                     std::size_t epoch, CurriculumState& cur, const TrainConfig& cfg, Prng& rng);

/// Evaluates NCE + lambda * regularizer (and their exact parameter gradients,
/// including the corrupted-pass path) for a frozen draw. Pass the already
/// computed clean/stacked forward results to avoid recomputing them.
EpochEval evaluate_epoch(const Graph& g, const SparseMatrixCsr& a_hat, const ModelParams& params,
                         const TrainConfig& cfg, const EpochDraw& draw, bool want_grads,
                         const EncodeOut* pre_encoded = nullptr,
                         const StackedOut* pre_stacked = nullptr);

/// Full training loop: per epoch seed selection, contrast construction,
/// combined loss, backprop, Adam step, and trace logging. Deterministic for a
/// fixed config. Throws on a non-finite loss, naming the epoch.
TrainResult train(const Graph& g, const TrainConfig& cfg);

/// f-level representations of every node (always the first layer, also for ML).
DenseMatrix embed(const Graph& g, const ModelParams& params);
DenseMatrix embed(const SparseMatrixCsr& a_hat, const DenseMatrix& features,
                  const ModelParams& params);

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(const std::string& path);

/// Flat JSON echo of the run configuration plus caller-supplied context
/// (command line, dataset, output dir, tool version).
void write_run_json(const std::string& path, const TrainConfig& cfg,
                    const std::string& command, const std::string& dataset_dir,
                    const std::string& output_dir);

}  // namespace cgl

#include "cgl/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cgl/diagnostics.hpp"
#include "cgl/evaluation.hpp"

namespace cgl {

EpochDraw draw_epoch(const Graph& g, const DenseMatrix& z, const DenseMatrix* g_reps,
                     std::size_t epoch, CurriculumState& cur, const TrainConfig& cfg, Prng& rng) {
    EpochDraw draw;
    switch (cfg.strategy.kind) {
        case StrategyKind::LC: {
            const auto& seeds = lc_seed_select(z, epoch, cur, cfg.strategy);
            draw.tuples = lc_contrast(z, g, seeds, cfg.strategy.k_candidates, rng);
            break;
        }
        case StrategyKind::ML: {
            if (!g_reps) throw std::invalid_argument("draw_epoch: ML needs stacked representations");
            draw.tuples = ml_contrast(z, *g_reps, rng);
            break;
        }
        case StrategyKind::CO: {
            const std::size_t samples =
                cfg.strategy.co_samples ? cfg.strategy.co_samples : g.num_undirected_edges();
            draw.tuples = co_contrast(g, rng, samples);
            break;
        }
    }
    if (cfg.reg_enabled) {
        draw.r = sample_uniform_open_closed(rng, cfg.hidden_dim);
        draw.perm = sample_permutation(rng, g.num_nodes);
    }
    return draw;
}

namespace {

DenseMatrix gather_rows(const DenseMatrix& src, const std::vector<std::size_t>& idx) {
    DenseMatrix out(idx.size(), src.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        std::copy(src.row(idx[i]), src.row(idx[i]) + src.cols(), out.row(i));
    return out;
}

void scatter_rows(DenseMatrix& dst, const std::vector<std::size_t>& idx, const DenseMatrix& src) {
    for (std::size_t i = 0; i < idx.size(); ++i) dst.axpy_row(idx[i], 1.0, src, i);
}

}  // namespace

EpochEval evaluate_epoch(const Graph& g, const SparseMatrixCsr& a_hat, const ModelParams& params,
                         const TrainConfig& cfg, const EpochDraw& draw, bool want_grads,
                         const EncodeOut* pre_encoded, const StackedOut* pre_stacked) {
    EncodeOut clean_local;
    const EncodeOut* clean = pre_encoded;
    if (!clean) {
        clean_local = encode(a_hat, g.features, params);
        clean = &clean_local;
    }

    StackedOut stacked_local;
    const StackedOut* stacked = pre_stacked;
    const bool is_ml = cfg.strategy.kind == StrategyKind::ML;
    if (is_ml && !stacked) {
        stacked_local = encode_stacked(a_hat, clean->z, params);
        stacked = &stacked_local;
    }

    draw.tuples.validate(clean->z.rows(), is_ml ? stacked->g.rows() : 0);
    const DenseMatrix& seed_src =
        draw.tuples.seed_source == SeedSource::GReps ? stacked->g : clean->z;
    const DenseMatrix seed_rows = gather_rows(seed_src, draw.tuples.seed_idx);
    const DenseMatrix pos_rows = gather_rows(clean->z, draw.tuples.pos_idx);
    const DenseMatrix neg_rows = gather_rows(clean->z, draw.tuples.neg_idx);

    const LossOutput nce = nce_loss(seed_rows, pos_rows, neg_rows, cfg.score);

    LossOutput reg;
    DenseMatrix x_tilde;
    EncodeOut corrupted;
    if (cfg.reg_enabled) {
        x_tilde = permute_rows(g.features, draw.perm);
        corrupted = encode(a_hat, x_tilde, params);
        reg = contrast_reg_loss(clean->z, corrupted.z, params.w_reg, draw.r);
    }

    EpochEval eval;
    eval.nce = nce.value;
    eval.reg = cfg.reg_enabled ? reg.value : 0.0;
    eval.total = nce.value + (cfg.reg_enabled ? cfg.lambda_reg * reg.value : 0.0);

    if (want_grads) {
        eval.grads = Gradients::zeros_like(params);
        DenseMatrix d_z(clean->z.rows(), clean->z.cols(), 0.0);

        if (draw.tuples.seed_source == SeedSource::GReps) {
            DenseMatrix d_g(stacked->g.rows(), stacked->g.cols(), 0.0);
            scatter_rows(d_g, draw.tuples.seed_idx, nce.grads.at("seeds"));
            stacked_backward(stacked->cache, d_g, params, eval.grads, d_z);
        } else {
            scatter_rows(d_z, draw.tuples.seed_idx, nce.grads.at("seeds"));
        }
        scatter_rows(d_z, draw.tuples.pos_idx, nce.grads.at("pos"));
        scatter_rows(d_z, draw.tuples.neg_idx, nce.grads.at("neg"));

        if (cfg.reg_enabled) {
            d_z.add_scaled(reg.grads.at("z"), cfg.lambda_reg);
            eval.grads.d_w_reg.add_scaled(reg.grads.at("w_reg"), cfg.lambda_reg);
            DenseMatrix d_zt = reg.grads.at("z_tilde");
            d_zt.scale(cfg.lambda_reg);
            encoder_backward(corrupted.cache, d_zt, params, eval.grads);
        }
        encoder_backward(clean->cache, d_z, params, eval.grads);
    }

    eval.z = clean->z;
    return eval;
}

TrainResult train(const Graph& g, const TrainConfig& cfg) {
    if (cfg.epochs == 0) throw std::invalid_argument("train: epochs must be >= 1");
    if (cfg.lambda_reg < 0.0) throw std::invalid_argument("train: lambda_reg must be >= 0");

    const SparseMatrixCsr a_hat = normalized_adjacency(g);
    Prng rng(cfg.seed);
    ModelParams params = init_params(rng, g.features.cols(), cfg.hidden_dim,
                                     cfg.strategy.kind == StrategyKind::ML);
    AdamState adam = make_adam_state(params, cfg.lr, cfg.weight_decay, cfg.lr_decay);
    CurriculumState cur;
    Prng diag_rng(cfg.seed ^ 0xD1A6D1A6D1A6D1A6ULL);

    TrainResult result;
    double best_val_acc = -1.0;
    std::optional<ModelParams> best_params;

    // mu+/mu- needs a same-class pair and a different-class pair to exist
    bool mu_trackable = false;
    if (g.labels && g.num_classes() >= 2) {
        std::vector<std::size_t> counts(g.num_classes(), 0);
        for (int c : *g.labels) ++counts[static_cast<std::size_t>(c)];
        for (std::size_t c : counts)
            if (c >= 2) mu_trackable = true;
    }

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        maybe_decay_lr(adam, epoch);

        EncodeOut clean = encode(a_hat, g.features, params);
        StackedOut stacked;
        const bool is_ml = cfg.strategy.kind == StrategyKind::ML;
        if (is_ml) stacked = encode_stacked(a_hat, clean.z, params);

        EpochDraw draw = draw_epoch(g, clean.z, is_ml ? &stacked.g : nullptr, epoch, cur, cfg, rng);
        EpochEval eval = evaluate_epoch(g, a_hat, params, cfg, draw, true, &clean,
                                        is_ml ? &stacked : nullptr);

        if (!std::isfinite(eval.total)) {
            std::ostringstream msg;
            msg << "train: non-finite loss at epoch " << epoch;
            if (!result.trace.empty()) {
                const TraceRecord& last = result.trace.back();
                msg << " (last traced epoch " << last.epoch << ": total " << last.loss_total
                    << ", norm_mean " << last.norm_mean << ")";
            }
            throw std::runtime_error(msg.str());
        }

        adam_step(params, eval.grads, adam);

        if ((epoch - 1) % cfg.trace_every == 0) {
            TraceRecord rec;
            rec.epoch = epoch;
            rec.loss_nce = eval.nce;
            rec.loss_reg = eval.reg;
            rec.loss_total = eval.total;
            const NormStats ns = norm_stats(eval.z);
            rec.norm_mean = ns.mean;
            rec.norm_var = ns.variance;
            if (mu_trackable) {
                const MuRatio mu = mu_ratio(eval.z, *g.labels, diag_rng, cfg.diagnostics_pairs);
                rec.mu_plus = mu.mu_plus;
                rec.mu_minus = mu.mu_minus;
                rec.ratio = mu.ratio;
            }
            rec.lr = adam.lr;
            result.trace.push_back(rec);
        }

        if (cfg.val_probe_every > 0 && epoch % cfg.val_probe_every == 0 && g.labels && g.splits &&
            !g.splits->val.empty()) {
            NodeSplits probe_splits{g.splits->train, {}, g.splits->val};
            const double acc = linear_probe(embed(a_hat, g.features, params), *g.labels,
                                            probe_splits, ProbeConfig{});
            if (acc > best_val_acc) {
                best_val_acc = acc;
                best_params = params;
            }
        }
    }

    result.params = best_params ? std::move(*best_params) : std::move(params);
    return result;
}

DenseMatrix embed(const SparseMatrixCsr& a_hat, const DenseMatrix& features,
                  const ModelParams& params) {
    return encode(a_hat, features, params).z;
}

DenseMatrix embed(const Graph& g, const ModelParams& params) {
    return embed(normalized_adjacency(g), g.features, params);
}

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& trace) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "epoch,loss_nce,loss_reg,loss_total,norm_mean,norm_var,mu_plus,mu_minus,ratio,lr\n";
    for (const TraceRecord& r : trace) {
        f << r.epoch << ',' << fmt9(r.loss_nce) << ',' << fmt9(r.loss_reg) << ','
          << fmt9(r.loss_total) << ',' << fmt9(r.norm_mean) << ',' << fmt9(r.norm_var) << ','
          << fmt9(r.mu_plus) << ',' << fmt9(r.mu_minus) << ',' << fmt9(r.ratio) << ','
          << fmt9(r.lr) << '\n';
    }
}

std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error(path + ": empty trace file");
    std::vector<TraceRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string tok;
        std::istringstream ss(line);
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (fields.size() != 10)
            throw std::runtime_error(path + ": malformed trace row '" + line + "'");
        TraceRecord r;
        try {
            r.epoch = std::stoull(fields[0]);
            r.loss_nce = std::stod(fields[1]);  // stod accepts "inf"
            r.loss_reg = std::stod(fields[2]);
            r.loss_total = std::stod(fields[3]);
            r.norm_mean = std::stod(fields[4]);
            r.norm_var = std::stod(fields[5]);
            r.mu_plus = std::stod(fields[6]);
            r.mu_minus = std::stod(fields[7]);
            r.ratio = std::stod(fields[8]);
            r.lr = std::stod(fields[9]);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": malformed trace row '" + line + "'");
        }
        out.push_back(r);
    }
    return out;
}

void write_run_json(const std::string& path, const TrainConfig& cfg, const std::string& command,
                    const std::string& dataset_dir, const std::string& output_dir) {
    const char* strategy = cfg.strategy.kind == StrategyKind::LC   ? "lc"
                           : cfg.strategy.kind == StrategyKind::ML ? "ml"
                                                                   : "co";
    nlohmann::json j = {
        {"command", command},
        {"dataset", dataset_dir},
        {"output_dir", output_dir},
        {"tool_version", "cgl 0.1.0"},
        {"strategy", strategy},
        {"curriculum_rounds", cfg.strategy.r_rounds},
        {"k_candidates", cfg.strategy.k_candidates},
        {"co_samples", cfg.strategy.co_samples},
        {"epochs", cfg.epochs},
        {"hidden_dim", cfg.hidden_dim},
        {"lr", cfg.lr},
        {"lambda_reg", cfg.lambda_reg},
        {"reg_enabled", cfg.reg_enabled},
        {"score_mode", cfg.score.kind == ScoreMode::Kind::Dot ? "dot" : "cosine"},
        {"cosine_temperature", cfg.score.temperature},
        {"weight_decay", cfg.weight_decay},
        {"seed", cfg.seed},
        {"trace_every", cfg.trace_every},
        {"diagnostics_pairs", cfg.diagnostics_pairs},
        {"lr_decay_factor", cfg.lr_decay ? cfg.lr_decay->factor : 0.0},
        {"lr_decay_every", cfg.lr_decay ? cfg.lr_decay->every_n_epochs : 0},
        {"val_probe_every", cfg.val_probe_every},
    };
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

}  // namespace cgl

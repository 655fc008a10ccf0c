#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cgl/dense.hpp"
#include "cgl/graph.hpp"

namespace cgl {

/// Mean and sample standard deviation over per-seed metric values.
struct EvalReport {
    std::string task;
    std::vector<double> values;
    double mean = 0.0;
    double stddev = 0.0;
};

EvalReport make_report(std::string task, std::vector<double> values);

struct ProbeConfig {
    double l2 = 1e-4;
    double lr = 0.01;
    std::size_t max_iters = 2000;
    double grad_tol = 1e-5;
};

/// Multinomial logistic regression on frozen embeddings: trained on the
/// train split by full-batch gradient descent (with step halving on any loss
/// increase), returns accuracy on the test split. Embeddings never change.
double linear_probe(const DenseMatrix& z, const std::vector<int>& labels,
                    const NodeSplits& splits, const ProbeConfig& cfg);

struct KmeansResult {
    std::vector<std::size_t> assignments;
    double inertia = 0.0;
    std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding from the given seed, run to an
/// assignment fixpoint or 300 iterations. An emptied cluster is re-seeded to
/// the point farthest from its assigned center.
KmeansResult kmeans(const DenseMatrix& points, std::size_t k, std::uint64_t seed);

struct ClusteringMetrics {
    double acc = 0.0;       // best cluster-to-class matching (Hungarian)
    double nmi = 0.0;       // I(pred;truth)/sqrt(H(pred) H(truth)), natural logs
    double f1_macro = 0.0;  // macro F1 after the optimal mapping
};

ClusteringMetrics clustering_metrics(const std::vector<std::size_t>& pred,
                                     const std::vector<int>& truth);

/// Maximum-weight assignment on a rectangular profit matrix (padded square
/// internally). Returns row -> column, or npos for unassigned padding.
std::vector<std::size_t> hungarian_max_assignment(const DenseMatrix& profit);

struct ClusteringVariant {
    EvalReport acc, nmi, f1;
};

struct ClusteringEval {
    ClusteringVariant raw, pca;
    bool pca_better = false;  // by mean accuracy
};

/// k-means over the clustering seeds on raw embeddings and on their PCA
/// projection; both variants are always reported.
ClusteringEval eval_clustering(const DenseMatrix& z, const std::vector<int>& labels,
                               std::size_t k, std::size_t pca_dim,
                               const std::vector<std::uint64_t>& seeds);

/// Exact AUC of the inner-product scorer via rank statistics (ties count half).
double link_auc(const DenseMatrix& z,
                const std::vector<std::pair<std::size_t, std::size_t>>& pos_edges,
                const std::vector<std::pair<std::size_t, std::size_t>>& neg_edges);

}  // namespace cgl

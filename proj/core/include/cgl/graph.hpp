#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cgl/dense.hpp"
#include "cgl/prng.hpp"
#include "cgl/sparse.hpp"

namespace cgl {

struct NodeSplits {
    std::vector<std::size_t> train, val, test;
};

/// Undirected attributed graph.
///
/// The adjacency is stored symmetric with unit values and no self-loops;
/// self-loops enter only through normalized_adjacency(). Labels, when
/// present, cover every node.
struct Graph {
    std::size_t num_nodes = 0;
    SparseMatrixCsr adjacency;
    DenseMatrix features;
    std::optional<std::vector<int>> labels;
    std::optional<NodeSplits> splits;

    std::size_t num_classes() const;
    std::size_t num_undirected_edges() const { return adjacency.nnz() / 2; }

    /// Each undirected edge once, as (i, j) with i < j, sorted.
    std::vector<std::pair<std::size_t, std::size_t>> undirected_edges() const;

    /// Throws std::invalid_argument on any violated invariant
    /// (asymmetry, self-loop, non-unit value, size mismatch, bad label or split).
    void validate() const;
};

/// Builds a symmetric unit-valued adjacency from undirected edges.
/// Duplicate and reversed pairs collapse; self-loops are rejected.
SparseMatrixCsr build_symmetric_adjacency(
    std::size_t num_nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

/// D^{-1/2} (A + I) D^{-1/2} where D is the degree matrix of A + I.
/// Every row is nonzero; an isolated node keeps only its unit self-loop.
SparseMatrixCsr normalized_adjacency(const Graph& g);

/// Row-permuted copy of g.features under a uniformly sampled permutation.
DenseMatrix shuffle_features(const Graph& g, Prng& rng);

/// Samples per-class train/val nodes without replacement; every remaining
/// labeled node lands in test. Throws when a class is too small, naming it.
NodeSplits make_node_splits(const Graph& g, std::size_t per_class_train,
                            std::size_t per_class_val, Prng& rng);

/// Planetoid-style split: per-class train nodes, then a pooled validation
/// and test sample from the remainder. Nodes left over belong to no split.
NodeSplits make_planetoid_splits(const Graph& g, std::size_t per_class_train,
                                 std::size_t num_val, std::size_t num_test, Prng& rng);

struct EdgeSplit {
    Graph train_graph;  // all nodes, training edges only
    std::vector<std::pair<std::size_t, std::size_t>> val_pos, test_pos;
    std::vector<std::pair<std::size_t, std::size_t>> val_neg, test_neg;
};

/// Partitions the undirected edge set train/val/test by the given fractions
/// (val and test counts rounded, train takes the remainder) and samples an
/// equal number of negative pairs per held-out partition from the non-edges.
EdgeSplit split_edges_for_lp(const Graph& g, double train_frac, double val_frac,
                             double test_frac, Prng& rng);

}  // namespace cgl

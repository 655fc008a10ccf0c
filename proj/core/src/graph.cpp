#include "cgl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace cgl {

std::size_t Graph::num_classes() const {
    if (!labels || labels->empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(labels->begin(), labels->end())) + 1;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::undirected_edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(adjacency.nnz() / 2);
    for (std::size_t i = 0; i < num_nodes; ++i)
        for (std::size_t p = adjacency.row_ptr[i]; p < adjacency.row_ptr[i + 1]; ++p)
            if (i < adjacency.col_idx[p]) out.emplace_back(i, adjacency.col_idx[p]);
    return out;
}

void Graph::validate() const {
    if (adjacency.n_rows != num_nodes || adjacency.n_cols != num_nodes)
        throw std::invalid_argument("graph: adjacency shape does not match num_nodes");
    adjacency.validate();
    for (std::size_t i = 0; i < num_nodes; ++i) {
        for (std::size_t p = adjacency.row_ptr[i]; p < adjacency.row_ptr[i + 1]; ++p) {
            const std::size_t j = adjacency.col_idx[p];
            if (j == i) throw std::invalid_argument("graph: self-loop stored at node " + std::to_string(i));
            if (adjacency.values[p] != 1.0)
                throw std::invalid_argument("graph: adjacency value not 1.0");
            if (!adjacency.has_entry(j, i))
                throw std::invalid_argument("graph: asymmetric edge (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
        }
    }
    if (features.rows() != num_nodes)
        throw std::invalid_argument("graph: feature rows != num_nodes");
    if (labels) {
        if (labels->size() != num_nodes)
            throw std::invalid_argument("graph: labels length != num_nodes");
        for (int c : *labels)
            if (c < 0) throw std::invalid_argument("graph: negative class id");
    }
    if (splits) {
        std::set<std::size_t> seen;
        for (const auto* part : {&splits->train, &splits->val, &splits->test}) {
            for (std::size_t v : *part) {
                if (v >= num_nodes) throw std::invalid_argument("graph: split node id out of range");
                if (!seen.insert(v).second)
                    throw std::invalid_argument("graph: splits overlap at node " + std::to_string(v));
            }
        }
    }
}

SparseMatrixCsr build_symmetric_adjacency(
    std::size_t num_nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::set<std::pair<std::size_t, std::size_t>> unique;
    for (auto [u, v] : edges) {
        if (u == v) throw std::invalid_argument("build_symmetric_adjacency: self-loop");
        if (u >= num_nodes || v >= num_nodes)
            throw std::invalid_argument("build_symmetric_adjacency: node id out of range");
        unique.insert({std::min(u, v), std::max(u, v)});
    }
    std::vector<std::tuple<std::size_t, std::size_t, double>> coo;
    coo.reserve(unique.size() * 2);
    for (auto [u, v] : unique) {
        coo.emplace_back(u, v, 1.0);
        coo.emplace_back(v, u, 1.0);
    }
    return SparseMatrixCsr::from_coo(num_nodes, num_nodes, std::move(coo));
}

SparseMatrixCsr normalized_adjacency(const Graph& g) {
    const std::size_t n = g.num_nodes;
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i)
        inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(g.adjacency.row_degree(i) + 1));

    std::vector<std::tuple<std::size_t, std::size_t, double>> coo;
    coo.reserve(g.adjacency.nnz() + n);
    for (std::size_t i = 0; i < n; ++i) {
        coo.emplace_back(i, i, inv_sqrt_deg[i] * inv_sqrt_deg[i]);
        for (std::size_t p = g.adjacency.row_ptr[i]; p < g.adjacency.row_ptr[i + 1]; ++p) {
            const std::size_t j = g.adjacency.col_idx[p];
            coo.emplace_back(i, j, inv_sqrt_deg[i] * inv_sqrt_deg[j]);
        }
    }
    return SparseMatrixCsr::from_coo(n, n, std::move(coo));
}

DenseMatrix shuffle_features(const Graph& g, Prng& rng) {
    return permute_rows(g.features, sample_permutation(rng, g.num_nodes));
}

namespace {

std::vector<std::vector<std::size_t>> members_by_class(const Graph& g) {
    if (!g.labels) throw std::invalid_argument("node splits need labels");
    std::vector<std::vector<std::size_t>> members(g.num_classes());
    for (std::size_t i = 0; i < g.num_nodes; ++i)
        members[static_cast<std::size_t>((*g.labels)[i])].push_back(i);
    return members;
}

/// First k elements of a seeded shuffle of `items` (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> items,
                                                    std::size_t k, Prng& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.next_below(items.size() - i);
        std::swap(items[i], items[j]);
    }
    items.resize(k);
    return items;
}

}  // namespace

NodeSplits make_node_splits(const Graph& g, std::size_t per_class_train,
                            std::size_t per_class_val, Prng& rng) {
    const auto members = members_by_class(g);
    NodeSplits s;
    std::vector<char> taken(g.num_nodes, 0);
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].size() < per_class_train + per_class_val)
            throw std::invalid_argument("class " + std::to_string(c) + " has only " +
                                        std::to_string(members[c].size()) +
                                        " members, need " +
                                        std::to_string(per_class_train + per_class_val));
        auto chosen = sample_without_replacement(members[c], per_class_train + per_class_val, rng);
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            (i < per_class_train ? s.train : s.val).push_back(chosen[i]);
            taken[chosen[i]] = 1;
        }
    }
    for (std::size_t i = 0; i < g.num_nodes; ++i)
        if (!taken[i]) s.test.push_back(i);
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    return s;
}

NodeSplits make_planetoid_splits(const Graph& g, std::size_t per_class_train,
                                 std::size_t num_val, std::size_t num_test, Prng& rng) {
    const auto members = members_by_class(g);
    NodeSplits s;
    std::vector<char> taken(g.num_nodes, 0);
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].size() < per_class_train)
            throw std::invalid_argument("class " + std::to_string(c) + " has only " +
                                        std::to_string(members[c].size()) + " members, need " +
                                        std::to_string(per_class_train));
        for (std::size_t v : sample_without_replacement(members[c], per_class_train, rng)) {
            s.train.push_back(v);
            taken[v] = 1;
        }
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < g.num_nodes; ++i)
        if (!taken[i]) rest.push_back(i);
    if (rest.size() < num_val + num_test)
        throw std::invalid_argument("not enough nodes left for val+test sample");
    auto pool = sample_without_replacement(std::move(rest), num_val + num_test, rng);
    s.val.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(num_val));
    s.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(num_val), pool.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

EdgeSplit split_edges_for_lp(const Graph& g, double train_frac, double val_frac,
                             double test_frac, Prng& rng) {
    (void)train_frac;  // train takes the remainder
    auto edges = g.undirected_edges();
    const std::size_t total = edges.size();
    if (total < 20) throw std::invalid_argument("split_edges_for_lp: need at least 20 edges");

    const std::size_t n_val = static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(total)));
    const std::size_t n_test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(total)));
    if (n_val + n_test >= total)
        throw std::invalid_argument("split_edges_for_lp: fractions leave no training edges");

    // seeded shuffle of the edge list
    for (std::size_t i = total; i > 1; --i) {
        const std::size_t j = rng.next_below(i);
        std::swap(edges[i - 1], edges[j]);
    }

    EdgeSplit out;
    out.val_pos.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_val));
    out.test_pos.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_val),
                        edges.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
    std::vector<std::pair<std::size_t, std::size_t>> train_edges(
        edges.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), edges.end());

    // negatives: distinct non-edges of the original graph, none repeated
    const std::size_t need = n_val + n_test;
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    std::vector<std::pair<std::size_t, std::size_t>> negs;
    const std::size_t max_attempts = 100 * (need == 0 ? 1 : need);
    std::size_t attempts = 0;
    while (negs.size() < need) {
        if (++attempts > max_attempts)
            throw std::runtime_error("split_edges_for_lp: could not sample enough negative pairs (graph too dense)");
        std::size_t u = rng.next_below(g.num_nodes);
        std::size_t v = rng.next_below(g.num_nodes);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (g.adjacency.has_entry(u, v)) continue;
        if (!chosen.insert({u, v}).second) continue;
        negs.emplace_back(u, v);
    }
    out.val_neg.assign(negs.begin(), negs.begin() + static_cast<std::ptrdiff_t>(n_val));
    out.test_neg.assign(negs.begin() + static_cast<std::ptrdiff_t>(n_val), negs.end());

    out.train_graph.num_nodes = g.num_nodes;
    out.train_graph.adjacency = build_symmetric_adjacency(g.num_nodes, train_edges);
    out.train_graph.features = g.features;
    out.train_graph.labels = g.labels;
    return out;
}

}  // namespace cgl

#pragma once

#include <cstddef>
#include <string>

#include "cgl/graph.hpp"

namespace cgl {

struct DatasetManifest {
    std::string name;
    std::size_t num_nodes = 0;
    std::size_t num_features = 0;
    std::size_t num_classes = 0;
    bool has_labels = false;
    std::string feature_encoding = "dense-f32";  // or "dense-text"
};

struct LoadStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicate_edges = 0;
    std::size_t cites_dropped = 0;  // convert only: edges with unknown endpoints
};

/// Reads a canonical dataset directory:
///   manifest.json, edges.tsv, features.bin|features.tsv, [labels.tsv], [splits.json]
/// Self-loop edge lines are dropped (counted in stats), duplicate/reversed
/// lines collapse. Errors name the offending file and line.
Graph load_canonical(const std::string& dir, LoadStats* stats = nullptr);

DatasetManifest read_manifest(const std::string& dir);

/// Writes a graph as a canonical dataset directory; output is byte-stable for
/// identical inputs.
void save_canonical(const std::string& dir, const Graph& g, const std::string& name,
                    const std::string& feature_encoding = "dense-f32");

/// Converts a LINQS-style citation dataset (<name>.content / <name>.cites) to
/// a canonical directory. String paper ids map to dense ids in first-appearance
/// order; label strings map alphabetically to class ids; citation lines whose
/// endpoints are missing from the content file are dropped (counted).
DatasetManifest convert_linqs(const std::string& content_path, const std::string& cites_path,
                              const std::string& out_dir, LoadStats* stats = nullptr);

}  // namespace cgl

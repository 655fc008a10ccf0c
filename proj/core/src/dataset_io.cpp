#include "cgl/dataset_io.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace cgl {

namespace {

[[noreturn]] void fail(const std::string& file, std::size_t line, const std::string& what) {
    throw std::runtime_error(file + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_or_throw(const fs::path& p, std::ios::openmode mode = std::ios::in) {
    std::ifstream f(p, mode);
    if (!f) throw std::runtime_error("cannot open " + p.string());
    return f;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace

DatasetManifest read_manifest(const std::string& dir) {
    auto f = open_or_throw(fs::path(dir) / "manifest.json");
    json j = json::parse(f);
    DatasetManifest m;
    m.name = j.at("name").get<std::string>();
    m.num_nodes = j.at("num_nodes").get<std::size_t>();
    m.num_features = j.at("num_features").get<std::size_t>();
    m.num_classes = j.at("num_classes").get<std::size_t>();
    m.has_labels = j.at("has_labels").get<bool>();
    m.feature_encoding = j.at("feature_encoding").get<std::string>();
    if (m.feature_encoding != "dense-f32" && m.feature_encoding != "dense-text")
        throw std::runtime_error("manifest.json: unknown feature_encoding '" + m.feature_encoding + "'");
    return m;
}

Graph load_canonical(const std::string& dir, LoadStats* stats) {
    const DatasetManifest m = read_manifest(dir);
    const fs::path root(dir);
    LoadStats local;

    Graph g;
    g.num_nodes = m.num_nodes;

    // edges.tsv
    {
        const fs::path path = root / "edges.tsv";
        auto f = open_or_throw(path);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        std::string line;
        std::size_t lineno = 0;
        std::set<std::pair<std::size_t, std::size_t>> seen;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto toks = split_ws(line);
            if (toks.size() != 2) fail(path.string(), lineno, "expected two node ids");
            std::size_t u, v;
            try {
                u = std::stoull(toks[0]);
                v = std::stoull(toks[1]);
            } catch (const std::exception&) {
                fail(path.string(), lineno, "node id is not a number");
            }
            if (u >= m.num_nodes || v >= m.num_nodes)
                fail(path.string(), lineno, "node id out of range");
            if (u == v) {
                ++local.self_loops_dropped;
                continue;
            }
            auto key = std::minmax(u, v);
            if (!seen.insert({key.first, key.second}).second) {
                ++local.duplicate_edges;
                continue;
            }
            edges.emplace_back(u, v);
        }
        g.adjacency = build_symmetric_adjacency(m.num_nodes, edges);
    }

    // features
    if (m.feature_encoding == "dense-f32") {
        const fs::path path = root / "features.bin";
        auto f = open_or_throw(path, std::ios::in | std::ios::binary);
        f.seekg(0, std::ios::end);
        const auto bytes = static_cast<std::size_t>(f.tellg());
        const std::size_t expect = m.num_nodes * m.num_features * sizeof(float);
        if (bytes != expect)
            throw std::runtime_error(path.string() + ": size " + std::to_string(bytes) +
                                     " does not match manifest (" + std::to_string(expect) + " bytes)");
        f.seekg(0);
        std::vector<float> buf(m.num_nodes * m.num_features);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
        g.features = DenseMatrix(m.num_nodes, m.num_features);
        for (std::size_t i = 0; i < buf.size(); ++i) g.features.data()[i] = static_cast<double>(buf[i]);
    } else {
        const fs::path path = root / "features.tsv";
        auto f = open_or_throw(path);
        g.features = DenseMatrix(m.num_nodes, m.num_features);
        std::string line;
        std::size_t row = 0, lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty()) continue;
            if (row >= m.num_nodes) fail(path.string(), lineno, "more feature rows than nodes");
            const auto toks = split_ws(line);
            if (toks.size() != m.num_features)
                fail(path.string(), lineno,
                     "feature row has " + std::to_string(toks.size()) + " values, expected " +
                         std::to_string(m.num_features));
            for (std::size_t j = 0; j < toks.size(); ++j) g.features(row, j) = std::stod(toks[j]);
            ++row;
        }
        if (row != m.num_nodes)
            throw std::runtime_error(path.string() + ": only " + std::to_string(row) +
                                     " feature rows, expected " + std::to_string(m.num_nodes));
    }

    // optional labels
    if (m.has_labels) {
        const fs::path path = root / "labels.tsv";
        auto f = open_or_throw(path);
        std::vector<int> labels(m.num_nodes, -1);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto toks = split_ws(line);
            if (toks.size() != 2) fail(path.string(), lineno, "expected 'node<TAB>class'");
            const std::size_t node = std::stoull(toks[0]);
            const int cls = std::stoi(toks[1]);
            if (node >= m.num_nodes) fail(path.string(), lineno, "node id out of range");
            if (cls < 0 || static_cast<std::size_t>(cls) >= m.num_classes)
                fail(path.string(), lineno, "class id out of range");
            labels[node] = cls;
        }
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] < 0)
                throw std::runtime_error(path.string() + ": node " + std::to_string(i) + " has no label");
        g.labels = std::move(labels);
    }

    // optional splits
    if (fs::exists(root / "splits.json")) {
        auto f = open_or_throw(root / "splits.json");
        json j = json::parse(f);
        NodeSplits s;
        s.train = j.at("train").get<std::vector<std::size_t>>();
        s.val = j.at("val").get<std::vector<std::size_t>>();
        s.test = j.at("test").get<std::vector<std::size_t>>();
        g.splits = std::move(s);
    }

    g.validate();
    if (stats) *stats = local;
    return g;
}

void save_canonical(const std::string& dir, const Graph& g, const std::string& name,
                    const std::string& feature_encoding) {
    const fs::path root(dir);
    fs::create_directories(root);

    json manifest = {
        {"name", name},
        {"num_nodes", g.num_nodes},
        {"num_features", g.features.cols()},
        {"num_classes", g.num_classes()},
        {"has_labels", g.labels.has_value()},
        {"feature_encoding", feature_encoding},
    };
    std::ofstream(root / "manifest.json") << manifest.dump(2) << "\n";

    {
        std::ofstream f(root / "edges.tsv");
        for (auto [u, v] : g.undirected_edges()) f << u << "\t" << v << "\n";
    }

    if (feature_encoding == "dense-f32") {
        std::ofstream f(root / "features.bin", std::ios::binary);
        std::vector<float> buf(g.features.size());
        for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(g.features.data()[i]);
        f.write(reinterpret_cast<const char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
    } else if (feature_encoding == "dense-text") {
        std::ofstream f(root / "features.tsv");
        char num[64];
        for (std::size_t i = 0; i < g.features.rows(); ++i) {
            for (std::size_t j = 0; j < g.features.cols(); ++j) {
                std::snprintf(num, sizeof(num), "%.9g", g.features(i, j));
                f << (j ? "\t" : "") << num;
            }
            f << "\n";
        }
    } else {
        throw std::invalid_argument("save_canonical: unknown feature encoding " + feature_encoding);
    }

    if (g.labels) {
        std::ofstream f(root / "labels.tsv");
        for (std::size_t i = 0; i < g.num_nodes; ++i) f << i << "\t" << (*g.labels)[i] << "\n";
    }

    if (g.splits) {
        json s = {{"train", g.splits->train}, {"val", g.splits->val}, {"test", g.splits->test}};
        std::ofstream(root / "splits.json") << s.dump(2) << "\n";
    }
}

DatasetManifest convert_linqs(const std::string& content_path, const std::string& cites_path,
                              const std::string& out_dir, LoadStats* stats) {
    LoadStats local;

    std::map<std::string, std::size_t> id_of;
    std::vector<std::vector<double>> feature_rows;
    std::vector<std::string> label_strings;
    std::size_t num_features = 0;

    {
        auto f = open_or_throw(content_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto toks = split_ws(line);
            if (toks.size() < 3) fail(content_path, lineno, "expected 'id features... label'");
            if (num_features == 0) num_features = toks.size() - 2;
            if (toks.size() - 2 != num_features)
                fail(content_path, lineno,
                     "row has " + std::to_string(toks.size() - 2) + " features, expected " +
                         std::to_string(num_features));
            const std::string& pid = toks.front();
            if (id_of.count(pid)) fail(content_path, lineno, "duplicate paper id '" + pid + "'");
            id_of[pid] = feature_rows.size();
            std::vector<double> feats(num_features);
            for (std::size_t j = 0; j < num_features; ++j) {
                try {
                    feats[j] = std::stod(toks[j + 1]);
                } catch (const std::exception&) {
                    fail(content_path, lineno, "feature value '" + toks[j + 1] + "' is not a number");
                }
            }
            feature_rows.push_back(std::move(feats));
            label_strings.push_back(toks.back());
        }
        if (feature_rows.empty()) throw std::runtime_error(content_path + ": no content rows");
    }

    // alphabetical label -> class id
    std::map<std::string, int> class_of;
    for (const auto& s : label_strings) class_of.emplace(s, 0);
    int next = 0;
    for (auto& [k, v] : class_of) v = next++;

    const std::size_t n = feature_rows.size();
    Graph g;
    g.num_nodes = n;
    g.features = DenseMatrix(n, num_features);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < num_features; ++j) g.features(i, j) = feature_rows[i][j];
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = class_of[label_strings[i]];
    g.labels = std::move(labels);

    {
        auto f = open_or_throw(cites_path);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        std::string line;
        std::size_t lineno = 0;
        std::set<std::pair<std::size_t, std::size_t>> seen;
        while (std::getline(f, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto toks = split_ws(line);
            if (toks.size() != 2) fail(cites_path, lineno, "expected 'cited_id citing_id'");
            const auto a = id_of.find(toks[0]);
            const auto b = id_of.find(toks[1]);
            if (a == id_of.end() || b == id_of.end()) {
                ++local.cites_dropped;
                continue;
            }
            if (a->second == b->second) {
                ++local.self_loops_dropped;
                continue;
            }
            auto key = std::minmax(a->second, b->second);
            if (!seen.insert({key.first, key.second}).second) {
                ++local.duplicate_edges;
                continue;
            }
            edges.push_back({key.first, key.second});
        }
        g.adjacency = build_symmetric_adjacency(n, edges);
    }

    const fs::path name = fs::path(content_path).stem();
    save_canonical(out_dir, g, name.string(), "dense-f32");
    if (stats) *stats = local;

    DatasetManifest m;
    m.name = name.string();
    m.num_nodes = n;
    m.num_features = num_features;
    m.num_classes = static_cast<std::size_t>(next);
    m.has_labels = true;
    m.feature_encoding = "dense-f32";
    return m;
}

}  // namespace cgl

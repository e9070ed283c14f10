#include "gesn/dataio.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "gesn/error.hpp"

namespace gesn {

namespace {

using json = nlohmann::json;

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

[[noreturn]] void parse_fail(const fs::path& path, std::size_t line, const std::string& what) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_comment_or_blank(std::string_view s) {
    s = trim(s);
    return s.empty() || s.front() == '#';
}

// Splits on any of the given delimiters, dropping empty tokens.
std::vector<std::string_view> tokenize(std::string_view s, std::string_view delims) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && delims.find(s[i]) != std::string_view::npos) ++i;
        std::size_t j = i;
        while (j < s.size() && delims.find(s[j]) == std::string_view::npos) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view tok, T& value) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, value);
    return ec == std::errc() && ptr == end && !tok.empty();
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

constexpr std::string_view kFieldDelims = " \t,";
constexpr std::string_view kSpaceDelims = " \t\r";

std::vector<std::pair<NodeId, NodeId>> read_edges(const fs::path& path, std::size_t num_nodes) {
    auto in = open_input(path);
    std::vector<std::pair<NodeId, NodeId>> arcs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto toks = tokenize(line, kSpaceDelims);
        if (toks.size() != 2) parse_fail(path, lineno, "expected two node ids");
        std::int64_t u = 0, v = 0;
        if (!parse_number(toks[0], u) || !parse_number(toks[1], v)) parse_fail(path, lineno, "non-integer node id");
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= num_nodes || static_cast<std::size_t>(v) >= num_nodes)
            parse_fail(path, lineno, "node id out of range [0, " + std::to_string(num_nodes) + ")");
        arcs.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    return arcs;
}

Matrix read_features(const fs::path& path) {
    auto in = open_input(path);
    std::vector<double> values;
    std::size_t cols = 0, rows = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto toks = tokenize(line, kFieldDelims);
        if (rows == 0) cols = toks.size();
        if (toks.size() != cols)
            parse_fail(path, lineno, "row has " + std::to_string(toks.size()) + " values, expected " +
                                         std::to_string(cols));
        for (auto tok : toks) {
            double x = 0.0;
            if (!parse_number(tok, x) || !std::isfinite(x))
                parse_fail(path, lineno, "non-numeric feature '" + std::string(tok) + "'");
            values.push_back(x);
        }
        ++rows;
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::copy(values.begin(), values.end(), m.data());
    return m;
}

int parse_label(std::string_view tok, const fs::path& path, std::size_t lineno) {
    tok = trim(tok);
    if (tok == "?") return kUnlabeled;
    int y = 0;
    if (!parse_number(tok, y) || y < 0) parse_fail(path, lineno, "unknown class token '" + std::string(tok) + "'");
    return y;
}

std::vector<int> read_labels(const fs::path& path) {
    auto in = open_input(path);
    std::vector<int> labels;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        labels.push_back(parse_label(line, path, lineno));
    }
    return labels;
}

std::vector<NodeId> parse_index_list(const std::vector<std::string_view>& toks, const fs::path& path,
                                     std::size_t lineno) {
    std::vector<NodeId> out;
    out.reserve(toks.size() - 1);
    for (std::size_t i = 1; i < toks.size(); ++i) {
        std::int64_t v = 0;
        if (!parse_number(toks[i], v)) parse_fail(path, lineno, "non-integer index '" + std::string(toks[i]) + "'");
        if (v < 0 || v > std::numeric_limits<NodeId>::max()) parse_fail(path, lineno, "index out of range");
        out.push_back(static_cast<NodeId>(v));
    }
    return out;
}

const char* const kResultColumns[] = {"split",        "init",         "seed",          "units",
                                      "input_scaling", "lambda",       "radius_alpha",  "ablate_features",
                                      "val_accuracy", "test_accuracy", "iterations_run", "converged",
                                      "measured_radius", "embed_seconds", "fit_seconds"};
constexpr std::size_t kNumResultColumns = std::size(kResultColumns);

// Accepts an explicit array or a range object.
std::vector<double> real_list(const json& j, const char* key) {
    if (!j.contains(key)) throw UsageError(std::string("config: missing grid key '") + key + "'");
    const json& v = j.at(key);
    if (v.is_array()) {
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw UsageError(std::string("config: '") + key + "' must hold numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    if (v.is_object() && v.contains("from") && v.contains("to") && v.contains("step")) {
        const double from = v.at("from").get<double>();
        const double to = v.at("to").get<double>();
        const double step = v.at("step").get<double>();
        if (!(step > 0.0) || to < from) throw UsageError(std::string("config: bad range for '") + key + "'");
        std::vector<double> out;
        for (std::size_t i = 0;; ++i) {
            const double x = std::round((from + static_cast<double>(i) * step) * 1e10) / 1e10;
            if (x > to + 1e-9) break;
            out.push_back(x);
        }
        return out;
    }
    throw UsageError(std::string("config: '") + key + "' must be an array or {from, to, step}");
}

std::vector<std::size_t> unit_list(const json& j) {
    if (!j.contains("units")) throw UsageError("config: missing grid key 'units'");
    const json& v = j.at("units");
    std::vector<std::size_t> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number_unsigned()) throw UsageError("config: 'units' must hold positive integers");
            out.push_back(x.get<std::size_t>());
        }
        return out;
    }
    if (v.is_object() && v.contains("log2_from") && v.contains("log2_to")) {
        const int from = v.at("log2_from").get<int>();
        const int to = v.at("log2_to").get<int>();
        const int step = v.value("log2_step", 1);
        if (from < 0 || to < from || to > 20 || step < 1) throw UsageError("config: bad log2 range for 'units'");
        for (int e = from; e <= to; e += step) out.push_back(std::size_t{1} << e);
        return out;
    }
    throw UsageError("config: 'units' must be an array or {log2_from, log2_to}");
}

} // namespace

fs::path resolve_dataset_dir(const std::string& name_or_path) {
    fs::path p(name_or_path);
    if (!fs::exists(p)) {
        if (const char* root = std::getenv("GESN_DATA_DIR"); root && *root && fs::exists(fs::path(root) / p))
            p = fs::path(root) / p;
        else
            throw DataError("dataset '" + name_or_path + "' not found (set GESN_DATA_DIR or pass a path)");
    }
    if (!fs::is_directory(p)) throw DataError("dataset path " + p.string() + " is not a directory");
    const bool native = fs::exists(p / "edges.txt") && fs::exists(p / "features.txt") && fs::exists(p / "labels.txt");
    const bool geom = fs::exists(p / "out1_graph_edges.txt") && fs::exists(p / "out1_node_feature_label.txt");
    if (!native && !geom) throw DataError("no dataset files in " + p.string());
    return p;
}

Dataset load_dataset(const DatasetBundle& bundle) {
    Matrix features = read_features(bundle.features);
    const auto n = static_cast<std::size_t>(features.rows());
    std::vector<int> labels = read_labels(bundle.labels);
    if (labels.size() != n)
        throw DataError(bundle.labels.string() + ": " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(n) + " feature rows");
    const auto arcs = read_edges(bundle.edges, n);

    Dataset d;
    d.name = bundle.name;
    d.graph = Graph::from_edges(n, arcs, std::move(features), std::move(labels));
    d.original_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) d.original_ids[i] = static_cast<std::int64_t>(i);
    return d;
}

Dataset load_dataset_dir(const fs::path& dir) {
    if (fs::exists(dir / "edges.txt")) {
        DatasetBundle b;
        b.name = dir.filename().string();
        b.edges = dir / "edges.txt";
        b.features = dir / "features.txt";
        b.labels = dir / "labels.txt";
        if (fs::exists(dir / "splits.txt")) b.splits = dir / "splits.txt";
        return load_dataset(b);
    }
    return load_geomgcn(dir);
}

Dataset load_geomgcn(const fs::path& dir) {
    const fs::path nodes_path = dir / "out1_node_feature_label.txt";
    const fs::path edges_path = dir / "out1_graph_edges.txt";

    std::vector<std::int64_t> ids;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    {
        auto in = open_input(nodes_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (lineno == 1 || is_comment_or_blank(line)) continue; // header
            const auto cols = tokenize(line, "\t");
            if (cols.size() != 3) parse_fail(nodes_path, lineno, "expected node_id, features, label");
            std::int64_t id = 0;
            if (!parse_number(cols[0], id)) parse_fail(nodes_path, lineno, "non-integer node id");
            std::vector<double> feats;
            for (auto tok : tokenize(cols[1], ",")) {
                double x = 0.0;
                if (!parse_number(tok, x)) parse_fail(nodes_path, lineno, "non-numeric feature");
                feats.push_back(x);
            }
            if (!rows.empty() && feats.size() != rows.front().size())
                parse_fail(nodes_path, lineno, "inconsistent feature width");
            ids.push_back(id);
            rows.push_back(std::move(feats));
            labels.push_back(parse_label(cols[2], nodes_path, lineno));
        }
    }
    std::vector<std::pair<std::int64_t, std::size_t>> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index.emplace_back(ids[i], i);
    std::sort(index.begin(), index.end());
    for (std::size_t i = 1; i < index.size(); ++i)
        if (index[i].first == index[i - 1].first)
            throw DataError(nodes_path.string() + ": duplicate node id " + std::to_string(index[i].first));
    auto dense_id = [&](std::int64_t id, std::size_t lineno) {
        auto it = std::lower_bound(index.begin(), index.end(), std::make_pair(id, std::size_t{0}));
        if (it == index.end() || it->first != id) parse_fail(edges_path, lineno, "unknown node id " + std::to_string(id));
        return static_cast<NodeId>(it->second);
    };

    std::vector<std::pair<NodeId, NodeId>> arcs;
    {
        auto in = open_input(edges_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (lineno == 1 || is_comment_or_blank(line)) continue;
            const auto toks = tokenize(line, kSpaceDelims);
            if (toks.size() != 2) parse_fail(edges_path, lineno, "expected two node ids");
            std::int64_t u = 0, v = 0;
            if (!parse_number(toks[0], u) || !parse_number(toks[1], v))
                parse_fail(edges_path, lineno, "non-integer node id");
            arcs.emplace_back(dense_id(u, lineno), dense_id(v, lineno));
        }
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto u = static_cast<Eigen::Index>(rows.empty() ? 0 : rows.front().size());
    Matrix features(n, u);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < u; ++j) features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    Dataset d;
    d.name = dir.filename().string();
    d.graph = Graph::from_edges(static_cast<std::size_t>(n), arcs, std::move(features), std::move(labels));
    d.original_ids = std::move(ids);
    return d;
}

void save_dataset(const Graph& g, const fs::path& dir) {
    fs::create_directories(dir);
    {
        auto out = open_output(dir / "edges.txt");
        out << "# undirected edges, 0-based node ids\n";
        for (const auto& [u, v] : g.undirected_edges()) out << u << ' ' << v << '\n';
    }
    {
        auto out = open_output(dir / "features.txt");
        const Matrix& f = g.features();
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
            for (Eigen::Index j = 0; j < f.cols(); ++j) {
                if (j) out << ',';
                out << format_double(f(i, j));
            }
            out << '\n';
        }
    }
    {
        auto out = open_output(dir / "labels.txt");
        for (std::size_t v = 0; v < g.num_nodes(); ++v) {
            if (g.is_labeled(v))
                out << g.labels()[v] << '\n';
            else
                out << "?\n";
        }
    }
}

SplitSet load_splits(const fs::path& path, std::size_t num_nodes, std::size_t expected, bool check_proportions) {
    auto in = open_input(path);
    SplitSet set;
    std::vector<std::array<bool, 3>> present;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto toks = tokenize(line, kSpaceDelims);
        const std::string_view key = toks.front();
        if (key == "split") {
            int id = 0;
            if (toks.size() != 2 || !parse_number(toks[1], id)) parse_fail(path, lineno, "expected 'split <id>'");
            set.splits.push_back(Split{id, {}, {}, {}});
            present.push_back({false, false, false});
            continue;
        }
        if (set.splits.empty()) parse_fail(path, lineno, "index list before any 'split' line");
        int which = key == "train" ? 0 : key == "val" ? 1 : key == "test" ? 2 : -1;
        if (which < 0) parse_fail(path, lineno, "unknown list name '" + std::string(key) + "'");
        if (present.back()[static_cast<std::size_t>(which)]) parse_fail(path, lineno, "duplicate list");
        present.back()[static_cast<std::size_t>(which)] = true;
        auto list = parse_index_list(toks, path, lineno);
        Split& s = set.splits.back();
        (which == 0 ? s.train : which == 1 ? s.val : s.test) = std::move(list);
    }
    if (expected != 0 && set.size() != expected)
        throw DataError(path.string() + ": found " + std::to_string(set.size()) + " splits, expected " +
                        std::to_string(expected));
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (!present[i][0] || !present[i][1] || !present[i][2])
            throw DataError(path.string() + ": split " + std::to_string(set.splits[i].id) +
                            " lacks a train/val/test list");
        validate_split(set.splits[i], num_nodes, check_proportions);
    }
    return set;
}

void write_splits(const SplitSet& splits, const fs::path& path) {
    auto out = open_output(path);
    out << "# train/val/test node indices per split\n";
    auto list = [&](const char* name, const std::vector<NodeId>& xs) {
        out << name;
        for (NodeId v : xs) out << ' ' << v;
        out << '\n';
    };
    for (const Split& s : splits.splits) {
        out << "split " << s.id << '\n';
        list("train", s.train);
        list("val", s.val);
        list("test", s.test);
    }
    if (!out) throw DataError("write failed: " + path.string());
}

SplitSet import_mask_splits(std::span<const fs::path> mask_files, std::size_t num_nodes, bool check_proportions) {
    SplitSet set;
    for (std::size_t s = 0; s < mask_files.size(); ++s) {
        const fs::path& path = mask_files[s];
        auto in = open_input(path);
        Split sp;
        sp.id = static_cast<int>(s);
        std::string line;
        std::size_t lineno = 0, node = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (is_comment_or_blank(line)) continue;
            const auto toks = tokenize(line, kFieldDelims);
            if (toks.size() != 3) parse_fail(path, lineno, "expected three 0/1 flags");
            if (node >= num_nodes) parse_fail(path, lineno, "more mask rows than nodes");
            int count = 0;
            for (int k = 0; k < 3; ++k) {
                const std::string_view t = trim(toks[static_cast<std::size_t>(k)]);
                bool flag = false;
                if (t == "1" || t == "true" || t == "True") flag = true;
                else if (!(t == "0" || t == "false" || t == "False")) parse_fail(path, lineno, "flag must be 0 or 1");
                if (!flag) continue;
                ++count;
                (k == 0 ? sp.train : k == 1 ? sp.val : sp.test).push_back(static_cast<NodeId>(node));
            }
            if (count > 1) parse_fail(path, lineno, "node " + std::to_string(node) + " in several masks (split " +
                                                        std::to_string(s) + ")");
            ++node;
        }
        if (node != num_nodes)
            throw DataError(path.string() + ": " + std::to_string(node) + " mask rows for " +
                            std::to_string(num_nodes) + " nodes");
        validate_split(sp, num_nodes, check_proportions);
        set.splits.push_back(std::move(sp));
    }
    return set;
}

void write_results(const std::vector<TrialResult>& records, const fs::path& path,
                   const std::vector<std::string>& preamble, const std::vector<std::string>& footer) {
    auto out = open_output(path);
    for (const auto& l : preamble) out << "# " << l << '\n';
    for (std::size_t c = 0; c < kNumResultColumns; ++c) out << (c ? "\t" : "") << kResultColumns[c];
    out << '\n';
    for (const auto& r : records) {
        out << r.split_id << '\t' << r.init_index << '\t' << r.seed << '\t' << r.config.units << '\t'
            << format_double(r.config.input_scaling) << '\t' << format_double(r.config.lambda) << '\t'
            << format_double(r.config.radius_alpha) << '\t' << (r.config.ablate_features ? 1 : 0) << '\t'
            << format_double(r.val_accuracy) << '\t' << format_double(r.test_accuracy) << '\t' << r.iterations_run
            << '\t' << (r.converged ? 1 : 0) << '\t' << format_double(r.measured_radius) << '\t'
            << format_double(r.embed_seconds) << '\t' << format_double(r.fit_seconds) << '\n';
    }
    for (const auto& l : footer) out << "# " << l << '\n';
    out.flush();
    if (!out) throw DataError("write failed: " + path.string());
}

std::vector<TrialResult> read_results(const fs::path& path) {
    auto in = open_input(path);
    std::vector<TrialResult> out;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (is_comment_or_blank(line)) continue;
        const auto toks = tokenize(line, "\t");
        if (!header) {
            if (toks.size() != kNumResultColumns) parse_fail(path, lineno, "bad header row");
            for (std::size_t c = 0; c < kNumResultColumns; ++c)
                if (trim(toks[c]) != kResultColumns[c]) parse_fail(path, lineno, "bad header column");
            header = true;
            continue;
        }
        if (toks.size() != kNumResultColumns) parse_fail(path, lineno, "wrong column count");
        TrialResult r;
        int ablate = 0, converged = 0;
        const bool ok = parse_number(toks[0], r.split_id) && parse_number(toks[1], r.init_index) &&
                        parse_number(toks[2], r.seed) && parse_number(toks[3], r.config.units) &&
                        parse_number(toks[4], r.config.input_scaling) && parse_number(toks[5], r.config.lambda) &&
                        parse_number(toks[6], r.config.radius_alpha) && parse_number(toks[7], ablate) &&
                        parse_number(toks[8], r.val_accuracy) && parse_number(toks[9], r.test_accuracy) &&
                        parse_number(toks[10], r.iterations_run) && parse_number(toks[11], converged) &&
                        parse_number(toks[12], r.measured_radius) && parse_number(toks[13], r.embed_seconds) &&
                        parse_number(toks[14], r.fit_seconds);
        if (!ok) parse_fail(path, lineno, "malformed record");
        r.config.ablate_features = ablate != 0;
        r.converged = converged != 0;
        out.push_back(r);
    }
    if (!header) throw DataError(path.string() + ": missing header row");
    return out;
}

std::vector<std::string> summary_lines(const GridSummary& s) {
    std::vector<std::string> out;
    auto cfg = [](const TrialConfig& c) {
        return "units=" + std::to_string(c.units) + " input_scaling=" + format_double(c.input_scaling) +
               " lambda=" + format_double(c.lambda) + " radius_alpha=" + format_double(c.radius_alpha) +
               " ablate_features=" + (c.ablate_features ? "1" : "0");
    };
    out.push_back("summary selection=per_split mean_test=" + format_double(s.mean_test) +
                  " std_test=" + format_double(s.std_test) + " splits=" + std::to_string(s.per_split.size()));
    for (const auto& sel : s.per_split)
        out.push_back("selected split=" + std::to_string(sel.split_id) + " " + cfg(sel.config) +
                      " mean_val=" + format_double(sel.mean_val) + " mean_test=" + format_double(sel.mean_test));
    out.push_back("summary selection=global mean_test=" + format_double(s.global_mean_test) +
                  " std_test=" + format_double(s.global_std_test) + " " + cfg(s.global_config));
    return out;
}

void write_sweep_table(const SweepTable& table, const fs::path& path, const std::vector<std::string>& preamble) {
    auto out = open_output(path);
    for (const auto& l : preamble) out << "# " << l << '\n';
    out << "radius_alpha\tunits\tmean\tstd\n";
    for (const auto& r : table.rows)
        out << format_double(r.radius_alpha) << '\t' << r.units << '\t' << format_double(r.mean) << '\t'
            << format_double(r.std) << '\n';
    for (const auto& [radius, count] : table.selected_radii)
        out << "# selected radius_alpha=" << format_double(radius) << " count=" << count << '\n';
    out.flush();
    if (!out) throw DataError("write failed: " + path.string());
}

std::string config_json(const ExperimentConfig& c) {
    json resolved;
    resolved["dataset"] = c.dataset;
    resolved["splits"] = c.splits;
    resolved["num_splits"] = c.num_splits;
    resolved["output"] = c.output;
    resolved["grid"] = {{"units", c.grid.units},
                        {"input_scalings", c.grid.input_scalings},
                        {"lambdas", c.grid.lambdas},
                        {"radius_alphas", c.grid.radius_alphas},
                        {"seeds_per_fold", c.grid.seeds_per_fold}};
    resolved["run"] = {{"max_iters", c.run.max_iters},
                       {"conv_tol", c.run.conv_tol},
                       {"master_seed", c.run.master_seed},
                       {"workers", c.run.workers},
                       {"ablate_features", c.run.ablate_features}};
    return resolved.dump();
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    ExperimentConfig c;
    try {
        c.dataset = j.value("dataset", std::string{});
        c.splits = j.value("splits", std::string{});
        c.num_splits = j.value("num_splits", std::size_t{10});
        c.output = j.value("output", std::string{});
        if (!j.contains("grid")) throw UsageError("config: missing 'grid' section");
        const json& g = j.at("grid");
        c.grid.units = unit_list(g);
        c.grid.input_scalings = real_list(g, "input_scalings");
        c.grid.lambdas = real_list(g, "lambdas");
        c.grid.radius_alphas = real_list(g, "radius_alphas");
        c.grid.seeds_per_fold = g.value("seeds_per_fold", std::size_t{10});
        if (j.contains("run")) {
            const json& r = j.at("run");
            c.run.max_iters = r.value("max_iters", c.run.max_iters);
            c.run.conv_tol = r.value("conv_tol", c.run.conv_tol);
            c.run.master_seed = r.value("master_seed", c.run.master_seed);
            c.run.workers = r.value("workers", c.run.workers);
            c.run.ablate_features = r.value("ablate_features", c.run.ablate_features);
        }
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    c.grid.validate();
    if (c.run.max_iters == 0 || !(c.run.conv_tol > 0.0)) throw UsageError("config: invalid run options");

    c.resolved_json = config_json(c);
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace gesn

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gesn/graph.hpp"
#include "gesn/pipeline.hpp"

namespace gesn {

namespace fs = std::filesystem;

/// Paths making up one dataset.
///
/// Native layout (one directory):
///   edges.txt     "src dst" per line, 0-based node ids, '#' comments
///   features.txt  one row of comma/tab/space separated decimals per node
///   labels.txt    one class token per node: a non-negative integer, or '?'
///   splits.txt    optional, see load_splits
struct DatasetBundle {
    std::string name;
    fs::path edges;
    fs::path features;
    fs::path labels;
    std::optional<fs::path> splits;
};

struct Dataset {
    std::string name;
    Graph graph;
    /// original_ids[v] is the id node v carried in the source files.
    std::vector<std::int64_t> original_ids;
};

/// Resolves a directory into a bundle. Accepts the native layout or the
/// Geom-GCN raw layout (out1_graph_edges.txt + out1_node_feature_label.txt).
/// A bare name that is not an existing path is looked up under
/// $GESN_DATA_DIR. Throws DataError when neither layout is present.
fs::path resolve_dataset_dir(const std::string& name_or_path);

/// Loads a native bundle. Features row i belongs to node i; labels line i
/// likewise. Throws DataError (with file and line) on malformed input.
Dataset load_dataset(const DatasetBundle& bundle);

/// Loads either layout from a directory (see resolve_dataset_dir).
Dataset load_dataset_dir(const fs::path& dir);

/// Geom-GCN raw files: tab-separated "node_id<TAB>comma features<TAB>label"
/// rows and "src<TAB>dst" edges, each with one header line. Node ids are
/// remapped to dense 0-based indices in file order.
Dataset load_geomgcn(const fs::path& dir);

/// Writes edges.txt (undirected edges u < v), features.txt and labels.txt.
void save_dataset(const Graph& g, const fs::path& dir);

/// Split file format:
///   # comment
///   split <id>
///   train <i> <i> ...
///   val <i> ...
///   test <i> ...
/// repeated per split. Throws DataError on overlap, out-of-range ids,
/// missing lists, or a split count different from `expected` (0: any).
SplitSet load_splits(const fs::path& path, std::size_t num_nodes, std::size_t expected = 10,
                     bool check_proportions = true);

void write_splits(const SplitSet& splits, const fs::path& path);

/// Adapter for published boolean-mask splits: one file per split, one line
/// per node holding three 0/1 flags "train val test". Split ids follow file
/// order.
SplitSet import_mask_splits(std::span<const fs::path> mask_files, std::size_t num_nodes,
                            bool check_proportions = true);

/// Tab-separated results with a mandatory header row. `preamble` lines are
/// written as '#' comments before the header; `footer` lines as '#'
/// comments after the body.
void write_results(const std::vector<TrialResult>& records, const fs::path& path,
                   const std::vector<std::string>& preamble = {}, const std::vector<std::string>& footer = {});

std::vector<TrialResult> read_results(const fs::path& path);

/// Summary lines for the results footer: "summary mean_test=... std_test=..."
/// plus one line per split selection and the global-selection variant.
std::vector<std::string> summary_lines(const GridSummary& s);

/// "radius_alpha units mean std" rows, then "# selected radius=<r> count=<n>".
void write_sweep_table(const SweepTable& table, const fs::path& path,
                       const std::vector<std::string>& preamble = {});

struct ExperimentConfig {
    std::string dataset;
    std::string splits;            // empty: <dataset>/splits.txt if present, else random splits
    std::size_t num_splits = 10;   // used when generating random splits
    HyperGrid grid;
    RunOptions run;
    std::string output;
    std::string resolved_json;     // fully resolved config, single line
};

/// JSON config:
/// {
///   "dataset": "data/texas", "splits": "", "num_splits": 10, "output": "results.tsv",
///   "grid": {"units": [16, 64] | {"log2_from": 4, "log2_to": 12},
///            "input_scalings": [...], "lambdas": [...],
///            "radius_alphas": [...] | {"from": 0.1, "to": 9.5, "step": 0.2},
///            "seeds_per_fold": 10},
///   "run": {"max_iters": 100, "conv_tol": 1e-6, "master_seed": 0,
///           "workers": 0, "ablate_features": false}
/// }
/// Throws UsageError on missing or ill-typed keys.
ExperimentConfig load_config(const fs::path& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Single-line JSON of the fully resolved config (echoed into result files).
std::string config_json(const ExperimentConfig& c);

} // namespace gesn

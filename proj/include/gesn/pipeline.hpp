#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "gesn/graph.hpp"
#include "gesn/kernels.hpp"

namespace gesn {

struct Split {
    int id = 0;
    std::vector<NodeId> train;
    std::vector<NodeId> val;
    std::vector<NodeId> test;
};

struct SplitSet {
    std::vector<Split> splits;

    std::size_t size() const { return splits.size(); }
};

/// Throws DataError naming the split when lists overlap, contain
/// out-of-range ids, or (when `check_proportions`) deviate from 48/32/20 of
/// the covered nodes by two nodes or more.
void validate_split(const Split& s, std::size_t num_nodes, bool check_proportions = true);

/// Random 48/32/20 partitions of `nodes`: floor(0.48 n) train,
/// floor(0.32 n) validation, remainder test. Deterministic given seed.
SplitSet make_random_splits(std::span<const NodeId> nodes, std::size_t count, std::uint64_t seed);

struct HyperGrid {
    std::vector<std::size_t> units;
    std::vector<double> input_scalings;
    std::vector<double> lambdas;
    std::vector<double> radius_alphas;
    std::size_t seeds_per_fold = 10;

    /// Throws UsageError on an empty list, non-positive radius, or zero seeds.
    void validate() const;
    std::size_t num_configs() const {
        return units.size() * input_scalings.size() * lambdas.size() * radius_alphas.size();
    }
};

struct TrialConfig {
    std::size_t units = 16;
    double input_scaling = 1.0;
    double lambda = 1e-3;
    double radius_alpha = 0.9;
    bool ablate_features = false;

    friend bool operator==(const TrialConfig&, const TrialConfig&) = default;
};

struct TrialResult {
    int split_id = 0;
    std::size_t init_index = 0;
    std::uint64_t seed = 0;
    TrialConfig config;
    double val_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::size_t iterations_run = 0;
    bool converged = false;
    double embed_seconds = 0.0;
    double fit_seconds = 0.0;
    double measured_radius = 0.0; // rho(w_hat) actually used

    /// Equality ignoring the wall-clock fields.
    bool same_outcome(const TrialResult& o) const;
};

struct RunOptions {
    std::size_t max_iters = 100;
    double conv_tol = 1e-6;
    std::uint64_t master_seed = 0;
    std::size_t workers = 0; // 0: all available threads
    bool ablate_features = false;
    kernels::Backend backend = kernels::Backend::Parallel;
};

/// Graph with every feature row replaced by the constant [1].
Graph ablate_features(const Graph& g);

/// Builds the reservoir from `seed`, embeds, fits the readout on the train
/// nodes and scores validation and test. `graph_alpha` is the adjacency's
/// spectral radius; an edgeless graph (alpha = 0) uses alpha = 1, since the
/// recurrent term vanishes regardless of its scale.
TrialResult run_trial(const Graph& g, double graph_alpha, const Split& split, const TrialConfig& config,
                      std::uint64_t seed, const RunOptions& opts = {});

/// Every (split, init, units, scaling, radius, lambda) trial. Reservoir draws
/// are shared across scaling and radius for a given (split, init, units) and
/// embeddings are shared across lambda. Records come back in a fixed order
/// regardless of the worker count. Throws PartialGridError when a trial
/// fails; it carries the records completed so far.
std::vector<TrialResult> evaluate_grid(const Graph& g, double graph_alpha, const SplitSet& splits,
                                       const HyperGrid& grid, const RunOptions& opts = {});

class PartialGridError : public std::runtime_error {
public:
    PartialGridError(const std::string& what, std::vector<TrialResult> completed, int exit_code)
        : std::runtime_error(what), completed_(std::move(completed)), exit_code_(exit_code) {}
    const std::vector<TrialResult>& completed() const { return completed_; }
    int exit_code() const { return exit_code_; }

private:
    std::vector<TrialResult> completed_;
    int exit_code_;
};

struct SplitSelection {
    int split_id = 0;
    TrialConfig config;
    double mean_val = 0.0;
    double mean_test = 0.0;
};

struct GridSummary {
    std::vector<SplitSelection> per_split;
    double mean_test = 0.0; // over splits, per-split selection
    double std_test = 0.0;  // population std over splits
    TrialConfig global_config;
    double global_mean_test = 0.0;
    double global_std_test = 0.0;
};

/// Mean and population standard deviation; values are sorted first so the
/// result does not depend on input order.
std::pair<double, double> mean_std(std::vector<double> values);

/// Selection over an existing record set. Per split, the config with the
/// highest seed-averaged validation accuracy wins (ties: smaller radius,
/// smaller units, larger lambda, larger input scaling). The global variant
/// picks one config by validation accuracy averaged over all splits.
GridSummary summarize(const std::vector<TrialResult>& records);

GridSummary grid_search(const Graph& g, double graph_alpha, const SplitSet& splits, const HyperGrid& grid,
                        const RunOptions& opts = {});

struct SweepRow {
    double radius_alpha = 0.0;
    std::size_t units = 0;
    double mean = 0.0;
    double std = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;                  // ordered by (radius, units)
    std::map<double, std::size_t> selected_radii; // radius -> number of splits selecting it
};

/// Per (radius, units): per-split selection over input scaling and lambda,
/// then mean/std of test accuracy across splits. The histogram counts the
/// radius chosen by the unrestricted per-split selection.
SweepTable sweep_table(const std::vector<TrialResult>& records);

SweepTable radius_sweep(const Graph& g, double graph_alpha, const SplitSet& splits, const HyperGrid& base,
                        const std::vector<double>& radii, const RunOptions& opts = {});

} // namespace gesn

#include "gesn/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <string>
#include <tuple>

#include <omp.h>

#include "gesn/error.hpp"
#include "gesn/readout.hpp"
#include "gesn/reservoir.hpp"
#include "gesn/rng.hpp"

namespace gesn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Lexicographic order of the selection tie-break: smaller radius, smaller
// units, larger lambda, larger input scaling.
auto tie_break_key(const TrialConfig& c) {
    return std::make_tuple(c.radius_alpha, c.units, -c.lambda, -c.input_scaling, c.ablate_features);
}

struct ConfigLess {
    bool operator()(const TrialConfig& a, const TrialConfig& b) const { return tie_break_key(a) < tie_break_key(b); }
};

std::vector<int> labels_of(const Graph& g, std::span<const NodeId> nodes, int split_id) {
    std::vector<int> out;
    out.reserve(nodes.size());
    for (NodeId v : nodes) {
        if (!g.is_labeled(static_cast<std::size_t>(v)))
            throw DataError("split " + std::to_string(split_id) + " uses unlabeled node " + std::to_string(v));
        out.push_back(g.labels()[static_cast<std::size_t>(v)]);
    }
    return out;
}

int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const UsageError&) {
        return 1;
    } catch (const DataError&) {
        return 2;
    } catch (...) {
        return 3;
    }
}

std::string message_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

ReservoirConfig reservoir_config(const TrialConfig& c, const RunOptions& opts, std::uint64_t seed) {
    ReservoirConfig rc;
    rc.units = c.units;
    rc.input_scaling = c.input_scaling;
    rc.radius_alpha = c.radius_alpha;
    rc.max_iters = opts.max_iters;
    rc.conv_tol = opts.conv_tol;
    rc.seed = seed;
    return rc;
}

// One (split, init) batch of the grid: draws once per unit count, embeds once
// per (scaling, radius), fits once per lambda.
std::vector<TrialResult> evaluate_batch(const Graph& g, double alpha, const Split& split, std::size_t init_index,
                                        std::uint64_t seed, const HyperGrid& grid, const RunOptions& opts) {
    const std::vector<int> train_labels = labels_of(g, split.train, split.id);
    labels_of(g, split.val, split.id);
    labels_of(g, split.test, split.id);
    const double effective_alpha = alpha > 0.0 ? alpha : 1.0;

    std::vector<TrialResult> out;
    for (std::size_t units : grid.units) {
        const ReservoirDraw draw = draw_reservoir(units, g.num_features(), seed);
        for (double scaling : grid.input_scalings) {
            for (double radius : grid.radius_alphas) {
                TrialConfig base{units, scaling, 0.0, radius, opts.ablate_features};
                const ReservoirConfig rc = reservoir_config(base, opts, seed);

                const auto t_embed = Clock::now();
                const Reservoir r = rescale(draw, scaling, radius / effective_alpha);
                EmbeddingOptions eo;
                eo.backend = opts.backend;
                const EmbeddingMatrix emb = compute_embeddings(g, r, rc, eo);
                const double embed_seconds = seconds_since(t_embed);

                const auto t_gram = Clock::now();
                const RidgeProblem problem(emb.states, split.train, train_labels, g.num_classes());
                const double gram_seconds = seconds_since(t_gram);

                for (double lambda : grid.lambdas) {
                    const auto t_fit = Clock::now();
                    const ReadoutModel model = problem.fit(lambda);
                    const double fit_seconds = gram_seconds + seconds_since(t_fit);
                    if (model.parameter_count() != static_cast<std::size_t>(g.num_classes()) * (units + 1))
                        throw NumericalError("readout parameter count mismatch");
                    const std::vector<int> pred = predict(model, emb.states);

                    TrialResult tr;
                    tr.split_id = split.id;
                    tr.init_index = init_index;
                    tr.seed = seed;
                    tr.config = base;
                    tr.config.lambda = lambda;
                    tr.val_accuracy = accuracy(pred, g.labels(), split.val);
                    tr.test_accuracy = accuracy(pred, g.labels(), split.test);
                    tr.iterations_run = emb.iterations_run;
                    tr.converged = emb.converged;
                    tr.embed_seconds = embed_seconds;
                    tr.fit_seconds = fit_seconds;
                    tr.measured_radius = r.measured_radius;
                    out.push_back(tr);
                }
            }
        }
    }
    return out;
}

} // namespace

void validate_split(const Split& s, std::size_t num_nodes, bool check_proportions) {
    const std::string tag = "split " + std::to_string(s.id) + ": ";
    std::vector<char> seen(num_nodes, 0);
    auto mark = [&](const std::vector<NodeId>& list, const char* name) {
        for (NodeId v : list) {
            if (v < 0 || static_cast<std::size_t>(v) >= num_nodes)
                throw DataError(tag + name + " index " + std::to_string(v) + " out of range");
            if (seen[static_cast<std::size_t>(v)])
                throw DataError(tag + "node " + std::to_string(v) + " appears in more than one list (" + name + ")");
            seen[static_cast<std::size_t>(v)] = 1;
        }
    };
    mark(s.train, "train");
    mark(s.val, "val");
    mark(s.test, "test");
    if (s.train.empty() || s.val.empty() || s.test.empty()) throw DataError(tag + "empty train/val/test list");
    if (!check_proportions) return;
    const double n = static_cast<double>(s.train.size() + s.val.size() + s.test.size());
    auto check = [&](std::size_t count, double frac, const char* name) {
        if (std::abs(static_cast<double>(count) - frac * n) >= 2.0)
            throw DataError(tag + name + " holds " + std::to_string(count) + " of " +
                            std::to_string(static_cast<std::size_t>(n)) + " nodes, expected about " +
                            std::to_string(frac * n));
    };
    check(s.train.size(), 0.48, "train");
    check(s.val.size(), 0.32, "val");
    check(s.test.size(), 0.20, "test");
}

SplitSet make_random_splits(std::span<const NodeId> nodes, std::size_t count, std::uint64_t seed) {
    if (nodes.size() < 3) throw UsageError("need at least three nodes to split");
    const std::size_t n = nodes.size();
    const std::size_t n_train = n * 48 / 100;
    const std::size_t n_val = n * 32 / 100;
    SplitSet out;
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<NodeId> perm(nodes.begin(), nodes.end());
        Rng rng(derive_seed(seed, s, 0));
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        Split sp;
        sp.id = static_cast<int>(s);
        sp.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
        sp.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                      perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        sp.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
        std::sort(sp.train.begin(), sp.train.end());
        std::sort(sp.val.begin(), sp.val.end());
        std::sort(sp.test.begin(), sp.test.end());
        out.splits.push_back(std::move(sp));
    }
    return out;
}

void HyperGrid::validate() const {
    if (units.empty() || input_scalings.empty() || lambdas.empty() || radius_alphas.empty())
        throw UsageError("hyperparameter grid has an empty list");
    if (seeds_per_fold == 0) throw UsageError("seeds_per_fold must be at least 1");
    for (double r : radius_alphas)
        if (!(r > 0.0)) throw UsageError("radius values must be positive");
    for (std::size_t h : units)
        if (h == 0) throw UsageError("unit counts must be positive");
    for (double s : input_scalings)
        if (!(s > 0.0)) throw UsageError("input scalings must be positive");
    for (double l : lambdas)
        if (!(l >= 0.0)) throw UsageError("lambdas must be non-negative");
}

bool TrialResult::same_outcome(const TrialResult& o) const {
    return split_id == o.split_id && init_index == o.init_index && seed == o.seed && config == o.config &&
           val_accuracy == o.val_accuracy && test_accuracy == o.test_accuracy &&
           iterations_run == o.iterations_run && converged == o.converged && measured_radius == o.measured_radius;
}

Graph ablate_features(const Graph& g) {
    return g.with_features(Matrix::Ones(static_cast<Eigen::Index>(g.num_nodes()), 1));
}

TrialResult run_trial(const Graph& g, double graph_alpha, const Split& split, const TrialConfig& config,
                      std::uint64_t seed, const RunOptions& opts) {
    HyperGrid one;
    one.units = {config.units};
    one.input_scalings = {config.input_scaling};
    one.lambdas = {config.lambda};
    one.radius_alphas = {config.radius_alpha};
    one.seeds_per_fold = 1;
    RunOptions o = opts;
    o.ablate_features = config.ablate_features;
    const Graph ablated = config.ablate_features ? ablate_features(g) : Graph{};
    const Graph& input = config.ablate_features ? ablated : g;
    return evaluate_batch(input, graph_alpha, split, 0, seed, one, o).front();
}

std::vector<TrialResult> evaluate_grid(const Graph& g, double graph_alpha, const SplitSet& splits,
                                       const HyperGrid& grid, const RunOptions& opts) {
    grid.validate();
    if (splits.splits.empty()) throw UsageError("no splits to evaluate");
    const Graph ablated = opts.ablate_features ? ablate_features(g) : Graph{};
    const Graph& input = opts.ablate_features ? ablated : g;

    const std::size_t tasks = splits.size() * grid.seeds_per_fold;
    std::vector<std::vector<TrialResult>> batches(tasks);
    std::vector<std::exception_ptr> errors(tasks);
    const int max_threads = opts.workers > 0 ? static_cast<int>(opts.workers) : omp_get_max_threads();
    const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(max_threads), tasks));

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::size_t t = 0; t < tasks; ++t) {
        const Split& split = splits.splits[t / grid.seeds_per_fold];
        const std::size_t init = t % grid.seeds_per_fold;
        const std::uint64_t seed =
            derive_seed(opts.master_seed, static_cast<std::uint64_t>(split.id), static_cast<std::uint64_t>(init));
        try {
            batches[t] = evaluate_batch(input, graph_alpha, split, init, seed, grid, opts);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    }

    std::vector<TrialResult> records;
    records.reserve(tasks * grid.num_configs());
    std::exception_ptr first_error;
    for (std::size_t t = 0; t < tasks; ++t) {
        if (errors[t]) {
            if (!first_error) first_error = errors[t];
            continue;
        }
        records.insert(records.end(), batches[t].begin(), batches[t].end());
    }
    if (first_error)
        throw PartialGridError(message_of(first_error), std::move(records), exit_code_for(first_error));
    return records;
}

std::pair<double, double> mean_std(std::vector<double> values) {
    if (values.empty()) return {0.0, 0.0};
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

GridSummary summarize(const std::vector<TrialResult>& records) {
    if (records.empty()) throw UsageError("no trial records to summarize");

    struct Acc {
        std::vector<double> val, test;
    };
    // split -> config -> accuracies over seeds
    std::map<int, std::map<TrialConfig, Acc, ConfigLess>> by_split;
    for (const auto& r : records) {
        auto& a = by_split[r.split_id][r.config];
        a.val.push_back(r.val_accuracy);
        a.test.push_back(r.test_accuracy);
    }

    GridSummary out;
    std::map<TrialConfig, std::vector<double>, ConfigLess> global_val;
    std::map<TrialConfig, std::map<int, double>, ConfigLess> global_test;
    std::vector<double> selected_tests;
    for (const auto& [split_id, configs] : by_split) {
        SplitSelection best;
        best.split_id = split_id;
        bool first = true;
        for (const auto& [cfg, acc] : configs) { // ascending tie-break order
            const double mv = mean_std(acc.val).first;
            const double mt = mean_std(acc.test).first;
            global_val[cfg].push_back(mv);
            global_test[cfg][split_id] = mt;
            if (first || mv > best.mean_val) {
                best.config = cfg;
                best.mean_val = mv;
                best.mean_test = mt;
                first = false;
            }
        }
        selected_tests.push_back(best.mean_test);
        out.per_split.push_back(best);
    }
    std::tie(out.mean_test, out.std_test) = mean_std(selected_tests);

    bool first = true;
    double best_global = 0.0;
    for (const auto& [cfg, vals] : global_val) {
        if (vals.size() != by_split.size()) continue; // config missing on some split
        const double mv = mean_std(vals).first;
        if (first || mv > best_global) {
            best_global = mv;
            out.global_config = cfg;
            first = false;
        }
    }
    std::vector<double> global_tests;
    for (const auto& [split_id, mt] : global_test[out.global_config]) global_tests.push_back(mt);
    std::tie(out.global_mean_test, out.global_std_test) = mean_std(global_tests);
    return out;
}

GridSummary grid_search(const Graph& g, double graph_alpha, const SplitSet& splits, const HyperGrid& grid,
                        const RunOptions& opts) {
    return summarize(evaluate_grid(g, graph_alpha, splits, grid, opts));
}

SweepTable sweep_table(const std::vector<TrialResult>& records) {
    std::map<std::pair<double, std::size_t>, std::vector<TrialResult>> groups;
    for (const auto& r : records) groups[{r.config.radius_alpha, r.config.units}].push_back(r);
    SweepTable table;
    for (const auto& [key, subset] : groups) {
        const GridSummary s = summarize(subset);
        table.rows.push_back({key.first, key.second, s.mean_test, s.std_test});
    }
    for (const auto& sel : summarize(records).per_split) ++table.selected_radii[sel.config.radius_alpha];
    return table;
}

SweepTable radius_sweep(const Graph& g, double graph_alpha, const SplitSet& splits, const HyperGrid& base,
                        const std::vector<double>& radii, const RunOptions& opts) {
    if (radii.empty()) throw UsageError("radius sweep needs at least one radius");
    HyperGrid grid = base;
    grid.radius_alphas = radii;
    return sweep_table(evaluate_grid(g, graph_alpha, splits, grid, opts));
}

} // namespace gesn

#include "gesn/cli.hpp"

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "gesn/dataio.hpp"
#include "gesn/error.hpp"
#include "gesn/graph.hpp"
#include "gesn/pipeline.hpp"
#include "gesn/rng.hpp"

namespace gesn::cli {

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string percent_summary(double mean, double std) {
    return fixed(100.0 * mean, 1) + " \xC2\xB1 " + fixed(100.0 * std, 1);
}

// Split source, in order: explicit file, <dir>/splits.txt, <dir>/split_mask_<i>.txt,
// otherwise `count` random 48/32/20 splits of the labeled nodes.
SplitSet resolve_splits(const std::string& explicit_path, const fs::path& dir, const Graph& g, std::size_t count,
                        std::uint64_t seed, std::ostream& err) {
    if (!explicit_path.empty()) return load_splits(explicit_path, g.num_nodes(), 0);
    if (fs::exists(dir / "splits.txt")) return load_splits(dir / "splits.txt", g.num_nodes(), 0);
    std::vector<fs::path> masks;
    for (std::size_t i = 0; fs::exists(dir / ("split_mask_" + std::to_string(i) + ".txt")); ++i)
        masks.push_back(dir / ("split_mask_" + std::to_string(i) + ".txt"));
    if (!masks.empty()) return import_mask_splits(masks, g.num_nodes(), false); // published splits are taken as given
    err << "note: no split files in " << dir.string() << "; generating " << count << " random 48/32/20 splits\n";
    const auto labeled = g.labeled_nodes();
    return make_random_splits(labeled, count, seed);
}

struct Loaded {
    fs::path dir;
    Dataset data;
    double alpha = 0.0;
};

Loaded load(const std::string& dataset) {
    Loaded l;
    l.dir = resolve_dataset_dir(dataset);
    l.data = load_dataset_dir(l.dir);
    l.alpha = spectral_radius(l.data.graph);
    return l;
}

std::vector<std::string> preamble_for(const std::string& command, const std::string& config_json) {
    return {"gesn " + command + " results", "config: " + config_json};
}

void print_summary(const GridSummary& s, std::ostream& out) {
    for (const auto& sel : s.per_split) {
        out << "split " << sel.split_id << ": units " << sel.config.units << ", input scaling "
            << sel.config.input_scaling << ", lambda " << sel.config.lambda << ", radius " << sel.config.radius_alpha
            << " -> val " << fixed(100.0 * sel.mean_val, 1) << ", test " << fixed(100.0 * sel.mean_test, 1) << '\n';
    }
    out << "test accuracy (global selection) " << percent_summary(s.global_mean_test, s.global_std_test) << '\n';
    out << "test accuracy " << percent_summary(s.mean_test, s.std_test) << " (" << s.per_split.size()
        << " splits, per-split selection)\n";
}

struct Options {
    std::string config;
    std::string dataset;
    std::string splits;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    bool ablate = false;
    std::vector<double> radii;
    std::vector<std::size_t> units;
    // run
    double input_scaling = 1.0;
    double lambda = 1e-3;
    std::size_t inits = 1;
    std::size_t max_iters = 100;
    // synth
    std::size_t nodes = 400;
    int classes = 2;
    double p_in = 0.05;
    double p_out = 0.005;
    std::size_t features = 0;
    double noise = 0.0;
    std::size_t num_splits = 10;
};

ExperimentConfig config_with_overrides(const Options& o) {
    ExperimentConfig c = load_config(o.config);
    if (!o.dataset.empty()) c.dataset = o.dataset;
    if (!o.splits.empty()) c.splits = o.splits;
    if (!o.out.empty()) c.output = o.out;
    if (o.seed) c.run.master_seed = *o.seed;
    if (o.workers) c.run.workers = *o.workers;
    if (o.ablate) c.run.ablate_features = true;
    if (!o.units.empty()) c.grid.units = o.units;
    if (!o.radii.empty()) c.grid.radius_alphas = o.radii;
    c.grid.validate();
    if (c.dataset.empty()) throw UsageError("no dataset given (config 'dataset' or --dataset)");
    if (c.output.empty()) throw UsageError("no output path given (config 'output' or --out)");
    c.resolved_json = config_json(c);
    return c;
}

int cmd_stats(const Options& o, std::ostream& out) {
    const Loaded l = load(o.dataset);
    const Graph& g = l.data.graph;
    GraphStats s;
    s.homophily = homophily(g);
    s.spectral_radius = l.alpha;
    s.num_nodes = g.num_nodes();
    s.num_edges = g.num_arcs();
    s.num_features = g.num_features();
    s.num_classes = g.num_classes();
    out << "dataset    " << l.data.name << '\n'
        << "homophily  " << fixed(s.homophily, 2) << '\n'
        << "nodes      " << s.num_nodes << '\n'
        << "edges      " << s.num_edges << '\n'
        << "radius     " << fixed(s.spectral_radius, 2) << '\n'
        << "features   " << s.num_features << '\n'
        << "classes    " << s.num_classes << '\n';
    return kOk;
}

int write_partial_and_report(const PartialGridError& e, const fs::path& path, const std::string& command,
                             const std::string& config_json, std::ostream& err) {
    try {
        write_results(e.completed(), path, preamble_for(command, config_json), {"partial: " + std::string(e.what())});
        err << "error: " << e.what() << " (partial results in " << path.string() << ")\n";
    } catch (const std::exception& w) {
        err << "error: " << e.what() << "; could not write partial results: " << w.what() << '\n';
    }
    return e.exit_code();
}

int cmd_grid(const Options& o, std::ostream& out, std::ostream& err) {
    const ExperimentConfig c = config_with_overrides(o);
    const Loaded l = load(c.dataset);
    const SplitSet splits = resolve_splits(c.splits, l.dir, l.data.graph, c.num_splits, c.run.master_seed, err);
    const std::string& echo = c.resolved_json;
    std::vector<TrialResult> records;
    try {
        records = evaluate_grid(l.data.graph, l.alpha, splits, c.grid, c.run);
    } catch (const PartialGridError& e) {
        return write_partial_and_report(e, c.output, "grid", echo, err);
    }
    const GridSummary s = summarize(records);
    write_results(records, c.output, preamble_for("grid", echo), summary_lines(s));
    print_summary(s, out);
    return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    const ExperimentConfig c = config_with_overrides(o);
    const Loaded l = load(c.dataset);
    const SplitSet splits = resolve_splits(c.splits, l.dir, l.data.graph, c.num_splits, c.run.master_seed, err);
    const std::string& echo = c.resolved_json;
    const fs::path trials_path = fs::path(c.output).string() + ".trials.tsv";
    std::vector<TrialResult> records;
    try {
        records = evaluate_grid(l.data.graph, l.alpha, splits, c.grid, c.run);
    } catch (const PartialGridError& e) {
        return write_partial_and_report(e, trials_path, "sweep", echo, err);
    }
    write_results(records, trials_path, preamble_for("sweep", echo), summary_lines(summarize(records)));
    const SweepTable table = sweep_table(records);
    write_sweep_table(table, c.output, preamble_for("sweep", echo));
    out << "radius_alpha\tunits\tmean\tstd\n";
    for (const auto& r : table.rows)
        out << fixed(r.radius_alpha, 2) << '\t' << r.units << '\t' << fixed(100.0 * r.mean, 1) << '\t'
            << fixed(100.0 * r.std, 1) << '\n';
    for (const auto& [radius, count] : table.selected_radii)
        out << "selected radius " << fixed(radius, 2) << ": " << count << " split(s)\n";
    return kOk;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.dataset.empty()) throw UsageError("run needs --dataset");
    const Loaded l = load(o.dataset);
    const std::uint64_t seed = o.seed.value_or(0);
    const SplitSet splits = resolve_splits(o.splits, l.dir, l.data.graph, o.num_splits, seed, err);
    HyperGrid grid;
    grid.units = o.units.empty() ? std::vector<std::size_t>{64} : o.units;
    grid.input_scalings = {o.input_scaling};
    grid.lambdas = {o.lambda};
    grid.radius_alphas = o.radii.empty() ? std::vector<double>{0.9} : o.radii;
    grid.seeds_per_fold = o.inits;
    RunOptions ro;
    ro.master_seed = seed;
    ro.workers = o.workers.value_or(0);
    ro.ablate_features = o.ablate;
    ro.max_iters = o.max_iters;
    const std::vector<TrialResult> records = evaluate_grid(l.data.graph, l.alpha, splits, grid, ro);
    for (const auto& r : records) {
        out << "split " << r.split_id << " init " << r.init_index << " units " << r.config.units << " radius "
            << r.config.radius_alpha << ": val " << fixed(100.0 * r.val_accuracy, 1) << " test "
            << fixed(100.0 * r.test_accuracy, 1) << " iterations " << r.iterations_run
            << (r.converged ? " converged" : " capped") << '\n';
    }
    const GridSummary s = summarize(records);
    if (!o.out.empty())
        write_results(records, o.out, preamble_for("run", "dataset=" + o.dataset), summary_lines(s));
    print_summary(s, out);
    return kOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
    if (o.out.empty()) throw UsageError("synth needs --out <directory>");
    SbmParams p;
    p.num_nodes = o.nodes;
    p.num_classes = o.classes;
    p.p_in = o.p_in;
    p.p_out = o.p_out;
    p.feat_dim = o.features;
    p.feat_noise = o.noise;
    p.seed = o.seed.value_or(0);
    const Graph g = generate_sbm(p);
    save_dataset(g, o.out);
    const auto labeled = g.labeled_nodes();
    write_splits(make_random_splits(labeled, o.num_splits, mix64(p.seed)), fs::path(o.out) / "splits.txt");
    const GraphStats s = graph_stats(g);
    out << "wrote " << o.out << ": nodes " << s.num_nodes << ", edges " << s.num_edges << ", homophily "
        << fixed(s.homophily, 2) << ", radius " << fixed(s.spectral_radius, 2) << '\n';
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graph echo state networks for node classification"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_option("--workers", o.workers, "Worker threads (default: available parallelism)");
        sub->add_flag("--ablate-features", o.ablate, "Replace node features by a constant input");
    };

    auto* stats = app.add_subcommand("stats", "Print dataset statistics");
    stats->add_option("--dataset", o.dataset, "Dataset directory or name under $GESN_DATA_DIR")->required();

    auto* run_cmd = app.add_subcommand("run", "Evaluate a single configuration on every split");
    run_cmd->add_option("--dataset", o.dataset)->required();
    run_cmd->add_option("--splits", o.splits, "Split file");
    run_cmd->add_option("--out", o.out, "Results file");
    run_cmd->add_option("--units", o.units, "Reservoir units")->delimiter(',');
    run_cmd->add_option("--radii", o.radii, "Values of rho(W_hat) * alpha")->delimiter(',');
    run_cmd->add_option("--input-scaling", o.input_scaling);
    run_cmd->add_option("--lambda", o.lambda);
    run_cmd->add_option("--inits", o.inits, "Reservoir initializations per split");
    run_cmd->add_option("--max-iters", o.max_iters);
    run_cmd->add_option("--num-splits", o.num_splits, "Random splits when no split file exists");
    add_common(run_cmd);

    auto* grid = app.add_subcommand("grid", "Grid search with per-split model selection");
    grid->add_option("--config", o.config)->required();
    grid->add_option("--dataset", o.dataset);
    grid->add_option("--splits", o.splits);
    grid->add_option("--out", o.out);
    grid->add_option("--units", o.units)->delimiter(',');
    grid->add_option("--radii", o.radii)->delimiter(',');
    add_common(grid);

    auto* sweep = app.add_subcommand("sweep", "Accuracy versus reservoir radius table");
    sweep->add_option("--config", o.config)->required();
    sweep->add_option("--dataset", o.dataset);
    sweep->add_option("--splits", o.splits);
    sweep->add_option("--out", o.out);
    sweep->add_option("--units", o.units)->delimiter(',');
    sweep->add_option("--radii", o.radii)->delimiter(',');
    add_common(sweep);

    auto* synth = app.add_subcommand("synth", "Write a stochastic block model dataset");
    synth->add_option("--out", o.out)->required();
    synth->add_option("--nodes", o.nodes);
    synth->add_option("--classes", o.classes);
    synth->add_option("--p-in", o.p_in);
    synth->add_option("--p-out", o.p_out);
    synth->add_option("--features", o.features, "Feature dimension (default: classes)");
    synth->add_option("--noise", o.noise, "Feature noise standard deviation");
    synth->add_option("--num-splits", o.num_splits);
    synth->add_option("--seed", o.seed);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        if (*stats) return cmd_stats(o, out);
        if (*run_cmd) return cmd_run(o, out, err);
        if (*grid) return cmd_grid(o, out, err);
        if (*sweep) return cmd_sweep(o, out, err);
        if (*synth) return cmd_synth(o, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const PartialGridError& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

} // namespace gesn::cli

#include <gtest/gtest.h>

#include <numeric>

#include "gesn/error.hpp"
#include "gesn/pipeline.hpp"
#include "gesn/readout.hpp"
#include "gesn/reservoir.hpp"
#include "gesn/rng.hpp"

using namespace gesn;

namespace {

Graph sbm(std::size_t n, std::uint64_t seed, double p_in = 0.2, double p_out = 0.05) {
    return generate_sbm({n, 3, p_in, p_out, 0, 0.6, seed});
}

std::vector<NodeId> iota_nodes(std::size_t n) {
    std::vector<NodeId> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

HyperGrid small_grid() {
    HyperGrid g;
    g.units = {8, 16};
    g.input_scalings = {1.0, 0.1};
    g.lambdas = {1e-3, 1.0};
    g.radius_alphas = {0.5, 2.0};
    g.seeds_per_fold = 2;
    return g;
}

TrialResult record(int split, std::size_t init, TrialConfig c, double val, double test) {
    TrialResult r;
    r.split_id = split;
    r.init_index = init;
    r.config = c;
    r.val_accuracy = val;
    r.test_accuracy = test;
    return r;
}

} // namespace

TEST(Splits, RandomSplitsFollowProportions) {
    const SplitSet s = make_random_splits(iota_nodes(183), 10, 5);
    ASSERT_EQ(s.size(), 10u);
    for (const Split& sp : s.splits) {
        EXPECT_EQ(sp.train.size(), 87u);
        EXPECT_EQ(sp.val.size(), 58u);
        EXPECT_EQ(sp.test.size(), 38u);
        EXPECT_NO_THROW(validate_split(sp, 183));
    }
    EXPECT_NE(s.splits[0].train, s.splits[1].train);
    const SplitSet again = make_random_splits(iota_nodes(183), 10, 5);
    EXPECT_EQ(s.splits[3].test, again.splits[3].test);
}

TEST(Splits, ValidationRejectsOverlapRangeAndProportions) {
    Split s{4, {0, 1, 2, 3, 4}, {5, 6, 7}, {8, 9}};
    EXPECT_NO_THROW(validate_split(s, 10));
    Split overlap = s;
    overlap.test = {8, 1};
    try {
        validate_split(overlap, 10);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("split 4"), std::string::npos);
    }
    Split range = s;
    range.test = {8, 10};
    EXPECT_THROW(validate_split(range, 10), DataError);
    Split skewed{0, {0, 1, 2, 3, 4, 5, 6, 7}, {8}, {9}};
    EXPECT_THROW(validate_split(skewed, 10), DataError);
    EXPECT_NO_THROW(validate_split(skewed, 10, false));
}

TEST(HyperGrid, Validation) {
    HyperGrid g = small_grid();
    EXPECT_NO_THROW(g.validate());
    EXPECT_EQ(g.num_configs(), 16u);
    g.radius_alphas = {0.5, 0.0};
    EXPECT_THROW(g.validate(), UsageError);
    g = small_grid();
    g.lambdas.clear();
    EXPECT_THROW(g.validate(), UsageError);
}

TEST(RunTrial, AblationFeedsConstantColumn) {
    const Graph g = sbm(30, 1);
    const Graph a = ablate_features(g);
    EXPECT_EQ(a.num_features(), 1u);
    EXPECT_TRUE((a.features().array() == 1.0).all());
    EXPECT_EQ(a.labels(), g.labels());
    EXPECT_EQ(a.num_arcs(), g.num_arcs());

    const double alpha = spectral_radius(g);
    const Split sp = make_random_splits(iota_nodes(30), 1, 2).splits[0];
    TrialConfig c{8, 1.0, 1e-2, 0.9, true};
    TrialConfig plain = c;
    plain.ablate_features = false;
    const TrialResult via_flag = run_trial(g, alpha, sp, c, 9);
    const TrialResult via_graph = run_trial(a, alpha, sp, plain, 9);
    EXPECT_EQ(via_flag.val_accuracy, via_graph.val_accuracy);
    EXPECT_EQ(via_flag.test_accuracy, via_graph.test_accuracy);
    EXPECT_TRUE(via_flag.config.ablate_features);
}

TEST(RunTrial, EdgelessGraphEqualsRandomFeatureRidge) {
    Rng rng(3);
    const std::size_t n = 40;
    Matrix feats(n, 5);
    std::vector<int> labels(n);
    for (std::size_t v = 0; v < n; ++v) {
        labels[v] = static_cast<int>(v % 2);
        for (Eigen::Index j = 0; j < 5; ++j) feats(static_cast<Eigen::Index>(v), j) = rng.normal() + labels[v];
    }
    const Graph g = Graph::from_edges(n, {}, feats, labels, 2);
    const Split sp = make_random_splits(iota_nodes(n), 1, 4).splits[0];
    const TrialConfig c{12, 0.5, 1e-2, 0.9, false};
    const TrialResult r = run_trial(g, spectral_radius(g), sp, c, 77);

    // independent composition: random features tanh(X W_in^T), then ridge
    const ReservoirDraw draw = draw_reservoir(12, 5, 77);
    const Matrix h = (feats * (0.5 * draw.w_in).transpose()).array().tanh().matrix();
    Matrix train(static_cast<Eigen::Index>(sp.train.size()), 12);
    std::vector<int> y;
    for (std::size_t i = 0; i < sp.train.size(); ++i) {
        train.row(static_cast<Eigen::Index>(i)) = h.row(sp.train[i]);
        y.push_back(labels[static_cast<std::size_t>(sp.train[i])]);
    }
    const std::vector<int> pred = predict(ridge_fit(train, y, 2, 1e-2), h);
    EXPECT_DOUBLE_EQ(r.test_accuracy, accuracy(pred, labels, sp.test));
    EXPECT_DOUBLE_EQ(r.val_accuracy, accuracy(pred, labels, sp.val));
    EXPECT_TRUE(r.converged);
}

TEST(RunTrial, Deterministic) {
    const Graph g = sbm(60, 2);
    const double alpha = spectral_radius(g);
    const Split sp = make_random_splits(iota_nodes(60), 1, 1).splits[0];
    const TrialConfig c{16, 0.3, 1e-3, 1.7, false};
    const TrialResult a = run_trial(g, alpha, sp, c, 11), b = run_trial(g, alpha, sp, c, 11);
    EXPECT_TRUE(a.same_outcome(b));
    EXPECT_GE(a.test_accuracy, 0.0);
    EXPECT_LE(a.test_accuracy, 1.0);
}

TEST(RunTrial, UnlabeledNodeInSplitIsDataError) {
    Graph g = sbm(20, 3);
    std::vector<int> labels = g.labels();
    labels[5] = kUnlabeled;
    std::vector<std::pair<NodeId, NodeId>> arcs = g.undirected_edges();
    const Graph h = Graph::from_edges(20, arcs, g.features(), labels, 3);
    Split sp{0, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {10, 11, 12, 13, 14, 15}, {16, 17, 18, 19}};
    EXPECT_THROW(run_trial(h, spectral_radius(h), sp, TrialConfig{}, 1), DataError);
}

TEST(EvaluateGrid, SingleConfigEqualsRunTrialAverages) {
    const Graph g = sbm(60, 4);
    const double alpha = spectral_radius(g);
    const SplitSet splits = make_random_splits(iota_nodes(60), 3, 8);
    HyperGrid grid;
    grid.units = {8};
    grid.input_scalings = {0.5};
    grid.lambdas = {1e-2};
    grid.radius_alphas = {0.9};
    grid.seeds_per_fold = 3;
    RunOptions opts;
    opts.master_seed = 21;
    const GridSummary s = grid_search(g, alpha, splits, grid, opts);

    std::vector<double> per_split;
    for (const Split& sp : splits.splits) {
        double sum = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            const auto seed = derive_seed(21, static_cast<std::uint64_t>(sp.id), i);
            sum += run_trial(g, alpha, sp, TrialConfig{8, 0.5, 1e-2, 0.9, false}, seed).test_accuracy;
        }
        per_split.push_back(sum / 3.0);
    }
    ASSERT_EQ(s.per_split.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.per_split[i].mean_test, per_split[i], 1e-12);
    double mean = 0.0;
    for (double v : per_split) mean += v / 3.0;
    double var = 0.0;
    for (double v : per_split) var += (v - mean) * (v - mean) / 3.0;
    EXPECT_NEAR(s.mean_test, mean, 1e-12);
    EXPECT_NEAR(s.std_test, std::sqrt(var), 1e-12);
}

TEST(EvaluateGrid, SharedComputationMatchesIndependentTrials) {
    const Graph g = sbm(45, 5);
    const double alpha = spectral_radius(g);
    const SplitSet splits = make_random_splits(iota_nodes(45), 2, 3);
    const HyperGrid grid = small_grid();
    RunOptions opts;
    opts.master_seed = 4;
    const std::vector<TrialResult> records = evaluate_grid(g, alpha, splits, grid, opts);
    ASSERT_EQ(records.size(), 2u * 2u * grid.num_configs());
    for (const TrialResult& r : records) {
        TrialResult direct = run_trial(g, alpha, splits.splits[static_cast<std::size_t>(r.split_id)], r.config,
                                       r.seed, opts);
        direct.init_index = r.init_index; // run_trial does not know which init it is
        EXPECT_TRUE(r.same_outcome(direct));
        EXPECT_EQ(r.seed, derive_seed(4, static_cast<std::uint64_t>(r.split_id), r.init_index));
    }
}

TEST(EvaluateGrid, RecordOrderIndependentOfWorkerCount) {
    const Graph g = sbm(45, 6);
    const double alpha = spectral_radius(g);
    const SplitSet splits = make_random_splits(iota_nodes(45), 3, 3);
    RunOptions one, many;
    one.workers = 1;
    many.workers = 4;
    const auto a = evaluate_grid(g, alpha, splits, small_grid(), one);
    const auto b = evaluate_grid(g, alpha, splits, small_grid(), many);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i].same_outcome(b[i])) << i;
}

TEST(EvaluateGrid, RejectsEmptyInputs) {
    const Graph g = sbm(30, 7);
    HyperGrid grid = small_grid();
    EXPECT_THROW(evaluate_grid(g, 1.0, SplitSet{}, grid), UsageError);
    grid.units.clear();
    EXPECT_THROW(evaluate_grid(g, 1.0, make_random_splits(iota_nodes(30), 1, 1), grid), UsageError);
}

TEST(EvaluateGrid, FailureKeepsCompletedRecords) {
    const Graph g = sbm(30, 8);
    SplitSet splits = make_random_splits(iota_nodes(30), 2, 1);
    splits.splits[1].test.push_back(99); // out of range label lookup
    try {
        evaluate_grid(g, spectral_radius(g), splits, small_grid());
        FAIL();
    } catch (const PartialGridError& e) {
        EXPECT_EQ(e.completed().size(), 2u * small_grid().num_configs());
        for (const auto& r : e.completed()) EXPECT_EQ(r.split_id, 0);
    }
}

TEST(Summarize, SelectionDependsOnlyOnValidation) {
    const TrialConfig good{16, 1.0, 1e-3, 0.5, false}, bad{16, 1.0, 1e-3, 1.5, false};
    std::vector<TrialResult> recs;
    for (int s = 0; s < 4; ++s) {
        for (std::size_t i = 0; i < 2; ++i) {
            recs.push_back(record(s, i, good, 0.8, 0.1 * s));
            recs.push_back(record(s, i, bad, 0.6, 0.99));
        }
    }
    const GridSummary sum = summarize(recs);
    for (const auto& sel : sum.per_split) EXPECT_EQ(sel.config, good);
    EXPECT_EQ(sum.global_config, good);
    EXPECT_NEAR(sum.mean_test, 0.15, 1e-12);
    // population std of {0, .1, .2, .3}
    EXPECT_NEAR(sum.std_test, std::sqrt(0.0125), 1e-12);
}

TEST(Summarize, TieBreakOrder) {
    auto pick = [](std::vector<TrialConfig> configs) {
        std::vector<TrialResult> recs;
        for (const auto& c : configs) recs.push_back(record(0, 0, c, 0.5, 0.5));
        return summarize(recs).per_split[0].config;
    };
    const TrialConfig base{16, 1.0, 1e-3, 0.9, false};
    TrialConfig r = base, u = base, l = base, s = base;
    r.radius_alpha = 0.3;
    EXPECT_EQ(pick({base, r}), r);
    u.units = 8;
    EXPECT_EQ(pick({base, u}), u);
    l.lambda = 1.0;
    EXPECT_EQ(pick({base, l}), l);
    s.input_scaling = 0.1;
    EXPECT_EQ(pick({base, s}), base);
    // radius outranks units
    TrialConfig big_h_small_r = base;
    big_h_small_r.units = 64;
    big_h_small_r.radius_alpha = 0.1;
    EXPECT_EQ(pick({u, big_h_small_r}), big_h_small_r);
}

TEST(Summarize, PerSplitAndGlobalSelectionsDiffer) {
    const TrialConfig a{16, 1.0, 1e-3, 0.5, false}, b{16, 1.0, 1e-3, 1.5, false};
    std::vector<TrialResult> recs{record(0, 0, a, 0.9, 0.7), record(0, 0, b, 0.8, 0.6),
                                  record(1, 0, a, 0.4, 0.2), record(1, 0, b, 0.5, 0.9),
                                  record(2, 0, a, 0.9, 0.7), record(2, 0, b, 0.8, 0.6)};
    const GridSummary s = summarize(recs);
    EXPECT_EQ(s.per_split[1].config, b);
    EXPECT_EQ(s.global_config, a);
    EXPECT_NEAR(s.mean_test, (0.7 + 0.9 + 0.7) / 3.0, 1e-12);
    EXPECT_NEAR(s.global_mean_test, (0.7 + 0.2 + 0.7) / 3.0, 1e-12);
}

TEST(Summarize, RecomputedStatsMatchAndOrderIndependent) {
    Rng rng(12);
    std::vector<double> v(25);
    for (double& x : v) x = rng.uniform01();
    const auto [m, s] = mean_std(v);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= 25.0;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    EXPECT_NEAR(m, mean, 1e-14);
    EXPECT_NEAR(s, std::sqrt(var / 25.0), 1e-14);
    std::reverse(v.begin(), v.end());
    const auto [m2, s2] = mean_std(v);
    EXPECT_EQ(m, m2);
    EXPECT_EQ(s, s2);
}

TEST(Sweep, OneRadiusOneRowPerUnits) {
    const Graph g = sbm(45, 9);
    const SplitSet splits = make_random_splits(iota_nodes(45), 2, 2);
    HyperGrid base = small_grid();
    const SweepTable t = radius_sweep(g, spectral_radius(g), splits, base, {1.3});
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0].units, 8u);
    EXPECT_EQ(t.rows[1].units, 16u);
    EXPECT_EQ(t.selected_radii.size(), 1u);
    EXPECT_EQ(t.selected_radii.at(1.3), 2u);
    EXPECT_THROW(radius_sweep(g, 1.0, splits, base, {}), UsageError);
}

TEST(Sweep, RowsReaggregateFromRecords) {
    const Graph g = sbm(45, 10);
    const double alpha = spectral_radius(g);
    const SplitSet splits = make_random_splits(iota_nodes(45), 3, 2);
    const auto records = evaluate_grid(g, alpha, splits, small_grid());
    const SweepTable t = sweep_table(records);
    ASSERT_EQ(t.rows.size(), 4u);
    for (const SweepRow& row : t.rows) {
        std::vector<TrialResult> subset;
        for (const auto& r : records)
            if (r.config.radius_alpha == row.radius_alpha && r.config.units == row.units) subset.push_back(r);
        const GridSummary s = summarize(subset);
        EXPECT_NEAR(row.mean, s.mean_test, 1e-12);
        EXPECT_NEAR(row.std, s.std_test, 1e-12);
    }
    std::size_t total = 0;
    for (const auto& [r, count] : t.selected_radii) total += count;
    EXPECT_EQ(total, 3u);
}

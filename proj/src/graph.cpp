#include "gesn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gesn/error.hpp"
#include "gesn/rng.hpp"

namespace gesn {

Graph Graph::from_edges(std::size_t num_nodes,
                        std::span<const std::pair<NodeId, NodeId>> arcs,
                        Matrix features,
                        std::vector<int> labels,
                        int num_classes) {
    if (static_cast<std::size_t>(features.rows()) != num_nodes) {
        throw DataError("feature matrix has " + std::to_string(features.rows()) + " rows, expected " +
                        std::to_string(num_nodes));
    }
    if (!labels.empty() && labels.size() != num_nodes) {
        throw DataError("label vector has " + std::to_string(labels.size()) + " entries, expected " +
                        std::to_string(num_nodes));
    }

    std::vector<std::pair<NodeId, NodeId>> sym;
    sym.reserve(arcs.size() * 2);
    for (const auto& [u, v] : arcs) {
        if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= num_nodes || static_cast<std::size_t>(v) >= num_nodes) {
            throw DataError("arc (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range for " +
                            std::to_string(num_nodes) + " nodes");
        }
        if (u == v) continue;
        sym.emplace_back(u, v);
        sym.emplace_back(v, u);
    }
    std::sort(sym.begin(), sym.end());
    sym.erase(std::unique(sym.begin(), sym.end()), sym.end());

    Graph g;
    g.adjacency_.offsets.assign(num_nodes + 1, 0);
    g.adjacency_.indices.reserve(sym.size());
    for (const auto& [u, v] : sym) {
        ++g.adjacency_.offsets[static_cast<std::size_t>(u) + 1];
        g.adjacency_.indices.push_back(v);
    }
    for (std::size_t i = 0; i < num_nodes; ++i) g.adjacency_.offsets[i + 1] += g.adjacency_.offsets[i];

    if (!labels.empty()) {
        int max_label = -1;
        for (int y : labels) {
            if (y < kUnlabeled) throw DataError("negative class index " + std::to_string(y));
            max_label = std::max(max_label, y);
        }
        if (num_classes <= 0) num_classes = max_label + 1;
        if (max_label >= num_classes) {
            throw DataError("class index " + std::to_string(max_label) + " not below class count " +
                            std::to_string(num_classes));
        }
    }
    g.features_ = std::move(features);
    g.labels_ = std::move(labels);
    g.num_classes_ = std::max(num_classes, 0);
    return g;
}

bool Graph::fully_labeled() const {
    return has_labels() && std::none_of(labels_.begin(), labels_.end(), [](int y) { return y == kUnlabeled; });
}

std::vector<NodeId> Graph::labeled_nodes() const {
    std::vector<NodeId> out;
    for (std::size_t v = 0; v < labels_.size(); ++v)
        if (labels_[v] != kUnlabeled) out.push_back(static_cast<NodeId>(v));
    return out;
}

std::size_t Graph::max_degree() const {
    std::size_t best = 0;
    for (std::size_t v = 0; v < num_nodes(); ++v) best = std::max(best, adjacency_.degree(v));
    return best;
}

Graph Graph::with_features(Matrix features) const {
    if (static_cast<std::size_t>(features.rows()) != num_nodes()) {
        throw DataError("replacement feature matrix row count mismatch");
    }
    Graph g = *this;
    g.features_ = std::move(features);
    return g;
}

Graph Graph::permuted(std::span<const NodeId> perm) const {
    const std::size_t n = num_nodes();
    if (perm.size() != n) throw UsageError("permutation size mismatch");
    std::vector<std::pair<NodeId, NodeId>> arcs;
    arcs.reserve(num_arcs());
    for (std::size_t v = 0; v < n; ++v)
        for (NodeId u : adjacency_.neighbors(v)) arcs.emplace_back(perm[v], perm[static_cast<std::size_t>(u)]);
    Matrix feats(features_.rows(), features_.cols());
    std::vector<int> labels(labels_.size());
    for (std::size_t v = 0; v < n; ++v) {
        feats.row(perm[v]) = features_.row(static_cast<Eigen::Index>(v));
        if (!labels_.empty()) labels[static_cast<std::size_t>(perm[v])] = labels_[v];
    }
    return from_edges(n, arcs, std::move(feats), std::move(labels), num_classes_);
}

std::vector<std::pair<NodeId, NodeId>> Graph::undirected_edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(num_arcs() / 2);
    for (std::size_t v = 0; v < num_nodes(); ++v)
        for (NodeId u : adjacency_.neighbors(v))
            if (static_cast<NodeId>(v) < u) out.emplace_back(static_cast<NodeId>(v), u);
    return out;
}

double homophily(const Graph& g) {
    if (!g.fully_labeled()) throw DataError("labels required");
    const auto& adj = g.adjacency();
    const auto& y = g.labels();
    std::size_t intra = 0;
    for (std::size_t v = 0; v < g.num_nodes(); ++v)
        for (NodeId u : adj.neighbors(v))
            if (y[v] == y[static_cast<std::size_t>(u)]) ++intra;
    if (g.num_arcs() == 0) return 1.0;
    return static_cast<double>(intra) / static_cast<double>(g.num_arcs());
}

namespace {

// y = (A + I) x
void shifted_product(const CsrAdjacency& adj, const Vector& x, Vector& y) {
    const auto n = static_cast<Eigen::Index>(adj.num_nodes());
    for (Eigen::Index v = 0; v < n; ++v) {
        double acc = x[v];
        for (NodeId u : adj.neighbors(static_cast<std::size_t>(v))) acc += x[u];
        y[v] = acc;
    }
}

} // namespace

double spectral_radius(const Graph& g, const SpectralOptions& opts) {
    if (g.num_nodes() == 0) throw DataError("spectral radius of an empty graph");
    if (!(opts.tol > 0.0)) throw UsageError("spectral radius tolerance must be positive");
    if (g.num_arcs() == 0) return 0.0;

    const auto& adj = g.adjacency();
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Vector x = Vector::Ones(n).normalized();
    Vector y(n);
    double prev = 0.0;
    bool restarted = false;

    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        shifted_product(adj, x, y);
        // x has unit norm, so x^T (A + I) x - 1 is the Rayleigh quotient of A.
        const double rq = x.dot(y) - 1.0;
        const double norm = y.norm();
        if (!(norm > 0.0) || (rq == 0.0 && prev == 0.0 && it > 0)) {
            if (restarted) throw NumericalError("power iteration stagnated at zero", rq);
            Rng rng(0x5eedULL);
            for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(0.0, 1.0);
            x.normalize();
            restarted = true;
            prev = 0.0;
            continue;
        }
        // For symmetric A, |lambda - rq| <= ||A x - rq x||, so a small residual
        // bounds the error directly; a stalled quotient alone does not.
        const double residual = (y - (rq + 1.0) * x).norm();
        x = y / norm;
        prev = rq;
        if (residual < opts.tol * std::abs(rq)) return rq;
    }
    throw NumericalError("spectral radius did not converge in " + std::to_string(opts.max_iters) + " iterations",
                         prev);
}

Graph generate_sbm(const SbmParams& p) {
    auto valid_prob = [](double q) { return q >= 0.0 && q <= 1.0; };
    if (!valid_prob(p.p_in) || !valid_prob(p.p_out)) throw UsageError("SBM probabilities must lie in [0, 1]");
    if (p.p_in == 0.0 && p.p_out == 0.0) throw UsageError("empty graph likely: p_in = p_out = 0");
    if (p.num_nodes == 0) throw UsageError("SBM needs at least one node");
    if (p.num_classes < 1 || static_cast<std::size_t>(p.num_classes) > p.num_nodes)
        throw UsageError("SBM class count must lie in [1, num_nodes]");
    if (p.feat_noise < 0.0) throw UsageError("feature noise must be non-negative");

    const std::size_t n = p.num_nodes;
    const auto classes = static_cast<std::size_t>(p.num_classes);
    const std::size_t dim = p.feat_dim == 0 ? classes : p.feat_dim;

    std::vector<int> labels(n);
    for (std::size_t v = 0; v < n; ++v) labels[v] = static_cast<int>(v * classes / n);

    // Stream order: edges (row-major over pairs u < v), then features row-major.
    Rng rng(p.seed);
    std::vector<std::pair<NodeId, NodeId>> arcs;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            const double q = labels[u] == labels[v] ? p.p_in : p.p_out;
            if (rng.uniform01() < q) arcs.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        }
    }

    Matrix feats = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (std::size_t v = 0; v < n; ++v) {
        const auto row = static_cast<Eigen::Index>(v);
        feats(row, static_cast<Eigen::Index>(static_cast<std::size_t>(labels[v]) % dim)) = 1.0;
        if (p.feat_noise > 0.0)
            for (Eigen::Index j = 0; j < feats.cols(); ++j) feats(row, j) += p.feat_noise * rng.normal();
    }
    return Graph::from_edges(n, arcs, std::move(feats), std::move(labels), p.num_classes);
}

GraphStats graph_stats(const Graph& g, const SpectralOptions& opts) {
    GraphStats s;
    s.homophily = homophily(g);
    s.spectral_radius = spectral_radius(g, opts);
    s.num_nodes = g.num_nodes();
    s.num_edges = g.num_arcs();
    s.num_features = g.num_features();
    s.num_classes = g.num_classes();
    return s;
}

} // namespace gesn

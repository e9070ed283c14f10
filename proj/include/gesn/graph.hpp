#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gesn {

/// Row-major dense matrix used for features, states and weights.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

using NodeId = std::int32_t;

inline constexpr int kUnlabeled = -1;

/// Unweighted CSR adjacency. Row v lists the 1-hop neighbourhood of v.
struct CsrAdjacency {
    std::vector<std::int64_t> offsets; // size num_nodes + 1
    std::vector<NodeId> indices;       // sorted within each row

    std::size_t num_nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
    std::size_t num_arcs() const { return indices.size(); }
    std::span<const NodeId> neighbors(std::size_t v) const {
        return {indices.data() + offsets[v], static_cast<std::size_t>(offsets[v + 1] - offsets[v])};
    }
    std::size_t degree(std::size_t v) const { return static_cast<std::size_t>(offsets[v + 1] - offsets[v]); }
};

/// Undirected node-classification graph: symmetric CSR adjacency without
/// self-loops or duplicate arcs, a |V| x U feature matrix and optional labels.
/// Immutable after construction.
class Graph {
public:
    Graph() = default;

    /// Builds a graph from an arbitrary arc list. Arcs are symmetrized,
    /// deduplicated and self-loops dropped. `labels` is either empty (no
    /// labels) or one entry per node, kUnlabeled marking unknown nodes.
    /// Throws DataError on out-of-range ids, feature row mismatch or labels >= num_classes.
    static Graph from_edges(std::size_t num_nodes,
                            std::span<const std::pair<NodeId, NodeId>> arcs,
                            Matrix features,
                            std::vector<int> labels = {},
                            int num_classes = 0);

    std::size_t num_nodes() const { return adjacency_.num_nodes(); }
    /// Stored directed arcs; every undirected edge counts twice.
    std::size_t num_arcs() const { return adjacency_.num_arcs(); }
    std::size_t num_features() const { return static_cast<std::size_t>(features_.cols()); }
    int num_classes() const { return num_classes_; }

    const CsrAdjacency& adjacency() const { return adjacency_; }
    const Matrix& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }

    bool has_labels() const { return !labels_.empty(); }
    bool is_labeled(std::size_t v) const { return has_labels() && labels_[v] != kUnlabeled; }
    bool fully_labeled() const;
    std::vector<NodeId> labeled_nodes() const;

    std::size_t max_degree() const;

    /// Same topology and labels, different feature matrix.
    Graph with_features(Matrix features) const;

    /// Relabels node v as perm[v] everywhere.
    Graph permuted(std::span<const NodeId> perm) const;

    /// Undirected edge list (u < v), sorted.
    std::vector<std::pair<NodeId, NodeId>> undirected_edges() const;

private:
    CsrAdjacency adjacency_;
    Matrix features_;
    std::vector<int> labels_;
    int num_classes_ = 0;
};

struct GraphStats {
    double homophily = 0.0;
    double spectral_radius = 0.0;
    std::size_t num_nodes = 0;
    std::size_t num_edges = 0; // stored arcs
    std::size_t num_features = 0;
    int num_classes = 0;
};

struct SpectralOptions {
    double tol = 1e-6;
    std::size_t max_iters = 10'000;
};

/// Fraction of stored arcs joining same-class endpoints. Throws DataError
/// ("labels required") when any node is unlabeled. An edgeless graph has
/// homophily 1 by convention (no inter-class edges).
double homophily(const Graph& g);

/// Largest eigenvalue magnitude of the adjacency (its Perron root), by power
/// iteration with Rayleigh quotient. Iterates A + I so that bipartite
/// components (eigenvalues +/-rho) do not stall the quotient; the quotient
/// itself is taken with respect to A. Edgeless graphs return 0.
/// Throws DataError on an empty graph and NumericalError (carrying the last
/// estimate) when max_iters is exhausted.
double spectral_radius(const Graph& g, const SpectralOptions& opts = {});

struct SbmParams {
    std::size_t num_nodes = 0;
    int num_classes = 2;
    double p_in = 0.0;
    double p_out = 0.0;
    std::size_t feat_dim = 0; // 0 means num_classes
    double feat_noise = 0.0;
    std::uint64_t seed = 0;
};

/// Undirected stochastic block model with contiguous near-equal blocks.
/// Node features are the one-hot class indicator (position class mod
/// feat_dim) plus N(0, feat_noise^2) noise on every coordinate.
/// Throws UsageError on invalid parameters.
Graph generate_sbm(const SbmParams& params);

GraphStats graph_stats(const Graph& g, const SpectralOptions& opts = {});

} // namespace gesn

#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the routines it is used to check.

#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "gesn/graph.hpp"

namespace gesn::oracle {

inline Eigen::MatrixXd dense_adjacency(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index v = 0; v < n; ++v)
        for (NodeId u : g.adjacency().neighbors(static_cast<std::size_t>(v))) a(v, u) = 1.0;
    return a;
}

/// Largest |eigenvalue| via a full symmetric eigendecomposition.
inline double symmetric_spectral_radius(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Largest |eigenvalue| via a full nonsymmetric eigendecomposition.
inline double general_spectral_radius(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Homophily by counting every labeled pair of an explicit undirected edge
/// set (both orientations counted, as stored arcs are).
inline double homophily_by_count(std::size_t n, const std::set<std::pair<int, int>>& undirected,
                                 const std::vector<int>& labels) {
    std::size_t intra = 0, total = 0;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            if (u == v) continue;
            const auto key = std::make_pair(static_cast<int>(std::min(u, v)), static_cast<int>(std::max(u, v)));
            if (!undirected.count(key)) continue;
            ++total;
            if (labels[u] == labels[v]) ++intra;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(intra) / static_cast<double>(total);
}

/// Ridge with unpenalized bias via the uncentered augmented normal equations
///   [X 1]^T [X 1] + diag(lambda, ..., lambda, 0)
/// solved by full-pivot LU. Returns (W: H x C, b: C).
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> ridge_augmented(const Eigen::MatrixXd& x,
                                                                     const std::vector<int>& labels, int classes,
                                                                     double lambda) {
    const Eigen::Index t = x.rows(), h = x.cols();
    Eigen::MatrixXd z(t, h + 1);
    z.leftCols(h) = x;
    z.col(h).setOnes();
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(t, classes);
    for (Eigen::Index i = 0; i < t; ++i) y(i, labels[static_cast<std::size_t>(i)]) = 1.0;
    Eigen::MatrixXd lhs = z.transpose() * z;
    for (Eigen::Index i = 0; i < h; ++i) lhs(i, i) += lambda;
    const Eigen::MatrixXd sol = lhs.fullPivLu().solve(z.transpose() * y);
    return {sol.topRows(h), sol.row(h).transpose()};
}

} // namespace gesn::oracle

#include "gesn/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gesn/error.hpp"
#include "gesn/rng.hpp"

namespace gesn {

void ReservoirConfig::validate() const {
    if (units == 0) throw UsageError("reservoir needs at least one unit");
    if (max_iters == 0) throw UsageError("max_iters must be at least 1");
    if (!(conv_tol > 0.0)) throw UsageError("conv_tol must be positive");
    if (!(input_scaling > 0.0)) throw UsageError("input_scaling must be positive");
    if (!(radius_alpha >= 0.0)) throw UsageError("radius_alpha must be non-negative");
}

double dense_spectral_radius(const Matrix& m, double tol, std::size_t max_restarts) {
    if (m.rows() != m.cols()) throw UsageError("spectral radius needs a square matrix");
    const Eigen::Index n = m.rows();
    if (n == 0) return 0.0;

    constexpr Eigen::Index kBasis = 30;
    constexpr Eigen::Index kRestartRitz = 4;
    const Eigen::Index dim = std::min(kBasis, n);

    Eigen::MatrixXd q(n, dim + 1);
    Eigen::MatrixXd hess(dim + 1, dim);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
    double estimate = 0.0;

    for (std::size_t restart = 0; restart < max_restarts; ++restart) {
        hess.setZero();
        q.col(0) = x;
        Eigen::Index built = dim;
        for (Eigen::Index j = 0; j < dim; ++j) {
            Eigen::VectorXd w = m * q.col(j);
            // classical Gram-Schmidt, twice
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index i = 0; i <= j; ++i) {
                    const double h = q.col(i).dot(w);
                    hess(i, j) += h;
                    w -= h * q.col(i);
                }
            }
            const double beta = w.norm();
            hess(j + 1, j) = beta;
            if (beta <= 1e-14 * std::max(1.0, hess.col(j).head(j + 1).norm())) {
                built = j + 1; // invariant subspace found: Ritz values are exact
                break;
            }
            q.col(j + 1) = w / beta;
        }

        Eigen::EigenSolver<Eigen::MatrixXd> es(hess.topLeftCorner(built, built));
        if (es.info() != Eigen::Success) throw NumericalError("Hessenberg eigensolve failed", estimate);
        const Eigen::VectorXcd ritz = es.eigenvalues();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(built));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return std::abs(ritz[a]) > std::abs(ritz[b]); });

        estimate = std::abs(ritz[order[0]]);
        if (built < dim || estimate == 0.0) return estimate;

        const Eigen::VectorXcd y = es.eigenvectors().col(order[0]);
        const double residual = hess(built, built - 1) * std::abs(y[built - 1]) / y.norm();
        if (residual < tol * estimate) return estimate;

        Eigen::VectorXd combo = Eigen::VectorXd::Zero(built);
        for (Eigen::Index i = 0; i < std::min(kRestartRitz, built); ++i) {
            const Eigen::VectorXcd z = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
            const Eigen::VectorXd zr = z.real() + z.imag();
            const double nz = zr.norm();
            if (nz > 0.0) combo += zr / nz;
        }
        x = q.leftCols(built) * combo;
        const double nx = x.norm();
        if (!(nx > 0.0)) x = q.col(built); // degenerate combination; fall back to the newest Krylov vector
        else x /= nx;
    }
    throw NumericalError("dense spectral radius did not converge after " + std::to_string(max_restarts) +
                             " restarts",
                         estimate);
}

ReservoirDraw draw_reservoir(std::size_t units, std::size_t num_features, std::uint64_t seed) {
    if (units == 0) throw UsageError("reservoir needs at least one unit");
    const auto h = static_cast<Eigen::Index>(units);
    const auto u = static_cast<Eigen::Index>(num_features);
    Rng rng(seed);
    ReservoirDraw d;
    d.seed = seed;
    d.w_in.resize(h, u);
    for (Eigen::Index i = 0; i < h * u; ++i) d.w_in.data()[i] = rng.uniform(-1.0, 1.0);
    d.w_hat.resize(h, h);
    for (Eigen::Index i = 0; i < h * h; ++i) d.w_hat.data()[i] = rng.uniform(-1.0, 1.0);
    d.raw_radius = dense_spectral_radius(d.w_hat);
    return d;
}

Reservoir rescale(const ReservoirDraw& draw, double input_scaling, double target_radius) {
    if (!(target_radius >= 0.0)) throw UsageError("target radius must be non-negative");
    Reservoir r;
    r.seed = draw.seed;
    r.w_in = draw.w_in * input_scaling;
    if (target_radius == 0.0) {
        r.w_hat = Matrix::Zero(draw.w_hat.rows(), draw.w_hat.cols());
        r.measured_radius = 0.0;
        return r;
    }
    if (!(draw.raw_radius > 0.0)) throw NumericalError("raw recurrent matrix has zero spectral radius");
    const double factor = target_radius / draw.raw_radius;
    r.w_hat = draw.w_hat * factor;
    r.measured_radius = draw.raw_radius * factor;
    return r;
}

Reservoir init_reservoir(const ReservoirConfig& cfg, std::size_t num_features, double graph_alpha) {
    cfg.validate();
    if (!(graph_alpha > 0.0)) throw UsageError("graph has no edges");
    return rescale(draw_reservoir(cfg.units, num_features, cfg.seed), cfg.input_scaling,
                   cfg.radius_alpha / graph_alpha);
}

EmbeddingMatrix compute_embeddings(const Graph& g, const Reservoir& r, const ReservoirConfig& cfg,
                                   const EmbeddingOptions& opts) {
    cfg.validate();
    if (static_cast<std::size_t>(r.w_in.cols()) != g.num_features()) {
        throw UsageError("reservoir input width " + std::to_string(r.w_in.cols()) + " does not match " +
                         std::to_string(g.num_features()) + " graph features");
    }
    if (r.w_hat.rows() != r.w_hat.cols() || r.w_hat.rows() != r.w_in.rows())
        throw UsageError("inconsistent reservoir shapes");

    const auto n = static_cast<Eigen::Index>(g.num_nodes());
    const Eigen::Index h = r.w_hat.rows();

    Matrix drive;
    kernels::multiply_transposed(opts.backend, g.features(), r.w_in, drive);

    EmbeddingMatrix out;
    Matrix prev;
    if (opts.initial_state) {
        if (opts.initial_state->rows() != n || opts.initial_state->cols() != h)
            throw UsageError("initial state shape mismatch");
        prev = *opts.initial_state;
    } else {
        prev = Matrix::Zero(n, h);
    }
    Matrix next(n, h);
    Matrix scratch(n, h);

    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        out.final_delta = kernels::reservoir_step(opts.backend, g.adjacency(), drive, r.w_hat, prev, next, scratch);
        out.iterations_run = k;
        prev.swap(next);
        if (out.final_delta < cfg.conv_tol) {
            out.converged = true;
            break;
        }
    }
    out.states = std::move(prev);
    return out;
}

} // namespace gesn

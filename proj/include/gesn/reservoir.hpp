#pragma once

#include <cstdint>
#include <optional>

#include "gesn/graph.hpp"
#include "gesn/kernels.hpp"

namespace gesn {

struct ReservoirConfig {
    std::size_t units = 16;     // H
    double input_scaling = 1.0;
    double radius_alpha = 0.9;  // target rho(w_hat) * alpha
    std::size_t max_iters = 100; // K
    double conv_tol = 1e-6;
    std::uint64_t seed = 0;

    /// Throws UsageError on units == 0, max_iters == 0, non-positive
    /// conv_tol or input_scaling, or negative radius_alpha.
    void validate() const;
};

/// Raw uniform[-1, 1] draws before rescaling, with the estimated spectral
/// radius of the recurrent part. Depends only on (units, num_features, seed),
/// so one draw serves every (input scaling, radius) pair of a sweep.
struct ReservoirDraw {
    Matrix w_in;   // H x U
    Matrix w_hat;  // H x H
    double raw_radius = 0.0;
    std::uint64_t seed = 0;
};

struct Reservoir {
    Matrix w_in;   // H x U, entries in [-input_scaling, input_scaling]
    Matrix w_hat;  // H x H
    double measured_radius = 0.0;
    std::uint64_t seed = 0;

    std::size_t units() const { return static_cast<std::size_t>(w_hat.rows()); }
};

struct EmbeddingMatrix {
    Matrix states; // |V| x H
    std::size_t iterations_run = 0;
    bool converged = false;
    double final_delta = 0.0;
};

struct EmbeddingOptions {
    kernels::Backend backend = kernels::Backend::Parallel;
    /// Replaces the zero initial state when set (|V| x H).
    std::optional<Matrix> initial_state;
};

/// Spectral radius of a dense square matrix by explicitly restarted Arnoldi:
/// a 30-dimensional Krylov basis, restarted from the combined top-4 Ritz
/// vectors, stopping when the dominant Ritz residual falls below
/// tol * |theta|. Handles complex dominant pairs. Throws NumericalError
/// carrying the last estimate when max_restarts is exhausted.
double dense_spectral_radius(const Matrix& m, double tol = 1e-9, std::size_t max_restarts = 2000);

/// Draws W_in (row-major, first) then w_hat (row-major) from uniform[-1, 1].
ReservoirDraw draw_reservoir(std::size_t units, std::size_t num_features, std::uint64_t seed);

/// Scales W_in by input_scaling and w_hat to spectral radius target_radius.
Reservoir rescale(const ReservoirDraw& draw, double input_scaling, double target_radius);

/// rho(w_hat) = cfg.radius_alpha / graph_alpha. Throws UsageError on
/// graph_alpha <= 0 ("graph has no edges").
Reservoir init_reservoir(const ReservoirConfig& cfg, std::size_t num_features, double graph_alpha);

/// Iterates X <- tanh(U W_in^T + A X w_hat^T) synchronously from X = 0 (or
/// opts.initial_state) until max |X_k - X_{k-1}| < conv_tol or k = max_iters.
EmbeddingMatrix compute_embeddings(const Graph& g, const Reservoir& r, const ReservoirConfig& cfg,
                                   const EmbeddingOptions& opts = {});

} // namespace gesn

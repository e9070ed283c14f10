#pragma once

// Data-parallel kernels behind the reservoir iteration. Each kernel has a
// plain-loop serial reference (kept for testing and benchmarking) and an
// OpenMP version. Both read only the previous state and write only the next
// one, so a step is a pure function of its inputs.

#include "gesn/graph.hpp"

namespace gesn::kernels {

enum class Backend { Serial, Parallel };

namespace serial {

/// out = A x for CSR adjacency A.
void aggregate(const CsrAdjacency& adj, const Matrix& x, Matrix& out);

/// out = lhs * rhs^T, naive triple loop.
void multiply_transposed(const Matrix& lhs, const Matrix& rhs, Matrix& out);

/// next = tanh(drive + (A prev) w_hat^T); returns max |next - prev|.
/// Throws NumericalError("divergence") on a non-finite pre-activation.
double reservoir_step(const CsrAdjacency& adj, const Matrix& drive, const Matrix& w_hat,
                      const Matrix& prev, Matrix& next, Matrix& scratch);

} // namespace serial

namespace omp {

void aggregate(const CsrAdjacency& adj, const Matrix& x, Matrix& out);

/// Row-blocked GEMM; each thread runs Eigen's kernel on its own block of rows.
void multiply_transposed(const Matrix& lhs, const Matrix& rhs, Matrix& out);

double reservoir_step(const CsrAdjacency& adj, const Matrix& drive, const Matrix& w_hat,
                      const Matrix& prev, Matrix& next, Matrix& scratch);

} // namespace omp

/// Dispatches to serial:: or omp::.
double reservoir_step(Backend backend, const CsrAdjacency& adj, const Matrix& drive, const Matrix& w_hat,
                      const Matrix& prev, Matrix& next, Matrix& scratch);

void multiply_transposed(Backend backend, const Matrix& lhs, const Matrix& rhs, Matrix& out);

} // namespace gesn::kernels

#include "gesn/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <omp.h>

#include "gesn/error.hpp"

namespace gesn::kernels {

namespace serial {

void aggregate(const CsrAdjacency& adj, const Matrix& x, Matrix& out) {
    const auto n = static_cast<Eigen::Index>(adj.num_nodes());
    const Eigen::Index h = x.cols();
    out.resize(n, h);
    for (Eigen::Index v = 0; v < n; ++v) {
        double* dst = out.row(v).data();
        std::fill(dst, dst + h, 0.0);
        for (NodeId u : adj.neighbors(static_cast<std::size_t>(v))) {
            const double* src = x.row(u).data();
            for (Eigen::Index j = 0; j < h; ++j) dst[j] += src[j];
        }
    }
}

void multiply_transposed(const Matrix& lhs, const Matrix& rhs, Matrix& out) {
    out.resize(lhs.rows(), rhs.rows());
    for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
        for (Eigen::Index j = 0; j < rhs.rows(); ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < lhs.cols(); ++k) acc += lhs(i, k) * rhs(j, k);
            out(i, j) = acc;
        }
    }
}

double reservoir_step(const CsrAdjacency& adj, const Matrix& drive, const Matrix& w_hat,
                      const Matrix& prev, Matrix& next, Matrix& scratch) {
    aggregate(adj, prev, scratch);
    multiply_transposed(scratch, w_hat, next);
    double delta = 0.0;
    for (Eigen::Index v = 0; v < next.rows(); ++v) {
        for (Eigen::Index j = 0; j < next.cols(); ++j) {
            const double pre = drive(v, j) + next(v, j);
            if (!std::isfinite(pre)) throw NumericalError("divergence");
            const double x = std::tanh(pre);
            delta = std::max(delta, std::abs(x - prev(v, j)));
            next(v, j) = x;
        }
    }
    return delta;
}

} // namespace serial

namespace omp {

void aggregate(const CsrAdjacency& adj, const Matrix& x, Matrix& out) {
    const auto n = static_cast<Eigen::Index>(adj.num_nodes());
    const Eigen::Index h = x.cols();
    out.resize(n, h);
#pragma omp parallel for schedule(dynamic, 64)
    for (Eigen::Index v = 0; v < n; ++v) {
        auto dst = out.row(v);
        dst.setZero();
        for (NodeId u : adj.neighbors(static_cast<std::size_t>(v))) dst += x.row(u);
    }
}

void multiply_transposed(const Matrix& lhs, const Matrix& rhs, Matrix& out) {
    out.resize(lhs.rows(), rhs.rows());
    const Eigen::Index rows = lhs.rows();
#pragma omp parallel
    {
        const Eigen::Index nthreads = omp_get_num_threads();
        const Eigen::Index tid = omp_get_thread_num();
        const Eigen::Index begin = rows * tid / nthreads;
        const Eigen::Index end = rows * (tid + 1) / nthreads;
        if (end > begin) {
            out.middleRows(begin, end - begin).noalias() = lhs.middleRows(begin, end - begin) * rhs.transpose();
        }
    }
}

double reservoir_step(const CsrAdjacency& adj, const Matrix& drive, const Matrix& w_hat,
                      const Matrix& prev, Matrix& next, Matrix& scratch) {
    aggregate(adj, prev, scratch);
    multiply_transposed(scratch, w_hat, next);
    const Eigen::Index n = next.rows();
    const Eigen::Index h = next.cols();
    double delta = 0.0;
    bool finite = true;
#pragma omp parallel for reduction(max : delta) reduction(&& : finite)
    for (Eigen::Index v = 0; v < n; ++v) {
        for (Eigen::Index j = 0; j < h; ++j) {
            const double pre = drive(v, j) + next(v, j);
            finite = finite && std::isfinite(pre);
            const double x = std::tanh(pre);
            delta = std::max(delta, std::abs(x - prev(v, j)));
            next(v, j) = x;
        }
    }
    if (!finite) throw NumericalError("divergence");
    return delta;
}

} // namespace omp

double reservoir_step(Backend backend, const CsrAdjacency& adj, const Matrix& drive, const Matrix& w_hat,
                      const Matrix& prev, Matrix& next, Matrix& scratch) {
    return backend == Backend::Serial ? serial::reservoir_step(adj, drive, w_hat, prev, next, scratch)
                                      : omp::reservoir_step(adj, drive, w_hat, prev, next, scratch);
}

void multiply_transposed(Backend backend, const Matrix& lhs, const Matrix& rhs, Matrix& out) {
    if (backend == Backend::Serial)
        serial::multiply_transposed(lhs, rhs, out);
    else
        omp::multiply_transposed(lhs, rhs, out);
}

} // namespace gesn::kernels

#pragma once

#include <span>
#include <vector>

#include "gesn/graph.hpp"

namespace gesn {

struct ReadoutModel {
    Matrix w_out;  // C x H
    Vector b_out;  // C
    double lambda = 0.0;

    std::size_t num_classes() const { return static_cast<std::size_t>(w_out.rows()); }
    std::size_t units() const { return static_cast<std::size_t>(w_out.cols()); }
    /// Trainable parameters: C * (H + 1).
    std::size_t parameter_count() const { return static_cast<std::size_t>(w_out.size() + b_out.size()); }
};

/// Ridge regression of 0/1 one-hot targets on a fixed set of training rows,
/// with an unpenalized bias handled by centering. The centered Gram matrix is
/// formed once and reused by every fit(lambda) call. When H exceeds the
/// number of training rows the equivalent dual system
/// W = Xc^T (Xc Xc^T + lambda I)^{-1} Yc is solved instead. lambda = 0 takes
/// the minimum-norm least-squares solution.
class RidgeProblem {
public:
    /// `rows` are indices into `states`; `labels[i]` is the class of rows[i].
    RidgeProblem(const Matrix& states, std::span<const NodeId> rows, std::span<const int> labels, int num_classes);

    /// Throws NumericalError when lambda = 0 and [states 1] is rank-deficient
    /// (rank below min(H + 1, |T|)).
    ReadoutModel fit(double lambda) const;

    bool uses_dual() const { return dual_; }

private:
    Matrix xc_;      // centered training states, |T| x H
    Matrix yc_;      // centered one-hot targets, |T| x C
    Vector x_mean_;  // H
    Vector y_mean_;  // C
    Matrix gram_;    // H x H (primal) or |T| x |T| (dual)
    Matrix rhs_;     // Xc^T Yc (primal only)
    bool dual_ = false;
};

/// Convenience wrapper: fits on all rows of `states`.
ReadoutModel ridge_fit(const Matrix& states, std::span<const int> labels, int num_classes, double lambda);

/// Per-row argmax of W_out x + b_out; ties go to the lowest class index.
std::vector<int> predict(const ReadoutModel& m, const Matrix& states);

/// Fraction of `mask` nodes with pred == truth. Throws UsageError on an empty
/// mask or length mismatch.
double accuracy(std::span<const int> pred, std::span<const int> truth, std::span<const NodeId> mask);

} // namespace gesn

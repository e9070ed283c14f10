#include "gesn/readout.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "gesn/error.hpp"

namespace gesn {

RidgeProblem::RidgeProblem(const Matrix& states, std::span<const NodeId> rows, std::span<const int> labels,
                           int num_classes) {
    if (rows.empty()) throw UsageError("ridge regression needs at least one training row");
    if (rows.size() != labels.size()) throw UsageError("row/label count mismatch");
    if (num_classes < 1) throw UsageError("need at least one class");

    const auto t = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index h = states.cols();
    xc_.resize(t, h);
    yc_ = Matrix::Zero(t, num_classes);
    for (Eigen::Index i = 0; i < t; ++i) {
        const NodeId r = rows[static_cast<std::size_t>(i)];
        if (r < 0 || r >= states.rows()) throw UsageError("training row out of range");
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= num_classes) throw UsageError("training label " + std::to_string(y) + " out of range");
        xc_.row(i) = states.row(r);
        yc_(i, y) = 1.0;
    }
    x_mean_ = xc_.colwise().mean().transpose();
    y_mean_ = yc_.colwise().mean().transpose();
    xc_.rowwise() -= x_mean_.transpose();
    yc_.rowwise() -= y_mean_.transpose();

    dual_ = h > t;
    if (dual_) {
        gram_.noalias() = xc_ * xc_.transpose();
    } else {
        gram_.noalias() = xc_.transpose() * xc_;
        rhs_.noalias() = xc_.transpose() * yc_;
    }
}

ReadoutModel RidgeProblem::fit(double lambda) const {
    if (!(lambda >= 0.0)) throw UsageError("lambda must be non-negative");

    Matrix w; // H x C
    if (lambda == 0.0) {
        // Unpenalized: minimum-norm least squares on the centered system. The
        // fit is well posed when [X 1] has full rank min(H + 1, |T|), i.e.
        // rank(Xc) >= min(H, |T| - 1) since Xc is orthogonal to the ones vector.
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(xc_);
        const double scale = std::max(1.0, xc_.cwiseAbs().maxCoeff());
        cod.setThreshold(1e-10 * scale);
        const Eigen::Index needed = std::min<Eigen::Index>(xc_.cols(), xc_.rows() - 1);
        if (cod.rank() < needed)
            throw NumericalError("singular ridge system (rank-deficient states); use lambda > 0");
        w = cod.solve(yc_);
    } else {
        Matrix system = gram_;
        system.diagonal().array() += lambda;
        Eigen::LLT<Matrix> llt(system);
        if (llt.info() != Eigen::Success) throw NumericalError("ridge system is not positive definite");
        if (dual_)
            w.noalias() = xc_.transpose() * llt.solve(yc_);
        else
            w = llt.solve(rhs_);
    }
    if (!w.allFinite()) throw NumericalError("non-finite ridge solution");

    ReadoutModel m;
    m.lambda = lambda;
    m.w_out = w.transpose();
    m.b_out = y_mean_ - w.transpose() * x_mean_;
    return m;
}

ReadoutModel ridge_fit(const Matrix& states, std::span<const int> labels, int num_classes, double lambda) {
    std::vector<NodeId> rows(static_cast<std::size_t>(states.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<NodeId>(i);
    return RidgeProblem(states, rows, labels, num_classes).fit(lambda);
}

std::vector<int> predict(const ReadoutModel& m, const Matrix& states) {
    if (static_cast<std::size_t>(states.cols()) != m.units())
        throw UsageError("state width " + std::to_string(states.cols()) + " does not match readout width " +
                         std::to_string(m.units()));
    Matrix scores = states * m.w_out.transpose();
    scores.rowwise() += m.b_out.transpose();
    std::vector<int> out(static_cast<std::size_t>(states.rows()));
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < scores.cols(); ++c)
            if (scores(i, c) > scores(i, best)) best = c;
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

double accuracy(std::span<const int> pred, std::span<const int> truth, std::span<const NodeId> mask) {
    if (pred.size() != truth.size()) throw UsageError("prediction/truth length mismatch");
    if (mask.empty()) throw UsageError("empty evaluation mask");
    std::size_t hits = 0;
    for (NodeId v : mask) {
        if (v < 0 || static_cast<std::size_t>(v) >= pred.size()) throw UsageError("mask index out of range");
        if (pred[static_cast<std::size_t>(v)] == truth[static_cast<std::size_t>(v)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(mask.size());
}

} // namespace gesn

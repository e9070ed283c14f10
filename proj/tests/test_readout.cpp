#include <gtest/gtest.h>

#include <numeric>

#include "gesn/error.hpp"
#include "gesn/readout.hpp"
#include "gesn/rng.hpp"
#include "oracles.hpp"

using namespace gesn;

namespace {

Matrix uniform_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
    return m;
}

std::vector<int> random_labels(Rng& rng, std::size_t n, int classes) {
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes)));
    // every class present
    for (int c = 0; c < classes && static_cast<std::size_t>(c) < n; ++c) y[static_cast<std::size_t>(c)] = c;
    return y;
}

Matrix one_hot(const std::vector<int>& labels, int classes) {
    Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), classes);
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    return y;
}

} // namespace

TEST(RidgeFit, IdentityInputsInterpolateAtZeroLambda) {
    const Matrix x = Matrix::Identity(3, 3);
    const std::vector<int> y{0, 1, 2};
    const ReadoutModel m = ridge_fit(x, y, 3, 0.0);
    EXPECT_EQ(predict(m, x), y);
    const Matrix scores = (x * m.w_out.transpose()).rowwise() + m.b_out.transpose();
    EXPECT_LT((scores - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RidgeFit, MatchesAugmentedNormalEquations) {
    Rng rng(30);
    const Matrix x = uniform_matrix(rng, 30, 8);
    const std::vector<int> y = random_labels(rng, 30, 3);
    const ReadoutModel m = ridge_fit(x, y, 3, 0.1);
    const auto [w, b] = oracle::ridge_augmented(x, y, 3, 0.1);
    EXPECT_LT((m.w_out.transpose() - w).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((m.b_out - b).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(RidgeFit, NormalEquationResidualIsSmall) {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto t = static_cast<Eigen::Index>(10 + rng.below(40));
        const auto h = static_cast<Eigen::Index>(2 + rng.below(20));
        const Matrix x = uniform_matrix(rng, t, h);
        const std::vector<int> y = random_labels(rng, static_cast<std::size_t>(t), 4);
        const double lambda = 1e-3 * static_cast<double>(1 + trial);
        const ReadoutModel m = ridge_fit(x, y, 4, lambda);
        const Matrix xc = x.rowwise() - x.colwise().mean();
        const Matrix yh = one_hot(y, 4);
        const Matrix yc = yh.rowwise() - yh.colwise().mean();
        const Matrix w = m.w_out.transpose();
        const Matrix gram = xc.transpose() * xc + lambda * Matrix::Identity(h, h);
        const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
        EXPECT_LT((gram * w - xc.transpose() * yc).cwiseAbs().maxCoeff(), 1e-8 * scale);
    }
}

TEST(RidgeFit, HugeLambdaPredictsMajorityClass) {
    Rng rng(32);
    const Matrix x = uniform_matrix(rng, 40, 6);
    std::vector<int> y(40, 2);
    for (int i = 0; i < 15; ++i) y[static_cast<std::size_t>(i)] = i % 2;
    const ReadoutModel m = ridge_fit(x, y, 3, 1e9);
    EXPECT_LT(m.w_out.cwiseAbs().maxCoeff(), 1e-6);
    for (int p : predict(m, uniform_matrix(rng, 25, 6))) EXPECT_EQ(p, 2);
}

TEST(RidgeFit, ShrinkageIsMonotone) {
    Rng rng(33);
    const Matrix x = uniform_matrix(rng, 50, 10);
    const std::vector<int> y = random_labels(rng, 50, 3);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.0, 1e-5, 1e-3, 0.1, 1.0, 10.0, 100.0}) {
        const double norm = ridge_fit(x, y, 3, lambda).w_out.norm();
        EXPECT_LE(norm, prev * (1.0 + 1e-12)) << "lambda " << lambda;
        prev = norm;
    }
}

TEST(RidgeFit, DualSolveMatchesOracleWhenUnitsExceedRows) {
    Rng rng(34);
    const Matrix x = uniform_matrix(rng, 12, 40);
    const std::vector<int> y = random_labels(rng, 12, 3);
    std::vector<NodeId> rows(12);
    std::iota(rows.begin(), rows.end(), 0);
    const RidgeProblem problem(x, rows, y, 3);
    EXPECT_TRUE(problem.uses_dual());
    const ReadoutModel m = problem.fit(0.5);
    const auto [w, b] = oracle::ridge_augmented(x, y, 3, 0.5);
    EXPECT_LT((m.w_out.transpose() - w).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((m.b_out - b).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(RidgeFit, SubsetRowsEqualFittingOnSubmatrix) {
    Rng rng(35);
    const Matrix x = uniform_matrix(rng, 30, 5);
    const std::vector<NodeId> rows{1, 4, 7, 9, 12, 15, 20, 22, 28};
    const std::vector<int> y{0, 1, 0, 1, 1, 0, 1, 0, 0};
    Matrix sub(static_cast<Eigen::Index>(rows.size()), 5);
    for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    const RidgeProblem problem(x, rows, y, 2);
    for (double lambda : {1e-4, 1e-1, 10.0}) {
        const ReadoutModel a = problem.fit(lambda), b = ridge_fit(sub, y, 2, lambda);
        EXPECT_LT((a.w_out - b.w_out).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((a.b_out - b.b_out).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(RidgeFit, RankDeficientAtZeroLambdaErrors) {
    Matrix x(6, 3);
    x << 1, 2, 3, 2, 4, 6, 3, 6, 9, 1, 2, 3, 0, 0, 0, 5, 10, 15; // rank 1
    const std::vector<int> y{0, 1, 0, 1, 0, 1};
    try {
        ridge_fit(x, y, 2, 0.0);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
    }
    EXPECT_NO_THROW(ridge_fit(x, y, 2, 1e-3));
}

TEST(RidgeFit, RejectsBadInputs) {
    const Matrix x = Matrix::Identity(3, 3);
    EXPECT_THROW(ridge_fit(x, std::vector<int>{0, 1, 3}, 3, 0.1), UsageError);
    EXPECT_THROW(ridge_fit(x, std::vector<int>{0, 1, 2}, 3, -1.0), UsageError);
    EXPECT_THROW(ridge_fit(x, std::vector<int>{0, 1}, 3, 0.1), UsageError);
    EXPECT_THROW(ridge_fit(Matrix(0, 3), std::vector<int>{}, 3, 0.1), UsageError);
}

TEST(RidgeFit, ParameterCountIsClassesTimesUnitsPlusOne) {
    Rng rng(36);
    for (Eigen::Index h : {1, 7, 64}) {
        for (int c : {2, 5}) {
            const Matrix x = uniform_matrix(rng, 20, h);
            const ReadoutModel m = ridge_fit(x, random_labels(rng, 20, c), c, 0.1);
            EXPECT_EQ(m.parameter_count(), static_cast<std::size_t>(c) * (static_cast<std::size_t>(h) + 1));
        }
    }
}

TEST(Predict, ConstantScores) {
    ReadoutModel m;
    m.w_out = Matrix::Zero(3, 4);
    m.b_out = Vector(3);
    m.b_out << 0.1, 0.9, 0.3;
    Rng rng(1);
    for (int p : predict(m, uniform_matrix(rng, 5, 4))) EXPECT_EQ(p, 1);
}

TEST(Predict, TiesGoToLowestIndex) {
    ReadoutModel m;
    m.w_out = Matrix::Zero(3, 1);
    m.b_out = Vector(3);
    m.b_out << 0.5, 0.5, 0.2;
    EXPECT_EQ(predict(m, Matrix::Ones(2, 1)), (std::vector<int>{0, 0}));
}

TEST(Predict, InvariantUnderUniformBiasShift) {
    Rng rng(37);
    const Matrix x = uniform_matrix(rng, 40, 6);
    const ReadoutModel m = ridge_fit(x, random_labels(rng, 40, 4), 4, 0.01);
    const Matrix probe = uniform_matrix(rng, 100, 6);
    const std::vector<int> base = predict(m, probe);
    for (double shift : {-3.0, 0.25, 17.0}) {
        ReadoutModel shifted = m;
        shifted.b_out.array() += shift;
        EXPECT_EQ(predict(shifted, probe), base);
    }
}

TEST(Predict, WidthMismatchErrors) {
    ReadoutModel m;
    m.w_out = Matrix::Zero(2, 3);
    m.b_out = Vector::Zero(2);
    EXPECT_THROW(predict(m, Matrix::Zero(4, 2)), UsageError);
}

TEST(Accuracy, Examples) {
    const std::vector<NodeId> all{0, 1, 2, 3};
    const std::vector<int> a{0, 1, 1, 2}, b{0, 1, 2, 2};
    EXPECT_DOUBLE_EQ(accuracy(a, b, all), 0.75);
    EXPECT_DOUBLE_EQ(accuracy(b, b, all), 1.0);
    const std::vector<int> p{0, 1, 1, 0}, q{1, 0, 0, 1};
    EXPECT_DOUBLE_EQ(accuracy(p, q, all), 0.0);
    EXPECT_DOUBLE_EQ(accuracy(a, b, std::vector<NodeId>{2}), 0.0);
}

TEST(Accuracy, RejectsEmptyMaskAndLengthMismatch) {
    const std::vector<int> a{0, 1}, b{0};
    EXPECT_THROW(accuracy(a, a, std::vector<NodeId>{}), UsageError);
    EXPECT_THROW(accuracy(a, b, std::vector<NodeId>{0}), UsageError);
}

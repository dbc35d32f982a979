#include <cmath>

#include <gtest/gtest.h>

#include <shiftreg/problems.hpp>

#include "oracles.hpp"

using namespace shiftreg;
using oracle::Mat;
using oracle::Vec;

TEST(GenerateProblem, HilbertFirstRow) {
  const auto p = generate_problem({.kind = ProblemKind::hilbert, .dim = 3});
  EXPECT_DOUBLE_EQ(p.A(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(p.A(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(p.A(0, 2), 1.0 / 3.0);
  EXPECT_LE((p.f - p.A * p.y_exact).norm(), 0.0);
}

TEST(GenerateProblem, HilbertConditionGrowsQuickly) {
  double previous = 1.0;
  for (Index n : {4, 6, 8, 10}) {
    const auto eig = oracle::jacobi_eigen(generate_problem({.kind = ProblemKind::hilbert, .dim = n}).A);
    const double kappa = eig.values.maxCoeff() / eig.values.minCoeff();
    EXPECT_GT(kappa, previous * 1e2);
    previous = kappa;
  }
}

TEST(GenerateProblem, RankDeficientHasExactNullity) {
  const auto p = generate_problem({.kind = ProblemKind::rank_deficient_sym, .dim = 5, .null_dim = 2, .seed = 3});
  const SymmetricOperator<double> op(p.A);
  EXPECT_NEAR(null_projector(op).trace(), 2.0, 1e-10);
  const auto eig = oracle::jacobi_eigen(p.A);
  int small = 0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (std::abs(eig.values[k]) <= 1e-14 * p.A.norm()) { ++small; }
  }
  EXPECT_EQ(small, 2);
  // the reference solution is the minimal-norm one
  EXPECT_LE((null_projector(op) * p.y_exact).norm(), 1e-12);
}

TEST(GenerateProblem, GaussDeconvIsIllConditionedSymmetricToeplitz) {
  const auto p = generate_problem({.kind = ProblemKind::gauss_deconv, .dim = 64, .width = 3.0});
  EXPECT_EQ((p.A - p.A.transpose()).norm(), 0.0);
  for (Index i = 1; i < 64; ++i) {
    for (Index j = 1; j < 64; ++j) { EXPECT_DOUBLE_EQ(p.A(i, j), p.A(i - 1, j - 1)); }
  }
  const auto eig = oracle::jacobi_eigen(p.A);
  const double kappa = eig.values.cwiseAbs().maxCoeff() / eig.values.cwiseAbs().minCoeff();
  EXPECT_GT(kappa, 1e6);
}

TEST(GenerateProblem, SecondDerivativeStencil) {
  const auto p = generate_problem({.kind = ProblemKind::second_derivative_sym, .dim = 4});
  const double inv_h2 = 25.0;
  EXPECT_DOUBLE_EQ(p.A(0, 0), -2.0 * inv_h2);
  EXPECT_DOUBLE_EQ(p.A(0, 1), inv_h2);
  EXPECT_DOUBLE_EQ(p.A(0, 2), 0.0);
  EXPECT_NO_THROW(p.symmetric_operator());
}

TEST(GenerateProblem, FirstDerivativeIsRectangular) {
  const auto p = generate_problem({.kind = ProblemKind::first_derivative_rect, .dim = 64});
  EXPECT_EQ(p.A.rows(), 64);
  EXPECT_EQ(p.A.cols(), 65);
  EXPECT_DOUBLE_EQ(p.A(0, 0), -64.0);
  EXPECT_DOUBLE_EQ(p.A(0, 1), 64.0);
  EXPECT_EQ(p.y_exact.size(), 65);
  EXPECT_NEAR(p.y_exact[0], 0.0, 1e-15);
  EXPECT_NEAR(p.y_exact[64], 0.0, 1e-14);
  EXPECT_THROW(p.symmetric_operator(), invalid_input);
}

TEST(GenerateProblem, ExactSolutionChoices) {
  auto spec = ProblemSpec{.kind = ProblemKind::hilbert, .dim = 4, .exact_solution = ExactSolution::ones};
  EXPECT_EQ(generate_problem(spec).y_exact, Vec::Ones(4));
  spec.exact_solution = ExactSolution::custom;
  spec.custom_solution = (Vec(4) << 1, 2, 3, 4).finished();
  EXPECT_EQ(generate_problem(spec).y_exact, spec.custom_solution);
  spec.custom_solution = Vec::Ones(3);
  EXPECT_THROW(generate_problem(spec), invalid_input);
}

TEST(GenerateProblem, InvalidSpecs) {
  EXPECT_THROW(generate_problem({.kind = ProblemKind::hilbert, .dim = 0}), invalid_input);
  EXPECT_THROW(generate_problem({.kind = ProblemKind::rank_deficient_sym, .dim = 3, .null_dim = 3}), invalid_input);
  EXPECT_THROW(generate_problem({.kind = ProblemKind::gauss_deconv, .dim = 8, .width = 0.0}), invalid_input);
  EXPECT_THROW(generate_problem({.kind = ProblemKind::hilbert, .dim = 4, .dim2 = 5}), invalid_input);
  EXPECT_THROW(parse_problem_kind("laplace"), invalid_input);
  EXPECT_EQ(parse_problem_kind("gauss_deconv"), ProblemKind::gauss_deconv);
}

TEST(GenerateProblem, SymmetricKindsPassSymmetryInvariant) {
  for (auto kind : {ProblemKind::hilbert, ProblemKind::gauss_deconv, ProblemKind::second_derivative_sym,
                    ProblemKind::rank_deficient_sym}) {
    const auto p = generate_problem({.kind = kind, .dim = 20});
    EXPECT_NO_THROW(SymmetricOperator<double>(p.A)) << to_string(kind);
  }
}

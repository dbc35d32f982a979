#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <shiftreg/shift.hpp>

#include "oracles.hpp"

using namespace shiftreg;
using oracle::Mat;
using oracle::Vec;
using cd = std::complex<double>;

namespace {

  SymmetricOperator<double> diag_op(std::initializer_list<double> values) {
    Vec d(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) { d[i++] = v; }
    return SymmetricOperator<double>(Mat(d.asDiagonal()));
  }

} // namespace

TEST(SolveShift, IdentityDividesByOnePlusI) {
  const auto u = solve_shift(SymmetricOperator<double>(Mat::Identity(2, 2)), Vec(Vec::Ones(2)), 1.0);
  EXPECT_NEAR(std::abs(u[0] - cd(0.5, -0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(u[1] - cd(0.5, -0.5)), 0.0, 1e-15);
}

TEST(SolveShift, PureNullSpaceScalesByOneOverA) {
  const double d = 0.3;
  const double a = 0.05;
  const auto u = solve_shift(diag_op({0.0}), Vec::Constant(1, d), a);
  EXPECT_NEAR(std::abs(u[0] - cd(0.0, -d / a)), 0.0, 1e-13);
  EXPECT_NEAR(u.norm(), d / a, 1e-13);
}

TEST(SolveShift, DiagonalMatchesModewiseFormula) {
  const auto op = diag_op({1.0, 2.0});
  const Vec f = (Vec(2) << 1, 2).finished();
  const auto u = solve_shift(op, f, 0.1);
  const auto spectral = solve_shift_spectral(eigendecompose(op), f, 0.1);
  for (Eigen::Index k = 0; k < 2; ++k) {
    const cd expected = f[k] / cd(op.matrix()(k, k), 0.1);
    EXPECT_NEAR(std::abs(u[k] - expected), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(spectral[k] - expected), 0.0, 1e-15);
  }
}

TEST(SolveShift, RejectsNonPositiveShiftAndShapeMismatch) {
  const auto op = diag_op({1.0, 2.0});
  EXPECT_THROW(solve_shift(op, Vec(Vec::Ones(2)), 0.0), invalid_input);
  EXPECT_THROW(solve_shift(op, Vec(Vec::Ones(2)), -1.0), invalid_input);
  EXPECT_THROW(solve_shift(op, Vec(Vec::Ones(3)), 1.0), invalid_input);
  EXPECT_THROW(solve_shift_spectral(eigendecompose(op), Vec(Vec::Ones(2)), 0.0), invalid_input);
}

TEST(SolveShift, AcceptsComplexRightHandSide) {
  const auto op = diag_op({2.0});
  Eigen::VectorXcd f(1);
  f[0] = cd(1.0, 1.0);
  const auto u = solve_shift(op, f, 1.0);
  EXPECT_NEAR(std::abs(u[0] - cd(1.0, 1.0) / cd(2.0, 1.0)), 0.0, 1e-15);
}

TEST(SolveShiftSpectral, TrivialCases) {
  const Vec f = oracle::gaussian_vector(3, 1);
  const auto u = solve_shift_spectral(eigendecompose(SymmetricOperator<double>(Mat::Identity(3, 3))), f, 1.0);
  EXPECT_LE((u - f.cast<cd>() / cd(1.0, 1.0)).norm(), 1e-15);

  const auto z = solve_shift_spectral(eigendecompose(diag_op({0.0})), Vec(Vec::Ones(1)), 0.5);
  EXPECT_NEAR(std::abs(z[0] - cd(0.0, -2.0)), 0.0, 1e-15);
}

TEST(SolveShiftSpectral, AgreesWithDirectSolveOnHilbertSix) {
  const SymmetricOperator<double> op(oracle::hilbert(6));
  const auto decomp = eigendecompose(op);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Vec f = oracle::gaussian_vector(6, seed);
    const auto direct = solve_shift(op, f, 1e-3);
    const auto spectral = solve_shift_spectral(decomp, f, 1e-3);
    EXPECT_LE((direct - spectral).norm(), 1e-10 * spectral.norm());
  }
}

TEST(ResolventNorm, BoundedByInverseShift) {
  const SymmetricOperator<double> op(oracle::hilbert(8));
  const auto decomp = eigendecompose(op);
  for (double a : {1.0, 1e-2, 1e-5}) {
    const double r = resolvent_norm(decomp, a);
    EXPECT_LE(r, 1.0 / a * (1.0 + 1e-15));
    // compare with the explicit inverse
    Eigen::MatrixXcd shifted = op.matrix().cast<cd>();
    shifted.diagonal().array() += cd(0.0, a);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted);
    EXPECT_NEAR(r, 1.0 / svd.singularValues().minCoeff(), 1e-8 * r);
  }
}

TEST(BoundEq4, TrivialCases) {
  const auto decomp = eigendecompose(diag_op({1.0}));
  EXPECT_DOUBLE_EQ(bound_eq4(decomp, Vec(Vec::Zero(1)), 0.5, 0.1), 0.2);
  EXPECT_NEAR(bound_eq4(decomp, Vec(Vec::Ones(1)), 1.0, 0.0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(bound_eq4(decomp, Vec(Vec::Ones(1)), 1.0, -1.0), invalid_input);
}

TEST(BoundEq4, NoiseFreeErrorEqualsBiasTerm) {
  // with delta = 0, u - y = -i a (A + i a)^{-1} y, so the bound is attained
  const SymmetricOperator<double> op(oracle::hilbert(6));
  const auto decomp = eigendecompose(op);
  const Vec y = Vec::Ones(6);
  const NoisyDatum<double> datum{op.matrix() * y, Vec::Zero(6), 0.0};
  for (double a : {1e-1, 1e-2, 1e-3}) {
    const auto report = shift_solve_report(op, decomp, datum, a, std::optional<Vec>{y});
    ASSERT_TRUE(report.error_vs_y.has_value());
    EXPECT_NEAR(*report.error_vs_y, report.bound_eq4, 1e-10 * (1.0 + y.norm()));
  }
}

TEST(BoundEq4, HoldsOnSeededNoiseDraws) {
  const SymmetricOperator<double> op(oracle::hilbert(6));
  const auto decomp = eigendecompose(op);
  const Vec y = minimal_norm_solution(op, Vec(op.matrix() * Vec::Ones(6))).y;
  const Vec f = op.matrix() * y;
  const double delta = 1e-4;
  const double a = std::sqrt(delta);
  const double bound = bound_eq4(decomp, y, a, delta);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto datum = make_noisy(f, delta, seed);
    const double error = (solve_shift(op, datum.f_delta, a) - y.cast<cd>()).norm();
    EXPECT_LE(error, bound + 1e-10 * (1.0 + y.norm())) << "seed " << seed;
  }
}

TEST(SpectralRemainder, TrivialCases) {
  EXPECT_EQ(spectral_remainder_eq5(eigendecompose(diag_op({2.0})), Vec(Vec::Zero(1)), 1.0), 0.0);
  EXPECT_NEAR(spectral_remainder_eq5(eigendecompose(diag_op({2.0})), Vec(Vec::Ones(1)), 2.0), 0.5, 1e-15);
}

TEST(SpectralRemainder, IgnoresNullSpaceComponent) {
  const auto decomp = eigendecompose(diag_op({0.0, 1.0}));
  const Vec y = (Vec(2) << 5.0, 1.0).finished();
  const Vec y_perp = (Vec(2) << 0.0, 1.0).finished();
  EXPECT_DOUBLE_EQ(spectral_remainder_eq5(decomp, y, 0.1), spectral_remainder_eq5(decomp, y_perp, 0.1));
  // square of the bound's bias term for y orthogonal to N
  const double bias = bound_eq4(decomp, y_perp, 0.1, 0.0);
  EXPECT_NEAR(spectral_remainder_eq5(decomp, y_perp, 0.1), bias * bias, 1e-15);
}

TEST(SpectralRemainder, DecreasesToZeroOnHilbertSix) {
  const SymmetricOperator<double> op(oracle::hilbert(6));
  const auto decomp = eigendecompose(op);
  const Vec y = op.matrix() * Vec::Ones(6);
  double previous = std::numeric_limits<double>::infinity();
  for (int e = 1; e <= 6; ++e) {
    const double r = spectral_remainder_eq5(decomp, y, std::pow(10.0, -e));
    EXPECT_LE(r, previous);
    previous = r;
  }
  EXPECT_LT(previous, 1e-6 * y.squaredNorm());
}

TEST(ShiftSchedule, PowerEvaluation) {
  EXPECT_NEAR(schedule_a(ShiftSchedule<double>(1.0, 0.5), 1e-4), 1e-2, 1e-17);
  EXPECT_DOUBLE_EQ(schedule_a(ShiftSchedule<double>(2.0, 0.5), 0.25), 1.0);
  EXPECT_THROW(schedule_a(ShiftSchedule<double>(), 0.0), invalid_input);
  EXPECT_THROW(ShiftSchedule<double>(1.0, 1.0), invalid_input);
  EXPECT_THROW(ShiftSchedule<double>(1.0, 0.0), invalid_input);
  EXPECT_THROW(ShiftSchedule<double>(0.0, 0.5), invalid_input);
}

TEST(ShiftSchedule, NoiseToShiftRatioDecreases) {
  const ShiftSchedule<double> schedule;
  double previous = std::numeric_limits<double>::infinity();
  for (int e = 2; e <= 8; ++e) {
    const double delta = std::pow(10.0, -e);
    const double ratio = delta / schedule_a(schedule, delta);
    EXPECT_LT(ratio, previous);
    previous = ratio;
  }
}

TEST(ConvergenceSweep, ErrorDecreasesOnDiagonalProblem) {
  const auto op = diag_op({1.0, 2.0, 3.0});
  const Vec y = Vec::Ones(3);
  const Vec f = op.matrix() * y;
  const auto report =
    convergence_sweep(op, f, std::vector<double>{1e-4, 1e-2, 1e-6}, ShiftSchedule<double>{}, 1, std::optional<Vec>{y});
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(report.rows[0].delta, 1e-2);
  EXPECT_DOUBLE_EQ(report.rows[2].delta, 1e-6);
  EXPECT_GT(report.rows[0].error, report.rows[1].error);
  EXPECT_GT(report.rows[1].error, report.rows[2].error);
  EXPECT_FALSE(report.has_violation());
  for (const auto& row : report.rows) {
    // ||u|| <= ||y|| + error
    EXPECT_LE(row.residual, 1e-10 * (3.0 + row.a) * (y.norm() + row.error));
  }
}

TEST(ConvergenceSweep, HalfExponentGivesTighterBoundThanNearLinear) {
  const auto op = diag_op({1.0, 2.0, 3.0});
  const Vec y = Vec::Ones(3);
  const Vec f = op.matrix() * y;
  const std::vector<double> deltas{1e-2, 1e-4, 1e-6};
  const auto half = convergence_sweep(op, f, deltas, ShiftSchedule<double>(1.0, 0.5), 1, std::optional<Vec>{y});
  const auto steep = convergence_sweep(op, f, deltas, ShiftSchedule<double>(1.0, 0.99), 1, std::optional<Vec>{y});
  // delta / a stays near 1 when a is almost linear in delta
  EXPECT_LT(half.rows.back().bound_eq4, 1e-2);
  EXPECT_GT(steep.rows.back().bound_eq4, 0.5);
  EXPECT_FALSE(half.has_violation());
  EXPECT_FALSE(steep.has_violation());
}

TEST(ConvergenceSweep, UsesMinimalNormSolutionWhenYIsOmitted) {
  const SymmetricOperator<double> op(oracle::hilbert(5));
  const Vec f = op.matrix() * Vec::Ones(5);
  const auto implicit = convergence_sweep(op, f, std::vector<double>{1e-3}, ShiftSchedule<double>{}, 3);
  const auto explicit_y = convergence_sweep(op, f, std::vector<double>{1e-3}, ShiftSchedule<double>{}, 3,
                                            std::optional<Vec>{minimal_norm_solution(op, f).y});
  EXPECT_DOUBLE_EQ(implicit.rows[0].error, explicit_y.rows[0].error);
}

TEST(ConvergenceSweep, RejectsZeroDelta) {
  const auto op = diag_op({1.0});
  EXPECT_THROW(convergence_sweep(op, Vec(Vec::Ones(1)), std::vector<double>{0.0}, ShiftSchedule<double>{}, 0),
               invalid_input);
}

TEST(ConvergenceSweep, ThreadCountDoesNotChangeResults) {
  const SymmetricOperator<double> op(oracle::hilbert(8));
  const Vec y = Vec::Ones(8);
  const Vec f = op.matrix() * y;
  const std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  const auto serial = convergence_sweep(op, f, deltas, ShiftSchedule<double>{}, 9, std::optional<Vec>{y}, {1});
  const auto threaded = convergence_sweep(op, f, deltas, ShiftSchedule<double>{}, 9, std::optional<Vec>{y}, {3});
  ASSERT_EQ(serial.rows.size(), threaded.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) {
    EXPECT_EQ(serial.rows[i].error, threaded.rows[i].error);
    EXPECT_EQ(serial.rows[i].residual, threaded.rows[i].residual);
  }
}

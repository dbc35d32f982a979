#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/QR>

#include <shiftreg/core.hpp>

namespace shiftreg {

  enum class ProblemKind { hilbert, gauss_deconv, second_derivative_sym, first_derivative_rect, rank_deficient_sym };

  enum class ExactSolution { ones, smooth_sine, custom };

  inline std::string_view to_string(ProblemKind kind) {
    switch (kind) {
      case ProblemKind::hilbert: return "hilbert";
      case ProblemKind::gauss_deconv: return "gauss_deconv";
      case ProblemKind::second_derivative_sym: return "second_derivative_sym";
      case ProblemKind::first_derivative_rect: return "first_derivative_rect";
      case ProblemKind::rank_deficient_sym: return "rank_deficient_sym";
    }
    return "unknown";
  }

  inline ProblemKind parse_problem_kind(std::string_view name) {
    for (auto kind : {ProblemKind::hilbert, ProblemKind::gauss_deconv, ProblemKind::second_derivative_sym,
                      ProblemKind::first_derivative_rect, ProblemKind::rank_deficient_sym}) {
      if (to_string(kind) == name) { return kind; }
    }
    throw invalid_input("unknown problem kind '" + std::string(name) + "'");
  }

  inline std::string_view to_string(ExactSolution s) {
    switch (s) {
      case ExactSolution::ones: return "ones";
      case ExactSolution::smooth_sine: return "smooth_sine";
      case ExactSolution::custom: return "custom";
    }
    return "unknown";
  }

  inline ExactSolution parse_exact_solution(std::string_view name) {
    if (name == "ones") { return ExactSolution::ones; }
    if (name == "smooth_sine") { return ExactSolution::smooth_sine; }
    throw invalid_input("unknown exact solution '" + std::string(name) + "' (expected ones, smooth_sine or a vector)");
  }

  /// Symmetric kinds act on R^dim; first_derivative_rect maps R^(dim+1) to R^dim.
  struct ProblemSpec {
    ProblemKind kind = ProblemKind::hilbert;
    Index dim = 10;
    std::optional<Index> dim2;
    double width = 3.0;         ///< gauss_deconv kernel width w
    Index null_dim = 2;         ///< rank_deficient_sym null-space dimension r
    std::uint64_t seed = 0;     ///< rank_deficient_sym basis seed
    ExactSolution exact_solution = ExactSolution::smooth_sine;
    Vector<double> custom_solution;

    [[nodiscard]] bool symmetric() const noexcept { return kind != ProblemKind::first_derivative_rect; }
    [[nodiscard]] Index domain_dim() const noexcept { return symmetric() ? dim : dim + 1; }
  };

  /**
   * @brief A generated instance: operator, exact solution and data f = A y_exact.
   *
   * For the rectangular derivative operator y_exact holds the function
   * samples and f = A y_exact is the exact derivative to be recovered.
   */
  struct Problem {
    ProblemSpec spec;
    Matrix<double> A;
    Vector<double> f;
    Vector<double> y_exact;

    [[nodiscard]] bool symmetric() const noexcept { return spec.symmetric(); }
    [[nodiscard]] SymmetricOperator<double> symmetric_operator() const {
      detail::require(symmetric(), "problem '" + std::string(to_string(spec.kind)) + "' is not symmetric");
      return SymmetricOperator<double>(A);
    }
    [[nodiscard]] GeneralOperator<double> general_operator() const { return GeneralOperator<double>(A); }
  };

  namespace detail {

    inline Vector<double> sample_grid(Index count, bool include_endpoints) {
      Vector<double> x(count);
      if (include_endpoints) {
        for (Index j = 0; j < count; ++j) { x[j] = double(j) / double(count - 1); }
      } else {
        for (Index j = 0; j < count; ++j) { x[j] = double(j + 1) / double(count + 1); }
      }
      return x;
    }

    inline Matrix<double> random_orthogonal(Index n, std::uint64_t seed) {
      std::mt19937_64 engine(seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      Matrix<double> g(n, n);
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) { g(i, j) = normal(engine); }
      }
      Eigen::HouseholderQR<Matrix<double>> qr(g);
      return qr.householderQ() * Matrix<double>::Identity(n, n);
    }

  } // namespace detail

  inline Problem generate_problem(const ProblemSpec& spec) {
    detail::require(spec.dim >= 1 && spec.dim <= max_dense_dim, "generate_problem: dim must lie in [1, 2000]");
    if (spec.dim2) {
      detail::require(spec.kind == ProblemKind::first_derivative_rect && *spec.dim2 == spec.dim + 1,
                      "generate_problem: dim2 is only valid for first_derivative_rect and must equal dim + 1");
    }
    const Index n = spec.dim;
    Problem p;
    p.spec = spec;
    Matrix<double> null_basis;

    switch (spec.kind) {
      case ProblemKind::hilbert:
        p.A.resize(n, n);
        for (Index i = 0; i < n; ++i) {
          for (Index j = 0; j < n; ++j) { p.A(i, j) = 1.0 / double(i + j + 1); }
        }
        break;
      case ProblemKind::gauss_deconv: {
        detail::require(spec.width > 0.0, "generate_problem: gauss_deconv width must be positive");
        const double two_w2 = 2.0 * spec.width * spec.width;
        // one normalization for every row keeps the matrix symmetric Toeplitz
        double total = 0.0;
        for (Index k = -(n - 1); k <= n - 1; ++k) { total += std::exp(-double(k * k) / two_w2); }
        p.A.resize(n, n);
        for (Index i = 0; i < n; ++i) {
          for (Index j = 0; j < n; ++j) { p.A(i, j) = std::exp(-double((i - j) * (i - j)) / two_w2) / total; }
        }
        break;
      }
      case ProblemKind::second_derivative_sym: {
        const double h = 1.0 / double(n + 1);
        p.A = Matrix<double>::Zero(n, n);
        for (Index i = 0; i < n; ++i) {
          p.A(i, i) = -2.0 / (h * h);
          if (i + 1 < n) { p.A(i, i + 1) = p.A(i + 1, i) = 1.0 / (h * h); }
        }
        break;
      }
      case ProblemKind::first_derivative_rect: {
        const double h = 1.0 / double(n);
        p.A = Matrix<double>::Zero(n, n + 1);
        for (Index i = 0; i < n; ++i) {
          p.A(i, i) = -1.0 / h;
          p.A(i, i + 1) = 1.0 / h;
        }
        break;
      }
      case ProblemKind::rank_deficient_sym: {
        detail::require(spec.null_dim >= 0 && spec.null_dim < n,
                        "generate_problem: rank_deficient_sym needs 0 <= r < dim");
        const Index rank = n - spec.null_dim;
        // nonzero spectrum: alternating signs, magnitudes 1 down to 1e-3
        Vector<double> d = Vector<double>::Zero(n);
        for (Index k = 0; k < rank; ++k) {
          const double magnitude = rank == 1 ? 1.0 : std::pow(10.0, -3.0 * double(k) / double(rank - 1));
          d[k] = (k % 2 == 0 ? 1.0 : -1.0) * magnitude;
        }
        const Matrix<double> v = detail::random_orthogonal(n, spec.seed);
        p.A = v * d.asDiagonal() * v.transpose();
        p.A = (0.5 * (p.A + p.A.transpose())).eval();
        null_basis = v.rightCols(spec.null_dim);
        break;
      }
    }

    const Index domain = spec.domain_dim();
    switch (spec.exact_solution) {
      case ExactSolution::ones: p.y_exact = Vector<double>::Ones(domain); break;
      case ExactSolution::smooth_sine: {
        const Vector<double> x = detail::sample_grid(domain, !spec.symmetric());
        p.y_exact = (2.0 * std::numbers::pi * x.array()).sin().matrix();
        break;
      }
      case ExactSolution::custom:
        detail::require_dims(domain, spec.custom_solution.size(), "generate_problem (custom solution)");
        p.y_exact = spec.custom_solution;
        break;
    }
    // the reference solution must be the minimal-norm one
    if (null_basis.cols() > 0) { p.y_exact -= null_basis * (null_basis.transpose() * p.y_exact); }
    p.f = p.A * p.y_exact;
    return p;
  }

} // namespace shiftreg

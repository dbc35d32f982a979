#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <shiftreg/core.hpp>
#include <shiftreg/shift.hpp>

namespace shiftreg {

  template <typename Real = double>
  class TikhonovParameters {
  public:
    explicit TikhonovParameters(Real alpha) : alpha_{alpha} {
      detail::require(std::isfinite(alpha_) && alpha_ > Real(0), "TikhonovParameters: alpha must be positive");
    }
    [[nodiscard]] Real alpha() const noexcept { return alpha_; }

  private:
    Real alpha_;
  };

  /// Solve (A^T A + alpha I) u = A^T f_delta by Cholesky.
  template <typename Real, typename Derived>
  Vector<Real> solve_tikhonov(const GeneralOperator<Real>& op, const Eigen::MatrixBase<Derived>& f_delta, Real alpha) {
    const TikhonovParameters<Real> params(alpha);
    detail::require_dims(op.rows(), f_delta.size(), "solve_tikhonov");
    const Matrix<Real>& a = op.matrix();
    Matrix<Real> normal = a.transpose() * a;
    normal.diagonal().array() += params.alpha();
    Eigen::LLT<Matrix<Real>> llt(normal);
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << "solve_tikhonov: Cholesky failed (alpha=" << alpha << ", ||A||_F=" << a.norm() << ")";
      throw numerical_failure(os.str());
    }
    return llt.solve(a.transpose() * f_delta.template cast<Real>());
  }

  template <typename Real, typename Derived>
  Vector<Real> solve_tikhonov(const SymmetricOperator<Real>& op, const Eigen::MatrixBase<Derived>& f_delta, Real alpha) {
    return solve_tikhonov(GeneralOperator<Real>(op), f_delta, alpha);
  }

  /// Spectral form: coefficients lambda_k <f, v_k> / (lambda_k^2 + alpha).
  template <typename Real, typename Derived>
  Vector<Real> solve_tikhonov_spectral(
    const SpectralDecomposition<Real>& decomp, const Eigen::MatrixBase<Derived>& f_delta, Real alpha) {
    const TikhonovParameters<Real> params(alpha);
    Vector<Real> coeff = decomp.coefficients(f_delta.template cast<Real>());
    for (Index k = 0; k < coeff.size(); ++k) {
      const Real lambda = decomp.eigenvalues[k];
      coeff[k] *= lambda / (lambda * lambda + params.alpha());
    }
    return decomp.eigenvectors * coeff;
  }

  /**
   * @brief Condition numbers of the shifted and the normal-equations systems.
   *
   * kappa_normal uses alpha = a^2. For symmetric A the singular values of
   * A + i a I are sqrt(lambda_k^2 + a^2), hence kappa_shift^2 == kappa_normal.
   */
  template <typename Real = double>
  struct CondReport {
    Real a{};
    Real kappa_shift{};
    Real kappa_normal{};
    Real ratio_check{};
  };

  template <typename Real>
  CondReport<Real> condition_numbers(const SpectralDecomposition<Real>& decomp, Real a) {
    detail::require_positive_shift(static_cast<double>(a));
    Real lo = std::numeric_limits<Real>::infinity();
    Real hi = 0;
    for (Index k = 0; k < decomp.eigenvalues.size(); ++k) {
      const Real lambda = decomp.eigenvalues[k];
      const Real m = lambda * lambda + a * a;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    CondReport<Real> r;
    r.a = a;
    r.kappa_shift = std::sqrt(hi) / std::sqrt(lo);
    r.kappa_normal = hi / lo;
    r.ratio_check = r.kappa_shift / std::sqrt(r.kappa_normal);
    return r;
  }

  /// kappa_2(A + i a I) from the singular values of the assembled complex matrix.
  template <typename Real>
  Real shift_condition_number(const SymmetricOperator<Real>& op, Real a) {
    detail::require_positive_shift(static_cast<double>(a));
    using C = std::complex<Real>;
    ComplexMatrix<Real> shifted = op.matrix().template cast<C>();
    shifted.diagonal().array() += C(Real(0), a);
    Eigen::BDCSVD<ComplexMatrix<Real>> svd(shifted);
    const auto& s = svd.singularValues();
    return s[0] / s[s.size() - 1];
  }

  enum class Method { shift, tikhonov };

  inline std::string_view to_string(Method m) {
    return m == Method::shift ? "shift" : "tikhonov";
  }

  inline Method parse_method(std::string_view name) {
    if (name == "shift") { return Method::shift; }
    if (name == "tikhonov") { return Method::tikhonov; }
    throw invalid_input("unknown method '" + std::string(name) + "' (expected shift or tikhonov)");
  }

  struct FlopStage {
    std::string name;
    std::int64_t flops;
  };

  /**
   * @brief Analytic operation count for one regularized solve of dimension n.
   *
   * Counts are arithmetic operations in the system's own scalar field: a
   * complex multiply-add on A + i a I counts as one operation, the same as
   * a real one on A^T A + alpha I.
   *
   *   shift:    assemble_shift  n                       (add i a to the diagonal)
   *             lu_factor       (4n^3 - 3n^2 - n) / 6   (LU, partial pivoting)
   *             lu_solve        2n^2 - n                (forward + back substitution)
   *
   *   tikhonov: normal_matrix   n(n+1)(2n-1) / 2        (A^T A, one triangle)
   *             add_alpha       n
   *             normal_rhs      n(2n-1)                 (A^T f)
   *             cholesky        n(n+1)(2n+1) / 6
   *             cholesky_solve  2n^2
   *
   * Leading terms: shift 2n^3/3, tikhonov 4n^3/3. The normal_matrix stage
   * has no counterpart in the shift list. Multiply the shift stages by 4
   * for a real-flop equivalent (one complex multiply-add = 4 real ones).
   */
  inline std::vector<FlopStage> flop_stages(Method method, std::int64_t n) {
    detail::require(n >= 1, "flop_model: dim must be >= 1");
    if (method == Method::shift) {
      return {
        {"assemble_shift", n},
        {"lu_factor", (4 * n * n * n - 3 * n * n - n) / 6},
        {"lu_solve", 2 * n * n - n},
      };
    }
    return {
      {"normal_matrix", n * (n + 1) * (2 * n - 1) / 2},
      {"add_alpha", n},
      {"normal_rhs", n * (2 * n - 1)},
      {"cholesky", n * (n + 1) * (2 * n + 1) / 6},
      {"cholesky_solve", 2 * n * n},
    };
  }

  inline std::int64_t flop_model(Method method, std::int64_t n) {
    std::int64_t total = 0;
    for (const auto& stage : flop_stages(method, n)) { total += stage.flops; }
    return total;
  }

  template <typename Real = double>
  struct FlopReport {
    Method method{};
    Index dim{};
    std::int64_t modeled_flops{};
    double measured_seconds{};
    Real kappa{};
  };

  /**
   * @brief Times one solve of each method on `op` and fills the flop model.
   *
   * The reported time is the minimum over `repeats` runs. Timings are
   * informational and depend on the dense kernels.
   */
  template <typename Real, typename Derived>
  std::vector<FlopReport<Real>> benchmark_methods(
    const SymmetricOperator<Real>& op, const Eigen::MatrixBase<Derived>& f, Real a, int repeats = 3) {
    detail::require_positive_shift(static_cast<double>(a));
    detail::require(repeats >= 1, "benchmark_methods: repeats must be >= 1");
    const Vector<Real> rhs = f.template cast<Real>();
    const auto cond = condition_numbers(eigendecompose(op), a);

    auto time_it = [&](auto&& solve) {
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        auto result = solve();
        const auto stop = std::chrono::steady_clock::now();
        // keep the result observable
        if (!result.allFinite()) { throw numerical_failure("benchmark_methods: non-finite solution"); }
        best = std::min(best, std::chrono::duration<double>(stop - start).count());
      }
      return best;
    };

    const double t_shift = time_it([&] { return solve_shift(op, rhs, a); });
    const double t_tik = time_it([&] { return solve_tikhonov(op, rhs, a * a); });
    const auto n = static_cast<std::int64_t>(op.dim());
    return {
      {Method::shift, op.dim(), flop_model(Method::shift, n), t_shift, cond.kappa_shift},
      {Method::tikhonov, op.dim(), flop_model(Method::tikhonov, n), t_tik, cond.kappa_normal},
    };
  }

  /// Side-by-side row of the shift method (a) and Tikhonov (alpha = a^2).
  template <typename Real = double>
  struct ComparisonRow {
    Real delta{};
    Real a{};
    Real alpha{};
    Real error_shift{};
    Real error_tikhonov{};
    Real kappa_shift{};
    Real kappa_normal{};
    Real ratio_check{};
    std::int64_t flops_shift{};
    std::int64_t flops_tikhonov{};
  };

  /// Row i uses noise stream i of `seed`; rows sorted by descending delta.
  template <typename Real, typename Derived>
  std::vector<ComparisonRow<Real>> compare_methods(
    const SymmetricOperator<Real>& op,
    const Eigen::MatrixBase<Derived>& f,
    std::vector<Real> deltas,
    const ShiftSchedule<Real>& schedule,
    std::uint64_t seed,
    const std::optional<Vector<Real>>& y_exact = std::nullopt,
    SweepOptions options = {}) {
    detail::require_dims(op.dim(), f.size(), "compare_methods");
    for (const Real d : deltas) {
      detail::require(std::isfinite(d) && d > Real(0), "compare_methods: deltas must be positive");
    }
    std::stable_sort(deltas.begin(), deltas.end(), std::greater<>{});
    const Vector<Real> f_exact = f.template cast<Real>();
    const Vector<Real> y = y_exact ? *y_exact : minimal_norm_solution(op, f_exact).y;
    const auto decomp = eigendecompose(op);
    const auto n = static_cast<std::int64_t>(op.dim());

    std::vector<ComparisonRow<Real>> rows(deltas.size());
    detail::parallel_rows(deltas.size(), options.threads, [&](std::size_t i) {
      const auto datum = make_noisy(f_exact, deltas[i], seed, static_cast<std::uint64_t>(i));
      const Real a = schedule_a(schedule, deltas[i]);
      const auto cond = condition_numbers(decomp, a);
      auto& row = rows[i];
      row.delta = deltas[i];
      row.a = a;
      row.alpha = a * a;
      row.error_shift = (solve_shift(op, datum.f_delta, a) - y.template cast<std::complex<Real>>()).norm();
      row.error_tikhonov = (solve_tikhonov(op, datum.f_delta, a * a) - y).norm();
      row.kappa_shift = cond.kappa_shift;
      row.kappa_normal = cond.kappa_normal;
      row.ratio_check = cond.ratio_check;
      row.flops_shift = flop_model(Method::shift, n);
      row.flops_tikhonov = flop_model(Method::tikhonov, n);
    });
    return rows;
  }

} // namespace shiftreg

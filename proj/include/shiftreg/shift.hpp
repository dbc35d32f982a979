#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include <Eigen/LU>

#include <shiftreg/core.hpp>

namespace shiftreg {

  /**
   * @brief Power-law schedule a(delta) = C * delta^p with 0 < p < 1.
   *
   * With p in (0,1), a(delta) -> 0 and delta / a(delta) = delta^(1-p) / C -> 0
   * as delta -> 0.
   */
  template <typename Real = double>
  class ShiftSchedule {
  public:
    explicit ShiftSchedule(Real coefficient = Real(1), Real exponent = Real(0.5))
        : coefficient_{coefficient}, exponent_{exponent} {
      detail::require(std::isfinite(coefficient_) && coefficient_ > Real(0),
                      "ShiftSchedule: coefficient C must be positive");
      detail::require(exponent_ > Real(0) && exponent_ < Real(1),
                      "ShiftSchedule: exponent p must lie in (0,1)");
    }

    [[nodiscard]] Real coefficient() const noexcept { return coefficient_; }
    [[nodiscard]] Real exponent() const noexcept { return exponent_; }

  private:
    Real coefficient_;
    Real exponent_;
  };

  template <typename Real>
  Real schedule_a(const ShiftSchedule<Real>& schedule, Real delta) {
    detail::require(std::isfinite(delta) && delta > Real(0), "schedule_a: delta must be positive");
    return schedule.coefficient() * std::pow(delta, schedule.exponent());
  }

  template <typename Real = double>
  struct ShiftSolveReport {
    ComplexVector<Real> u_delta;
    Real a{};
    Real delta{};
    std::optional<Real> error_vs_y;
    Real bound_eq4{};
    /// ||(A + i a I) u_delta - f_delta||
    Real residual{};
  };

  /// One row of a delta-sweep; column order is the report order.
  template <typename Real = double>
  struct ConvergenceRow {
    Real delta{};
    Real a{};
    Real error{};
    Real bound_eq4{};
    Real residual{};
    bool bound_violated{};
  };

  template <typename Real = double>
  struct ConvergenceReport {
    std::vector<ConvergenceRow<Real>> rows;

    [[nodiscard]] bool has_violation() const {
      return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.bound_violated; });
    }
  };

  namespace detail {

    inline void require_positive_shift(double a) {
      if (!(std::isfinite(a) && a > 0.0)) {
        std::ostringstream os;
        os << "shift parameter a must be positive (got " << a << ")";
        throw invalid_input(os.str());
      }
    }

  } // namespace detail

  /**
   * @brief Solve (A + i a I) u = f_delta by a dense complex LU factorization.
   *
   * For real symmetric A and a > 0 the spectrum of A + i a I lies on the
   * line Im z = a, so the system is uniquely solvable.
   */
  template <typename Real, typename Derived>
  ComplexVector<Real> solve_shift(const SymmetricOperator<Real>& op, const Eigen::MatrixBase<Derived>& f_delta, Real a) {
    detail::require_positive_shift(static_cast<double>(a));
    detail::require_dims(op.dim(), f_delta.size(), "solve_shift");
    using C = std::complex<Real>;
    ComplexMatrix<Real> shifted = op.matrix().template cast<C>();
    shifted.diagonal().array() += C(Real(0), a);
    Eigen::PartialPivLU<ComplexMatrix<Real>> lu(shifted);
    ComplexVector<Real> u = lu.solve(f_delta.template cast<C>());
    if (!u.allFinite()) {
      std::ostringstream os;
      os << "solve_shift: factorization broke down (dim=" << op.dim() << ", a=" << a << ")";
      throw numerical_failure(os.str());
    }
    return u;
  }

  /// Resolvent through the spectral theorem: sum_k <f, v_k> / (lambda_k + i a) v_k.
  template <typename Real, typename Derived>
  ComplexVector<Real> solve_shift_spectral(
    const SpectralDecomposition<Real>& decomp, const Eigen::MatrixBase<Derived>& f_delta, Real a) {
    detail::require_positive_shift(static_cast<double>(a));
    using C = std::complex<Real>;
    ComplexVector<Real> coeff = decomp.coefficients(f_delta.template cast<C>());
    for (Index k = 0; k < coeff.size(); ++k) { coeff[k] /= C(decomp.eigenvalues[k], a); }
    return decomp.eigenvectors.template cast<C>() * coeff;
  }

  /// ||(A + i a I)^{-1}||_2 = 1 / min_k sqrt(lambda_k^2 + a^2) <= 1/a.
  template <typename Real>
  Real resolvent_norm(const SpectralDecomposition<Real>& decomp, Real a) {
    detail::require_positive_shift(static_cast<double>(a));
    Real smallest = std::numeric_limits<Real>::infinity();
    for (Index k = 0; k < decomp.eigenvalues.size(); ++k) {
      smallest = std::min(smallest, std::hypot(decomp.eigenvalues[k], a));
    }
    return Real(1) / smallest;
  }

  /**
   * @brief Error bound delta/a + a ||(A + i a I)^{-1} y||.
   *
   * The resolvent norm is evaluated spectrally:
   * a * sqrt(sum_k |<y, v_k>|^2 / (lambda_k^2 + a^2)).
   */
  template <typename Real, typename Derived>
  Real bound_eq4(const SpectralDecomposition<Real>& decomp, const Eigen::MatrixBase<Derived>& y, Real a, Real delta) {
    detail::require_positive_shift(static_cast<double>(a));
    detail::require(delta >= Real(0), "bound_eq4: delta must be >= 0");
    const Vector<Real> coeff = decomp.coefficients(y.template cast<Real>());
    Real sum = 0;
    for (Index k = 0; k < coeff.size(); ++k) {
      const Real lambda = decomp.eigenvalues[k];
      sum += coeff[k] * coeff[k] / (lambda * lambda + a * a);
    }
    return delta / a + a * std::sqrt(sum);
  }

  /**
   * @brief a^2 * sum_{|lambda_k| > tol} |<y, v_k>|^2 / (lambda_k^2 + a^2).
   *
   * Null-space modes are excluded, which is the same as projecting y onto
   * the orthogonal complement of N first. Tends to 0 as a -> 0.
   */
  template <typename Real, typename Derived>
  Real spectral_remainder_eq5(
    const SpectralDecomposition<Real>& decomp,
    const Eigen::MatrixBase<Derived>& y,
    Real a,
    std::optional<std::type_identity_t<Real>> rank_tolerance = std::nullopt) {
    detail::require_positive_shift(static_cast<double>(a));
    const Real tol = rank_tolerance.value_or(default_rank_tolerance(decomp));
    const Vector<Real> coeff = decomp.coefficients(y.template cast<Real>());
    Real sum = 0;
    for (Index k = 0; k < coeff.size(); ++k) {
      const Real lambda = decomp.eigenvalues[k];
      if (std::abs(lambda) <= tol) { continue; }
      sum += coeff[k] * coeff[k] / (lambda * lambda + a * a);
    }
    return a * a * sum;
  }

  /// Solve at a single (f_delta, a), with error against y when y is known.
  template <typename Real>
  ShiftSolveReport<Real> shift_solve_report(
    const SymmetricOperator<Real>& op,
    const SpectralDecomposition<Real>& decomp,
    const NoisyDatum<Real>& datum,
    Real a,
    const std::optional<Vector<Real>>& y = std::nullopt) {
    using C = std::complex<Real>;
    ShiftSolveReport<Real> report;
    report.u_delta = solve_shift(op, datum.f_delta, a);
    report.a = a;
    report.delta = datum.delta;

    ComplexVector<Real> applied = op.matrix().template cast<C>() * report.u_delta;
    applied += C(Real(0), a) * report.u_delta;
    report.residual = (applied - datum.f_delta.template cast<C>()).norm();

    if (y) {
      report.error_vs_y = (report.u_delta - y->template cast<C>()).norm();
      report.bound_eq4 = bound_eq4(decomp, *y, a, datum.delta);
    } else {
      report.bound_eq4 = datum.delta / a;
    }
    return report;
  }

  namespace detail {

    /// Runs body(i) for i in [0, count) on up to `threads` workers.
    /// Each index is handled by exactly one worker, so results written to
    /// slot i do not depend on scheduling.
    template <typename Body>
    void parallel_rows(std::size_t count, unsigned threads, Body&& body) {
      threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
      if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) { body(i); }
        return;
      }
      std::vector<std::exception_ptr> errors(threads);
      {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            try {
              for (std::size_t i = t; i < count; i += threads) { body(i); }
            } catch (...) {
              errors[t] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) { std::rethrow_exception(e); }
      }
    }

  } // namespace detail

  struct SweepOptions {
    unsigned threads = 1;
  };

  /**
   * @brief Delta-sweep of the shift method under a(delta).
   *
   * Row i uses noise stream i of `seed`, so the report does not depend on
   * evaluation order. When `y_exact` is absent, y is the minimal-norm
   * solution of A y = f at the default rank tolerance. Rows are sorted by
   * descending delta; a row whose error exceeds the bound (plus the
   * 1e-10 * (1 + ||y||) rounding allowance) is flagged.
   */
  template <typename Real, typename Derived>
  ConvergenceReport<Real> convergence_sweep(
    const SymmetricOperator<Real>& op,
    const Eigen::MatrixBase<Derived>& f,
    std::vector<Real> deltas,
    const ShiftSchedule<Real>& schedule,
    std::uint64_t seed,
    const std::optional<Vector<Real>>& y_exact = std::nullopt,
    SweepOptions options = {}) {
    detail::require_dims(op.dim(), f.size(), "convergence_sweep");
    for (const Real d : deltas) {
      detail::require(std::isfinite(d) && d > Real(0), "convergence_sweep: deltas must be positive");
    }
    std::stable_sort(deltas.begin(), deltas.end(), std::greater<>{});

    const Vector<Real> f_exact = f.template cast<Real>();
    const Vector<Real> y = y_exact ? *y_exact : minimal_norm_solution(op, f_exact).y;
    detail::require_dims(op.dim(), y.size(), "convergence_sweep (y_exact)");
    const auto decomp = eigendecompose(op);
    const Real slack = Real(1e-10) * (Real(1) + y.norm());

    ConvergenceReport<Real> report;
    report.rows.resize(deltas.size());
    detail::parallel_rows(deltas.size(), options.threads, [&](std::size_t i) {
      const Real delta = deltas[i];
      const auto datum = make_noisy(f_exact, delta, seed, static_cast<std::uint64_t>(i));
      const Real a = schedule_a(schedule, delta);
      const auto solved = shift_solve_report(op, decomp, datum, a, std::optional<Vector<Real>>{y});
      auto& row = report.rows[i];
      row.delta = delta;
      row.a = a;
      row.error = *solved.error_vs_y;
      row.bound_eq4 = solved.bound_eq4;
      row.residual = solved.residual;
      row.bound_violated = row.error > row.bound_eq4 + slack;
    });
    return report;
  }

} // namespace shiftreg

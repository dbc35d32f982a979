#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include <shiftreg/core.hpp>
#include <shiftreg/shift.hpp>

namespace shiftreg {

  /**
   * @brief Operators of the fixed-point reformulation B v = F f of v = A f.
   *
   * Q = A A^T, T = A^T A, B = (I + Q)^{-1}, F = A (I + T)^{-1}, H = I - B.
   * `F_left` holds (I + Q)^{-1} A, kept only to check the commutation
   * identity; iteration uses `F`.
   */
  template <typename Real = double>
  struct EvaluatorOperators {
    GeneralOperator<Real> A;
    Matrix<Real> Q;
    Matrix<Real> T;
    Matrix<Real> B;
    Matrix<Real> F;
    Matrix<Real> F_left;
    Matrix<Real> H;
    SpectralDecomposition<Real> B_decomp;
    /// Orthogonal projector onto N* = ker A^T.
    Matrix<Real> adjoint_null_projector;

    [[nodiscard]] Index rows() const noexcept { return A.rows(); }
    [[nodiscard]] Index cols() const noexcept { return A.cols(); }
  };

  template <typename Real>
  EvaluatorOperators<Real> build_operators(const GeneralOperator<Real>& A) {
    const Index m = A.rows();
    const Index n = A.cols();
    detail::require(m <= max_dense_dim && n <= max_dense_dim, "build_operators: dimension exceeds dense limit");
    const Matrix<Real>& a = A.matrix();

    Matrix<Real> q = a * a.transpose();
    q = (Real(0.5) * (q + q.transpose())).eval();
    Matrix<Real> t = a.transpose() * a;
    t = (Real(0.5) * (t + t.transpose())).eval();

    const Matrix<Real> i_plus_q = Matrix<Real>::Identity(m, m) + q;
    const Matrix<Real> i_plus_t = Matrix<Real>::Identity(n, n) + t;
    Eigen::LLT<Matrix<Real>> llt_q(i_plus_q);
    Eigen::LLT<Matrix<Real>> llt_t(i_plus_t);
    if (llt_q.info() != Eigen::Success || llt_t.info() != Eigen::Success) {
      std::ostringstream os;
      os << "build_operators: Cholesky of I + AA^T or I + A^TA failed (" << m << "x" << n
         << ", ||A||_F=" << a.norm() << ")";
      throw numerical_failure(os.str());
    }

    Matrix<Real> b = llt_q.solve(Matrix<Real>::Identity(m, m));
    b = (Real(0.5) * (b + b.transpose())).eval();
    // A (I+T)^{-1} = ((I+T)^{-1} A^T)^T
    Matrix<Real> f = llt_t.solve(a.transpose()).transpose();
    Matrix<Real> f_left = llt_q.solve(a);
    Matrix<Real> h = Matrix<Real>::Identity(m, m) - b;

    auto b_decomp = eigendecompose(SymmetricOperator<Real>(b));
    auto p_star = null_projector(A, std::nullopt, NullSpace::adjoint);

    return {A, std::move(q), std::move(t), std::move(b), std::move(f), std::move(f_left),
            std::move(h), std::move(b_decomp), std::move(p_star)};
  }

  /// ||F||_2, the largest singular value of A (I + A^T A)^{-1}. Never exceeds 1/2.
  template <typename Real>
  Real verify_lemma1(const EvaluatorOperators<Real>& ops) {
    Eigen::BDCSVD<Matrix<Real>> svd(ops.F);
    return svd.singularValues().size() ? svd.singularValues()[0] : Real(0);
  }

  /// ||(I + Q)^{-1} A - A (I + T)^{-1}||_F
  template <typename Real>
  Real commutation_residual(const EvaluatorOperators<Real>& ops) {
    return (ops.F_left - ops.F).norm();
  }

  /// Numerical checks of the operator relations; tolerances are applied by callers.
  template <typename Real = double>
  struct OperatorDiagnostics {
    Real inverse_residual{};     ///< ||B (I + Q) - I||_F
    Real min_b_eigenvalue{};
    Real max_b_eigenvalue{};
    Real commutation_residual{}; ///< ||(I+Q)^{-1} A - A (I+T)^{-1}||_F
    Real lemma1_norm{};          ///< ||F||_2
  };

  template <typename Real>
  OperatorDiagnostics<Real> diagnose(const EvaluatorOperators<Real>& ops) {
    const Index m = ops.rows();
    OperatorDiagnostics<Real> d;
    d.inverse_residual = (ops.B * (Matrix<Real>::Identity(m, m) + ops.Q) - Matrix<Real>::Identity(m, m)).norm();
    d.min_b_eigenvalue = ops.B_decomp.eigenvalues.minCoeff();
    d.max_b_eigenvalue = ops.B_decomp.eigenvalues.maxCoeff();
    d.commutation_residual = commutation_residual(ops);
    d.lemma1_norm = verify_lemma1(ops);
    return d;
  }

  /**
   * @brief Iteration-count schedule n(delta) = ceil(C * delta^{-q}), 0 < q < 1.
   *
   * n(delta) -> infinity while delta * n(delta) <= C delta^{1-q} + delta -> 0.
   */
  template <typename Real = double>
  class IterationSchedule {
  public:
    explicit IterationSchedule(Real coefficient = Real(1), Real exponent = Real(0.5))
        : coefficient_{coefficient}, exponent_{exponent} {
      detail::require(std::isfinite(coefficient_) && coefficient_ > Real(0),
                      "IterationSchedule: coefficient C must be positive");
      detail::require(exponent_ > Real(0) && exponent_ < Real(1),
                      "IterationSchedule: exponent q must lie in (0,1)");
    }

    [[nodiscard]] Real coefficient() const noexcept { return coefficient_; }
    [[nodiscard]] Real exponent() const noexcept { return exponent_; }

  private:
    Real coefficient_;
    Real exponent_;
  };

  /// Values within a few ulps of an integer are snapped before the ceiling,
  /// so that e.g. delta = 1e-4, q = 1/2 gives exactly 100.
  template <typename Real>
  Index schedule_n(const IterationSchedule<Real>& schedule, Real delta) {
    detail::require(std::isfinite(delta) && delta > Real(0), "schedule_n: delta must be positive");
    const Real x = schedule.coefficient() * std::pow(delta, -schedule.exponent());
    detail::require(std::isfinite(x) && x < Real(std::numeric_limits<std::int32_t>::max()),
                    "schedule_n: iteration count overflows");
    const Real nearest = std::round(x);
    const Real snapped = std::abs(x - nearest) <= Real(8) * std::numeric_limits<Real>::epsilon() * x ? nearest : x;
    return std::max<Index>(1, static_cast<Index>(std::ceil(snapped)));
  }

  /// Result of moving a start vector onto the orthogonal complement of N*.
  template <typename Real = double>
  struct ProjectedStart {
    Vector<Real> v0;
    Real removed_norm{};
    bool exceeded_tolerance{};
  };

  template <typename Real, typename Derived>
  ProjectedStart<Real> project_start(const EvaluatorOperators<Real>& ops, const Eigen::MatrixBase<Derived>& v0) {
    detail::require_dims(ops.rows(), v0.size(), "project_start");
    const Vector<Real> v = v0.template cast<Real>();
    const Vector<Real> removed = ops.adjoint_null_projector * v;
    const Real removed_norm = removed.norm();
    return {v - removed, removed_norm, removed_norm > Real(1e-10) * (Real(1) + v.norm())};
  }

  /**
   * @brief n steps of v <- H v + F f_delta from v0.
   *
   * v0 is first projected onto the complement of N*; a warning goes to
   * std::clog when the projection removes more than 1e-10 * (1 + ||v0||).
   * n = 0 returns the projected v0.
   */
  template <typename Real, typename DerivedF, typename DerivedV>
  Vector<Real> iterate_eq7(
    const EvaluatorOperators<Real>& ops,
    const Eigen::MatrixBase<DerivedF>& f_delta,
    Index n,
    const Eigen::MatrixBase<DerivedV>& v0) {
    detail::require_dims(ops.cols(), f_delta.size(), "iterate_eq7 (f_delta)");
    detail::require(n >= 0, "iterate_eq7: n must be >= 0");
    auto start = project_start(ops, v0);
    if (start.exceeded_tolerance) {
      std::clog << "warning: iterate_eq7: start vector had a component of norm " << start.removed_norm
                << " in ker A^T; projected it out\n";
    }
    const Vector<Real> forcing = ops.F * f_delta.template cast<Real>();
    Vector<Real> v = std::move(start.v0);
    Vector<Real> next(v.size());
    for (Index step = 0; step < n; ++step) {
      next.noalias() = ops.H * v;
      next += forcing;
      v.swap(next);
    }
    return v;
  }

  template <typename Real, typename DerivedF>
  Vector<Real> iterate_eq7(const EvaluatorOperators<Real>& ops, const Eigen::MatrixBase<DerivedF>& f_delta, Index n) {
    return iterate_eq7(ops, f_delta, n, Vector<Real>::Zero(ops.rows()));
  }

  namespace detail {

    /// Eigenvalues of H = I - B clamped into [0, 1].
    template <typename Real>
    Real contraction_factor(Real b_eigenvalue) {
      return std::clamp(Real(1) - b_eigenvalue, Real(0), Real(1));
    }

  } // namespace detail

  /**
   * @brief Error bound n delta / 2 + sqrt(sum_k (1 - s_k)^{2n} |<w0, phi_k>|^2).
   *
   * (s_k, phi_k) are the eigenpairs of B. With w0 = v0 - A f this bounds
   * ||v_n - A f|| whenever ||f_delta - f|| <= delta.
   */
  template <typename Real, typename Derived>
  Real bound_eq9(const EvaluatorOperators<Real>& ops, const Eigen::MatrixBase<Derived>& w0, Index n, Real delta) {
    detail::require(n >= 0, "bound_eq9: n must be >= 0");
    detail::require(delta >= Real(0), "bound_eq9: delta must be >= 0");
    const Vector<Real> coeff = ops.B_decomp.coefficients(w0.template cast<Real>());
    Real tail = 0;
    for (Index k = 0; k < coeff.size(); ++k) {
      const Real h = detail::contraction_factor(ops.B_decomp.eigenvalues[k]);
      tail += std::pow(h, Real(2 * n)) * coeff[k] * coeff[k];
    }
    return Real(n) * delta / Real(2) + std::sqrt(tail);
  }

  /// sum over s_k >= h of (1 - s_k)^{2n} |<w0, phi_k>|^2.
  template <typename Real, typename Derived>
  Real tail_mass_eq10(const EvaluatorOperators<Real>& ops, const Eigen::MatrixBase<Derived>& w0, Real h, Index n) {
    detail::require(h >= Real(0) && h < Real(1), "tail_mass_eq10: h must lie in [0,1)");
    detail::require(n >= 0, "tail_mass_eq10: n must be >= 0");
    const Vector<Real> coeff = ops.B_decomp.coefficients(w0.template cast<Real>());
    Real mass = 0;
    for (Index k = 0; k < coeff.size(); ++k) {
      const Real s = ops.B_decomp.eigenvalues[k];
      if (s < h) { continue; }
      mass += std::pow(detail::contraction_factor(s), Real(2 * n)) * coeff[k] * coeff[k];
    }
    return mass;
  }

  template <typename Real = double>
  struct EvalReport {
    Vector<Real> v_delta;
    Index n_used{};
    Real delta{};
    std::optional<Real> error_vs_Af;
    std::optional<Real> bound_eq9;
    Real lemma1_norm{};
  };

  template <typename Real = double>
  struct EvalOptions {
    std::optional<Vector<Real>> v0;
    /// Overrides the schedule; required when delta == 0.
    std::optional<Index> n;
    /// Exact A f, enables the error and bound columns.
    std::optional<Vector<Real>> exact_Af;
  };

  template <typename Real, typename Derived>
  EvalReport<Real> evaluate_unbounded(
    const EvaluatorOperators<Real>& ops,
    const Eigen::MatrixBase<Derived>& f_delta,
    Real delta,
    const IterationSchedule<Real>& schedule,
    const EvalOptions<Real>& options = {}) {
    detail::require(std::isfinite(delta) && delta >= Real(0), "evaluate_unbounded: delta must be >= 0");
    detail::require(delta > Real(0) || options.n.has_value(),
                    "evaluate_unbounded: delta == 0 requires an explicit iteration count");
    const Index n = options.n ? *options.n : schedule_n(schedule, delta);
    const Vector<Real> v0 = options.v0 ? *options.v0 : Vector<Real>::Zero(ops.rows());

    EvalReport<Real> report;
    report.v_delta = iterate_eq7(ops, f_delta, n, v0);
    report.n_used = n;
    report.delta = delta;
    report.lemma1_norm = verify_lemma1(ops);
    if (options.exact_Af) {
      detail::require_dims(ops.rows(), options.exact_Af->size(), "evaluate_unbounded (exact_Af)");
      report.error_vs_Af = (report.v_delta - *options.exact_Af).norm();
      const Vector<Real> w0 = project_start(ops, v0).v0 - *options.exact_Af;
      report.bound_eq9 = bound_eq9(ops, w0, n, delta);
    }
    return report;
  }

  template <typename Real, typename Derived>
  EvalReport<Real> evaluate_unbounded(
    const GeneralOperator<Real>& A,
    const Eigen::MatrixBase<Derived>& f_delta,
    Real delta,
    const IterationSchedule<Real>& schedule,
    const EvalOptions<Real>& options = {}) {
    return evaluate_unbounded(build_operators(A), f_delta, delta, schedule, options);
  }

  /**
   * @brief Delta-sweep of the evaluator against exact A f.
   *
   * Row i uses noise stream i of `seed`; rows are sorted by descending delta.
   */
  template <typename Real, typename Derived>
  std::vector<EvalReport<Real>> evaluation_sweep(
    const EvaluatorOperators<Real>& ops,
    const Eigen::MatrixBase<Derived>& f,
    std::vector<Real> deltas,
    const IterationSchedule<Real>& schedule,
    std::uint64_t seed,
    SweepOptions options = {}) {
    detail::require_dims(ops.cols(), f.size(), "evaluation_sweep");
    for (const Real d : deltas) {
      detail::require(std::isfinite(d) && d > Real(0), "evaluation_sweep: deltas must be positive");
    }
    std::stable_sort(deltas.begin(), deltas.end(), std::greater<>{});
    const Vector<Real> f_exact = f.template cast<Real>();
    EvalOptions<Real> eval_options;
    eval_options.exact_Af = ops.A.matrix() * f_exact;

    std::vector<EvalReport<Real>> rows(deltas.size());
    detail::parallel_rows(deltas.size(), options.threads, [&](std::size_t i) {
      const auto datum = make_noisy(f_exact, deltas[i], seed, static_cast<std::uint64_t>(i));
      rows[i] = evaluate_unbounded(ops, datum.f_delta, deltas[i], schedule, eval_options);
    });
    return rows;
  }

} // namespace shiftreg
